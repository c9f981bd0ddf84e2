"""snSMART data model: participant records and the count tables built from them.

Three treatments A, B, C.  Stage-1 responders stay on their treatment in
stage 2; stage-1 non-responders switch to one of the other two.  Every
participant is assumed to complete both stages.

Count arrays are indexed by treatment position (A=0, B=1, C=2).  Transition
tables ``m_non`` and ``y_non`` are indexed ``[stage-1 treatment, stage-2
treatment]`` and have a zero diagonal.
"""

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConsistencyError, ParseError

__all__ = [
    "Treatment",
    "TREATMENTS",
    "CSV_COLUMNS",
    "ParticipantRecord",
    "TrialCounts",
    "SubgroupCounts",
    "parse_participants",
    "read_participants",
    "write_participants",
    "aggregate_counts",
    "pool_subgroups",
]


class Treatment(str, Enum):
    A = "A"
    B = "B"
    C = "C"

    @property
    def index(self):
        return "ABC".index(self.value)

    def __lt__(self, other):
        if not isinstance(other, Treatment):
            return NotImplemented
        return self.index < other.index


TREATMENTS = (Treatment.A, Treatment.B, Treatment.C)
CSV_COLUMNS = ("id", "stage1_treatment", "stage1_response", "stage2_treatment", "stage2_response")


@dataclass(frozen=True)
class ParticipantRecord:
    id: str
    stage1_treatment: Treatment
    stage1_response: bool
    stage2_treatment: Treatment
    stage2_response: bool

    def __post_init__(self):
        object.__setattr__(self, "stage1_treatment", Treatment(self.stage1_treatment))
        object.__setattr__(self, "stage2_treatment", Treatment(self.stage2_treatment))
        if self.stage1_response and self.stage2_treatment != self.stage1_treatment:
            raise ConsistencyError(
                f"participant {self.id!r}: stage-1 responder switched treatment "
                f"({self.stage1_treatment.value} -> {self.stage2_treatment.value})")
        if not self.stage1_response and self.stage2_treatment == self.stage1_treatment:
            raise ConsistencyError(
                f"participant {self.id!r}: stage-1 non-responder kept treatment "
                f"{self.stage1_treatment.value}")


def _frozen_int_array(values, shape, name):
    arr = np.array(values, dtype=np.int64)
    if arr.shape != shape:
        raise ConsistencyError(f"{name} must have shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


class _CountTable:
    _fields = ()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in self._fields)

    __hash__ = None

    def to_dict(self):
        d = {"treatments": [t.value for t in TREATMENTS]}
        d.update({f: getattr(self, f).tolist() for f in self._fields})
        return d

    @classmethod
    def from_dict(cls, d):
        treatments = d.get("treatments", ["A", "B", "C"])
        if list(treatments) != ["A", "B", "C"]:
            raise ConsistencyError(f"treatments must be ['A', 'B', 'C'], got {treatments!r}")
        try:
            return cls(**{f: d[f] for f in cls._fields})
        except KeyError as exc:
            raise ConsistencyError(f"missing count field {exc.args[0]!r}") from None


@dataclass(frozen=True, eq=False)
class TrialCounts(_CountTable):
    """Aggregated two-stage counts.

    n1, z1 : stage-1 assigned and responders per treatment.
    y_resp : stage-2 responders among the z1 stage-1 responders.
    m_non, y_non : stage-1 non-responders to k' moved to k, and how many of
        them responded in stage 2, indexed ``[k', k]``.
    """

    n1: np.ndarray
    z1: np.ndarray
    y_resp: np.ndarray
    m_non: np.ndarray
    y_non: np.ndarray

    _fields = ("n1", "z1", "y_resp", "m_non", "y_non")

    def __post_init__(self):
        for f in ("n1", "z1", "y_resp"):
            object.__setattr__(self, f, _frozen_int_array(getattr(self, f), (3,), f))
        for f in ("m_non", "y_non"):
            object.__setattr__(self, f, _frozen_int_array(getattr(self, f), (3, 3), f))
        if np.any(self.z1 < 0) or np.any(self.z1 > self.n1):
            raise ConsistencyError("need 0 <= z1 <= n1")
        if np.any(self.y_resp < 0) or np.any(self.y_resp > self.z1):
            raise ConsistencyError("need 0 <= y_resp <= z1")
        if np.any(self.y_non < 0) or np.any(self.y_non > self.m_non):
            raise ConsistencyError("need 0 <= y_non <= m_non")
        if np.any(np.diag(self.m_non) != 0) or np.any(np.diag(self.y_non) != 0):
            raise ConsistencyError("non-responders cannot repeat their stage-1 treatment")
        if np.any(self.m_non.sum(axis=1) != self.n1 - self.z1):
            raise ConsistencyError("stage-1 non-responders must all appear in stage 2")

    @classmethod
    def zeros(cls):
        return cls(np.zeros(3), np.zeros(3), np.zeros(3), np.zeros((3, 3)), np.zeros((3, 3)))

    @property
    def n_total(self):
        return int(self.n1.sum())


@dataclass(frozen=True, eq=False)
class SubgroupCounts(_CountTable):
    """Stage-2 counts split into subgroup 0 (stage-1 responders) and 1 (non-responders).

    ``n2[k, j]`` participants received treatment k in stage 2 within subgroup
    j, and ``z2[k, j]`` of them responded.
    """

    n2: np.ndarray
    z2: np.ndarray

    _fields = ("n2", "z2")

    def __post_init__(self):
        object.__setattr__(self, "n2", _frozen_int_array(self.n2, (3, 2), "n2"))
        object.__setattr__(self, "z2", _frozen_int_array(self.z2, (3, 2), "z2"))
        if np.any(self.z2 < 0) or np.any(self.z2 > self.n2):
            raise ConsistencyError("need 0 <= z2 <= n2")


def _parse_response(value, rownum, column):
    if value == "1":
        return True
    if value == "0":
        return False
    raise ParseError(f"row {rownum}: {column} must be 0 or 1, got {value!r}")


def _parse_treatment(value, rownum, column):
    try:
        return Treatment(value)
    except ValueError:
        raise ParseError(f"row {rownum}: {column} must be one of A, B, C, got {value!r}") from None


def parse_participants(source):
    """Parse participant CSV text into validated records, in input order.

    ``source`` is an open text file or any iterable of CSV lines; the first
    line must be the header ``id,stage1_treatment,stage1_response,
    stage2_treatment,stage2_response``.  Row numbers in errors count the
    header as row 1.
    """
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("row 1: missing header") from None
    header = [h.strip() for h in header]
    if tuple(header) != CSV_COLUMNS:
        raise ParseError(f"row 1: expected header {','.join(CSV_COLUMNS)}, got {','.join(header)}")
    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise ParseError(f"row {rownum}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        pid, t1, r1, t2, r2 = (c.strip() for c in row)
        if not pid:
            raise ParseError(f"row {rownum}: empty id")
        records.append(ParticipantRecord(
            pid,
            _parse_treatment(t1, rownum, "stage1_treatment"),
            _parse_response(r1, rownum, "stage1_response"),
            _parse_treatment(t2, rownum, "stage2_treatment"),
            _parse_response(r2, rownum, "stage2_response"),
        ))
    return records


def read_participants(path):
    with open(path, newline="") as fh:
        return parse_participants(fh)


def write_participants(records, dest=None):
    """Write records as CSV to ``dest`` (path or text file); return the text if ``dest`` is None."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([r.id, r.stage1_treatment.value, int(r.stage1_response),
                         r.stage2_treatment.value, int(r.stage2_response)])
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return None


def aggregate_counts(records):
    n1 = np.zeros(3, dtype=np.int64)
    z1 = np.zeros(3, dtype=np.int64)
    y_resp = np.zeros(3, dtype=np.int64)
    m_non = np.zeros((3, 3), dtype=np.int64)
    y_non = np.zeros((3, 3), dtype=np.int64)
    for r in records:
        k1 = r.stage1_treatment.index
        n1[k1] += 1
        if r.stage1_response:
            z1[k1] += 1
            y_resp[k1] += r.stage2_response
        else:
            k2 = r.stage2_treatment.index
            m_non[k1, k2] += 1
            y_non[k1, k2] += r.stage2_response
    return TrialCounts(n1, z1, y_resp, m_non, y_non)


def pool_subgroups(counts):
    """Collapse stage-2 outcomes into the responder / non-responder subgroups."""
    n2 = np.column_stack([counts.z1, counts.m_non.sum(axis=0)])
    z2 = np.column_stack([counts.y_resp, counts.y_non.sum(axis=0)])
    return SubgroupCounts(n2, z2)
