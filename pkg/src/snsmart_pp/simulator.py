"""Synthetic snSMART trials.

Stage 1 splits ``n_total`` participants evenly across A, B and C and draws a
Bernoulli response for each.  Responders stay on their treatment; each
non-responder moves to one of the other two treatments with probability 1/2.
Stage-2 responses are Bernoulli with the rate for the (stage-2, stage-1)
treatment pair.

Every participant consumes the same three uniforms whatever the rates are,
so two scenarios simulated from one stream share their random numbers.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerics.rng import as_generator
from .trial_data import TREATMENTS, ParticipantRecord, TrialCounts

__all__ = [
    "ScenarioSpec",
    "builtin_scenario",
    "load_scenario",
    "simulate_participants",
    "simulate_trial",
    "BUILTIN_SCENARIOS",
]


@dataclass(frozen=True)
class ScenarioSpec:
    """True response rates.

    ``stage2_rates[k][k1]`` is the stage-2 response rate on treatment ``k``
    for participants who started on ``k1``; the diagonal applies to stage-1
    responders, off-diagonal entries to non-responders.
    """

    name: str
    stage1_rates: tuple
    stage2_rates: tuple

    def __post_init__(self):
        s1 = np.asarray(self.stage1_rates, dtype=np.float64)
        s2 = np.asarray(self.stage2_rates, dtype=np.float64)
        if s1.shape != (3,) or s2.shape != (3, 3):
            raise ConfigError(f"scenario {self.name!r}: need 3 stage-1 rates and a 3x3 stage-2 matrix")
        if not (np.all((s1 >= 0) & (s1 <= 1)) and np.all((s2 >= 0) & (s2 <= 1))):
            raise ConfigError(f"scenario {self.name!r}: rates must lie in [0, 1]")
        object.__setattr__(self, "name", str(self.name))
        object.__setattr__(self, "stage1_rates", tuple(float(v) for v in s1))
        object.__setattr__(self, "stage2_rates", tuple(tuple(float(v) for v in row) for row in s2))

    def to_dict(self):
        return {"name": self.name, "stage1_rates": list(self.stage1_rates),
                "stage2_rates": [list(r) for r in self.stage2_rates]}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d.get("name", "custom"), d["stage1_rates"], d["stage2_rates"])
        except KeyError as exc:
            raise ConfigError(f"scenario is missing {exc.args[0]!r}") from None


_LOW = (0.2, 0.3, 0.4)
_FLAT = (0.3, 0.3, 0.3)

# rows: stage-2 treatment A, B, C; columns: stage-1 treatment A, B, C
BUILTIN_SCENARIOS = {
    1: ScenarioSpec("1", _LOW, ((0.2, 0.2, 0.2), (0.3, 0.3, 0.3), (0.4, 0.4, 0.4))),
    2: ScenarioSpec("2", _LOW, ((0.4, 0.2, 0.2), (0.3, 0.6, 0.3), (0.4, 0.4, 0.8))),
    3: ScenarioSpec("3", _LOW, ((0.2, 0.1, 0.1), (0.15, 0.3, 0.15), (0.2, 0.2, 0.4))),
    4: ScenarioSpec("4", _LOW, ((0.4, 0.3, 0.3), (0.45, 0.6, 0.45), (0.6, 0.6, 0.8))),
    5: ScenarioSpec("5", _LOW, ((0.6, 0.4, 0.4), (0.6, 0.6, 0.15), (0.2, 0.2, 0.6))),
    6: ScenarioSpec("6", _FLAT, ((0.3, 0.3, 0.3), (0.3, 0.3, 0.3), (0.3, 0.3, 0.3))),
    7: ScenarioSpec("7", _FLAT, ((0.2, 0.2, 0.2), (0.3, 0.3, 0.3), (0.4, 0.4, 0.4))),
}


def builtin_scenario(scenario_id):
    try:
        return BUILTIN_SCENARIOS[int(scenario_id)]
    except (KeyError, ValueError, TypeError):
        raise ConfigError(f"scenario id must be 1-7, got {scenario_id!r}") from None


def load_scenario(ref):
    """A builtin id (int or digit string) or the path of a scenario JSON file."""
    if isinstance(ref, int) or (isinstance(ref, str) and ref.strip().isdigit()):
        return builtin_scenario(int(ref))
    if isinstance(ref, ScenarioSpec):
        return ref
    try:
        with open(ref) as fh:
            return ScenarioSpec.from_dict(json.load(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {ref!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {ref!r} is not valid JSON: {exc}") from exc


# alternatives[k] = the two treatments a non-responder to k can move to
_ALTERNATIVES = np.array([[1, 2], [0, 2], [0, 1]])


def _draw(spec, n_total, rng):
    if int(n_total) != n_total or n_total <= 0 or n_total % 3:
        raise ConfigError(f"n_total must be a positive multiple of 3, got {n_total!r}")
    n_total = int(n_total)
    g = as_generator(rng)
    s1 = np.asarray(spec.stage1_rates)
    s2 = np.asarray(spec.stage2_rates)
    arm1 = np.repeat(np.arange(3), n_total // 3)
    u1 = g.random(n_total)
    u_switch = g.random(n_total)
    u2 = g.random(n_total)
    resp1 = u1 < s1[arm1]
    switched = _ALTERNATIVES[arm1, (u_switch >= 0.5).astype(np.int64)]
    arm2 = np.where(resp1, arm1, switched)
    resp2 = u2 < s2[arm2, arm1]
    return arm1, resp1, arm2, resp2


def simulate_participants(spec, n_total, rng):
    """Participant-level records with ids ``p1 .. pN``."""
    arm1, resp1, arm2, resp2 = _draw(spec, n_total, rng)
    return [ParticipantRecord(f"p{i + 1}", TREATMENTS[a1], bool(r1), TREATMENTS[a2], bool(r2))
            for i, (a1, r1, a2, r2) in enumerate(zip(arm1, resp1, arm2, resp2))]


def simulate_trial(spec, n_total, rng):
    """Aggregated counts; equals ``aggregate_counts(simulate_participants(...))`` for the same stream."""
    arm1, resp1, arm2, resp2 = _draw(spec, n_total, rng)
    n1 = np.bincount(arm1, minlength=3)
    z1 = np.bincount(arm1[resp1], minlength=3)
    y_resp = np.bincount(arm1[resp1 & resp2], minlength=3)
    non = ~resp1
    m_non = np.zeros((3, 3), dtype=np.int64)
    y_non = np.zeros((3, 3), dtype=np.int64)
    np.add.at(m_non, (arm1[non], arm2[non]), 1)
    np.add.at(y_non, (arm1[non & resp2], arm2[non & resp2]), 1)
    return TrialCounts(n1, z1, y_resp, m_non, y_non)
