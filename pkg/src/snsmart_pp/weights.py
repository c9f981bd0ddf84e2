"""Power parameters for the two stage-2 subgroups.

Four deterministic ways of choosing ``delta = (d1, d2)``, the weights on
stage-2 data from stage-1 responders (d1) and non-responders (d2):

* PLC, a penalised marginal-likelihood criterion,
* MLC, the ratio marginal likelihood (empirical Bayes),
* BOM, the Bhattacharyya overlap of stage-1 and stage-2 beta posteriors,
* FET, two-sided Fisher exact p-values comparing the two stages.

BOM and FET average over the treatments whose subgroup cell is non-empty;
a subgroup with no data at all gets weight 0 (it multiplies an empty
likelihood, so the value has no effect).

Log-objectives drop additive constants that do not depend on ``delta``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .numerics import lattice_minimize, log_beta
from .numerics.special import _log_beta_ufunc

__all__ = [
    "DeltaPair",
    "PriorConfig",
    "fisher_exact_two_sided",
    "bom_overlap",
    "delta_fet",
    "delta_bom",
    "log_m_star",
    "log_m",
    "plc_objective",
    "mlc_objective",
    "delta_plc",
    "delta_mlc",
    "select_delta",
    "WEIGHT_STRATEGIES",
]

FET_RELATIVE_SLACK = 1e-7


@dataclass(frozen=True)
class DeltaPair:
    """Power parameters; ``flags`` carries diagnostics from the selection rule."""

    d1: float
    d2: float
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        d1, d2 = float(self.d1), float(self.d2)
        if not (0.0 <= d1 <= 1.0 and 0.0 <= d2 <= 1.0):
            raise DomainError(f"power parameters must lie in [0, 1], got ({d1}, {d2})")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)
        object.__setattr__(self, "flags", tuple(self.flags))

    def __iter__(self):
        return iter((self.d1, self.d2))

    def as_array(self):
        return np.array([self.d1, self.d2])


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters shared by all estimators.

    ``a_pi, b_pi`` - beta prior on each response rate.
    ``a_delta, b_delta`` - beta prior on each power parameter (MPP only).
    ``beta_shape, beta_rate`` - gamma prior on both BJSM linkage parameters.
    """

    a_pi: float = 1.0
    b_pi: float = 1.0
    a_delta: float = 1.0
    b_delta: float = 1.0
    beta_shape: float = 1.0
    beta_rate: float = 1.0

    def __post_init__(self):
        for name in ("a_pi", "b_pi", "a_delta", "b_delta", "beta_shape", "beta_rate"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ConfigError(f"prior {name} must be a number, got {v!r}") from None
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"prior {name} must be positive and finite, got {v}")
            object.__setattr__(self, name, v)

    def to_dict(self):
        return {k: getattr(self, k) for k in
                ("a_pi", "b_pi", "a_delta", "b_delta", "beta_shape", "beta_rate")}

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise ConfigError(f"unknown prior fields: {sorted(unknown)}")
        return cls(**d)


# -- closeness measures -----------------------------------------------------

def fisher_exact_two_sided(n1, z1, n2, z2):
    """Two-sided Fisher exact p-value for ``z1/n1`` versus ``z2/n2``.

    Margins are fixed: rows ``n1, n2`` and ``z1 + z2`` responders.  A table
    counts as at least as extreme when its hypergeometric probability is no
    larger than the observed one times ``1 + 1e-7``.  Probabilities are
    compared and summed as exact integers over the common denominator
    ``C(n1 + n2, z1 + z2)``, so the only rounding is the final division.
    """
    for name, v in (("n1", n1), ("z1", z1), ("n2", n2), ("z2", z2)):
        if int(v) != v:
            raise DomainError(f"{name} must be an integer, got {v!r}")
    n1, z1, n2, z2 = int(n1), int(z1), int(n2), int(z2)
    if not (0 <= z1 <= n1 and 0 <= z2 <= n2 and n1 + n2 >= 1):
        raise DomainError(f"invalid 2x2 table n1={n1}, z1={z1}, n2={n2}, z2={z2}")
    total = n1 + n2
    resp = z1 + z2
    lo = max(0, resp - n2)
    hi = min(n1, resp)
    if lo == hi:
        return 1.0
    nums = [math.comb(n1, x) * math.comb(n2, resp - x) for x in range(lo, hi + 1)]
    observed = nums[z1 - lo]
    # num <= observed * (1 + 1e-7), in integers
    scale = 10**7
    cutoff = observed * (scale + 1)
    tail = sum(v for v in nums if v * scale <= cutoff)
    p = tail / math.comb(total, resp)
    return min(1.0, p)


def bom_overlap(p1, p2):
    """Bhattacharyya overlap of two beta densities, in (0, 1].

    ``p1`` and ``p2`` are ``(a, b)`` pairs (e.g. ``BetaParams``).
    """
    a1, b1 = p1
    a2, b2 = p2
    lb = log_beta((a1 + a2) / 2.0, (b1 + b2) / 2.0) - 0.5 * (log_beta(a1, b1) + log_beta(a2, b2))
    return min(1.0, math.exp(lb))


def _subgroup_average(values, occupied):
    out = []
    for j in range(2):
        keep = occupied[:, j]
        out.append(float(np.mean(values[keep, j])) if keep.any() else 0.0)
    return out


def delta_fet(sub, stage1):
    p = np.ones((3, 2))
    for k in range(3):
        for j in range(2):
            if sub.n2[k, j] > 0:
                p[k, j] = fisher_exact_two_sided(stage1.n1[k], stage1.z1[k], sub.n2[k, j], sub.z2[k, j])
    flags = tuple(f"subgroup{j + 1}_empty" for j in range(2) if not (sub.n2[:, j] > 0).any())
    return DeltaPair(*_subgroup_average(p, sub.n2 > 0), flags=flags)


def delta_bom(sub, stage1, prior):
    """Per-subgroup average overlap of stage-1 and stage-2 conjugate posteriors."""
    a1 = stage1.z1 + prior.a_pi
    b1 = stage1.n1 - stage1.z1 + prior.b_pi
    o = np.ones((3, 2))
    for k in range(3):
        for j in range(2):
            if sub.n2[k, j] > 0:
                a2 = sub.z2[k, j] + prior.a_pi
                b2 = sub.n2[k, j] - sub.z2[k, j] + prior.b_pi
                o[k, j] = bom_overlap((a1[k], b1[k]), (a2, b2))
    flags = tuple(f"subgroup{j + 1}_empty" for j in range(2) if not (sub.n2[:, j] > 0).any())
    return DeltaPair(*_subgroup_average(o, sub.n2 > 0), flags=flags)


# -- likelihood criteria ----------------------------------------------------

def _weighted_stage2(sub, d1, d2):
    """Stage-2 responder / non-responder pseudo-counts per treatment, shape (3, ...)."""
    d1 = np.asarray(d1, dtype=np.float64)[..., None]
    d2 = np.asarray(d2, dtype=np.float64)[..., None]
    z = sub.z2.astype(np.float64)
    f = (sub.n2 - sub.z2).astype(np.float64)
    succ = z[:, 0] * d1 + z[:, 1] * d2
    fail = f[:, 0] * d1 + f[:, 1] * d2
    return succ, fail  # trailing axis indexes treatment


def log_m_star(delta, sub, stage1, prior):
    """Log of the joint current/historical marginal, up to an additive constant.

    ``delta`` may be a ``DeltaPair`` or a pair of broadcastable arrays.
    """
    d1, d2 = delta
    succ, fail = _weighted_stage2(sub, d1, d2)
    a = stage1.z1 + succ + prior.a_pi
    b = stage1.n1 - stage1.z1 + fail + prior.b_pi
    out = _log_beta_ufunc(a, b).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def log_m(delta, sub, stage1, prior):
    """Log marginal likelihood of ``delta``, up to an additive constant."""
    d1, d2 = delta
    succ, fail = _weighted_stage2(sub, d1, d2)
    num = _log_beta_ufunc(stage1.z1 + succ + prior.a_pi,
                          stage1.n1 - stage1.z1 + fail + prior.b_pi).sum(axis=-1)
    den = _log_beta_ufunc(succ + prior.a_pi, fail + prior.b_pi).sum(axis=-1)
    out = num - den
    return float(out) if out.ndim == 0 else out


def _plc_penalties(sub):
    sizes = sub.n2.sum(axis=0)
    return [math.log(s) if s > 1 else None for s in sizes]


def plc_objective(delta, sub, stage1, prior):
    """``-2 log m*(delta) + sum_j log(n_j) / d_j`` over the subgroups with n_j > 1."""
    d1, d2 = delta
    g = -2.0 * log_m_star((d1, d2), sub, stage1, prior)
    for d, pen in zip((d1, d2), _plc_penalties(sub)):
        if pen is not None:
            with np.errstate(divide="ignore"):
                g = g + pen / np.asarray(d, dtype=np.float64)
    return g


def mlc_objective(delta, sub, stage1, prior):
    return -2.0 * log_m(delta, sub, stage1, prior)


def delta_plc(sub, stage1, prior, floor=0.001, coarse_step=0.01, refine_rounds=2):
    """Minimise the PLC objective over ``[floor, 1]^2``.

    A subgroup with at most one participant has no usable penalty; its
    weight is pinned at 0 and only the other coordinate is searched.
    """
    pens = _plc_penalties(sub)
    if all(p is None for p in pens):
        return DeltaPair(0.0, 0.0, flags=("no_stage2_data",))
    bounds = [(floor, 1.0) if p is not None else (0.0, 0.0) for p in pens]
    flags = tuple(f"subgroup{j + 1}_pinned" for j, p in enumerate(pens) if p is None)
    (d1, d2), _ = lattice_minimize(lambda x, y: plc_objective((x, y), sub, stage1, prior),
                                   bounds[0], bounds[1], coarse_step, refine_rounds)
    return DeltaPair(d1, d2, flags=flags)


def delta_mlc(sub, stage1, prior, coarse_step=0.01, refine_rounds=2):
    """Maximise the marginal likelihood of ``delta`` over ``[0, 1]^2``."""
    (d1, d2), _ = lattice_minimize(lambda x, y: mlc_objective((x, y), sub, stage1, prior),
                                   (0.0, 1.0), (0.0, 1.0), coarse_step, refine_rounds)
    return DeltaPair(d1, d2)


WEIGHT_STRATEGIES = ("PLC", "MLC", "BOM", "FET")


def select_delta(strategy, sub, stage1, prior):
    """Dispatch on a strategy name from ``WEIGHT_STRATEGIES``."""
    strategy = strategy.upper()
    if strategy == "PLC":
        return delta_plc(sub, stage1, prior)
    if strategy == "MLC":
        return delta_mlc(sub, stage1, prior)
    if strategy == "BOM":
        return delta_bom(sub, stage1, prior)
    if strategy == "FET":
        return delta_fet(sub, stage1)
    raise ConfigError(f"unknown weight strategy {strategy!r}; expected one of {WEIGHT_STRATEGIES}")
