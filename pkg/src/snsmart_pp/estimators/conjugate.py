"""Power prior posteriors with fixed power parameters (closed form)."""

import math

import numpy as np
from scipy import special

from ..errors import ConfigError
from ..weights import DeltaPair, select_delta
from .results import EstimateResult, PosteriorSummary

__all__ = ["posterior_shapes", "fit_fixed_delta", "fit_power_prior", "beta_summary"]


def posterior_shapes(stage1, sub, delta, prior):
    """Beta shapes of each response rate's posterior given fixed ``delta``."""
    d = np.asarray(tuple(delta)[:2], dtype=np.float64)
    a = stage1.z1 + sub.z2 @ d + prior.a_pi
    b = stage1.n1 - stage1.z1 + (sub.n2 - sub.z2) @ d + prior.b_pi
    return a, b


def beta_summary(a, b):
    mean = a / (a + b)
    sd = math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
    lo, hi = special.betaincinv(a, b, [0.025, 0.975])
    return PosteriorSummary(float(mean), sd, float(lo), float(hi))


def fit_fixed_delta(stage1, sub, delta, prior, method="FIXED"):
    if not isinstance(delta, DeltaPair):
        delta = DeltaPair(*delta)
    a, b = posterior_shapes(stage1, sub, delta, prior)
    summaries = {f"pi_{t}": beta_summary(a[i], b[i]) for i, t in enumerate("ABC")}
    return EstimateResult(
        method=method,
        pi_hat=tuple(a / (a + b)),
        delta_hat=delta,
        summaries=summaries,
        diagnostics={"posterior_shapes": {t: [float(a[i]), float(b[i])] for i, t in enumerate("ABC")},
                     "flags": list(delta.flags)},
    )


def fit_power_prior(stage1, sub, prior, strategy):
    """Choose ``delta`` by ``strategy`` then return the fixed-delta posterior.

    ``strategy`` is one of ``"PLC"``, ``"MLC"``, ``"BOM"``, ``"FET"``,
    ``"FIXED0"``, ``"FIXED1"``, or an explicit ``DeltaPair`` / pair of floats.
    """
    if isinstance(strategy, str):
        name = strategy.upper()
        if name == "FIXED0":
            return fit_fixed_delta(stage1, sub, DeltaPair(0.0, 0.0), prior, method=name)
        if name == "FIXED1":
            return fit_fixed_delta(stage1, sub, DeltaPair(1.0, 1.0), prior, method=name)
        try:
            delta = select_delta(name, sub, stage1, prior)
        except ConfigError:
            raise ConfigError(f"unknown power prior strategy {strategy!r}") from None
        return fit_fixed_delta(stage1, sub, delta, prior, method=name)
    return fit_fixed_delta(stage1, sub, strategy, prior, method="FIXED")
