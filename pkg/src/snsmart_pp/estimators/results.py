"""Result containers, MCMC settings and chain summaries."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigError
from ..numerics.rng import RngStream
from ..weights import DeltaPair

__all__ = [
    "PosteriorSummary",
    "McmcConfig",
    "EstimateResult",
    "effective_sample_size",
    "summarize_draws",
]


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    sd: float
    lower: float
    upper: float
    ess: float | None = None

    def to_dict(self):
        d = {"mean": self.mean, "sd": self.sd, "interval_95": [self.lower, self.upper]}
        if self.ess is not None:
            d["ess"] = self.ess
        return d


@dataclass(frozen=True)
class McmcConfig:
    """Random-walk Metropolis settings.

    Step sizes are proposal standard deviations on the logit scale (response
    rates, power parameters) or log scale (linkage parameters).  During
    burn-in each step is doubled or halved every ``adapt_every`` iterations to
    keep acceptance within [0.2, 0.5]; it is frozen afterwards.
    """

    burn_in: int = 2000
    kept_samples: int = 10000
    thin: int = 1
    step_logit_pi: float = 1.0
    step_logit_delta: float = 1.0
    step_log_beta: float = 1.0
    seed: RngStream = field(default_factory=lambda: RngStream(0))
    adapt_every: int = 50

    def __post_init__(self):
        for name, lo in (("burn_in", 0), ("kept_samples", 1), ("thin", 1), ("adapt_every", 1)):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < lo:
                raise ConfigError(f"mcmc {name} must be an integer >= {lo}, got {v!r}")
            object.__setattr__(self, name, int(v))
        for name in ("step_logit_pi", "step_logit_delta", "step_log_beta"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"mcmc {name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        if not isinstance(self.seed, RngStream):
            object.__setattr__(self, "seed", RngStream(self.seed))

    def with_seed(self, stream):
        return replace(self, seed=stream)

    def to_dict(self):
        return {"burn_in": self.burn_in, "kept_samples": self.kept_samples, "thin": self.thin,
                "step_logit_pi": self.step_logit_pi, "step_logit_delta": self.step_logit_delta,
                "step_log_beta": self.step_log_beta, "adapt_every": self.adapt_every,
                "seed": self.seed.seed, "stream_id": self.seed.stream_id}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = set(cls().to_dict())
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown mcmc fields: {sorted(unknown)}")
        seed = RngStream(d.pop("seed", 0), d.pop("stream_id", 0))
        return cls(seed=seed, **d)


@dataclass(frozen=True)
class EstimateResult:
    method: str
    pi_hat: tuple
    delta_hat: DeltaPair | None = None
    linkage_hat: tuple | None = None
    summaries: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        pi = tuple(float(v) for v in self.pi_hat)
        if len(pi) != 3 or not all(0.0 <= v <= 1.0 for v in pi):
            raise ValueError(f"pi_hat must hold three rates in [0, 1], got {pi}")
        object.__setattr__(self, "pi_hat", pi)
        if self.linkage_hat is not None:
            object.__setattr__(self, "linkage_hat", tuple(float(v) for v in self.linkage_hat))

    def to_dict(self):
        return {
            "method": self.method,
            "pi_hat": {t: v for t, v in zip("ABC", self.pi_hat)},
            "delta_hat": None if self.delta_hat is None else
            {"delta1": self.delta_hat.d1, "delta2": self.delta_hat.d2},
            "linkage_hat": None if self.linkage_hat is None else
            {"beta0": self.linkage_hat[0], "beta1": self.linkage_hat[1]},
            "summaries": {k: s.to_dict() for k, s in self.summaries.items()},
            "diagnostics": self.diagnostics,
        }


def effective_sample_size(x):
    """Effective sample size from Geyer's initial monotone sequence estimator."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 4:
        return float(n)
    xc = x - x.mean()
    var = xc @ xc / n
    if var <= 0:
        return float(n)
    m = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(xc, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n] / n
    rho = acov / acov[0]
    # sums of adjacent autocorrelation pairs, truncated at the first negative pair
    npairs = (n - 1) // 2
    pairs = rho[0:2 * npairs:2] + rho[1:2 * npairs:2]
    neg = np.nonzero(pairs <= 0)[0]
    if neg.size:
        pairs = pairs[:neg[0]]
    if pairs.size == 0:
        return float(n)
    pairs = np.minimum.accumulate(pairs)
    tau = -1.0 + 2.0 * pairs.sum()
    return float(min(n * math.log10(n), n / max(tau, 1e-12)))


def summarize_draws(draws):
    draws = np.asarray(draws, dtype=np.float64)
    lo, hi = np.percentile(draws, [2.5, 97.5])
    sd = float(draws.std(ddof=1)) if draws.size > 1 else 0.0
    return PosteriorSummary(float(draws.mean()), sd, float(lo), float(hi),
                            effective_sample_size(draws))
