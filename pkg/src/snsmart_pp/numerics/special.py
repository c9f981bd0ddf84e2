"""Log-gamma, log-beta and hypergeometric log-probabilities.

``log_beta`` avoids the cancellation in ``lgamma(a) + lgamma(b) - lgamma(a + b)``
for large shapes by working with the Stirling remainder

    lgammacor(x) = lgamma(x) - [(x - 1/2) log x - x + log sqrt(2 pi)],   x >= 10,

evaluated from a 5-term Chebyshev series in (10/x)^2.  The coefficients are the
classical ``algmcs`` set (W. Fullerton, SLATEC ``D9LGMC``), also used by R's
``lbeta``.  Shapes below 10 go through ``math.lgamma`` directly, where no
cancellation can occur.

The scalar kernels are numba-compiled so the MCMC samplers can call them
without leaving nopython mode.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from ..errors import DomainError

__all__ = [
    "BetaParams",
    "log_beta",
    "log_gamma_correction",
    "log_hypergeom_pmf",
    "hypergeom_pmf_exact",
]

_LN_SQRT_2PI = 0.918938533204672741780329736406

# SLATEC D9LGMC Chebyshev coefficients; five terms reach double precision for x >= 10
_ALGMCS = np.array([
    +0.1666389480451863247205729650822e+0,
    -0.1384948176067563840732986059135e-4,
    +0.9810825646924729426157171547487e-8,
    -0.1809129475572494194263306266719e-10,
    +0.6221098041892605227126015543416e-13,
])
_XBIG = 94906265.62425156


@numba.njit(cache=True, nogil=True)
def _chebyshev_eval(x, coef):
    twox = 2.0 * x
    b0 = 0.0
    b1 = 0.0
    b2 = 0.0
    n = coef.shape[0]
    for i in range(1, n + 1):
        b2 = b1
        b1 = b0
        b0 = twox * b1 - b2 + coef[n - i]
    return (b0 - b2) * 0.5


@numba.njit(cache=True, nogil=True)
def _lgammacor(x):
    if x < _XBIG:
        t = 10.0 / x
        return _chebyshev_eval(t * t * 2.0 - 1.0, _ALGMCS) / x
    return 1.0 / (12.0 * x)


@numba.njit(cache=True, nogil=True)
def _log_beta(a, b):
    # Caller guarantees a, b > 0 and finite; returns nan otherwise.
    if not (a > 0.0 and b > 0.0) or math.isinf(a) or math.isinf(b):
        return math.nan
    p = a if a < b else b
    q = b if a < b else a
    if p >= 10.0:
        corr = _lgammacor(p) + _lgammacor(q) - _lgammacor(p + q)
        r = p / (p + q)
        return (-0.5 * math.log(q) + _LN_SQRT_2PI + corr
                + (p - 0.5) * math.log(r) + q * math.log1p(-r))
    if q >= 10.0:
        corr = _lgammacor(q) - _lgammacor(p + q)
        return (math.lgamma(p) + corr + p - p * math.log(p + q)
                + (q - 0.5) * math.log1p(-p / (p + q)))
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


@numba.vectorize(["float64(float64, float64)"], cache=True, nopython=True)
def _log_beta_ufunc(a, b):
    return _log_beta(a, b)


@dataclass(frozen=True)
class BetaParams:
    """Shapes of a beta distribution; iterable as ``(a, b)``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"beta shapes must be positive and finite, got ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __iter__(self):
        return iter((self.a, self.b))

    @property
    def mean(self):
        return self.a / (self.a + self.b)


def log_gamma_correction(x):
    """Stirling remainder ``lgamma(x) - (x - 0.5) log x + x - log sqrt(2 pi)``, x >= 10."""
    x = float(x)
    if not x >= 10.0 or math.isinf(x):
        raise DomainError(f"log_gamma_correction needs finite x >= 10, got {x}")
    return float(_lgammacor(x))


def log_beta(a, b):
    """Natural log of the beta function ``B(a, b)``.

    Accepts scalars or broadcastable arrays.  Returns a Python float for
    scalar input and an ndarray otherwise.

    Raises
    ------
    DomainError
        If any shape is non-positive or non-finite.
    """
    if np.isscalar(a) and np.isscalar(b):
        a = float(a)
        b = float(b)
        if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"log_beta needs positive finite shapes, got ({a}, {b})")
        return float(_log_beta(a, b))
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if not (np.all(a > 0) and np.all(b > 0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DomainError("log_beta needs positive finite shapes")
    return _log_beta_ufunc(a, b)


def _check_hypergeom(x, total, successes, draws):
    for name, v in (("x", x), ("total", total), ("successes", successes), ("draws", draws)):
        if int(v) != v:
            raise DomainError(f"{name} must be an integer, got {v!r}")
    x, total, successes, draws = int(x), int(total), int(successes), int(draws)
    if total < 0 or not 0 <= successes <= total or not 0 <= draws <= total:
        raise DomainError(f"invalid hypergeometric parameters total={total}, "
                          f"successes={successes}, draws={draws}")
    lo = max(0, draws - (total - successes))
    hi = min(draws, successes)
    if not lo <= x <= hi:
        raise DomainError(f"x={x} outside support [{lo}, {hi}]")
    return x, total, successes, draws


def hypergeom_pmf_exact(x, total, successes, draws):
    """Hypergeometric probability as an exact ``Fraction``."""
    x, total, successes, draws = _check_hypergeom(x, total, successes, draws)
    num = math.comb(successes, x) * math.comb(total - successes, draws - x)
    return Fraction(num, math.comb(total, draws))


def log_hypergeom_pmf(x, total, successes, draws):
    """Log probability of ``x`` successes in ``draws`` draws without replacement.

    The binomial coefficients are formed as exact integers, so the only
    rounding is in the two logarithms.
    """
    x, total, successes, draws = _check_hypergeom(x, total, successes, draws)
    num = math.comb(successes, x) * math.comb(total - successes, draws - x)
    return math.log(num) - math.log(math.comb(total, draws))
