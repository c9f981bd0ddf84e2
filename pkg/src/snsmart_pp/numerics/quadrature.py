"""Adaptive quadrature on the unit interval (test oracle support)."""

import warnings

from scipy import integrate

from ..errors import QuadratureError


def quad_01(integrand, abs_tol=1e-10, rel_tol=1e-10, limit=500):
    """Integrate ``integrand`` over (0, 1) with QUADPACK's QAGS.

    QAGS never evaluates the endpoints, so integrable endpoint singularities
    are fine.  Raises ``QuadratureError`` if the subdivision budget runs out
    or the error estimate misses ``abs_tol``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(integrand, 0.0, 1.0, epsabs=abs_tol,
                                        epsrel=rel_tol, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from exc
    if err > max(abs_tol, rel_tol * abs(value)):
        raise QuadratureError(f"error estimate {err:.3g} exceeds tolerance")
    return value
