"""Deterministic lattice search over a box in the unit square."""

import numpy as np

from ..errors import OptimizationError

__all__ = ["grid_minimize_2d", "lattice_minimize"]

_DIGITS = 12


def _axis(lo, hi, step):
    if hi <= lo:
        return np.array([lo])
    n = int(np.floor((hi - lo) / step + 1e-9))
    pts = np.round(lo + step * np.arange(n + 1), _DIGITS)
    if pts[-1] < hi - 1e-12:
        pts = np.append(pts, hi)
    return pts


def _window(center, half_width, step, lo, hi):
    if hi <= lo:
        return np.array([lo])
    k = int(round(half_width / step))
    pts = np.round(center + step * np.arange(-k, k + 1), _DIGITS)
    return np.unique(np.clip(pts, lo, hi))


def _scan(objective, xs, ys):
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vals = np.asarray(objective(X, Y), dtype=np.float64)
    vals = np.broadcast_to(vals, X.shape)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    # argmin over the C-ordered flattening picks lowest x, then lowest y, on ties
    i = int(np.argmin(vals))
    ix, iy = np.unravel_index(i, vals.shape)
    return float(xs[ix]), float(ys[iy]), float(vals[ix, iy])


def lattice_minimize(objective, xbounds, ybounds, coarse_step=0.01, refine_rounds=2):
    """Coarse lattice scan followed by local refinements.

    ``objective(X, Y)`` receives two equally shaped arrays and must return an
    array of the same shape.  A degenerate bound ``(v, v)`` pins that
    coordinate.  Each refinement scans a lattice ten times finer over +-1
    step of the previous lattice around the incumbent, which is kept unless
    strictly beaten (or tied at a lexicographically smaller point).
    """
    if coarse_step <= 0:
        raise ValueError("coarse_step must be positive")
    (xlo, xhi), (ylo, yhi) = xbounds, ybounds
    bx, by, bv = _scan(objective, _axis(xlo, xhi, coarse_step), _axis(ylo, yhi, coarse_step))
    if not np.isfinite(bv):
        raise OptimizationError("objective is non-finite at every coarse lattice point")
    step = coarse_step
    for _ in range(refine_rounds):
        fine = step / 10.0
        cx, cy, cv = _scan(objective, _window(bx, step, fine, xlo, xhi),
                           _window(by, step, fine, ylo, yhi))
        if cv < bv or (cv == bv and (cx, cy) < (bx, by)):
            bx, by, bv = cx, cy, cv
        step = fine
    return (bx, by), bv


def grid_minimize_2d(objective, lo=0.0, coarse_step=0.01, refine_rounds=2, hi=1.0):
    """Minimise ``objective`` over ``[lo, hi]^2``; see ``lattice_minimize``.

    Returns ``((x, y), value)``.  Ties resolve to the lowest x, then lowest y.
    """
    if not 0.0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")
    return lattice_minimize(objective, (lo, hi), (lo, hi), coarse_step, refine_rounds)
