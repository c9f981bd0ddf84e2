import numpy as np
import pytest

from snsmart_pp.errors import OptimizationError
from snsmart_pp.numerics import grid_minimize_2d, lattice_minimize


def test_quadratic():
    (x, y), v = grid_minimize_2d(lambda x, y: (x - 0.4) ** 2 + (y - 0.7) ** 2, 0.0, 0.01, 2)
    assert abs(x - 0.4) < 1e-4 and abs(y - 0.7) < 1e-4
    assert v < 1e-8


def test_off_lattice_minimum_refines():
    (x, y), _ = grid_minimize_2d(lambda x, y: (x - 0.41237) ** 2 + (y - 0.70561) ** 2, 0.0, 0.01, 2)
    assert abs(x - 0.41237) <= 0.5e-4 + 1e-12
    assert abs(y - 0.70561) <= 0.5e-4 + 1e-12


def test_constant_ties_to_lower_corner():
    assert grid_minimize_2d(lambda x, y: np.zeros_like(x), 0.0)[0] == (0.0, 0.0)
    assert grid_minimize_2d(lambda x, y: np.ones_like(x), 0.001)[0] == (0.001, 0.001)


def test_tie_prefers_lowest_first_coordinate():
    # minimum along the line x + y = 1
    (x, y), _ = grid_minimize_2d(lambda x, y: (x + y - 1.0) ** 2, 0.0)
    assert (x, y) == (0.0, 1.0)


def test_never_worse_than_evaluated_points():
    rng = np.random.default_rng(0)
    centers = rng.random((5, 2))
    seen = []

    def f(x, y):
        v = np.min([np.hypot(x - cx, y - cy) + 0.1 * i for i, (cx, cy) in enumerate(centers)], axis=0)
        seen.append(v.min())
        return v

    _, best = grid_minimize_2d(f, 0.0, 0.05, 3)
    assert best <= min(seen)


def test_boundary_minimum():
    (x, y), _ = grid_minimize_2d(lambda x, y: x + y, 0.001)
    assert (x, y) == (0.001, 0.001)
    (x, y), _ = grid_minimize_2d(lambda x, y: -x - y, 0.001)
    assert (x, y) == (1.0, 1.0)


def test_non_finite_points_skipped():
    (x, y), _ = grid_minimize_2d(lambda x, y: np.where(x < 0.5, np.nan, (x - 0.8) ** 2 + y), 0.0)
    assert abs(x - 0.8) < 1e-4 and y == 0.0


def test_all_non_finite():
    with pytest.raises(OptimizationError):
        grid_minimize_2d(lambda x, y: np.full_like(x, np.inf), 0.0)


def test_pinned_axis():
    (x, y), _ = lattice_minimize(lambda x, y: (x - 0.3) ** 2 + (y - 0.5) ** 2, (0.0, 0.0), (0.0, 1.0))
    assert x == 0.0 and abs(y - 0.5) < 1e-4


def test_bad_bounds():
    with pytest.raises(ValueError):
        grid_minimize_2d(lambda x, y: x, 1.0)
