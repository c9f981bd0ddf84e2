import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snsmart_pp.errors import DomainError
from snsmart_pp.numerics import BetaParams, log_beta, log_hypergeom_pmf, hypergeom_pmf_exact
from snsmart_pp.numerics.special import log_gamma_correction

mpmath.mp.dps = 40

shapes = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)


def _mp_log_beta(a, b):
    return float(mpmath.log(mpmath.beta(mpmath.mpf(a), mpmath.mpf(b))))


class TestLogBeta:
    def test_unit(self):
        assert log_beta(1, 1) == 0.0

    def test_two_two(self):
        assert log_beta(2, 2) == pytest.approx(math.log(1 / 6), abs=1e-15)
        assert log_beta(2, 2) == pytest.approx(-1.791759469228055, abs=1e-12)

    def test_five_six_exact_rational(self):
        # B(5, 6) = 4! 5! / 10! = 1/1260
        exact = Fraction(math.factorial(4) * math.factorial(5), math.factorial(10))
        assert exact == Fraction(1, 1260)
        assert log_beta(5, 6) == pytest.approx(math.log(exact), abs=1e-12)
        assert log_beta(5, 6) == pytest.approx(-7.138867, abs=1e-6)

    @settings(max_examples=300, deadline=None)
    @given(shapes, shapes)
    def test_matches_mpmath(self, a, b):
        exact = _mp_log_beta(a, b)
        # 1e-12 absolute where the value is O(1e2); beyond that one double ulp
        # of the result alone exceeds 1e-12, so the bound becomes relative
        assert abs(log_beta(a, b) - exact) <= max(1e-12, 1e-14 * abs(exact))

    @given(shapes, shapes)
    def test_symmetry_exact(self, a, b):
        assert log_beta(a, b) == log_beta(b, a)

    def test_array_input(self):
        a = np.array([1.0, 2.0, 5.0])
        b = np.array([1.0, 2.0, 6.0])
        np.testing.assert_allclose(log_beta(a, b), [0.0, math.log(1 / 6), math.log(1 / 1260)],
                                   atol=1e-13)

    @pytest.mark.parametrize("a,b", [(0, 1), (-1, 2), (1, math.inf), (math.nan, 1)])
    def test_domain(self, a, b):
        with pytest.raises(DomainError):
            log_beta(a, b)
        with pytest.raises(DomainError):
            log_beta(np.array([a]), np.array([b]))

    @pytest.mark.parametrize("x", [10, 12.5, 100, 1e4, 1e7, 1e9])
    def test_stirling_remainder(self, x):
        exact = mpmath.loggamma(x) - ((x - 0.5) * mpmath.log(x) - x + mpmath.log(mpmath.sqrt(2 * mpmath.pi)))
        assert log_gamma_correction(x) == pytest.approx(float(exact), rel=1e-13)

    def test_beta_params(self):
        p = BetaParams(3, 8)
        assert tuple(p) == (3.0, 8.0)
        assert p.mean == pytest.approx(3 / 11)
        with pytest.raises(DomainError):
            BetaParams(0, 1)


class TestHypergeom:
    def test_certain_draw(self):
        assert log_hypergeom_pmf(7, 20, 20, 7) == 0.0

    def test_three_of_ten(self):
        # C(10,3) C(10,7) / C(20,10) = 120 * 120 / 184756
        assert math.comb(10, 3) * math.comb(10, 7) == 14400
        assert math.comb(20, 10) == 184756
        assert log_hypergeom_pmf(3, 20, 10, 10) == pytest.approx(math.log(14400 / 184756), abs=1e-14)
        assert math.exp(log_hypergeom_pmf(3, 20, 10, 10)) == pytest.approx(0.0779406, abs=1e-7)

    def test_zero_of_ten(self):
        assert log_hypergeom_pmf(0, 20, 10, 10) == pytest.approx(math.log(1 / 184756), abs=1e-14)

    def test_outside_support(self):
        with pytest.raises(DomainError):
            log_hypergeom_pmf(11, 20, 10, 10)
        with pytest.raises(DomainError):
            log_hypergeom_pmf(0, 20, 15, 10)  # at least 5 successes must be drawn

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_pmf_sums_to_one(self, data):
        total = data.draw(st.integers(0, 200))
        successes = data.draw(st.integers(0, total))
        draws = data.draw(st.integers(0, total))
        lo, hi = max(0, draws - (total - successes)), min(draws, successes)
        s = math.fsum(math.exp(log_hypergeom_pmf(x, total, successes, draws)) for x in range(lo, hi + 1))
        assert abs(s - 1.0) <= 1e-12

    def test_exact_fraction(self):
        assert hypergeom_pmf_exact(3, 20, 10, 10) == Fraction(14400, 184756)
