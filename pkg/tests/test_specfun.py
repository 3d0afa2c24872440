"""Special-function layer against scipy and against defining identities."""

import math

import pytest
import scipy.integrate
import scipy.special
from hypothesis import given, strategies as st

from betapoly import specfun
from betapoly.errors import DomainError


class TestLogGamma:
    def test_known_values(self):
        assert specfun.log_gamma(1.0) == pytest.approx(0.0, abs=1e-13)
        assert specfun.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)
        assert specfun.log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)

    @given(st.floats(min_value=1e-3, max_value=1e6))
    def test_matches_scipy(self, x):
        ref = float(scipy.special.gammaln(x))
        assert specfun.log_gamma(x) == pytest.approx(ref, rel=1e-13, abs=1e-13)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_recurrence(self, x):
        lhs = specfun.log_gamma(x + 1.0)
        rhs = specfun.log_gamma(x) + math.log(x)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_arguments(self, bad):
        with pytest.raises(DomainError):
            specfun.log_gamma(bad)


class TestIncompleteBeta:
    def test_trivial_values(self):
        assert specfun.regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
        assert specfun.regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0
        for a in (0.3, 1.0, 7.5):
            assert specfun.regularized_incomplete_beta(0.5, a, a) == pytest.approx(
                0.5, abs=1e-13
            )
        assert specfun.regularized_incomplete_beta(0.25, 1.0, 1.0) == pytest.approx(
            0.25, abs=1e-13
        )

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.05, max_value=50.0),
        st.floats(min_value=0.05, max_value=50.0),
    )
    def test_matches_scipy(self, x, a, b):
        ours = specfun.regularized_incomplete_beta(x, a, b)
        assert ours == pytest.approx(float(scipy.special.betainc(a, b, x)), abs=1e-12)

    @given(
        # away from the endpoints 1-x itself loses no precision, so the
        # identity isolates the continued fraction's symmetry switch
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.05, max_value=30.0),
        st.floats(min_value=0.05, max_value=30.0),
    )
    def test_reflection_identity(self, x, a, b):
        left = specfun.regularized_incomplete_beta(x, a, b)
        right = specfun.regularized_incomplete_beta(1.0 - x, b, a)
        assert left + right == pytest.approx(1.0, abs=1e-12)

    def test_monotone_in_x(self):
        a, b = 2.3, 0.7
        grid = [i / 64 for i in range(65)]
        vals = [specfun.regularized_incomplete_beta(x, a, b) for x in grid]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))

    def test_rejects_out_of_domain(self):
        with pytest.raises(DomainError):
            specfun.regularized_incomplete_beta(-0.1, 1.0, 1.0)
        with pytest.raises(DomainError):
            specfun.regularized_incomplete_beta(0.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            specfun.regularized_incomplete_beta(0.5, 1.0, -2.0)


def _sphere_surface(d: int) -> float:
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


class TestNormConst:
    def test_known_values(self):
        assert specfun.norm_const("beta", 1, 0.0) == pytest.approx(0.5, rel=1e-12)
        assert specfun.norm_const("betaPrime", 1, 1.0) == pytest.approx(
            1.0 / math.pi, rel=1e-12
        )
        assert specfun.norm_const("beta", 2, 1.0) == pytest.approx(
            2.0 / math.pi, rel=1e-12
        )

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("beta", [-0.5, 0.0, 1.0, 2.5])
    def test_beta_reciprocal_of_mass(self, d, beta):
        # total mass of the unnormalized density, reduced to a radial integral
        mass, _ = scipy.integrate.quad(
            lambda r: r ** (d - 1) * (1.0 - r * r) ** beta, 0.0, 1.0
        )
        mass *= _sphere_surface(d)
        assert specfun.norm_const("beta", d, beta) == pytest.approx(
            1.0 / mass, rel=1e-6
        )

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    @pytest.mark.parametrize("margin", [0.6, 1.5, 4.0])
    def test_beta_prime_reciprocal_of_mass(self, d, margin):
        beta = d / 2.0 + margin
        mass, _ = scipy.integrate.quad(
            lambda r: r ** (d - 1) * (1.0 + r * r) ** (-beta), 0.0, math.inf
        )
        mass *= _sphere_surface(d)
        assert specfun.norm_const("betaPrime", d, beta) == pytest.approx(
            1.0 / mass, rel=1e-6
        )

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            specfun.norm_const("beta", 2, -1.0)
        with pytest.raises(DomainError):
            specfun.norm_const("betaPrime", 2, 1.0)
        with pytest.raises(DomainError):
            specfun.norm_const("uniform", 2, 0.0)


def test_log_sphere_surface():
    assert specfun.log_sphere_surface(1) == pytest.approx(math.log(2.0), abs=1e-13)
    assert specfun.log_sphere_surface(2) == pytest.approx(
        math.log(2.0 * math.pi), abs=1e-13
    )
    assert specfun.log_sphere_surface(3) == pytest.approx(
        math.log(4.0 * math.pi), abs=1e-13
    )
    for d in range(1, 11):
        assert specfun.log_sphere_surface(d) == pytest.approx(
            math.log(_sphere_surface(d)), abs=1e-12
        )


def test_log_binom_matches_exact_combinatorics():
    for n in range(0, 61, 5):
        for k in range(0, n + 1, 3):
            assert specfun.log_binom(n, k) == pytest.approx(
                math.log(math.comb(n, k)), abs=1e-11
            )
    with pytest.raises(DomainError):
        specfun.log_binom(4, 7)
