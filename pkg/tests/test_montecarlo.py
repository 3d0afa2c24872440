"""Monte Carlo estimators: exact anchors, unbiasedness, and determinism."""

import math

import numpy as np
import pytest
import scipy.stats

from betapoly.cones import solid_angle_mc, tangent_cone
from betapoly.errors import ConsistencyError, DomainError
from betapoly.montecarlo import (
    estimate_J,
    exact_J,
    ks_statistic,
    prob_not_face,
    simulate_expected_external_angle,
    simulate_expected_fvector,
    simulate_poisson_fvector,
    simulate_squared_distance,
    simulate_tangent_civ,
)
from betapoly.quadrature import compute_I
from betapoly.sampling import DistParams, SeededStream, sample_config

from conftest import KS_CRIT_1PCT

SYLVESTER_F0 = 4.0 - 35.0 / (12.0 * math.pi**2)


def _zpass(est, target: float, band: float = 3.0) -> bool:
    return abs(est.mean - target) <= band * max(est.std_error, 1e-12)


class TestExactJ:
    def test_table(self):
        assert exact_J(5, 5) == 1.0
        assert exact_J(4, 3) == 0.5
        assert exact_J(3, 1) == pytest.approx(1.0 / 6.0)
        assert exact_J(2, 1) == 0.5
        assert exact_J(1, 1) == 1.0
        assert exact_J(4, 2) is None
        assert exact_J(5, 2) is None

    def test_shortcut_paths(self):
        est = estimate_J("beta", 5, 5, 0.5).estimate
        assert est.mean == 1.0 and est.std_error == 0.0
        assert estimate_J("beta", 4, 3, 2.0).estimate.mean == 0.5
        for alpha in (0.0, 1.0, 3.5):
            assert estimate_J("beta", 3, 1, alpha).estimate.mean == pytest.approx(
                1.0 / 6.0
            )
        assert estimate_J("betaPrime", 3, 2, 1.5).estimate.mean == 0.5

    def test_unseeded_sampling_is_rejected(self):
        with pytest.raises(DomainError):
            estimate_J("beta", 4, 2, 1.0, use_exact=False)

    def test_domain_validation(self):
        with pytest.raises(DomainError):
            estimate_J("beta", 1, 1, 0.0)
        with pytest.raises(DomainError):
            estimate_J("beta", 4, 5, 0.0)
        with pytest.raises(DomainError):
            # shape must be admissible for points in dimension m-1 = 3
            estimate_J("betaPrime", 4, 2, 1.0)


class TestEstimateJ:
    @pytest.mark.parametrize(
        "family,m,ell,alpha,target",
        [
            ("beta", 4, 3, 2.0, 0.5),
            ("beta", 3, 1, 1.0, 1.0 / 6.0),
            ("betaPrime", 3, 2, 2.0, 0.5),
            ("betaPrime", 3, 1, 2.5, 1.0 / 6.0),
        ],
    )
    def test_reproduces_exact_values_without_shortcut(self, family, m, ell, alpha, target):
        est = estimate_J(
            family, m, ell, alpha, 10_000, 300, SeededStream(31, 0), use_exact=False
        ).estimate
        assert est.std_error > 0.0
        assert _zpass(est, target)

    def test_outer_stage_unbiased_in_inner_budget(self):
        # doubling the inner budget must not move the estimate beyond noise
        kwargs = dict(use_exact=False)
        a = estimate_J("beta", 4, 2, 1.0, 2000, 200, SeededStream(32, 0), **kwargs)
        b = estimate_J("beta", 4, 2, 1.0, 2000, 400, SeededStream(32, 1), **kwargs)
        spread = math.hypot(a.estimate.std_error, b.estimate.std_error)
        assert abs(a.estimate.mean - b.estimate.mean) <= 2 * spread

    def test_large_shape_approaches_gaussian_simplex(self):
        # at alpha = 10^3 the configuration law is near-Gaussian, so the
        # two-stage estimate must agree with one built from Gaussian draws
        m, ell = 4, 2
        est = estimate_J(
            "beta", m, ell, 1000.0, 1500, 200, SeededStream(33, 0), use_exact=False
        ).estimate

        params = DistParams("gaussian", m - 1)
        root = SeededStream(33, 1)
        values = np.empty(1500)
        for r in range(values.size):
            stream = root.substream(r)
            cfg = sample_config(params, m, stream.substream("config"))
            cone = tangent_cone(cfg, range(ell))
            values[r] = solid_angle_mc(cone, 200, stream.substream("angle")).mean
        gauss_mean = values.mean()
        gauss_se = values.std(ddof=1) / math.sqrt(values.size)

        spread = math.hypot(est.std_error, gauss_se)
        assert abs(est.mean - gauss_mean) <= 3 * spread

    def test_deterministic_across_thread_counts(self):
        one = estimate_J(
            "beta", 4, 2, 1.0, 600, 100, SeededStream(34, 0), use_exact=False, threads=1
        )
        three = estimate_J(
            "beta", 4, 2, 1.0, 600, 100, SeededStream(34, 0), use_exact=False, threads=3
        )
        assert one.estimate == three.estimate


class TestSimulateFvector:
    def test_circle_vertices_exact(self, stream):
        ests = simulate_expected_fvector(
            DistParams("sphereUniform", 2, 0.0), 7, 500, stream
        )
        assert ests[0].mean == 7.0 and ests[0].std_error == 0.0

    @pytest.mark.parametrize("d", [2, 3])
    def test_simplex_counts_exact(self, d, stream):
        ests = simulate_expected_fvector(DistParams("beta", d, 1.0), d + 1, 200, stream)
        for k, est in enumerate(ests):
            assert est.mean == math.comb(d + 1, k + 1)
            assert est.std_error == 0.0

    def test_sylvester_four_point_value(self, stream):
        ests = simulate_expected_fvector(DistParams("beta", 2, 0.0), 4, 8000, stream)
        assert _zpass(ests[0], SYLVESTER_F0)

    def test_oracle_monotone_in_n(self, stream):
        params = DistParams("beta", 2, 0.0)
        f5 = simulate_expected_fvector(params, 5, 4000, stream.substream(5))[0]
        f6 = simulate_expected_fvector(params, 6, 4000, stream.substream(6))[0]
        spread = math.hypot(f5.std_error, f6.std_error)
        assert f6.mean - f5.mean > -2 * spread

    def test_deterministic_across_thread_counts(self):
        params = DistParams("beta", 2, 0.5)
        one = simulate_expected_fvector(params, 5, 400, SeededStream(35, 0), threads=1)
        three = simulate_expected_fvector(params, 5, 400, SeededStream(35, 0), threads=3)
        assert one == three


class TestSimulateExternalAngle:
    def test_triangle_edge_exact(self, stream):
        est = simulate_expected_external_angle(
            DistParams("beta", 2, -1.0), 3, 2, 200, stream
        )
        assert est.mean == 0.5 and est.std_error == 0.0

    def test_matches_quadrature(self, stream):
        est = simulate_expected_external_angle(
            DistParams("beta", 2, 0.0), 4, 2, 4000, stream
        )
        assert _zpass(est, compute_I(4, 2, 2.0).value)

    def test_face_size_validation(self, stream):
        with pytest.raises(DomainError):
            simulate_expected_external_angle(DistParams("beta", 2, 0.0), 4, 3, 10, stream)


class TestSimulateTangentCiv:
    def test_lowest_index_reduces_to_external_angle(self, stream):
        est = simulate_tangent_civ(DistParams("beta", 2, 0.0), 4, 1, 0, 4000, stream)
        assert _zpass(est, compute_I(4, 1, 2.0).value)

    def test_full_dimension_index(self, stream):
        # internal angle at a vertex plus the non-face full-space profile;
        # frozen against the closed-form value
        est = simulate_tangent_civ(
            DistParams("beta", 2, 0.0), 4, 1, 2, 3000, stream, inner_samples=512
        )
        assert _zpass(est, 0.2869400148695814)

    def test_index_bounds(self, stream):
        with pytest.raises(DomainError):
            simulate_tangent_civ(DistParams("beta", 2, 0.0), 4, 1, 3, 10, stream)


class TestPoissonFvector:
    def test_matches_closed_form(self, stream):
        ests = simulate_poisson_fvector(2, 1.0, 3000, stream)
        assert _zpass(ests[1], math.pi**2 / 2.0)


class TestProbNotFace:
    @staticmethod
    def _provider_from(values):
        return lambda params, n: values

    def test_simplex_is_zero(self):
        provider = self._provider_from([4.0, 6.0, 4.0])
        params = DistParams("beta", 3, 0.0)
        assert prob_not_face(provider, 3, 4, 2, params) == 0.0

    def test_triangle_edges(self):
        provider = self._provider_from([3.0, 3.0])
        params = DistParams("beta", 2, 0.0)
        assert prob_not_face(provider, 2, 3, 2, params) == 0.0

    def test_sylvester_vertex_probability(self):
        provider = self._provider_from([SYLVESTER_F0, SYLVESTER_F0])
        params = DistParams("beta", 2, 0.0)
        value = prob_not_face(provider, 2, 4, 1, params)
        assert value == pytest.approx(35.0 / (48.0 * math.pi**2), abs=1e-12)

    def test_overcounting_provider_is_reported(self):
        provider = self._provider_from([5.5])  # more vertices than points
        params = DistParams("beta", 2, 0.0)
        with pytest.raises(ConsistencyError):
            prob_not_face(provider, 2, 4, 1, params)


class TestKsStatistic:
    def test_matches_scipy(self):
        gen = np.random.default_rng(3)
        samples = gen.normal(size=500)
        ours = ks_statistic(samples, scipy.stats.norm.cdf)
        ref = scipy.stats.kstest(samples, scipy.stats.norm.cdf).statistic
        assert ours == pytest.approx(ref, abs=1e-12)

    def test_constant_samples(self):
        assert ks_statistic([0.3] * 50, lambda t: t) >= 0.5

    def test_single_sample_at_median(self):
        assert ks_statistic([0.5], lambda t: min(max(t, 0.0), 1.0)) == pytest.approx(0.5)

    def test_reference_law_passes(self):
        gen = np.random.default_rng(4)
        samples = gen.uniform(size=20_000)
        stat = ks_statistic(samples, lambda t: min(max(t, 0.0), 1.0))
        assert stat < KS_CRIT_1PCT / math.sqrt(samples.size)

    def test_empty_sample_rejected(self):
        with pytest.raises(DomainError):
            ks_statistic([], lambda t: t)


class TestSquaredDistance:
    def test_single_point_is_squared_norm_law(self, stream):
        params = DistParams("beta", 3, 1.0)
        sq = simulate_squared_distance(params, 1, 20_000, stream)
        dist = scipy.stats.beta(1.5, 2.0)
        assert ks_statistic(sq, dist.cdf) < KS_CRIT_1PCT / math.sqrt(sq.size)

    def test_affine_hull_distance_compact(self, stream):
        # two points in the plane at beta = 0: squared distance to their
        # spanned line follows Beta(1/2, 5/2)
        params = DistParams("beta", 2, 0.0)
        sq = simulate_squared_distance(params, 2, 20_000, stream)
        dist = scipy.stats.beta(0.5, 2.5)
        assert ks_statistic(sq, dist.cdf) < KS_CRIT_1PCT / math.sqrt(sq.size)

    def test_affine_hull_distance_heavy(self, stream):
        params = DistParams("betaPrime", 3, 2.5)
        sq = simulate_squared_distance(params, 2, 20_000, stream)
        dist = scipy.stats.betaprime(1.0, 2.0)
        assert ks_statistic(sq, dist.cdf) < KS_CRIT_1PCT / math.sqrt(sq.size)

    def test_k_bounds(self, stream):
        with pytest.raises(DomainError):
            simulate_squared_distance(DistParams("beta", 2, 0.0), 3, 10, stream)
