import math

import numpy as np
import pytest

from gradem import (
    BoundReport,
    MixtureParams,
    SamplePlan,
    bad_region_gradient_bound,
    check_mgf_bound,
    check_path_integral_bound,
    check_projection_lower_bound,
    check_smoothness,
    check_stein,
    draw_standard_normal,
    estimate_loss,
    loss_upper_bound,
    separation_lower_bound,
    smoothness_rhs,
    standard_normal_params,
    trap_horizon,
)


def random_params(rng, n=None, d=None, scale=1.0):
    n = n or int(rng.integers(1, 5))
    d = d or int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(n))
    w = np.clip(w, 1e-9, None)
    w = w / w.sum()
    return MixtureParams(w, scale * rng.standard_normal((n, d)))


class TestBoundReport:
    def test_slack_and_satisfied(self):
        r = BoundReport.make("x", 1.0, 2.0, 0.0)
        assert r.slack == 1.0 and r.satisfied

    def test_tolerance_saves_small_violations(self):
        assert BoundReport.make("x", 1.05, 1.0, 0.1).satisfied
        assert not BoundReport.make("x", 1.2, 1.0, 0.1).satisfied

    def test_native_types(self):
        r = BoundReport.make("x", np.float64(1.0), np.float64(2.0), np.float64(0.1))
        assert isinstance(r.satisfied, bool) and isinstance(r.lhs, float)


class TestLossUpperBound:
    def test_value(self):
        p = MixtureParams(np.array([0.5, 0.5]), np.array([[2.0, 0.0], [0.0, 0.0]]))
        assert loss_upper_bound(p) == pytest.approx(1.0)

    def test_single_component_bound_is_tight(self):
        # KL(N(0,I) || N(mu,I)) equals the bound exactly for n=1.
        p = MixtureParams(np.array([1.0]), np.array([[1.0, 1.0]]))
        batch = draw_standard_normal(2, SamplePlan(400_000, 0))
        est = estimate_loss(p, batch)
        assert est.value == pytest.approx(loss_upper_bound(p), abs=5 * est.std_error)

    def test_bounds_the_monte_carlo_loss(self):
        rng = np.random.default_rng(0)
        for k in range(10):
            p = random_params(rng)
            batch = draw_standard_normal(p.dim, SamplePlan(50_000, k))
            est = estimate_loss(p, batch)
            assert est.value <= loss_upper_bound(p) + 4 * est.std_error


class TestProjectionLowerBound:
    def test_zero_means_give_zero_bound(self):
        p = MixtureParams(np.full(3, 1 / 3), np.zeros((3, 2)))
        assert separation_lower_bound(p) == 0.0

    def test_single_component_bound_is_zero(self):
        p = MixtureParams(np.array([1.0]), np.array([[5.0, 0.0]]))
        assert separation_lower_bound(p) == 0.0

    def test_scaling_in_potential(self):
        # exp(-8U) factor: doubling all means changes the bound accordingly.
        means = np.array([[0.3, 0.0], [-0.3, 0.0]])
        p = MixtureParams(np.array([0.5, 0.5]), means)
        q = p.with_means(2 * means)
        assert separation_lower_bound(q) < separation_lower_bound(p) * 16

    def test_check_satisfied_on_random_instances(self):
        rng = np.random.default_rng(1)
        for k in range(10):
            p = random_params(rng)
            rep = check_projection_lower_bound(p, SamplePlan(50_000, 500 + k))
            assert rep.satisfied, rep

    def test_almost_parallel_regime_uses_mu_max_bound(self):
        # One dominant direction, all means close together: bound >= mu_max^2/4.
        base = np.array([2.0, 0.0])
        means = np.stack([base, base * 0.95, base * 0.9])
        p = MixtureParams(np.full(3, 1 / 3), means)
        rep = check_projection_lower_bound(p, SamplePlan(100_000, 3))
        assert rep.lhs >= 1.0  # mu_max^2 / 4 = 1
        assert rep.satisfied, rep


class TestSmoothness:
    def test_locality_violation_raises(self):
        p = MixtureParams(np.array([1.0]), np.array([[0.0, 0.0]]))
        big = np.full((1, 2), 1.0)
        with pytest.raises(ValueError, match="locality"):
            smoothness_rhs(p, big, 0)

    def test_rhs_formula(self):
        p = MixtureParams(
            np.array([0.5, 0.5]), np.array([[1.0, 0.0], [0.0, 0.0]])
        )
        deltas = np.array([[0.01, 0.0], [0.0, 0.02]])
        n, d, mmax = 2, 2, 1.0
        expected = (
            n * mmax * (30 * math.sqrt(d) + 4 * mmax) * 0.01 + (0.01 + 0.02)
        )
        assert smoothness_rhs(p, deltas, 0) == pytest.approx(expected)

    def test_check_satisfied_on_random_instances(self):
        rng = np.random.default_rng(2)
        for k in range(5):
            p = random_params(rng)
            limits = 1.0 / np.maximum(
                6.0 * p.dim, 2.0 * np.linalg.norm(p.means, axis=1)
            )
            raw = rng.standard_normal(p.means.shape)
            raw /= np.maximum(np.linalg.norm(raw, axis=1), 1e-12)[:, None]
            deltas = raw * (0.5 * limits)[:, None]
            for rep in check_smoothness(p, deltas, SamplePlan(50_000, 600 + k)):
                assert rep.satisfied, rep


class TestBadRegion:
    def params(self, d, c=12.0):
        sd = math.sqrt(d)
        means = np.zeros((3, d))
        means[0, 0] = c * sd
        means[1, 0] = -c * sd
        return MixtureParams(np.full(3, 1 / 3), means)

    def test_applicability(self):
        applicable, _ = bad_region_gradient_bound(self.params(4))
        assert applicable
        not_app, _ = bad_region_gradient_bound(self.params(4, c=2.0))
        assert not not_app

    def test_bound_value(self):
        d = 4
        p = self.params(d)
        _, bound = bad_region_gradient_bound(p)
        expected = 2 * math.exp(-d) * 2 * 12 * math.sqrt(d)
        assert bound == pytest.approx(expected)

    def test_single_component_not_applicable(self):
        p = MixtureParams(np.array([1.0]), np.array([[100.0]]))
        applicable, _ = bad_region_gradient_bound(p)
        assert not applicable


class TestTrapHorizon:
    def test_value(self):
        assert trap_horizon(3, 0.5) == pytest.approx(math.exp(3) / 15)

    def test_homogeneous_in_eta(self):
        for d in (2, 5, 10):
            assert trap_horizon(d, 0.2) == pytest.approx(10 * trap_horizon(d, 2.0))

    def test_rejects_nonpositive_eta(self):
        with pytest.raises(ValueError):
            trap_horizon(3, 0.0)


class TestMgfBound:
    def test_tiny_c_trivially_satisfied(self):
        rep = check_mgf_bound(3, 1e-9, SamplePlan(10_000, 0))
        assert rep.satisfied and rep.lhs == pytest.approx(1.0, abs=1e-6)

    def test_out_of_range_c(self):
        with pytest.raises(ValueError):
            check_mgf_bound(3, 1.0, SamplePlan(100, 0))
        with pytest.raises(ValueError):
            check_mgf_bound(3, 0.0, SamplePlan(100, 0))

    def test_grid_satisfied(self):
        for d in (1, 2, 5, 10, 20):
            rep = check_mgf_bound(d, 1 / (3 * d), SamplePlan(200_000, d))
            assert rep.satisfied, rep


class TestPathIntegralBound:
    def test_single_component_is_exact(self):
        p = standard_normal_params(2)
        rep = check_path_integral_bound(p, np.array([1.0, 0.0]), 0, 0)
        assert rep.lhs == pytest.approx(2.0)
        assert rep.rhs == pytest.approx(2.0)
        assert rep.satisfied

    def test_zero_means_two_components(self):
        p = MixtureParams(np.array([0.5, 0.5]), np.zeros((2, 2)))
        rep = check_path_integral_bound(p, np.array([0.0, 1.0]), 0, 1)
        assert rep.lhs == pytest.approx(0.5)
        assert rep.rhs == pytest.approx(0.5)
        assert rep.satisfied

    def test_zero_x_rejected(self):
        p = standard_normal_params(2)
        with pytest.raises(ValueError):
            check_path_integral_bound(p, np.zeros(2), 0, 0)

    def test_quad_points_validation(self):
        p = standard_normal_params(1)
        with pytest.raises(ValueError):
            check_path_integral_bound(p, np.ones(1), 0, 0, quad_points=32)
        with pytest.raises(ValueError):
            check_path_integral_bound(p, np.ones(1), 0, 0, quad_points=65)

    def test_random_instances_satisfied(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = random_params(rng)
            x = rng.standard_normal(p.dim)
            x *= rng.uniform(0.1, 3.0) * math.sqrt(p.dim) / max(
                np.linalg.norm(x), 1e-12
            )
            i = int(rng.integers(p.n_components))
            j = int(rng.integers(p.n_components))
            rep = check_path_integral_bound(p, x, i, j)
            assert rep.satisfied, rep

    def test_sign_flip_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            p = random_params(rng, n=3, d=2)
            x = rng.standard_normal(2)
            a = check_path_integral_bound(p, x, 0, 1)
            b = check_path_integral_bound(p.with_means(-p.means), -x, 0, 1)
            assert a.satisfied == b.satisfied


class TestStein:
    def test_single_component_exact(self):
        p = MixtureParams(np.array([1.0]), np.array([[0.3, 0.8]]))
        reports = check_stein(p, SamplePlan(20_000, 0))
        assert reports[0].lhs == 0.0

    def test_equal_means_near_exact(self):
        p = MixtureParams(np.array([0.4, 0.6]), np.tile([0.5, -0.2], (2, 1)))
        reports = check_stein(p, SamplePlan(20_000, 1))
        for rep in reports:
            assert rep.lhs <= 1e-12

    def test_random_instances_satisfied(self):
        rng = np.random.default_rng(5)
        for k in range(5):
            p = random_params(rng)
            for rep in check_stein(p, SamplePlan(100_000, 700 + k)):
                assert rep.satisfied, rep
