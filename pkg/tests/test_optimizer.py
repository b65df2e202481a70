import numpy as np
import pytest

from gradem import (
    GradientEstimate,
    MixtureParams,
    NumericalError,
    RunConfig,
    SampleBatch,
    SamplePlan,
    draw_standard_normal,
    em_step,
    run_population_gradient_em,
    run_sample_gradient_em,
    standard_normal_params,
)
from gradem.harness import bad_region_params


def grad_of(arr, se=None):
    arr = np.asarray(arr, dtype=np.float64)
    se = np.zeros_like(arr) if se is None else se
    return GradientEstimate(arr, se, 1)


class TestEmStep:
    def test_zero_gradient_leaves_params_unchanged(self):
        p = MixtureParams(np.array([1.0]), np.array([[1.0, 2.0]]))
        q = em_step(p, grad_of(np.zeros((1, 2))), 0.5)
        np.testing.assert_array_equal(q.means, p.means)

    def test_single_component_contraction(self):
        # With the exact gradient mu, one step is mu <- (1 - eta) mu.
        p = MixtureParams(np.array([1.0]), np.array([[2.0, -4.0]]))
        q = em_step(p, grad_of(p.means), 0.5)
        np.testing.assert_allclose(q.means, 0.5 * p.means)

    def test_unit_step_reaches_fixed_point(self):
        p = MixtureParams(np.array([1.0]), np.array([[3.0]]))
        q = em_step(p, grad_of(p.means), 1.0)
        np.testing.assert_array_equal(q.means, np.zeros((1, 1)))

    def test_shape_mismatch(self):
        p = standard_normal_params(2)
        with pytest.raises(ValueError):
            em_step(p, grad_of(np.zeros((2, 2))), 0.5)

    def test_non_finite_gradient_aborts(self):
        p = standard_normal_params(2)
        with pytest.raises(NumericalError):
            em_step(p, grad_of(np.array([[np.nan, 0.0]])), 0.5)


class TestRunConfig:
    def test_invalid_step_size(self):
        p = standard_normal_params(1)
        with pytest.raises(ValueError):
            RunConfig(p, 0.0, 10, SamplePlan(100, 0))

    def test_invalid_max_steps(self):
        p = standard_normal_params(1)
        with pytest.raises(ValueError):
            RunConfig(p, 0.5, 0, SamplePlan(100, 0))

    def test_invalid_log_every(self):
        p = standard_normal_params(1)
        with pytest.raises(ValueError):
            RunConfig(p, 0.5, 10, SamplePlan(100, 0), log_every=0)

    def test_invalid_plateau_window(self):
        p = standard_normal_params(1)
        with pytest.raises(ValueError):
            RunConfig(p, 0.5, 10, SamplePlan(100, 0), plateau_window=0)


class TestPopulationRun:
    def test_single_component_contracts_geometrically(self):
        p = MixtureParams(np.array([1.0]), np.array([[2.0]]))
        config = RunConfig(p, 0.5, 10, SamplePlan(100_000, 0))
        log = run_population_gradient_em(config)
        # Exact dynamics are mu *= 0.5 each step; MC noise adds a band.
        assert abs(log.final_params.means[0, 0]) <= 2.0 * 0.5**10 + 0.01

    def test_zero_init_is_a_fixed_point(self):
        p = MixtureParams(np.full(3, 1 / 3), np.zeros((3, 2)))
        config = RunConfig(p, 0.7, 20, SamplePlan(10_000, 1))
        log = run_population_gradient_em(config)
        # Antithetic batches make the zero configuration exactly invariant.
        np.testing.assert_array_equal(log.final_params.means, np.zeros((3, 2)))
        for r in log.records:
            assert abs(r.loss) <= 3 * r.loss_se + 1e-12

    def test_loss_sequence_non_increasing_within_noise(self):
        rng = np.random.default_rng(3)
        p = MixtureParams(
            np.array([0.25, 0.35, 0.4]), 0.5 * rng.standard_normal((3, 4))
        )
        config = RunConfig(p, 0.7, 60, SamplePlan(40_000, 2))
        log = run_population_gradient_em(config)
        for a, b in zip(log.records, log.records[1:]):
            tol = 3 * np.hypot(a.loss_se, b.loss_se)
            assert b.loss <= a.loss + tol

    def test_record_count_matches_log_every(self):
        p = standard_normal_params(2)
        config = RunConfig(p, 0.5, 50, SamplePlan(1000, 0), log_every=10)
        log = run_population_gradient_em(config)
        assert [r.step for r in log.records] == [0, 10, 20, 30, 40, 50]

    def test_final_state_always_logged(self):
        p = standard_normal_params(2)
        config = RunConfig(p, 0.5, 45, SamplePlan(1000, 0), log_every=10)
        log = run_population_gradient_em(config)
        assert log.records[-1].step == 45

    def test_deterministic_given_config(self):
        rng = np.random.default_rng(4)
        p = MixtureParams(np.array([0.5, 0.5]), rng.standard_normal((2, 3)))
        config = RunConfig(p, 0.7, 15, SamplePlan(4000, 9))
        a = run_population_gradient_em(config)
        b = run_population_gradient_em(config)
        np.testing.assert_array_equal(a.final_params.means, b.final_params.means)
        np.testing.assert_array_equal(a.losses, b.losses)

    def test_symmetry_preserved_from_bad_region(self):
        # Antithetic batches keep mu_1 = -mu_2 exactly; the center component
        # stays at zero up to summation-order rounding in the second-moment
        # accumulation (~1e-20 per step).
        p = bad_region_params(4, 3, 2.0)
        config = RunConfig(p, 0.7, 30, SamplePlan(20_000, 5), track_means=True)
        log = run_population_gradient_em(config)
        for r in log.records:
            np.testing.assert_array_equal(r.means[0], -r.means[1])
            np.testing.assert_allclose(r.means[2], np.zeros(4), atol=1e-15)

    def test_potential_tracked(self):
        p = bad_region_params(3, 2, 1.0)
        config = RunConfig(p, 0.5, 5, SamplePlan(2000, 0))
        log = run_population_gradient_em(config)
        assert log.records[0].potential_u == pytest.approx(2 * 3.0)


class TestSampleRun:
    def dataset(self, points):
        points = np.asarray(points, dtype=np.float64)
        plan = SamplePlan(points.shape[0], 0, antithetic=False)
        return SampleBatch(points, plan)

    def config(self, p, eta=0.7, steps=100, m=4, **kw):
        plan = SamplePlan(m, 0, antithetic=False)
        return RunConfig(p, eta, steps, plan, fresh_batch_per_step=False, **kw)

    def test_requires_fixed_dataset_mode(self):
        p = standard_normal_params(1)
        data = self.dataset([[0.0], [1.0]])
        with pytest.raises(ValueError):
            run_sample_gradient_em(
                RunConfig(p, 0.5, 10, data.plan, fresh_batch_per_step=True), data
            )

    def test_single_origin_point_converges_in_one_step(self):
        p = MixtureParams(np.array([1.0]), np.array([[3.0, -1.0]]))
        data = self.dataset([[0.0, 0.0]])
        log = run_sample_gradient_em(self.config(p, eta=1.0, m=1), data)
        np.testing.assert_array_equal(log.final_params.means, np.zeros((1, 2)))
        assert log.converged_step == 1

    def test_single_component_converges_to_dataset_mean(self):
        rng = np.random.default_rng(6)
        pts = rng.standard_normal((50, 2)) + np.array([1.0, -2.0])
        p = MixtureParams(np.array([1.0]), np.zeros((1, 2)))
        log = run_sample_gradient_em(self.config(p, steps=300, m=50), self.dataset(pts))
        np.testing.assert_allclose(
            log.final_params.means[0], pts.mean(axis=0), atol=1e-5
        )

    def test_records_parametric_error(self):
        p = MixtureParams(np.array([1.0]), np.array([[1.0]]))
        data = self.dataset([[0.0]])
        log = run_sample_gradient_em(self.config(p, eta=1.0, m=1), data)
        assert log.final_parametric_error == 0.0

    def test_plateau_stopping(self):
        # A stationary init plateaus immediately once the window fills.
        rng = np.random.default_rng(7)
        pts = rng.standard_normal((200, 2))
        p = MixtureParams(np.array([0.5, 0.5]), 0.4 * rng.standard_normal((2, 2)))
        log = run_sample_gradient_em(
            self.config(p, steps=5000, m=200, plateau_window=50, plateau_rtol=0.5),
            self.dataset(pts),
        )
        assert log.plateau_step is not None or log.converged_step is not None

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        pts = rng.standard_normal((100, 2))
        p = MixtureParams(np.array([0.5, 0.5]), 0.3 * rng.standard_normal((2, 2)))
        a = run_sample_gradient_em(self.config(p, steps=50, m=100), self.dataset(pts))
        b = run_sample_gradient_em(self.config(p, steps=50, m=100), self.dataset(pts))
        np.testing.assert_array_equal(a.final_params.means, b.final_params.means)
