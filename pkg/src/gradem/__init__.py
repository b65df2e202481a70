"""Gradient EM on over-parameterized isotropic Gaussian mixtures.

A small numerical laboratory around the population and finite-sample
gradient EM dynamics when the data come from a single standard Gaussian:
the model, seeded Monte Carlo estimators, the optimization loop, the
closed-form bounds with their numerical checks, and an experiment harness.
"""

from .mixture import (
    DimensionError,
    MixtureParams,
    component_norms,
    log_density,
    membership,
    membership_jacobian,
    mu_max,
    parametric_error,
    potential,
    psi_tilde,
    psi_tilde_jacobian,
    standard_normal_params,
)
from .sampling import (
    SampleBatch,
    SamplePlan,
    derive_seed,
    draw_dirichlet_weights,
    draw_standard_normal,
)
from .estimators import (
    GradientEstimate,
    ScalarEstimate,
    VectorEstimate,
    estimate_gradient_direct,
    estimate_gradient_transformed,
    estimate_loss,
    estimate_mgf,
    estimate_psi_tilde_sqnorm,
    finite_difference_gradient,
    gradient_means_inner_product,
    stein_residual,
)
from .optimizer import (
    NumericalError,
    RunConfig,
    StepRecord,
    TrajectoryLog,
    em_step,
    run_population_gradient_em,
    run_sample_gradient_em,
)
from .bounds import (
    BoundReport,
    bad_region_gradient_bound,
    check_mgf_bound,
    check_path_integral_bound,
    check_projection_lower_bound,
    check_smoothness,
    check_stein,
    loss_upper_bound,
    separation_lower_bound,
    smoothness_rhs,
    trap_horizon,
)
from .harness import (
    ExperimentSpec,
    RateFit,
    bad_region_params,
    fit_rate,
    run_bad_init_experiment,
    run_convergence_experiment,
    run_experiment,
    run_stat_rate_experiment,
    run_verify_suite,
    run_weights_experiment,
)

__all__ = [
    "BoundReport",
    "DimensionError",
    "ExperimentSpec",
    "GradientEstimate",
    "MixtureParams",
    "NumericalError",
    "RateFit",
    "RunConfig",
    "SampleBatch",
    "SamplePlan",
    "ScalarEstimate",
    "StepRecord",
    "TrajectoryLog",
    "VectorEstimate",
    "bad_region_gradient_bound",
    "bad_region_params",
    "check_mgf_bound",
    "check_path_integral_bound",
    "check_projection_lower_bound",
    "check_smoothness",
    "check_stein",
    "component_norms",
    "derive_seed",
    "draw_dirichlet_weights",
    "draw_standard_normal",
    "em_step",
    "estimate_gradient_direct",
    "estimate_gradient_transformed",
    "estimate_loss",
    "estimate_mgf",
    "estimate_psi_tilde_sqnorm",
    "finite_difference_gradient",
    "fit_rate",
    "gradient_means_inner_product",
    "log_density",
    "loss_upper_bound",
    "membership",
    "membership_jacobian",
    "mu_max",
    "parametric_error",
    "potential",
    "psi_tilde",
    "psi_tilde_jacobian",
    "run_bad_init_experiment",
    "run_convergence_experiment",
    "run_experiment",
    "run_population_gradient_em",
    "run_sample_gradient_em",
    "run_stat_rate_experiment",
    "run_verify_suite",
    "run_weights_experiment",
    "separation_lower_bound",
    "smoothness_rhs",
    "standard_normal_params",
    "stein_residual",
    "trap_horizon",
]
