"""The gradient EM loop: population and finite-sample variants.

The population variant draws a fresh Monte Carlo batch per step (seed
derived from the base seed and the step index) and logs the loss on an
independent fresh batch to avoid optimistic bias.  The finite-sample
variant iterates full-batch updates on one fixed dataset and stops early
once the gradient norm is negligible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mixture import MixtureParams, component_norms, mu_max, parametric_error, potential
from .sampling import SampleBatch, SamplePlan, derive_seed, draw_standard_normal
from .estimators import (
    GradientEstimate,
    estimate_gradient_direct,
    estimate_gradient_transformed,
    estimate_loss,
    gradient_direct_mean,
)

# Seed-stream tags, so gradient and loss batches never collide.
_TAG_GRADIENT = 0
_TAG_LOSS = 1

SAMPLE_RUN_GRAD_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    initial_params: MixtureParams
    step_size: float
    max_steps: int
    plan: SamplePlan
    fresh_batch_per_step: bool = True
    log_every: int = 1
    track_means: bool = False
    plateau_window: int | None = None
    plateau_rtol: float = 1e-3

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.log_every < 1:
            raise ValueError("log_every must be at least 1")
        if self.plateau_window is not None and self.plateau_window < 1:
            raise ValueError("plateau_window must be at least 1 when set")
        if self.plateau_rtol <= 0:
            raise ValueError("plateau_rtol must be positive")


@dataclass(frozen=True)
class StepRecord:
    step: int
    loss: float
    loss_se: float
    grad_norm: float
    grad_se_norm: float
    potential_u: float
    mu_max: float
    comp_norms: np.ndarray
    means: np.ndarray | None = None


@dataclass
class TrajectoryLog:
    records: list[StepRecord] = field(default_factory=list)
    final_params: MixtureParams | None = None
    converged_step: int | None = None
    plateau_step: int | None = None
    final_parametric_error: float | None = None

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.records])

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])

    @property
    def loss_ses(self) -> np.ndarray:
        return np.array([r.loss_se for r in self.records])

    @property
    def potentials(self) -> np.ndarray:
        return np.array([r.potential_u for r in self.records])


class NumericalError(RuntimeError):
    """A gradient came back non-finite; the run is aborted."""


def em_step(
    params: MixtureParams, grad: GradientEstimate, step_size: float
) -> MixtureParams:
    """One descent update of the means; weights and dimension unchanged."""
    g = grad.per_component
    if g.shape != params.means.shape:
        raise ValueError(
            f"gradient shape {g.shape} does not match means {params.means.shape}"
        )
    if not np.all(np.isfinite(g)):
        bad = np.argwhere(~np.isfinite(g))[0]
        raise NumericalError(
            f"non-finite gradient entry at component {bad[0]}, coordinate {bad[1]}"
        )
    return params.with_means(params.means - step_size * g)


def _record(step, params, loss, grad, track_means) -> StepRecord:
    return StepRecord(
        step=step,
        loss=loss.value,
        loss_se=loss.std_error,
        grad_norm=grad.frobenius_norm,
        grad_se_norm=float(np.linalg.norm(grad.std_error)),
        potential_u=potential(params),
        mu_max=mu_max(params)[1],
        comp_norms=component_norms(params),
        means=params.means.copy() if track_means else None,
    )


def run_population_gradient_em(config: RunConfig) -> TrajectoryLog:
    """Iterate gradient EM against the population, one fresh batch per step."""
    params = config.initial_params
    plan = config.plan
    log = TrajectoryLog()
    d = params.dim
    last_logged = -1
    for t in range(config.max_steps):
        grad_batch = draw_standard_normal(
            d, plan.with_seed(derive_seed(plan.seed, _TAG_GRADIENT, t))
        )
        grad = estimate_gradient_transformed(params, grad_batch)
        if t % config.log_every == 0:
            loss_batch = draw_standard_normal(
                d, plan.with_seed(derive_seed(plan.seed, _TAG_LOSS, t))
            )
            loss = estimate_loss(params, loss_batch)
            log.records.append(_record(t, params, loss, grad, config.track_means))
            last_logged = t
        params = em_step(params, grad, config.step_size)
    t = config.max_steps
    grad_batch = draw_standard_normal(
        d, plan.with_seed(derive_seed(plan.seed, _TAG_GRADIENT, t))
    )
    grad = estimate_gradient_transformed(params, grad_batch)
    loss_batch = draw_standard_normal(
        d, plan.with_seed(derive_seed(plan.seed, _TAG_LOSS, t))
    )
    loss = estimate_loss(params, loss_batch)
    if last_logged != t:
        log.records.append(_record(t, params, loss, grad, config.track_means))
    log.final_params = params
    log.final_parametric_error = parametric_error(params)
    return log


def run_sample_gradient_em(config: RunConfig, dataset: SampleBatch) -> TrajectoryLog:
    """Full-batch gradient EM on a fixed dataset.

    Steps along the direct gradient E_m[psi_i(x)(mu_i - x)].  The Stein
    rewrite as E[psi_i psi_tilde] holds only under the population measure;
    on a fixed sample it is a different vector field whose flow suppresses
    exactly the sampling fluctuation these runs exist to measure.

    Stops once the gradient Frobenius norm drops below SAMPLE_RUN_GRAD_TOL,
    or, when plateau_window is set, once the parametric error has decreased
    by less than plateau_rtol (relatively) over that many steps.
    """
    if config.fresh_batch_per_step:
        raise ValueError("sample runs use a fixed dataset; set fresh_batch_per_step=False")
    params = config.initial_params
    log = TrajectoryLog()
    window = config.plateau_window
    err_history: list[float] = []
    for t in range(config.max_steps):
        g = gradient_direct_mean(params, dataset)
        if t % config.log_every == 0:
            grad = estimate_gradient_direct(params, dataset)
            loss = estimate_loss(params, dataset)
            log.records.append(_record(t, params, loss, grad, config.track_means))
        if float(np.linalg.norm(g)) < SAMPLE_RUN_GRAD_TOL:
            log.converged_step = t
            break
        if window is not None:
            err_history.append(parametric_error(params))
            if len(err_history) > window:
                past = err_history[-window - 1]
                if past - err_history[-1] < config.plateau_rtol * past:
                    log.plateau_step = t
                    break
        if not np.all(np.isfinite(g)):
            bad = np.argwhere(~np.isfinite(g))[0]
            raise NumericalError(
                f"non-finite gradient entry at component {bad[0]}, coordinate {bad[1]}"
            )
        params = params.with_means(params.means - config.step_size * g)
    stop = log.converged_step if log.converged_step is not None else log.plateau_step
    t_final = stop if stop is not None else config.max_steps
    if not log.records or log.records[-1].step != t_final:
        grad = estimate_gradient_direct(params, dataset)
        loss = estimate_loss(params, dataset)
        log.records.append(_record(t_final, params, loss, grad, config.track_means))
    log.final_params = params
    log.final_parametric_error = parametric_error(params)
    return log
