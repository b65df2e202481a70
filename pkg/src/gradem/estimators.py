"""Monte Carlo estimators of the population quantities.

All estimators are pure functions of (params, batch) and reduce in a fixed
chunk order.  For antithetic batches each +/- pair is summed first, so odd
integrands cancel exactly in floating point, not just in expectation.

Sign convention: the loss gradient for component i is
E[psi_i(x) (mu_i - x)] = E[psi_i(x) psi_tilde(x)], and the optimizer
descends, mu_i <- mu_i - eta * grad_i.  This is the unique convention under
which the single-component model contracts toward the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mixture import MixtureParams, DimensionError, membership
from .sampling import SampleBatch


@dataclass(frozen=True)
class ScalarEstimate:
    value: float
    std_error: float
    sample_count: int


@dataclass(frozen=True)
class VectorEstimate:
    value: np.ndarray
    std_error: np.ndarray
    sample_count: int


@dataclass(frozen=True)
class GradientEstimate:
    """Per-component gradient rows (n, d) with entrywise standard errors."""

    per_component: np.ndarray
    std_error: np.ndarray
    sample_count: int

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.per_component))


def _check_batch(params: MixtureParams, batch: SampleBatch):
    if batch.dim != params.dim:
        raise DimensionError(
            f"batch dimension {batch.dim} does not match mixture {params.dim}"
        )


def _reduce(batch: SampleBatch, integrand: Callable[[np.ndarray], np.ndarray]):
    """Chunked mean and entrywise SE of a per-sample integrand.

    integrand maps a (k, d) chunk of points to (k, *shape) values.  Chunk
    boundaries stay pair-aligned for antithetic batches and pairs are
    summed before anything else.
    """
    pts = batch.points
    n_samples = pts.shape[0]
    chunk = batch.plan.chunk_size
    if batch.plan.antithetic and chunk % 2:
        chunk += 1
    total = None
    sumsq = None
    for start in range(0, n_samples, chunk):
        vals = integrand(pts[start : start + chunk])
        if sumsq is None:
            total = np.zeros(vals.shape[1:])
            sumsq = np.zeros(vals.shape[1:])
        sumsq += np.sum(vals * vals, axis=0)
        if batch.plan.antithetic:
            k = vals.shape[0]
            vals = vals[0::2] + vals[1::2] if k % 2 == 0 else vals
        total += vals.sum(axis=0)
    mean = total / n_samples
    var = np.maximum(sumsq - n_samples * mean * mean, 0.0) / max(n_samples - 1, 1)
    se = np.sqrt(var / n_samples)
    return mean, se


def _loss_samples(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Per-sample -(log p_mu(x) - log p_0(x)).

    The log ratio collapses to -logsumexp_i(log pi_i + <x, mu_i> -
    ||mu_i||^2 / 2): the Gaussian constants and the ||x||^2 term cancel
    analytically, so an exact fit gives exactly zero per sample.
    """
    mu = params.means
    logits = (
        np.log(params.weights)[None, :]
        + x @ mu.T
        - 0.5 * np.sum(mu * mu, axis=1)[None, :]
    )
    m = np.max(logits, axis=1)
    return -(m + np.log(np.sum(np.exp(logits - m[:, None]), axis=1)))


def estimate_loss(params: MixtureParams, batch: SampleBatch) -> ScalarEstimate:
    """KL divergence from the standard Gaussian to the mixture."""
    _check_batch(params, batch)
    mean, se = _reduce(batch, lambda x: _loss_samples(params, x))
    return ScalarEstimate(float(mean), float(se), batch.sample_count)


def estimate_gradient_direct(
    params: MixtureParams, batch: SampleBatch
) -> GradientEstimate:
    """Gradient rows as averages of psi_i(x) (mu_i - x)."""
    _check_batch(params, batch)
    mu = params.means

    def integrand(x):
        psi = membership(params, x)
        return psi[:, :, None] * (mu[None, :, :] - x[:, None, :])

    mean, se = _reduce(batch, integrand)
    return GradientEstimate(mean, se, batch.sample_count)


def estimate_gradient_transformed(
    params: MixtureParams, batch: SampleBatch
) -> GradientEstimate:
    """Gradient rows as averages of psi_i(x) psi_tilde(x).

    Equal in expectation to the direct form (Stein transformation), usually
    with lower variance.
    """
    _check_batch(params, batch)
    mu = params.means

    def integrand(x):
        psi = membership(params, x)
        tilde = psi @ mu
        return psi[:, :, None] * tilde[:, None, :]

    mean, se = _reduce(batch, integrand)
    return GradientEstimate(mean, se, batch.sample_count)


def gradient_direct_mean(params: MixtureParams, batch: SampleBatch) -> np.ndarray:
    """Mean of psi_i(x) (mu_i - x) only, without standard errors.

    Algebraically identical to estimate_gradient_direct's value but computed
    as membership row sums and two matmuls per chunk, so it is cheap enough
    for the inner loop of long fixed-dataset runs.  The ||x||^2 term of the
    squared distance is dropped (the softmax is invariant to it).
    """
    _check_batch(params, batch)
    mu = params.means
    pts = batch.points
    n_samples = pts.shape[0]
    chunk = batch.plan.chunk_size
    bias = np.log(params.weights) - 0.5 * np.sum(mu * mu, axis=1)
    psi_sum = np.zeros(params.n_components)
    cross = np.zeros_like(mu)
    for start in range(0, n_samples, chunk):
        x = pts[start : start + chunk]
        # (n, k) layout keeps every reduction contiguous along the sample axis.
        logits = mu @ x.T
        logits += bias[:, None]
        logits -= np.maximum.reduce(logits, axis=0)[None, :]
        np.exp(logits, out=logits)
        inv_z = 1.0 / np.add.reduce(logits, axis=0)
        logits *= inv_z[None, :]
        psi_sum += logits.sum(axis=1)
        cross += logits @ x
    return (psi_sum[:, None] * mu - cross) / n_samples


def estimate_psi_tilde_sqnorm(
    params: MixtureParams, batch: SampleBatch
) -> ScalarEstimate:
    """Average of ||psi_tilde(x)||^2; equals <grad, means> in expectation."""
    _check_batch(params, batch)
    mu = params.means

    def integrand(x):
        tilde = membership(params, x) @ mu
        return np.sum(tilde * tilde, axis=1)

    mean, se = _reduce(batch, integrand)
    return ScalarEstimate(float(mean), float(se), batch.sample_count)


def finite_difference_gradient(
    params: MixtureParams, batch: SampleBatch, h: float = 1e-4
) -> GradientEstimate:
    """Central differences of the loss, coordinate by coordinate.

    Every perturbed loss is evaluated on the SAME batch (common random
    numbers) so the Monte Carlo noise largely cancels in the difference.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    _check_batch(params, batch)
    n, d = params.means.shape

    def loss_samples(means, x):
        return _loss_samples(params.with_means(means), x)

    def integrand(x):
        out = np.empty((x.shape[0], n, d))
        for i in range(n):
            for j in range(d):
                plus = params.means.copy()
                minus = params.means.copy()
                plus[i, j] += h
                minus[i, j] -= h
                out[:, i, j] = (loss_samples(plus, x) - loss_samples(minus, x)) / (
                    2.0 * h
                )
        return out

    mean, se = _reduce(batch, integrand)
    return GradientEstimate(mean, se, batch.sample_count)


def estimate_mgf(d: int, c: float, batch: SampleBatch) -> ScalarEstimate:
    """Average of exp(c ||x||), the moment generating function of ||x||."""
    if c <= 0:
        raise ValueError("c must be positive")
    if batch.dim != d:
        raise DimensionError(f"batch dimension {batch.dim}, expected {d}")

    def integrand(x):
        return np.exp(c * np.linalg.norm(x, axis=1))

    mean, se = _reduce(batch, integrand)
    return ScalarEstimate(float(mean), float(se), batch.sample_count)


def stein_residual(
    params: MixtureParams, component: int, batch: SampleBatch
) -> VectorEstimate:
    """Average of psi_i(x) x minus the i-th membership Jacobian row.

    The population value is zero by Stein's identity; the estimate is a
    direct Monte Carlo witness of it.
    """
    if not 0 <= component < params.n_components:
        raise IndexError(f"component {component} out of range")
    _check_batch(params, batch)
    mu_i = params.means[component]

    def integrand(x):
        psi = membership(params, x)
        tilde = psi @ params.means
        pi = psi[:, component][:, None]
        return pi * x - pi * (mu_i[None, :] - tilde)

    mean, se = _reduce(batch, integrand)
    return VectorEstimate(mean, se, batch.sample_count)


def gradient_means_inner_product(grad: GradientEstimate, params: MixtureParams) -> float:
    """Frobenius inner product <grad, means>, the projection onto the parameters."""
    return float(np.sum(grad.per_component * params.means))
