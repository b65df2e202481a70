"""Numerically checkable inequalities and identities for the mixture loss.

Each check_* function compares a closed-form bound against a Monte Carlo
or quadrature estimate and returns a BoundReport.  The bounds are theorems,
so on inputs satisfying their preconditions a failure beyond the statistical
tolerance indicates an implementation bug, not a counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mixture import MixtureParams, membership, mu_max, potential
from .sampling import SamplePlan, draw_standard_normal
from .estimators import (
    estimate_gradient_transformed,
    estimate_mgf,
    estimate_psi_tilde_sqnorm,
    stein_residual,
)


@dataclass(frozen=True)
class BoundReport:
    """One inequality: satisfied iff slack = rhs - lhs >= -tolerance."""

    name: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    tolerance_used: float

    @staticmethod
    def make(name: str, lhs: float, rhs: float, tolerance: float) -> "BoundReport":
        lhs, rhs, tolerance = float(lhs), float(rhs), float(tolerance)
        slack = rhs - lhs
        return BoundReport(name, lhs, rhs, slack, bool(slack >= -tolerance), tolerance)


def loss_upper_bound(params: MixtureParams) -> float:
    """Weighted half squared mean norms, an upper bound on the KL loss."""
    return float(0.5 * np.sum(params.weights * np.sum(params.means**2, axis=1)))


def separation_lower_bound(params: MixtureParams) -> float:
    """Explicit-constant lower bound on E||psi_tilde||^2.

    exp(-8U) / (40000 d (1 + 2 mu_max sqrt(d))^2) times the squared
    weighted pairwise separation sum.
    """
    d = params.dim
    _, mmax = mu_max(params)
    u = potential(params)
    diffs = params.means[:, None, :] - params.means[None, :, :]
    sep = np.sum(
        params.weights[:, None] * params.weights[None, :] * np.sum(diffs**2, axis=2)
    )
    denom = 40000.0 * d * (1.0 + 2.0 * mmax * math.sqrt(d)) ** 2
    return math.exp(-8.0 * u) / denom * sep**2


def check_projection_lower_bound(
    params: MixtureParams, plan: SamplePlan
) -> BoundReport:
    """Lower bound on the gradient projection E||psi_tilde||^2.

    Uses the separation bound; when every mean sits within mu_max/2 of the
    largest one (the almost-parallel regime), the stronger mu_max^2/4 bound
    applies as well.
    """
    lhs = separation_lower_bound(params)
    i_max, mmax = mu_max(params)
    if mmax > 0:
        gaps = np.linalg.norm(params.means - params.means[i_max][None, :], axis=1)
        if np.all(gaps < mmax / 2.0):
            lhs = max(lhs, mmax**2 / 4.0)
    batch = draw_standard_normal(params.dim, plan)
    est = estimate_psi_tilde_sqnorm(params, batch)
    return BoundReport.make(
        "projection_lower_bound", lhs, est.value, 4.0 * est.std_error
    )


def _check_locality(params: MixtureParams, deltas: np.ndarray) -> np.ndarray:
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.shape != params.means.shape:
        raise ValueError("deltas must match the mean matrix shape")
    d = params.dim
    norms = np.linalg.norm(deltas, axis=1)
    limits = 1.0 / np.maximum(6.0 * d, 2.0 * np.linalg.norm(params.means, axis=1))
    bad = np.nonzero(norms > limits)[0]
    if bad.size:
        raise ValueError(
            f"delta for component {bad[0]} violates the locality condition "
            f"({norms[bad[0]]:.3g} > {limits[bad[0]]:.3g})"
        )
    return deltas


def smoothness_rhs(params: MixtureParams, deltas: np.ndarray, component: int) -> float:
    """Local smoothness modulus for one component's gradient row."""
    deltas = _check_locality(params, deltas)
    _, mmax = mu_max(params)
    n, d = params.means.shape
    norms = np.linalg.norm(deltas, axis=1)
    return float(
        n * mmax * (30.0 * math.sqrt(d) + 4.0 * mmax) * norms[component]
        + norms.sum()
    )


def check_smoothness(
    params: MixtureParams, deltas: np.ndarray, plan: SamplePlan
) -> list[BoundReport]:
    """Gradient difference between mu and mu + delta vs the smoothness modulus.

    Both gradients are estimated on a shared batch (common random numbers).
    """
    deltas = _check_locality(params, deltas)
    batch = draw_standard_normal(params.dim, plan)
    g0 = estimate_gradient_transformed(params, batch)
    g1 = estimate_gradient_transformed(
        params.with_means(params.means + deltas), batch
    )
    reports = []
    for i in range(params.n_components):
        lhs = float(np.linalg.norm(g1.per_component[i] - g0.per_component[i]))
        rhs = smoothness_rhs(params, deltas, i)
        tol = 4.0 * float(
            np.sqrt(np.sum(g0.std_error[i] ** 2 + g1.std_error[i] ** 2))
        )
        reports.append(BoundReport.make(f"smoothness_component_{i}", lhs, rhs, tol))
    return reports


def bad_region_gradient_bound(params: MixtureParams) -> tuple[bool, float]:
    """Gradient norm bound in the two-far-components region.

    Applicable when the first two means have norm >= 10 sqrt(d) and all
    others have norm <= sqrt(d).
    """
    d = params.dim
    norms = np.linalg.norm(params.means, axis=1)
    if params.n_components < 2:
        return False, float("nan")
    sd = math.sqrt(d)
    applicable = bool(
        norms[0] >= 10.0 * sd
        and norms[1] >= 10.0 * sd
        and np.all(norms[2:] <= sd)
    )
    bound = 2.0 * float(norms[2:].sum()) + 2.0 * math.exp(-d) * float(
        norms[0] + norms[1]
    )
    return applicable, bound


def trap_horizon(d: int, eta: float) -> float:
    """Number of steps the bad region provably traps the dynamics: e^d / (30 eta)."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    return math.exp(d) / (30.0 * eta)


def check_mgf_bound(d: int, c: float, plan: SamplePlan) -> BoundReport:
    """E[exp(c ||x||)] <= 1 + 5 sqrt(d) c, for 0 < c <= 1/(3d)."""
    if not 0.0 < c <= 1.0 / (3.0 * d):
        raise ValueError(f"c must lie in (0, 1/(3d)]; got {c} with d={d}")
    batch = draw_standard_normal(d, plan)
    est = estimate_mgf(d, c, batch)
    rhs = 1.0 + 5.0 * math.sqrt(d) * c
    return BoundReport.make(f"mgf_bound_d{d}", est.value, rhs, 3.0 * est.std_error)


def _membership_product_path_integral(
    params: MixtureParams, x: np.ndarray, i: int, j: int, quad_points: int
) -> float:
    """Composite trapezoid of psi_i(t x) psi_j(t x) over t in [-1, 1]."""
    ts = np.linspace(-1.0, 1.0, quad_points + 1)
    psi = membership(params, ts[:, None] * x[None, :])
    vals = psi[:, i] * psi[:, j]
    return float(np.trapezoid(vals, ts))


def check_path_integral_bound(
    params: MixtureParams,
    x: np.ndarray,
    i: int,
    j: int,
    quad_points: int = 256,
) -> BoundReport:
    """Lower bound on the path integral of psi_i psi_j along the ray through x.

    The bound's mu_max -> 0 limit is 2 pi_i pi_j exp(-4U), which matches
    the quadrature value exactly when all means vanish.
    """
    x = np.asarray(x, dtype=np.float64)
    if quad_points < 64:
        raise ValueError("quad_points must be at least 64")
    if quad_points % 2:
        raise ValueError("quad_points must be even for the error estimate")
    xnorm = float(np.linalg.norm(x))
    if xnorm == 0.0:
        raise ValueError("x must be nonzero")
    _, mmax = mu_max(params)
    u = potential(params)
    pi_i = params.weights[i]
    pi_j = params.weights[j]
    if mmax == 0.0:
        lhs = 2.0 * pi_i * pi_j * math.exp(-4.0 * u)
    else:
        lhs = (
            pi_i
            * pi_j
            * math.exp(-4.0 * u)
            * (1.0 - math.exp(-4.0 * mmax * xnorm))
            / (2.0 * mmax * xnorm)
        )
    fine = _membership_product_path_integral(params, x, i, j, quad_points)
    coarse = _membership_product_path_integral(params, x, i, j, quad_points // 2)
    tol = abs(fine - coarse) + 1e-12
    return BoundReport.make(f"path_integral_{i}_{j}", lhs, fine, tol)


def check_stein(params: MixtureParams, plan: SamplePlan) -> list[BoundReport]:
    """Per-component Stein residuals; population value is zero."""
    batch = draw_standard_normal(params.dim, plan)
    reports = []
    for i in range(params.n_components):
        res = stein_residual(params, i, batch)
        lhs = float(np.linalg.norm(res.value))
        rhs = 4.0 * float(np.linalg.norm(res.std_error))
        # Oriented as lhs <= rhs with the tolerance folded into rhs.
        reports.append(BoundReport.make(f"stein_component_{i}", lhs, rhs, 0.0))
    return reports
