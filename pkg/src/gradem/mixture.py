"""Exact pointwise math of an isotropic Gaussian mixture student model.

Everything here is deterministic: densities, membership weights, the
membership-weighted mean and its spatial derivatives.  The ground truth is
always the standard Gaussian centered at the origin, so the mixture means
double as the distance to the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_LOG_2PI = float(np.log(2.0 * np.pi))

_WEIGHT_SUM_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when a point's dimension does not match the mixture."""


@dataclass(frozen=True)
class MixtureParams:
    """Student mixture: simplex weights and one mean row per component.

    Weights and the unit covariance are fixed; only means are trainable.
    Weights are validated, never renormalized: a weight vector off the
    simplex is a config bug and should fail loudly.
    """

    weights: np.ndarray
    means: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        m = np.asarray(self.means, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty 1-d vector")
        if m.ndim != 2:
            raise ValueError("means must be a 2-d (components, dim) matrix")
        if m.shape[0] != w.size:
            raise ValueError(
                f"means has {m.shape[0]} rows but there are {w.size} weights"
            )
        if m.shape[1] < 1:
            raise ValueError("dimension must be at least 1")
        if not np.all(np.isfinite(m)):
            raise ValueError("mean entries must be finite")
        if np.any(w <= 0.0):
            raise ValueError("every weight must be positive")
        if abs(w.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        w.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def with_means(self, means: np.ndarray) -> "MixtureParams":
        return MixtureParams(self.weights, means)


def _check_points(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Coerce x to an (N, d) array of evaluation points."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != params.dim:
        raise DimensionError(
            f"points have dimension {pts.shape[-1]}, mixture has {params.dim}"
        )
    return pts, single


def log_weighted_terms(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Per-component log terms log(pi_i) - ||x - mu_i||^2 / 2, shape (N, n).

    Uses the expanded square ||x||^2 - 2 x.mu + ||mu||^2 so that negating
    both x and the means reproduces bit-identical values.
    """
    pts, _ = _check_points(params, x)
    mu = params.means
    sq = (
        np.sum(pts * pts, axis=1)[:, None]
        - 2.0 * pts @ mu.T
        + np.sum(mu * mu, axis=1)[None, :]
    )
    return np.log(params.weights)[None, :] - 0.5 * sq


def log_density(params: MixtureParams, x: np.ndarray):
    """log p(x) of the mixture via log-sum-exp; finite for finite x."""
    terms = log_weighted_terms(params, x)
    m = np.max(terms, axis=1)
    out = m + np.log(np.sum(np.exp(terms - m[:, None]), axis=1))
    out -= 0.5 * params.dim * _LOG_2PI
    _, single = _check_points(params, x)
    return float(out[0]) if single else out


def membership(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Posterior component probabilities psi_i(x), shape (N, n) or (n,).

    Computed as a max-subtracted softmax of the log terms; entries are
    strictly positive and sum to 1.
    """
    terms = log_weighted_terms(params, x)
    terms = terms - np.max(terms, axis=1)[:, None]
    e = np.exp(terms)
    psi = e / np.sum(e, axis=1)[:, None]
    _, single = _check_points(params, x)
    return psi[0] if single else psi


def psi_tilde(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Membership-weighted mean sum_i psi_i(x) mu_i; lies in conv(means)."""
    psi = membership(params, x)
    return psi @ params.means


def membership_jacobian(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Spatial Jacobian of the membership map at a single point x.

    Row i is psi_i(x) * (mu_i - psi_tilde(x)); the rows sum to zero
    because the memberships sum to one.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("membership_jacobian expects a single point")
    psi = membership(params, x)
    tilde = psi @ params.means
    return psi[:, None] * (params.means - tilde[None, :])


def psi_tilde_jacobian(params: MixtureParams, x: np.ndarray) -> np.ndarray:
    """Spatial Jacobian of psi_tilde at a single point x.

    Equals 1/2 sum_{ij} psi_i psi_j (mu_i - mu_j)(mu_i - mu_j)^T, which is
    symmetric positive semi-definite by construction.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("psi_tilde_jacobian expects a single point")
    psi = membership(params, x)
    mu = params.means
    # Equivalent pairwise-difference form, O(n d^2):
    #   sum_i psi_i mu_i mu_i^T - (sum psi mu)(sum psi mu)^T
    tilde = psi @ mu
    second = np.einsum("i,ij,ik->jk", psi, mu, mu)
    jac = second - np.outer(tilde, tilde)
    return 0.5 * (jac + jac.T)


def potential(params: MixtureParams) -> float:
    """Sum of squared mean norms; zero iff every mean is at the origin."""
    return float(np.sum(params.means * params.means))


def mu_max(params: MixtureParams) -> tuple[int, float]:
    """(index, value) of the largest mean norm; ties go to the lowest index."""
    norms = np.linalg.norm(params.means, axis=1)
    i = int(np.argmax(norms))
    return i, float(norms[i])


def component_norms(params: MixtureParams) -> np.ndarray:
    return np.linalg.norm(params.means, axis=1)


def parametric_error(params: MixtureParams) -> float:
    """Weighted squared distance to the ground truth, sum_i pi_i ||mu_i||^2."""
    return float(np.sum(params.weights * np.sum(params.means**2, axis=1)))


def standard_normal_params(dim: int) -> MixtureParams:
    """Single zero-mean component: the ground truth as a degenerate mixture."""
    return MixtureParams(np.array([1.0]), np.zeros((1, dim)))
