"""Seeded random sources: standard-normal batches and Dirichlet weights.

The normal stream is generated in fixed-size blocks, each from its own
generator keyed by (seed, block index).  The stream therefore depends only
on (seed, row count, dimension): chunked or parallel consumers see the
same bits, and chunk_size never changes the numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Rows per generator substream.  Fixed: changing it changes every stream.
_BLOCK_ROWS = 1 << 14

_SEED_MASK = (1 << 64) - 1


def derive_seed(seed: int, *tags: int) -> int:
    """Deterministic 64-bit child seed from a base seed and integer tags."""
    ss = np.random.SeedSequence([seed & _SEED_MASK, *tags])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SamplePlan:
    """Monte Carlo configuration shared by all estimators.

    Antithetic pairing is on by default: it preserves the problem's
    x -> -x symmetry exactly in floating point, which plain Monte Carlo
    only preserves in expectation.
    """

    sample_count: int
    seed: int
    antithetic: bool = True
    chunk_size: int | None = None

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.antithetic and self.sample_count % 2 != 0:
            raise ValueError("antithetic plans need an even sample_count")
        if self.chunk_size is None:
            object.__setattr__(
                self, "chunk_size", min(self.sample_count, 1 << 16)
            )
        if not 1 <= self.chunk_size <= self.sample_count:
            raise ValueError("chunk_size must be in [1, sample_count]")

    def with_seed(self, seed: int) -> "SamplePlan":
        return SamplePlan(self.sample_count, seed, self.antithetic, self.chunk_size)


@dataclass(frozen=True)
class SampleBatch:
    """An (N, d) matrix of draws plus the plan that produced it."""

    points: np.ndarray
    plan: SamplePlan

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def sample_count(self) -> int:
        return self.points.shape[0]


def _normal_rows(n_rows: int, d: int, seed: int) -> np.ndarray:
    out = np.empty((n_rows, d))
    for block, start in enumerate(range(0, n_rows, _BLOCK_ROWS)):
        stop = min(start + _BLOCK_ROWS, n_rows)
        rng = np.random.default_rng([seed & _SEED_MASK, block])
        out[start:stop] = rng.standard_normal((stop - start, d))
    return out


def draw_standard_normal(d: int, plan: SamplePlan) -> SampleBatch:
    """N(0, I_d) batch; antithetic plans interleave each draw with its negation."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if plan.antithetic:
        half = _normal_rows(plan.sample_count // 2, d, plan.seed)
        pts = np.empty((plan.sample_count, d))
        pts[0::2] = half
        pts[1::2] = -half
    else:
        pts = _normal_rows(plan.sample_count, d, plan.seed)
    pts.setflags(write=False)
    return SampleBatch(pts, plan)


def draw_dirichlet_weights(n: int, alpha: float, seed: int) -> np.ndarray:
    """One Dirichlet(alpha, ..., alpha) draw on the n-simplex."""
    if n < 1:
        raise ValueError("n must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n == 1:
        return np.array([1.0])
    rng = np.random.default_rng([seed & _SEED_MASK])
    w = rng.dirichlet(np.full(n, float(alpha)))
    # Guard against zero entries from extreme draws; renormalize explicitly.
    w = np.clip(w, 1e-300, None)
    return w / w.sum()
