"""Streaming first and second moments with a rank-one inverse update.

This module maintains, one observation at a time, everything the direction
estimator needs: the running covariate mean, the inverse of the biased
(1/n-normalized) sample covariance, and per-slice response-conditional
covariate means.  The inverse covariance is never recomputed from scratch
after warm-up; it advances by a Sherman-Morrison style rank-one correction,

    inv_new = (n / (n - 1)) * (inv - (w w') / (n + rho)),

where n is the count after the update, w = inv @ (x - mean_old) and
rho = (x - mean_old)' inv (x - mean_old).  The identity is exact in real
arithmetic, so any drift between the maintained inverse and the true inverse
is pure floating-point accumulation; a periodic re-symmetrization keeps that
drift from feeding on asymmetry.

Slices partition responses into "low" (slice 1, y <= boundary) and "high"
(slice 2, y > boundary).  The boundary is chosen once, before streaming
starts, and stays fixed; each arriving observation updates exactly one
slice mean.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EmptySliceError,
    InsufficientDataError,
    NumericalBreakdownError,
    SingularMatrixError,
)
from .simulate import Sample

# Smallest acceptable ratio of extreme singular values before the batch
# covariance is declared unusable.
SINGULARITY_TOLERANCE = 1e-10

# Re-symmetrize the maintained inverse every this many rank-one updates.
RESYMMETRIZE_EVERY = 1024


@dataclass(frozen=True)
class Slicer:
    """Fixed two-slice partition of the response line at a boundary."""

    boundary: float

    def slice_of(self, y: float) -> int:
        """Slice index of a response: 1 if y <= boundary else 2."""
        return 1 if y <= self.boundary else 2

    def slices_of(self, ys: np.ndarray) -> np.ndarray:
        """Vectorized slice_of."""
        return np.where(np.asarray(ys) <= self.boundary, 1, 2)


@dataclass(frozen=True)
class MomentState:
    """Running moments after n observations.

    Attributes:
        n: number of observations absorbed.
        mean: covariate mean, shape (p,).
        inv_cov: inverse of the biased sample covariance, shape (p, p).
        slice_counts: observations per slice, shape (2,), dtype int64.
        slice_means: covariate mean within each slice, shape (2, p); a slice
            that is still empty holds zeros.
        updates: rank-one updates applied since warm-up (drives the
            re-symmetrization cadence).
    """

    n: int
    mean: np.ndarray
    inv_cov: np.ndarray
    slice_counts: np.ndarray
    slice_means: np.ndarray
    updates: int = 0

    @property
    def p(self) -> int:
        return self.mean.size

    def centered_slice_diff(self) -> np.ndarray:
        """(z_1 - z_2) where z_h is the centered slice mean.

        The overall-mean terms cancel in the difference, so this is simply
        slice_means[0] - slice_means[1].
        """
        return self.slice_means[0] - self.slice_means[1]


def batch_moments(sample: Sample, slicer: Slicer) -> MomentState:
    """Compute moments of a full batch directly.

    This is the warm-up path and the ground truth that the recursive path
    must reproduce.  The covariance uses the biased 1/n normalization.

    Raises:
        InsufficientDataError: fewer than p + 2 observations.
        SingularMatrixError: covariance singular value ratio below tolerance.
        EmptySliceError: a slice received no observations.
    """
    xs, ys = sample.covariates, sample.responses
    n, p = xs.shape
    if n < p + 2:
        raise InsufficientDataError(f"need at least p + 2 = {p + 2} observations, got {n}")
    mean = xs.mean(axis=0)
    centered = xs - mean
    cov = (centered.T @ centered) / n
    svals = np.linalg.svd(cov, compute_uv=False)
    ratio = float(svals[-1] / svals[0]) if svals[0] > 0.0 else 0.0
    if ratio < SINGULARITY_TOLERANCE:
        raise SingularMatrixError(
            f"covariance is numerically singular (singular value ratio {ratio:.3e})",
            ratio=ratio,
        )
    inv_cov = np.linalg.inv(cov)
    inv_cov = 0.5 * (inv_cov + inv_cov.T)

    labels = slicer.slices_of(ys)
    counts = np.array([int(np.sum(labels == 1)), int(np.sum(labels == 2))], dtype=np.int64)
    for h in (1, 2):
        if counts[h - 1] == 0:
            raise EmptySliceError(f"slice {h} is empty at boundary {slicer.boundary!r}", h)
    slice_means = np.vstack([xs[labels == 1].mean(axis=0), xs[labels == 2].mean(axis=0)])
    return MomentState(
        n=n,
        mean=mean,
        inv_cov=inv_cov,
        slice_counts=counts,
        slice_means=slice_means,
    )


def riccati_update(state: MomentState, x: np.ndarray) -> MomentState:
    """Absorb one covariate vector into the mean and inverse covariance.

    Slice fields are left untouched; pair with slice_update to absorb the
    full observation.

    Raises:
        NumericalBreakdownError: the update denominator n + rho is not
            positive, which cannot happen in exact arithmetic once the
            covariance is positive definite.
    """
    x = np.asarray(x, dtype=np.float64)
    n_new = state.n + 1
    phi = x - state.mean
    w = state.inv_cov @ phi
    rho = float(phi @ w)
    denom = n_new + rho
    if denom <= 0.0:
        raise NumericalBreakdownError(
            f"rank-one update denominator {denom!r} is not positive at n = {n_new}"
        )
    scale = n_new / (n_new - 1.0)
    inv_new = scale * (state.inv_cov - np.outer(w, w) / denom)
    updates = state.updates + 1
    if updates % RESYMMETRIZE_EVERY == 0:
        inv_new = 0.5 * (inv_new + inv_new.T)
    mean_new = state.mean + phi / n_new
    return replace(state, n=n_new, mean=mean_new, inv_cov=inv_new, updates=updates)


def slice_update(state: MomentState, x: np.ndarray, y: float, slicer: Slicer) -> MomentState:
    """Absorb one observation into its slice count and slice mean.

    The overall count n is not advanced here; riccati_update owns that.
    """
    x = np.asarray(x, dtype=np.float64)
    h = slicer.slice_of(float(y))
    i = h - 1
    counts = state.slice_counts.copy()
    means = state.slice_means.copy()
    c_old = int(counts[i])
    means[i] = means[i] + (x - means[i]) / (c_old + 1)
    counts[i] = c_old + 1
    return replace(state, slice_counts=counts, slice_means=means)


def observe(state: MomentState, x: np.ndarray, y: float, slicer: Slicer) -> MomentState:
    """Absorb one full observation: rank-one moment update plus slice update."""
    return slice_update(riccati_update(state, x), x, y, slicer)
