"""Recursive sliced-inverse-regression estimate of the index direction.

The target direction is identified only up to a nonzero scalar, so the
estimator tracks theta_hat = inv_cov @ (z_1 - z_2), where z_h is the
centered covariate mean of response slice h.  After a batch warm-up the
estimate advances by a closed-form recursion that combines the rank-one
inverse-covariance correction with the single slice-mean move caused by the
arriving observation; the recursion reproduces the batch estimate exactly
in real arithmetic, which the test suite checks to floating-point accuracy.

Proximity between directions is measured scale- and sign-invariantly by
1 - cos^2(angle), which is zero iff the two vectors are collinear.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptySliceError
from .moments import MomentState, Slicer, batch_moments, riccati_update, slice_update
from .simulate import Sample


@dataclass(frozen=True)
class SirState:
    """Direction estimate bundled with the moment state that produced it.

    Attributes:
        moments: running moments after n observations.
        theta_hat: current direction estimate, shape (p,); not normalized,
            since the target is only identified up to scale.
        history: (n, theta_hat copy) snapshots when tracking is on, else None.
    """

    moments: MomentState
    theta_hat: np.ndarray
    history: tuple[tuple[int, np.ndarray], ...] | None = None


def direction_from_moments(moments: MomentState) -> np.ndarray:
    """theta_hat = inv_cov @ (z_1 - z_2) read off a moment state."""
    return moments.inv_cov @ moments.centered_slice_diff()


def batch_sir(sample: Sample, slicer: Slicer) -> np.ndarray:
    """One-shot direction estimate from a full batch.

    Ground truth for the recursive path; shares all failure modes of
    batch_moments.
    """
    return direction_from_moments(batch_moments(sample, slicer))


def warm_start(sample: Sample, slicer: Slicer, track_history: bool = False) -> SirState:
    """Initialize the recursion from a batch over the warm-up sample."""
    moments = batch_moments(sample, slicer)
    theta = direction_from_moments(moments)
    history = ((moments.n, theta.copy()),) if track_history else None
    return SirState(moments=moments, theta_hat=theta, history=history)


def recursive_step(state: SirState, x: np.ndarray, y: float, slicer: Slicer) -> SirState:
    """Advance the direction estimate by one observation.

    Writing inv for the pre-update inverse covariance, phi = x - mean_old,
    w = inv @ phi, rho = phi' w, n for the post-update count, h for the
    receiving slice with pre-update count c, and phi_h = x - slice_mean_h,
    the update is

        theta_new = (n / (n - 1)) * (theta - (phi' theta) w / (n + rho))
                    - sign(h) * n / ((c + 1) (n - 1))
                      * (inv @ phi_h - (w' phi_h) w / (n + rho)),

    with sign(1) = -1 and sign(2) = +1: mass entering the low slice pushes
    the slice-mean difference up, mass entering the high slice pulls it down.

    Raises:
        EmptySliceError: a slice count is still zero, so the slice-mean
            difference that the recursion corrects is not yet defined.
    """
    moments = state.moments
    if int(moments.slice_counts[0]) <= 0 or int(moments.slice_counts[1]) <= 0:
        h_empty = 1 if int(moments.slice_counts[0]) <= 0 else 2
        raise EmptySliceError(
            f"cannot step the recursion while slice {h_empty} is empty", h_empty
        )
    x = np.asarray(x, dtype=np.float64)
    y = float(y)
    n_new = moments.n + 1
    phi = x - moments.mean
    w = moments.inv_cov @ phi
    rho = float(phi @ w)
    denom = n_new + rho

    h = slicer.slice_of(y)
    i = h - 1
    sign = -1.0 if h == 1 else 1.0
    c_old = int(moments.slice_counts[i])
    phi_h = x - moments.slice_means[i]
    v = moments.inv_cov @ phi_h
    # w' phi_h equals phi' inv phi_h by symmetry of the maintained inverse.
    cross = float(w @ phi_h)

    scale = n_new / (n_new - 1.0)
    theta = scale * (state.theta_hat - (float(phi @ state.theta_hat) / denom) * w)
    theta = theta - (sign * n_new / ((c_old + 1) * (n_new - 1.0))) * (v - (cross / denom) * w)

    moments_new = slice_update(riccati_update(moments, x), x, y, slicer)
    history = state.history
    if history is not None:
        history = history + ((n_new, theta.copy()),)
    return replace(state, moments=moments_new, theta_hat=theta, history=history)


def direction_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Scale- and sign-invariant distance 1 - cos^2(a, b), in [0, 1].

    Raises:
        ValueError: either vector is zero (the angle is undefined).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("vectors must have the same shape")
    aa = float(a @ a)
    bb = float(b @ b)
    if aa == 0.0 or bb == 0.0:
        raise ValueError("direction_distance is undefined for a zero vector")
    cos2 = (float(a @ b) ** 2) / (aa * bb)
    # cos^2 can exceed 1 by a few ulp for collinear inputs.
    return float(min(1.0, max(0.0, 1.0 - cos2)))
