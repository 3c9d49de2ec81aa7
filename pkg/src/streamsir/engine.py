"""Sequential engine: one pass that owns the per-observation ordering.

For every observation past warm-up the engine does, in this order:

1. project the new covariate on the direction estimate from the previous
   step and append (projection, response) to the regression log;
2. advance the direction estimate by the closed-form recursion.

The ordering is the whole point: the logged projection and any prediction
made for the new point must depend only on data seen strictly before it.
Warm-up runs as a single batch over the first n0 observations; it fixes
the slice boundary (median of the warm-up responses unless overridden)
and seeds both the inverse covariance and the direction estimate.  The
regression log starts at arrival index n0 + 1, so bandwidths line up with
global observation counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .errors import InsufficientDataError
from .kernels import BandwidthSchedule, KernelSpec, epanechnikov
from .linkreg import GridAccumulator, ProjectionLog, append, evaluate
from .moments import Slicer
from .sir import SirState, recursive_step, warm_start
from .simulate import Sample

DEFAULT_ALPHA = 0.35


def default_warmup(p: int) -> int:
    """Default warm-up length max(2 p, 30)."""
    return max(2 * p, 30)


@dataclass
class StreamState:
    """Everything the engine carries between observations.

    Attributes:
        sir: direction estimate plus running moments.
        log: projection log for the regression estimate.
        grid: optional fixed-grid accumulator kept in sync with the log.
        slicer: frozen slice boundary.
        warmup_n: number of observations absorbed in the batch warm-up.
    """

    sir: SirState
    log: ProjectionLog
    grid: GridAccumulator | None
    slicer: Slicer
    warmup_n: int

    @property
    def n(self) -> int:
        """Observations absorbed so far, warm-up included."""
        return self.sir.moments.n

    @property
    def theta_hat(self) -> np.ndarray:
        return self.sir.theta_hat


def init_stream(
    warmup_sample: Sample,
    alpha: float = DEFAULT_ALPHA,
    kernel: KernelSpec | None = None,
    boundary: float | None = None,
    grid_points: np.ndarray | None = None,
    track_history: bool = False,
) -> StreamState:
    """Batch warm-up over an entire sample; streaming continues after it.

    Parameters
    ----------
    warmup_sample : Sample
        The first n0 observations.  n0 must be at least p + 2.
    alpha : float
        Bandwidth exponent for the regression log.
    kernel : KernelSpec, optional
        Defaults to the parabolic kernel.
    boundary : float, optional
        Slice boundary; defaults to the median of the warm-up responses.
    grid_points : array, optional
        When given, a GridAccumulator tracks the curve on these abscissas.
    track_history : bool
        Record (n, theta_hat) snapshots on every step.
    """
    n0, p = warmup_sample.n, warmup_sample.p
    if n0 < p + 2:
        raise InsufficientDataError(f"warm-up needs at least p + 2 = {p + 2} rows, got {n0}")
    if boundary is None:
        boundary = float(np.median(warmup_sample.responses))
    slicer = Slicer(boundary=boundary)
    sir = warm_start(warmup_sample, slicer, track_history=track_history)
    if kernel is None:
        kernel = epanechnikov()
    schedule = BandwidthSchedule(alpha=alpha)
    log = ProjectionLog(kernel, schedule, first_index=n0 + 1)
    grid = GridAccumulator(points=np.asarray(grid_points)) if grid_points is not None else None
    return StreamState(sir=sir, log=log, grid=grid, slicer=slicer, warmup_n=n0)


def predict_next(state: StreamState, x: np.ndarray) -> float:
    """Predict the response of a not-yet-absorbed covariate vector.

    Projects on the current direction estimate and evaluates the current
    log, exactly the quantities a later stream_step(state, x, y) would use.

    Raises:
        NoSupportError: the projection falls outside all kernel windows.
    """
    u = float(state.theta_hat @ np.asarray(x, dtype=np.float64))
    return evaluate(state.log, u)


def stream_step(state: StreamState, x: np.ndarray, y: float) -> StreamState:
    """Absorb one observation: log first, then advance the direction."""
    append(state.log, state.grid, x, y, state.theta_hat)
    sir = recursive_step(state.sir, x, y, state.slicer)
    return replace(state, sir=sir)


def run_stream(
    sample: Sample,
    alpha: float = DEFAULT_ALPHA,
    kernel: KernelSpec | None = None,
    warmup: int | None = None,
    boundary: float | None = None,
    grid_points: np.ndarray | None = None,
    track_history: bool = False,
    checkpoints: tuple[int, ...] = (),
) -> StreamState | tuple[StreamState, dict[int, np.ndarray]]:
    """Run the full pipeline over a sample in arrival order.

    Parameters
    ----------
    sample : Sample
        All observations; the first `warmup` rows seed the batch warm-up.
    warmup : int, optional
        Defaults to max(2 p, 30).  Must leave at least one streamed row if
        the sample is longer than the warm-up.
    checkpoints : tuple of int, optional
        Observation counts at which to snapshot theta_hat; snapshots are
        returned in a dict alongside the final state.

    Raises:
        InsufficientDataError: the sample is shorter than the warm-up.
    """
    n0 = default_warmup(sample.p) if warmup is None else int(warmup)
    if sample.n < n0:
        raise InsufficientDataError(f"sample has {sample.n} rows but warm-up needs {n0}")
    state = init_stream(
        sample.head(n0),
        alpha=alpha,
        kernel=kernel,
        boundary=boundary,
        grid_points=grid_points,
        track_history=track_history,
    )
    want = set(int(c) for c in checkpoints)
    snaps: dict[int, np.ndarray] = {}
    if state.n in want:
        snaps[state.n] = state.theta_hat.copy()
    xs, ys = sample.covariates, sample.responses
    for i in range(n0, sample.n):
        state = stream_step(state, xs[i], float(ys[i]))
        if state.n in want:
            snaps[state.n] = state.theta_hat.copy()
    if checkpoints:
        return state, snaps
    return state


def iter_stream(
    sample: Sample,
    alpha: float = DEFAULT_ALPHA,
    kernel: KernelSpec | None = None,
    warmup: int | None = None,
    boundary: float | None = None,
    grid_points: np.ndarray | None = None,
) -> Iterator[StreamState]:
    """Yield the state after warm-up and after every subsequent observation.

    The yielded object is the live engine state, not a copy; callers that
    need a historical value must copy it before advancing.
    """
    n0 = default_warmup(sample.p) if warmup is None else int(warmup)
    if sample.n < n0:
        raise InsufficientDataError(f"sample has {sample.n} rows but warm-up needs {n0}")
    state = init_stream(
        sample.head(n0), alpha=alpha, kernel=kernel, boundary=boundary, grid_points=grid_points
    )
    yield state
    xs, ys = sample.covariates, sample.responses
    for i in range(n0, sample.n):
        state = stream_step(state, xs[i], float(ys[i]))
        yield state
