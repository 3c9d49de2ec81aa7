import numpy as np
import pytest

from streamsir import (
    BandwidthSchedule,
    InsufficientDataError,
    NoSupportError,
    ProjectionLog,
    Slicer,
    append,
    batch_sir,
    default_warmup,
    draw,
    epanechnikov,
    evaluate,
    init_stream,
    iter_stream,
    predict_next,
    recursive_step,
    reference_model,
    run_stream,
    stream_step,
    warm_start,
)


def test_default_warmup():
    assert default_warmup(4) == 30
    assert default_warmup(15) == 30
    assert default_warmup(20) == 40


def test_init_freezes_median_boundary():
    sample = draw(reference_model(p=4), 30, 1)
    state = init_stream(sample)
    assert state.slicer.boundary == float(np.median(sample.responses))
    assert state.warmup_n == 30
    assert state.n == 30
    assert len(state.log) == 0


def test_init_honors_boundary_override():
    sample = draw(reference_model(p=4), 30, 1)
    state = init_stream(sample, boundary=0.25)
    assert state.slicer.boundary == 0.25


def test_init_needs_enough_rows():
    sample = draw(reference_model(p=10), 11, 1)
    with pytest.raises(InsufficientDataError):
        init_stream(sample)


def test_log_indices_continue_the_global_count():
    model = reference_model(p=4)
    sample = draw(model, 35, 2)
    state = init_stream(sample.head(30), alpha=0.4)
    for i in range(30, 35):
        state = stream_step(state, sample.covariates[i], float(sample.responses[i]))
    assert np.array_equal(state.log.indices, [31, 32, 33, 34, 35])
    assert state.log.bandwidths[0] == pytest.approx(31.0 ** -0.4, rel=1e-15)


def test_projection_uses_the_pre_update_direction():
    model = reference_model(p=4)
    sample = draw(model, 32, 3)
    state = init_stream(sample.head(30))
    theta_before = state.theta_hat.copy()
    x = sample.covariates[30]
    state = stream_step(state, x, float(sample.responses[30]))
    assert state.log.projections[0] == float(theta_before @ x)
    assert not np.array_equal(state.theta_hat, theta_before)


def test_first_streamed_prediction_has_no_support():
    sample = draw(reference_model(p=4), 31, 4)
    state = init_stream(sample.head(30))
    with pytest.raises(NoSupportError):
        predict_next(state, sample.covariates[30])


def test_engine_equals_manual_composition():
    model = reference_model(p=5)
    sample = draw(model, 60, 6)
    n0 = 30
    state = init_stream(sample.head(n0), alpha=0.35)

    slicer = Slicer(boundary=float(np.median(sample.responses[:n0])))
    sir = warm_start(sample.head(n0), slicer)
    log = ProjectionLog(epanechnikov(), BandwidthSchedule(alpha=0.35), first_index=n0 + 1)
    for i in range(n0, 60):
        x, y = sample.covariates[i], float(sample.responses[i])
        state = stream_step(state, x, y)
        append(log, None, x, y, sir.theta_hat)
        sir = recursive_step(sir, x, y, slicer)
    assert np.array_equal(state.theta_hat, sir.theta_hat)
    assert np.array_equal(state.log.projections, log.projections)


def test_run_stream_checkpoints_and_determinism():
    model = reference_model(p=4)
    sample = draw(model, 120, 7)
    state1, snaps = run_stream(sample, checkpoints=(30, 60, 120))
    assert sorted(snaps) == [30, 60, 120]
    assert np.array_equal(snaps[120], state1.theta_hat)
    state2 = run_stream(sample)
    assert np.array_equal(state1.theta_hat, state2.theta_hat)
    assert state1.n == 120


def test_run_stream_matches_batch_at_the_end():
    model = reference_model(p=4)
    sample = draw(model, 200, 8)
    state = run_stream(sample)
    batch = batch_sir(sample, state.slicer)
    rel = np.max(np.abs(state.theta_hat - batch)) / np.max(np.abs(batch))
    assert rel <= 1e-8


def test_run_stream_rejects_short_samples():
    sample = draw(reference_model(p=4), 20, 9)
    with pytest.raises(InsufficientDataError):
        run_stream(sample)  # default warm-up is 30


def test_iter_stream_walks_every_state():
    model = reference_model(p=4)
    sample = draw(model, 40, 10)
    states = list(iter_stream(sample, warmup=30))
    assert len(states) == 11  # warm-up state plus ten streamed observations
    final = run_stream(sample, warmup=30)
    assert np.array_equal(states[-1].theta_hat, final.theta_hat)


def test_grid_points_accumulate_during_run():
    model = reference_model(p=4)
    sample = draw(model, 150, 11)
    state = run_stream(sample, grid_points=np.linspace(-2.0, 2.0, 9))
    assert state.grid is not None
    assert state.grid.n_entries == 150 - 30
    est = state.grid.estimates()
    assert np.any(~np.isnan(est))


def test_predict_next_matches_log_evaluation():
    model = reference_model(p=4)
    sample = draw(model, 80, 12)
    state = init_stream(sample.head(30))
    for i in range(30, 79):
        state = stream_step(state, sample.covariates[i], float(sample.responses[i]))
    x = sample.covariates[79]
    u = float(state.theta_hat @ x)
    assert predict_next(state, x) == evaluate(state.log, u)
