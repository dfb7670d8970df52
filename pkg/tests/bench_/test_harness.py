import pytest
from contextlib import nullcontext

import numpy as np

from process_bo.bench import (
    IterationRecord,
    RunConfig,
    RunTrace,
    StopReason,
    aggregate,
    compare,
    pi_sweep,
    run_monte_carlo,
    run_single,
    timing_probe,
)
from process_bo.bench import harness
from process_bo.exceptions import EmptyCandidateSetError
from process_bo.problems import PROBLEMS, find_grid_optimum, make_grid

SMALL = RunConfig(problem="p3", max_iterations=6, repetitions=2, grid_count=400, gp_restarts=1, seed=4)


def record(iteration, cost, feasible):
    return IterationRecord(iteration, iteration, (0.0, 0.0), cost, (0.0,), feasible)


def ids(trace: RunTrace) -> list[int]:
    return [r.candidate_id for r in trace.records]


@pytest.mark.parametrize("changes, err", [
    ({}, None), ({"problem": "p9"}, ValueError), ({"acquisition": "pes"}, ValueError), ({"pi": -0.1}, ValueError),
    ({"tau": -1.0}, ValueError), ({"repetitions": 0}, ValueError), ({"init_count": 0}, ValueError),
    ({"max_iterations": -1}, ValueError),
])
def test_run_config(changes, err):
    with pytest.raises(err) if err else nullcontext():
        SMALL.replace(**changes)


def test_noisy_repetition_layout():
    config = SMALL.replace(tau=0.2, initializations=3, noise_realizations=4)
    assert config.noisy
    assert config.total_repetitions == 12
    assert [config.initialization_index(r) for r in (0, 3, 4, 11)] == [0, 0, 1, 2]
    assert SMALL.total_repetitions == 2
    assert SMALL.initialization_index(1) == 1


def test_run_single():
    trace = run_single(SMALL, 0)
    assert len(trace.records) <= SMALL.max_iterations + SMALL.init_count
    assert trace.required_iterations <= SMALL.max_iterations
    assert [r.iteration for r in trace.records[:2]] == [0, 0]
    assert len(set(ids(trace))) == len(trace.records)
    assert all(r.branch is not None for r in trace.records[2:])
    assert trace.stop_reason in (StopReason.OPTIMUM_FOUND, StopReason.MAX_ITERATIONS)


def test_run_single_is_deterministic():
    a, b = run_single(SMALL, 1), run_single(SMALL, 1)
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]
    assert a.stop_reason == b.stop_reason


def test_run_without_iterations():
    trace = run_single(SMALL.replace(max_iterations=0), 0)
    assert len(trace.records) == SMALL.init_count
    assert all(r.is_initialization for r in trace.records)
    assert trace.required_iterations == 0


def test_initialization_containing_the_optimum(monkeypatch):
    problem = PROBLEMS["p3"]
    optimum = find_grid_optimum(problem, make_grid(problem, SMALL.grid_count))
    monkeypatch.setattr(harness, "_initial_positions", lambda *_: np.array([3, optimum.index]))

    trace = run_single(SMALL, 0)
    assert trace.stop_reason == StopReason.OPTIMUM_FOUND
    assert trace.required_iterations == 0
    assert len(trace.records) == 2


@pytest.mark.parametrize("tau", [0.0, 0.2])
def test_acquisitions_share_initializations_and_noise(tau):
    config = SMALL.replace(tau=tau, initializations=1, noise_realizations=2)
    switching = run_single(config, 1)
    eic = run_single(config.replace(acquisition="eic"), 1)
    assert ids(switching)[:2] == ids(eic)[:2]
    assert [r.measured for r in switching.records[:2]] == [r.measured for r in eic.records[:2]]


def test_zero_threshold_matches_eic():
    config = SMALL.replace(pi=0.0)
    for repetition in range(2):
        switching = run_single(config, repetition)
        eic = run_single(config.replace(acquisition="eic"), repetition)
        assert ids(switching) == ids(eic)
        assert switching.required_iterations == eic.required_iterations


def test_convergence_series():
    trace = RunTrace(
        "p3", "alg1", 0.6, 0,
        [record(0, 5.0, False), record(0, 4.0, True), record(1, 3.0, False), record(2, 4.5, True),
         record(3, 2.0, True)],
        StopReason.MAX_ITERATIONS, 3,
    )
    assert trace.convergence_series() == [4.0, 4.0, 4.0, 2.0]
    assert trace.feasible_count() == 2
    assert trace.feasible_count(include_init=True) == 3
    assert trace.evaluated_count() == 3

    empty = RunTrace("p3", "alg1", 0.6, 0, [record(0, 5.0, False), record(1, 1.0, False)], StopReason.MAX_ITERATIONS, 1)
    assert empty.convergence_series() == [None, None]


def test_convergence_series_is_non_increasing():
    for trace in run_monte_carlo(SMALL, n_jobs=1).traces:
        values = [v for v in trace.convergence_series() if v is not None]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_aggregate_is_order_independent():
    traces = [run_single(SMALL, r) for r in range(2)]
    forward = aggregate(SMALL, traces)
    backward = aggregate(SMALL, traces[::-1])
    assert forward.to_dict() == backward.to_dict()
    assert forward.series == backward.series
    assert 0 <= forward.feasible_fraction <= 1

    single = aggregate(SMALL, traces[:1])
    assert single.mean_required_iterations == traces[0].required_iterations
    evaluated = traces[0].evaluated_count()
    assert single.feasible_fraction == (traces[0].feasible_count() / evaluated if evaluated else 0.0)


def test_parallel_repetitions_match_sequential():
    sequential = run_monte_carlo(SMALL, n_jobs=1)
    parallel = run_monte_carlo(SMALL, n_jobs=2)
    assert sequential.to_dict() == parallel.to_dict()
    assert [ids(t) for t in sequential.traces] == [ids(t) for t in parallel.traces]


def test_compare_and_sweep_labels():
    config = SMALL.replace(repetitions=1, max_iterations=2)
    assert set(compare(config, n_jobs=1)) == {"alg1", "eic"}

    sweep = pi_sweep(config, [0.0, 0.5, 1.0], n_jobs=1)
    assert list(sweep) == ["0", "0.5", "1", "eic"]
    assert sweep["0"].series == sweep["eic"].series
    with pytest.raises(ValueError):
        pi_sweep(config, [1.5])


def test_timing_probe():
    problem = PROBLEMS["p1"]
    timings = timing_probe("p1", (5, 10), grid_count=500, repeats=2, seed=1)
    assert list(timings) == [5, 10]
    assert all(t > 0 for t in timings.values())

    grid = make_grid(problem, 4)
    with pytest.raises(EmptyCandidateSetError):
        timing_probe("p1", (5,), candidates=grid.remove(grid.ids))


@pytest.mark.slow
def test_iteration_time_on_full_grid():
    timings = timing_probe("p1", (10,), repeats=5)
    assert timings[10] < 0.5

    small = timing_probe("p1", (10,), grid_count=2000, repeats=5)
    assert timings[10] <= 12 * small[10]


@pytest.mark.slow
def test_noiseless_p3_reference():
    metrics = run_monte_carlo(RunConfig(problem="p3", pi=0.6, repetitions=100, seed=0))
    assert 15 <= metrics.mean_required_iterations <= 40
    assert 0.35 <= metrics.feasible_fraction <= 0.75


@pytest.mark.slow
def test_noiseless_p2_feasible_fraction():
    results = compare(RunConfig(problem="p2", pi=0.6, repetitions=100, seed=0))
    assert results["alg1"].feasible_fraction > results["eic"].feasible_fraction


@pytest.mark.slow
def test_pi_sweep_trends():
    sweep = pi_sweep(RunConfig(problem="p3", repetitions=100, seed=0))
    assert sweep["1"].feasible_fraction >= sweep["0"].feasible_fraction
    best = min((k for k in sweep if k != "eic"), key=lambda k: sweep[k].mean_required_iterations)
    assert 0.3 <= float(best) <= 0.8
