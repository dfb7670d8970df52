import json
import pytest
from contextlib import nullcontext

import numpy as np

from process_bo.acquisition import Branch
from process_bo.campaign import (
    CampaignConfig,
    SessionState,
    abandon,
    calibrate,
    format_summary,
    new_session,
    preset_config,
    record,
    replay_dataset,
    status_summary,
    suggest,
)
from process_bo.campaign.session import load_initial_data
from process_bo.exceptions import (
    CalibrationError,
    ConfigError,
    MeasurementError,
    NoPendingBatchError,
    PendingBatchError,
)
from process_bo.resources import Dataset

from ..helpers import assert_dataset, small_aps_document, small_fdm_document


def start(document: dict) -> SessionState:
    config = CampaignConfig.from_dict(document)
    return new_session(config, load_initial_data(config, document.get("initial_data")))


def events(state: SessionState) -> list[str]:
    return [e["event"] for e in state.history]


@pytest.mark.parametrize("name", ["aps", "fdm"])
def test_preset_configs(name):
    config = CampaignConfig.from_dict(preset_config(name))
    assert CampaignConfig.from_dict(json.loads(json.dumps(config.to_dict()))) == config
    assert config.synthetic == name
    assert config.build_objective().name in ("stress_index", "print_time")


def test_status_config():
    config = CampaignConfig.from_dict(preset_config("aps"))
    assert config.has_status
    assert config.n_controllable == 6
    assert config.n_dims == 7
    assert config.header()[6:] == ["voltage", "microhardness", "porosity"]
    assert len(config.fit_config().input_bounds) == 7
    assert len(config.status_fit_config().input_bounds) == 6
    assert config.fit_config().noise_variance is None


def _broken(change):
    document = preset_config("fdm")
    change(document)
    return document


@pytest.mark.parametrize("document, err", [
    (preset_config("fdm"), None),
    (_broken(lambda d: d.update(inputs=[])), ConfigError),
    (_broken(lambda d: d.update(constraints=[])), ConfigError),
    (_broken(lambda d: d.pop("objective")), ConfigError),
    (_broken(lambda d: d["objective"].update(name="unknown")), ConfigError),
    (_broken(lambda d: d["inputs"][0].update(lower=100.0)), ConfigError),
    (_broken(lambda d: d["inputs"][0].update(points=1)), ConfigError),
    (_broken(lambda d: d.update(candidate_cap=100)), ConfigError),
    (_broken(lambda d: d["constraints"][0].update(lower=12.0)), ConfigError),
    (_broken(lambda d: d["batch"].update(pi=2.0)), ConfigError),
])
def test_config_validation(document, err):
    with pytest.raises(err) if err else nullcontext():
        CampaignConfig.from_dict(document)


def test_initial_data(tmp_path):
    config = CampaignConfig.from_dict(preset_config("fdm"))
    assert len(load_initial_data(config, None)) == 0
    assert load_initial_data(config, None).n_dims == 2

    inline = {"inputs": [[30.0, 1.0], [50.0, 0.9]], "observations": [[8.0], [12.0]]}
    dataset = load_initial_data(config, inline)
    Dataset(inline["inputs"], inline["observations"]).to_csv(str(tmp_path / "init.csv"))
    assert_dataset(load_initial_data(config, "init.csv", str(tmp_path)), dataset)


@pytest.mark.parametrize("data, err", [
    ({"inputs": [[30.0, 1.0, 2.0]], "observations": [[8.0]]}, ConfigError),
    ({"inputs": [[30.0, 1.0]]}, ConfigError),
    ({"inputs": [[30.0, 1.0], [30.0, 1.0]], "observations": [[8.0], [9.0]]}, ConfigError),
    ({"inputs": [[30.0, 1.0]], "observations": [[float("nan")]]}, MeasurementError),
    ("missing.csv", OSError),
])
def test_initial_data_rejects(tmp_path, data, err):
    config = CampaignConfig.from_dict(preset_config("fdm"))
    with pytest.raises(err):
        load_initial_data(config, data, str(tmp_path))


def test_initial_data_status_column(tmp_path):
    config = CampaignConfig.from_dict(preset_config("aps"))
    Dataset(np.random.default_rng(0).random((3, 7)), np.zeros((3, 2))).to_csv(str(tmp_path / "init.csv"))
    with pytest.raises(ConfigError):
        load_initial_data(config, "init.csv", str(tmp_path))


def test_new_session():
    state = start(small_fdm_document())
    assert len(state.dataset) == 7
    assert state.init_count == 7
    assert state.pi == 0.4
    assert events(state) == ["init"]
    assert state.history[0]["index"] == 0
    assert_dataset(replay_dataset(state.history), state.dataset)


def test_suggest_and_record():
    state = start(small_fdm_document())
    state, batch = suggest(state)
    assert len(batch) == 1
    assert state.pending == batch
    assert events(state) == ["init", "suggest"]
    assert state.history[-1]["candidate_ids"] == batch.candidate_ids

    with pytest.raises(PendingBatchError):
        suggest(state)

    recorded, report = record(state, [[7.5]])
    assert recorded.pending is None
    assert len(recorded.dataset) == 8
    assert np.array_equal(recorded.dataset.inputs[-1], batch.candidates[0])
    assert report["recorded"] == 1
    assert report["terminate"] == (batch.selection_fips[0] < 0.05)
    assert events(recorded) == ["init", "suggest", "record"]

    with pytest.raises(NoPendingBatchError):
        record(recorded, [[7.5]])


@pytest.mark.parametrize("measurements", [[[7.5], [8.0]], [[float("inf")]], []])
def test_record_rejects_and_keeps_state(measurements):
    state, _ = suggest(start(small_fdm_document()))
    before = state.to_dict()
    with pytest.raises(MeasurementError):
        record(state, measurements)
    assert state.to_dict() == before


def test_abandon():
    state, batch = suggest(start(small_fdm_document()))
    state = abandon(state)
    assert state.pending is None
    assert len(state.dataset) == 7
    assert state.history[-1] == {"index": 2, "event": "abandon", "candidate_ids": batch.candidate_ids}
    with pytest.raises(NoPendingBatchError):
        abandon(state)
    state, again = suggest(state)
    assert again.candidate_ids == batch.candidate_ids


def test_batch_size_override_is_one_off():
    state = start(small_fdm_document())
    state, batch = suggest(state, batch_size=3)
    assert len(batch) == 3
    assert len(set(batch.candidate_ids)) == 3
    assert state.history[-1]["batch_size"] == 3
    state, _ = record(state, [[8.0], [9.0], [11.0]])
    state, batch = suggest(state)
    assert len(batch) == state.config.batch.batch_size == 1


def test_pi_override_is_contained():
    state = start(small_fdm_document())
    state, _ = suggest(state)
    state, _ = record(state, [[8.0]])
    before = status_summary(state)

    switched, _ = suggest(state, pi=0.1)
    assert switched.pi == 0.1
    assert switched.history[-1]["pi"] == 0.1
    assert_dataset(switched.dataset, state.dataset)
    after = status_summary(switched)
    assert after["incumbent"] == before["incumbent"]
    assert after["evaluations"] == before["evaluations"]

    switched, _ = record(switched, [[9.0]])
    switched, _ = suggest(switched)
    assert switched.history[-1]["pi"] == 0.1
    assert switched.config.batch.pi == 0.4


@pytest.mark.parametrize("overrides", [{"pi": 1.5}, {"pi": -0.1}, {"batch_size": -2}])
def test_invalid_overrides(overrides):
    state = start(small_fdm_document())
    with pytest.raises(ConfigError):
        suggest(state, **overrides)


def test_incumbent_follows_recorded_feasibility():
    document = small_fdm_document()
    document["initial_data"]["observations"] = [[20.0]] * 7
    state = start(document)
    assert status_summary(state)["incumbent"] is None

    state, batch = suggest(state)
    assert batch.selection_branches == [Branch.FIP_NO_FEASIBLE]
    state, report = record(state, [[5.0]])
    assert report["incumbent"]["best_feasible_cost"] == pytest.approx(batch.selections[0].cost)

    state, _ = suggest(state)
    state, later = record(state, [[25.0]])
    assert later["incumbent"]["best_feasible_cost"] == report["incumbent"]["best_feasible_cost"]
    assert later["incumbent"]["best_feasible_input"] == report["incumbent"]["best_feasible_input"]


def test_empty_initial_set():
    document = small_fdm_document()
    del document["initial_data"]
    state = start(document)
    assert len(state.dataset) == 0
    summary = status_summary(state)
    assert summary["evaluations"] == 0
    assert summary["incumbent"] is None
    assert summary["feasible_fraction"] == 0.0

    state, batch = suggest(state)
    assert batch.selection_branches == [Branch.FIP_NO_FEASIBLE]


def test_history_replay_and_alternation():
    state = start(small_fdm_document())
    rng = np.random.default_rng(0)
    for step in range(6):
        state, batch = suggest(state, batch_size=2 if step % 2 else None)
        if step == 3:
            state = abandon(state)
        else:
            state, _ = record(state, rng.uniform(5, 15, (len(batch), 1)))

    assert_dataset(replay_dataset(state.history), state.dataset)
    assert [e["index"] for e in state.history] == list(range(len(state.history)))
    kinds = events(state)
    for first, second in zip(kinds, kinds[1:]):
        assert not (first == "suggest" and second == "suggest")
    assert kinds.count("suggest") == 6
    assert kinds.count("abandon") == 1

    with pytest.raises(ValueError):
        replay_dataset([])


def test_session_document_round_trip():
    state, _ = suggest(start(small_fdm_document()))
    restored = SessionState.from_dict(json.loads(json.dumps(state.to_dict())))
    assert restored == state
    assert restored.to_dict()["version"] == 1


def test_status_summary():
    state = start(small_fdm_document())
    summary = status_summary(state)
    assert summary == status_summary(state)
    assert summary["evaluations"] == summary["initial_experiments"] == 7
    assert summary["columns"] == ["speed", "extrusion_rate", "roughness"]
    assert summary["pending"] is None
    assert summary["last_batch_fips"] is None
    assert not summary["terminate"]
    assert "Campaign: fdm-like synthetic campaign (synthetic process: fdm)" in format_summary(summary)

    state, batch = suggest(state)
    state, _ = record(state, [[9.0]])
    summary = status_summary(state)
    assert summary["batches_recorded"] == 1
    assert summary["last_batch_fips"] == batch.selection_fips
    assert "Last batch FIP" in format_summary(summary)


def test_calibrate_requires_status():
    state = start(small_fdm_document())
    with pytest.raises(CalibrationError):
        calibrate(state, [30.0, 1.0], 60.0)


def test_calibrated_campaign():
    document = small_aps_document()
    state = start(document)
    baseline = state.dataset.controllable_inputs[0]
    measured = state.dataset.status[0] + 2.0

    state = calibrate(state, baseline, measured, [640.0, 7.0])
    assert state.offset.delta == pytest.approx(2.0, abs=0.5)
    assert len(state.dataset) == 17
    assert state.dataset.inputs[-1].tolist() == [*baseline.tolist(), measured]
    assert state.history[-1]["appended"]["observations"] == [640.0, 7.0]

    again = calibrate(state, baseline, measured, [640.0, 7.0])
    assert len(again.dataset) == 17
    assert again.history[-1]["appended"] is None

    state, batch = suggest(state)
    assert len(batch) == 3
    model = state.status_model()
    predicted = model.predict_many(batch.candidates[:, :6])
    assert np.allclose(batch.candidates[:, 6], predicted + state.offset.delta, atol=1e-9)

    with pytest.raises(PendingBatchError):
        calibrate(state, baseline, measured)

    state, _ = record(state, [[650.0, 7.0], [600.0, 9.0], [700.0, 5.0]], status=[60.0, 61.0, 62.0])
    assert state.dataset.status[-3:].tolist() == [60.0, 61.0, 62.0]
    assert_dataset(replay_dataset(state.history), state.dataset)


def test_calibration_keeps_initialization_model():
    state = start(small_aps_document())
    baseline = state.dataset.controllable_inputs[0]
    first = calibrate(state, baseline, state.dataset.status[0] + 2.0, [640.0, 7.0])
    second = calibrate(first, baseline, state.dataset.status[0] - 0.8)
    assert first.offset.delta - second.offset.delta == pytest.approx(2.8, abs=1e-9)
    with pytest.raises(CalibrationError):
        calibrate(state, baseline + 1.0, 60.0)
