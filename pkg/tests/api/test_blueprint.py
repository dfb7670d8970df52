import pytest

from process_bo.campaign import campaign_init, load_session
from process_bo.campaign.storage import session_lock


@pytest.fixture()
def campaign_client(client, fdm_config_path, session_path):
    campaign_init(fdm_config_path, session_path)
    return client


def test_missing_session(client):
    response = client.get("/campaign/status")
    assert response.status_code == 404
    assert response.get_json()["success"] is False


def test_status(campaign_client):
    body = campaign_client.get("/campaign/status").get_json()
    assert body["success"] is True
    assert body["data"]["evaluations"] == 7
    assert body["data"]["pending"] is None


def test_suggest_record_cycle(campaign_client, session_path):
    response = campaign_client.post("/campaign/suggest?n=2&pi=0.3")
    assert response.status_code == 200
    batch = response.get_json()["data"]
    assert len(batch["selections"]) == 2
    assert load_session(session_path).pi == 0.3

    assert campaign_client.post("/campaign/suggest").status_code == 409

    response = campaign_client.post("/campaign/record", json={"measurements": [[8.0], [12.0]]})
    assert response.status_code == 200
    report = response.get_json()["data"]
    assert report["recorded"] == 2
    assert load_session(session_path).pending is None

    assert campaign_client.post("/campaign/record", json={"measurements": [[8.0]]}).status_code == 409


@pytest.mark.parametrize("body", [None, {}, {"status": [1.0]}, {"measurements": "many"}, {"measurements": [[8.0]] * 3}])
def test_record_rejects(campaign_client, session_path, body):
    campaign_client.post("/campaign/suggest")
    response = campaign_client.post("/campaign/record", json=body)
    assert response.status_code == 400
    assert response.get_json()["success"] is False
    assert load_session(session_path).pending is not None


@pytest.mark.parametrize("query", ["?n=1.5", "?n=two", "?pi=nan", "?pi=1.5", "?n=0&pi=-1"])
def test_suggest_rejects(campaign_client, session_path, query):
    assert campaign_client.post(f"/campaign/suggest{query}").status_code == 400
    assert load_session(session_path).pending is None


def test_abandon(campaign_client):
    assert campaign_client.post("/campaign/abandon").status_code == 409
    campaign_client.post("/campaign/suggest")
    response = campaign_client.post("/campaign/abandon")
    assert response.status_code == 200
    assert response.get_json()["data"]["history_length"] == 3


def test_locked_session(campaign_client, session_path):
    with session_lock(session_path):
        assert campaign_client.post("/campaign/suggest").status_code == 409
        assert campaign_client.get("/campaign/status").status_code == 200
