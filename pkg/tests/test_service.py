import pytest
from fastapi.testclient import TestClient

from timingdiag.service import create_app

SCENARIO = """
[fabric]
width = 9
height = 8
seed = 33
jitter_min_ps = 4
jitter_max_ps = 6

[taps]
placement = chain
count = 8
chain_source = 0,0
chain_dest = 8,7
chain_dme = 0,0

[sweep]
num_sweeps = 3

[condition.baseline]
kind = baseline

[condition.pdn]
kind = pdn_stress
"""


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_healthz(client):
    res = client.get("/healthz")
    assert res.status_code == 200
    body = res.json()
    assert body["status"] == "ok"
    assert body["version"]


@pytest.fixture(scope="module")
def run_response(client):
    res = client.post("/api/run", json={"scenario": SCENARIO})
    assert res.status_code == 200
    return res.json()


def test_run_returns_records_and_report(run_response):
    assert run_response["records_csv"].startswith("sweep_id,dme_id,dt_id,")
    report = run_response["report"]
    assert report["seed"] == 33
    assert report["verdicts"]["1"]["class"] == "PdnInduced"


def test_analyze_round_trip_matches_run(client, run_response):
    res = client.post("/api/analyze", json={"scenario": SCENARIO,
                                            "records_csv": run_response["records_csv"]})
    assert res.status_code == 200
    assert res.json()["report"] == run_response["report"]


def test_render_returns_svgs(client, run_response):
    res = client.post("/api/render", json={"report": run_response["report"],
                                           "kinds": ["profiles", "heatmap"]})
    assert res.status_code == 200
    svgs = res.json()["svgs"]
    assert "profiles.svg" in svgs
    assert svgs["profiles.svg"].startswith("<svg")


def test_render_unknown_kind_rejected(client, run_response):
    res = client.post("/api/render", json={"report": run_response["report"],
                                           "kinds": ["png"]})
    assert res.status_code == 400


def test_bad_scenario_is_client_error(client):
    res = client.post("/api/run", json={"scenario": "[fabric]\nwidht = 9\n"})
    assert res.status_code == 400
    assert "widht" in res.json()["detail"]


def test_malformed_payload_rejected(client):
    res = client.post("/api/run", json={"scenery": "x"})
    assert res.status_code == 422


def test_mismatched_records_rejected(client, run_response):
    truncated = "\n".join(run_response["records_csv"].splitlines()[:50]) + "\n"
    res = client.post("/api/analyze", json={"scenario": SCENARIO,
                                            "records_csv": truncated})
    assert res.status_code == 400
