import pytest
from fastapi.testclient import TestClient

from qgossip.service.app import app
from qgossip.experiments import ExperimentConfig, run_experiment, records_to_csv


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_graph_endpoint(client):
    resp = client.post("/graph", json={"graph": {"kind": "lollipop", "n": 5, "m": 3}})
    assert resp.status_code == 200
    body = resp.json()
    assert body["n"] == 5
    assert body["edge_count"] == 5
    assert body["connected"] is True
    assert body["edge_list"].splitlines()[0] == "5"


def test_graph_endpoint_gnp_deterministic(client):
    payload = {"graph": {"kind": "gnp", "n": 8, "p": 0.5, "seed": 12}}
    a = client.post("/graph", json=payload).json()
    b = client.post("/graph", json=payload).json()
    assert a["edges"] == b["edges"]


def test_graph_endpoint_rejects_bad_request(client):
    resp = client.post("/graph", json={"graph": {"kind": "lollipop", "n": 5}})
    assert resp.status_code == 422
    resp = client.post("/graph", json={"graph": {"kind": "path", "n": 1}})
    assert resp.status_code == 422


def test_walks_exact_endpoint(client):
    resp = client.post("/walks", json={"edge_list": "2\n0 1\n", "method": "exact"})
    assert resp.status_code == 200
    body = resp.json()
    values = {(r["kind"], r["walk"], tuple(r["pair"])): r["value"] for r in body["results"]}
    assert values[("hitting", "af", (0, 1))] == pytest.approx(2.0)
    assert values[("hitting", "sf", (0, 1))] == pytest.approx(1.0)
    assert values[("meeting", "af", (0, 1))] == pytest.approx(1.0)


def test_walks_mc_endpoint(client):
    resp = client.post(
        "/walks",
        json={"edge_list": "2\n0 1\n", "method": "mc", "trials": 100, "seed": 4},
    )
    body = resp.json()
    (entry,) = body["results"]
    assert entry["method"] == "mc"
    assert entry["value"] == 1.0
    assert entry["se"] == 0.0


def test_walks_rejects_disconnected(client):
    resp = client.post("/walks", json={"edge_list": "3\n0 1\n", "method": "exact"})
    assert resp.status_code == 422


def test_bounds_endpoint(client):
    resp = client.post("/bounds", json={"n": 2, "b": 1, "j": 2})
    assert resp.status_code == 200
    values = {r["name"]: r["value"] for r in resp.json()["reports"]}
    assert values["mixing_horizon"] == 534.0
    assert values["switching_meeting"] == 4272.0
    assert values["switching_convergence"] == 16392.0


def test_bounds_endpoint_validates(client):
    assert client.post("/bounds", json={"n": 1}).status_code == 422
    assert client.post("/bounds", json={"n": 4, "p": 0.0}).status_code == 422


def test_run_endpoint_matches_in_process(client):
    config = {
        "algorithm": "AF",
        "graph": {"kind": "complete", "n": 4},
        "initial": {"kind": "psi"},
        "trials": 30,
        "seed": 2,
    }
    resp = client.post("/run", json={"config": config})
    assert resp.status_code == 200
    body = resp.json()
    direct = run_experiment(ExperimentConfig.model_validate(config))
    assert body["csv"] == records_to_csv(direct.records)
    assert body["bound_violated"] is False
    assert len(body["payload"]["records"]) == 30
    assert body["payload"]["summary"]["timeouts"] == 0


def test_run_endpoint_random_graph_analysis(client):
    config = {
        "algorithm": "AR-analysis",
        "graph": {"kind": "gnp", "n": 4, "p": 1.0},
        "trials": 500,
        "seed": 6,
    }
    resp = client.post("/run", json={"config": config})
    assert resp.status_code == 200
    body = resp.json()
    assert body["payload"]["records"] == []
    assert body["payload"]["summary"]["mean"] is None  # strict JSON, no NaN
    assert body["payload"]["analysis"]["exact_meeting"] == pytest.approx(6.0)
    assert body["bound_violated"] is False


def test_run_endpoint_rejects_bad_config(client):
    resp = client.post(
        "/run",
        json={"config": {"algorithm": "AF", "graph": {"kind": "path", "n": 0}}},
    )
    assert resp.status_code == 422
