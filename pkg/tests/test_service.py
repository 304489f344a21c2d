import pytest
from fastapi.testclient import TestClient

from dpir import __version__
from dpir.service import create_app

from oracles import exact_search_bound


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "tool_version": __version__}


def test_figure1_endpoint(client):
    resp = client.post("/figure1", json={"K_max": 6, "N_list": [2, 3]})
    assert resp.status_code == 200
    body = resp.json()
    assert set(body) == {"tool_version", "subcommand", "config", "results"}
    assert body["subcommand"] == "figure1"
    rows = body["results"]["rows"]
    assert len(rows) == 5 * 2
    first = rows[0]
    assert first[:2] == [2, 2]
    assert first[2] == pytest.approx(1.0)
    assert first[3] == 2.0


def test_bound_endpoint_builtin_family(client):
    resp = client.post("/bound", json={
        "family": {"kind": "exact", "K": 3},
        "N": 2,
        "strategy": "exhaustive",
    })
    assert resp.status_code == 200
    results = resp.json()["results"]
    assert results["sequence"] == [1, 2, 3]
    assert results["normalized_bound"] == pytest.approx(exact_search_bound(3, 2), abs=1e-9)
    assert results["N"] == 2


def test_bound_endpoint_inline_document(client):
    resp = client.post("/bound", json={
        "family": {"document": {"K": 2, "label": "", "sets": [[1], [2]]}},
        "N": 2,
        "sequence": [1, 2],
    })
    assert resp.status_code == 200
    assert resp.json()["results"]["per_record_bound"] == pytest.approx(1.0)


def test_suffcond_endpoint(client):
    resp = client.post("/suffcond", json={
        "family": {"kind": "circular", "K": 8},
        "sequence": [1, 3, 2],
        "horizon": 2,
    })
    assert resp.status_code == 200
    rho = resp.json()["results"]["rho"]
    assert len(rho) == 2
    assert rho[0] == pytest.approx(0.0, abs=1e-12)


def test_prop5_endpoint(client):
    resp = client.post("/prop5", json={"K": 8})
    assert resp.status_code == 200
    results = resp.json()["results"]
    assert results["max_min"] <= 0.9
    assert len(results["best_triple"]) == 3


def test_protocol_run_endpoint(client):
    resp = client.post("/protocol/run", json={
        "family": {"kind": "circular", "K": 8},
        "N": 2, "L": 2048, "seed": 7, "trials": 4,
    })
    assert resp.status_code == 200
    results = resp.json()["results"]
    assert results["empirical_error_rate"] == 0.0
    assert results["mean_measured_rate"] == pytest.approx(0.5)
    assert results["codec"]["identity"] is True


def test_protocol_audit_endpoint(client):
    resp = client.post("/protocol/audit", json={
        "family": {"kind": "exact", "K": 4},
        "N": 2, "seed": 3, "trials": 500,
    })
    assert resp.status_code == 200
    results = resp.json()["results"]
    assert results["passed"] is True
    assert len(results["servers"]) == 2


def test_domain_error_maps_to_400(client):
    resp = client.post("/prop5", json={"K": 9})
    assert resp.status_code == 400
    body = resp.json()
    assert body["error"]["type"] == "OddAlphabetError"
    assert "even" in body["error"]["message"]


def test_validation_error_maps_to_422(client):
    resp = client.post("/figure1", json={"K_max": 5})
    assert resp.status_code == 422


def test_family_spec_needs_exactly_one_source(client):
    resp = client.post("/bound", json={
        "family": {"kind": "exact", "K": 3,
                   "document": {"K": 2, "sets": [[1]]}},
        "N": 2,
    })
    assert resp.status_code == 422


def test_nested_family_via_service(client):
    resp = client.post("/bound", json={
        "family": {"kind": "nested", "K": 6, "M": 3, "depth": 2},
        "N": 2, "strategy": "greedy",
    })
    assert resp.status_code == 200
    assert resp.json()["config"]["family"]["kind"] == "nested"
