"""HTTP layer: schema shape, validation codes, and domain-error mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from bellkit.service import create_app

TOP_LEVEL_KEYS = {"command", "seed", "n", "mean", "variance", "skewness",
                  "kurtosis", "p_violation", "histogram", "extras"}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_typicality_schema(client):
    r = client.post("/typicality", json={"seed": 7, "count": 60})
    assert r.status_code == 200
    body = r.json()
    assert set(body) == TOP_LEVEL_KEYS
    assert body["command"] == "typicality"
    assert body["n"] == 60
    assert set(body["histogram"]) == {"edges", "counts"}
    assert len(body["histogram"]["edges"]) == len(body["histogram"]["counts"]) + 1
    assert sum(body["histogram"]["counts"]) == 60
    assert body["extras"]["max_oracle_gap"] <= 1e-5


def test_neighborhood_reports_generation_counters(client):
    r = client.post("/neighborhood",
                    json={"seed": 3, "count": 20, "alpha": 0.75, "budget": 100_000})
    assert r.status_code == 200
    extras = r.json()["extras"]
    assert extras["hit_count"] == 20
    assert extras["generated_count"] <= 100_000
    assert extras["budget_exhausted"] is False


def test_neighborhood_budget_exhaustion_is_not_an_error(client):
    r = client.post("/neighborhood",
                    json={"seed": 3, "count": 50, "alpha": 0.95, "budget": 500})
    assert r.status_code == 200
    extras = r.json()["extras"]
    assert extras["budget_exhausted"] is True
    assert extras["generated_count"] == 500


def test_scatter_quadrants(client):
    r = client.post("/scatter", json={"seed": 1, "count": 300})
    assert r.status_code == 200
    quads = r.json()["extras"]["quadrants"]
    assert set(quads) == {"0.75", "0.85", "0.95"}
    for quad in quads.values():
        assert sum(quad.values()) == 300


def test_fid_pdf_selects_ensemble(client):
    r = client.post("/fid-pdf", json={"seed": 2, "count": 1500, "ensemble": "bures"})
    assert r.status_code == 200
    assert r.json()["extras"]["ensemble"] == "bures"


def test_verify_passes_at_default_tolerances(client):
    r = client.post("/verify", json={"count": 15, "pairs": 20})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is True
    names = {c["name"] for c in body["checks"]}
    assert {"target_bell", "target_marginals", "oracle_sweep", "fvg_sweep"} <= names


def test_verify_reports_failure_without_erroring(client):
    r = client.post("/verify", json={"count": 5, "pairs": 5, "oracle_tol": 0.0})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is False
    failed = [c for c in body["checks"] if not c["passed"]]
    assert [c["name"] for c in failed] == ["oracle_sweep"]


def test_validation_errors_return_422(client):
    assert client.post("/typicality", json={"count": 0}).status_code == 422
    assert client.post("/neighborhood", json={"count": 10}).status_code == 422
    assert client.post("/neighborhood",
                       json={"count": 10, "alpha": 1.5}).status_code == 422
    assert client.post("/fid-pdf", json={"ensemble": "bogus"}).status_code == 422


def test_domain_errors_return_400(client):
    # |00><00| is a valid state whose marginal is nowhere near I/2
    mat = [[[0.0, 0.0]] * 4 for _ in range(4)]
    mat[0][0] = [1.0, 0.0]
    r = client.post("/scatter", json={
        "seed": 0, "count": 10,
        "target": {"matrix": mat, "angles": [0.1] * 8}})
    assert r.status_code == 400
    assert "marginal" in r.json()["detail"]


def test_custom_target_round_trips(client):
    from bellkit.experiments import _TARGET_ANGLES, _TARGET_ROWS, _TARGET_VALUE
    doc = {
        "matrix": [[[z.real, z.imag] for z in np.array(row, dtype=complex)]
                   for row in _TARGET_ROWS],
        "angles": list(_TARGET_ANGLES),
        "reference_value": _TARGET_VALUE,
    }
    base = client.post("/scatter", json={"seed": 9, "count": 40}).json()
    custom = client.post("/scatter",
                         json={"seed": 9, "count": 40, "target": doc}).json()
    assert base == custom
