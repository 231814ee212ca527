import json
import math

import pytest
from fastapi.testclient import TestClient

from capstab import service
from capstab.api import app
from capstab.errors import ConfigError, SchemaMismatch

CAP_SPEC = {"family": "cap", "n": 2, "theta": math.pi / 3, "grid": 400}
CYL_SPEC = {"family": "cylinder", "n": 2, "radius": 1.0, "grid": 300}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_parse_range():
    assert service.parse_range("0:1:3") == [0.0, 0.5, 1.0]
    assert service.parse_range("2:2:1") == [2.0]
    with pytest.raises(ConfigError):
        service.parse_range("1:2")
    with pytest.raises(ConfigError):
        service.parse_range("1:2:0")


def test_canonical_hash_order_independent():
    a = service.canonical_hash({"x": 1, "y": 2})
    b = service.canonical_hash({"y": 2, "x": 1})
    assert a == b and len(a) == 64


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["schema_version"] == service.SCHEMA_VERSION


def test_generate_payload_shape(client):
    r = client.post("/generate", json={"spec": CAP_SPEC})
    assert r.status_code == 200
    body = r.json()
    assert body["schema_version"] == service.SCHEMA_VERSION
    assert body["defaults"] == service.DEFAULTS
    assert body["csv"].splitlines()[0] == "s,x,z,alpha"
    assert body["metadata"]["grid"] == 400
    assert len(body["config_hash"]) == 64


def test_generate_deterministic(client):
    a = client.post("/generate", json={"spec": CAP_SPEC}).json()
    b = client.post("/generate", json={"spec": CAP_SPEC}).json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_identities_endpoint(client):
    r = client.post("/check-identities", json={"spec": CAP_SPEC})
    assert r.status_code == 200
    reports = r.json()["reports"]
    assert len(reports) >= 5
    assert all("identity" in rep for rep in reports)


def test_stability_endpoint(client):
    r = client.post("/stability", json={"spec": {**CYL_SPEC, "height": 3.5}})
    assert r.status_code == 200
    st = r.json()["stability"]
    assert st["verdict"] == "unstable"
    assert st["worst_lambda"] < 0


def test_testfn_endpoint(client):
    r = client.post("/testfn", json={"spec": CAP_SPEC})
    assert r.status_code == 200
    rows = r.json()["rows"]
    ids = [row["function_id"] for row in rows]
    assert ids == ["phi", "v", "w", "u_rot"]
    by_id = {row["function_id"]: row for row in rows}
    # w degenerates on this cap: reported as a structured error row
    assert by_id["w"]["error"] == "NoSignChange"
    assert "index_value" in by_id["v"]


def test_sweep_and_report(client):
    req = {"spec": CYL_SPEC, "values": [2.5, 3.0, 3.5]}
    r = client.post("/sweep", json=req)
    assert r.status_code == 200
    body = r.json()
    assert "timings" in body and len(body["timings"]) == 3
    assert body["succeeded"] == 3
    verdicts = [rec["verdict"] for rec in body["records"]]
    assert verdicts[0] == "stable" and verdicts[-1] == "unstable"
    body.pop("timings")
    r2 = client.post("/report", json={"payloads": [body]})
    assert r2.status_code == 200
    merged = r2.json()
    assert merged["succeeded"] == 3


def test_merge_refuses_mixed_config(client):
    a = client.post("/sweep", json={"spec": CYL_SPEC, "values": [2.5]}).json()
    b = client.post("/sweep", json={"spec": {**CYL_SPEC, "n": 3},
                                    "values": [2.5]}).json()
    for p in (a, b):
        p.pop("timings", None)
    with pytest.raises(SchemaMismatch):
        service.merge_reports([a, b])
    r = client.post("/report", json={"payloads": [a, b]})
    assert r.status_code == 409


def test_config_error_maps_to_400(client):
    r = client.post("/generate", json={"spec": {"family": "cap", "n": 2,
                                                "grid": 400}})
    assert r.status_code == 400
    assert r.json()["error"] == "ConfigError"


def test_numerical_error_maps_to_409(client):
    r = client.post("/generate", json={"spec": {"family": "nodoid", "n": 2,
                                                "theta": 1.2, "grid": 300}})
    assert r.status_code == 409
    assert r.json()["error"] == "NoMatch"


def test_records_csv_round_trip(client):
    body = client.post("/sweep", json={"spec": CYL_SPEC,
                                       "values": [2.5, 3.5]}).json()
    body.pop("timings", None)
    text = service.records_csv(body)
    lines = text.strip().splitlines()
    assert len(lines) == 3  # header + 2 records
    assert "verdict" in lines[0]
