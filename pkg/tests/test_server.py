import pytest
from fastapi.testclient import TestClient

from server import app

client = TestClient(app)


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_catalog():
    data = client.get("/api/catalog").json()["data"]
    by_name = {entry["name"]: entry for entry in data}
    assert by_name["cube3"]["expectedGelfand"] is True
    assert by_name["s3/e"]["expectedGelfand"] is False


def test_gelfand():
    body = {
        "group": {"name": "Z4", "table": [[(i + j) % 4 for j in range(4)] for i in range(4)]},
        "subgroup": {"members": [0]},
    }
    response = client.post("/api/gelfand", json=body)
    assert response.status_code == 200
    assert response.json()["data"]["verdict"] is True

    body["group"]["table"][3][3] = 3
    assert client.post("/api/gelfand", json=body).status_code == 400


def test_analyze():
    response = client.get("/api/analyze", params={"pair": "z4", "weight": "cayley", "s": 1})
    assert response.status_code == 200
    data = response.json()["data"]
    assert sorted(data["gamma"]) == pytest.approx([0, 1, 1, 2**0.5])
    assert max(data["moduli"]) == pytest.approx(2**0.5)


def test_analyze_errors():
    assert client.get("/api/analyze", params={"pair": "nope"}).status_code == 404
    assert client.get("/api/analyze", params={"pair": "z4", "s": 1, "alpha": 0.5}).status_code == 400


def test_transform_round_trip():
    function = {"pair": "d8", "domain": "group", "values": [[float(i), 0.0] for i in range(8)]}
    forward = client.post("/api/transform", json={"pair": "d8", "function": function})
    assert forward.status_code == 200
    spectrum = forward.json()["data"]

    inverse = client.post("/api/transform", json={"pair": "d8", "inverse": True, "spectrum": spectrum})
    assert inverse.status_code == 200
    assert inverse.json()["data"]["domain"] == "classes"

    assert client.post("/api/transform", json={"pair": "d8", "inverse": True}).status_code == 400


def test_verify():
    body = {"pairs": ["klein4"], "suites": ["gelfand", "plancherel"], "trials": 5}
    response = client.post("/api/verify", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["success"] is True
    assert payload["exitCode"] == 0
    assert payload["data"]["summary"]["failed"] == 0


def test_verify_unknown_pair():
    response = client.post("/api/verify", json={"pairs": ["a5/a4"]})
    assert response.status_code == 404


def test_family():
    data = client.get("/api/family", params={"orders": "4,16"}).json()["data"]
    assert [entry["order"] for entry in data] == [4, 16]
    assert data[0]["modulus"] == pytest.approx(2 / 3**0.5)
