from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from simloop.ingest import SynthSpec, write_synth_csv
from simloop.providers import ProviderConfig, ProviderKind
from simloop.service import create_app
from simloop.store import Project, save_project

STUB = ProviderConfig(kind=ProviderKind.STUB, embed_dim=32)


@pytest.fixture
def client(tmp_path):
    project_dir = tmp_path / "proj"
    save_project(Project(project_id="proj"), project_dir)
    csv_path = tmp_path / "synth.csv"
    write_synth_csv(
        SynthSpec(seed=11, n_customers=12, n_clusters=3, launder_fraction=0.25),
        csv_path,
        tmp_path / "truth.csv",
    )
    app = create_app(project_dir, STUB)
    with TestClient(app) as test_client:
        test_client.csv_path = str(csv_path)
        yield test_client


def ingest(client) -> None:
    response = client.post(
        "/projects/proj/ingest",
        json={"kind": "tabular", "path": client.csv_path, "id_column": "id"},
    )
    assert response.status_code == 200, response.text
    assert response.json()["ingested"] == 12


def start(client, point_ids=None) -> str:
    ingest(client)
    body = {
        "point_ids": point_ids or ["c0000", "c0001", "c0002", "c0003"],
        "interest": "transaction risk patterns",
    }
    response = client.post("/sessions", json=body)
    assert response.status_code == 201, response.text
    doc = response.json()
    assert doc["state"] == "created"
    return doc["session_id"]


class TestHealth:
    def test_shape(self, client):
        doc = client.get("/health").json()
        assert doc["status"] == "ok"
        assert doc["project_id"] == "proj"
        assert doc["points"] == 0
        assert doc["dim"] is None


class TestIngest:
    def test_tabular(self, client):
        ingest(client)
        assert client.get("/health").json()["points"] == 12

    def test_wrong_project_404(self, client):
        response = client.post(
            "/projects/other/ingest", json={"kind": "tabular", "path": "x.csv"}
        )
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_id"

    def test_bad_kind(self, client):
        response = client.post(
            "/projects/proj/ingest", json={"kind": "parquet", "path": "x"}
        )
        assert response.status_code == 400


class TestSessionFlow:
    def test_generate_review_accept(self, client):
        session_id = start(client)
        doc = client.post(f"/sessions/{session_id}/generate").json()
        assert doc["state"] == "generated"
        assert len(doc["rounds"]) == 1
        assert len(doc["rounds"][0]["profiles"]) == 4

        response = client.post(
            f"/sessions/{session_id}/review",
            json={"feedback": "looks close", "action": "refine", "edit": "currency mix"},
        )
        assert response.status_code == 200
        assert response.json()["interest"]["version"] == 2

        doc = client.post(f"/sessions/{session_id}/generate").json()
        assert len(doc["rounds"]) == 2

        response = client.post(
            f"/sessions/{session_id}/review", json={"feedback": "good", "action": "accept"}
        )
        assert response.json()["state"] == "accepted"

    def test_double_accept_409(self, client):
        session_id = start(client)
        client.post(f"/sessions/{session_id}/generate")
        client.post(f"/sessions/{session_id}/review", json={"action": "accept"})
        response = client.post(
            f"/sessions/{session_id}/review", json={"action": "accept"}
        )
        assert response.status_code == 409
        assert response.json()["code"] == "already_accepted"

    def test_generate_twice_conflict(self, client):
        session_id = start(client)
        client.post(f"/sessions/{session_id}/generate")
        response = client.post(f"/sessions/{session_id}/generate")
        assert response.status_code == 409
        assert response.json()["code"] == "preceding_round_unreviewed"

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/s9999").status_code == 404

    def test_bad_action_400(self, client):
        session_id = start(client)
        client.post(f"/sessions/{session_id}/generate")
        response = client.post(
            f"/sessions/{session_id}/review", json={"action": "destroy"}
        )
        assert response.status_code == 400

    def test_error_shape(self, client):
        response = client.post("/sessions", json={"point_ids": ["nope"], "interest": "x"})
        assert response.status_code == 404
        doc = response.json()
        assert set(doc) == {"code", "message", "details"}


class TestNeighborsAndThreshold:
    def accepted_session(self, client) -> str:
        session_id = start(client, point_ids=[f"c{i:04d}" for i in range(12)])
        client.post(f"/sessions/{session_id}/generate")
        client.post(f"/sessions/{session_id}/review", json={"action": "accept"})
        return session_id

    def test_neighbors_before_accept_404(self, client):
        start(client)
        response = client.get("/points/c0000/neighbors?k=3")
        assert response.status_code == 404

    def test_neighbors_after_accept(self, client):
        self.accepted_session(client)
        doc = client.get("/points/c0000/neighbors?k=5").json()
        assert doc["point_id"] == "c0000"
        rows = doc["neighbors"]
        assert len(rows) == 5
        assert [r["rank"] for r in rows] == [1, 2, 3, 4, 5]
        scores = [r["score"] for r in rows]
        assert scores == sorted(scores, reverse=True)
        assert all(r["id"] != "c0000" for r in rows)
        assert all(r["label"] is None for r in rows)  # no threshold yet

    def test_put_threshold_labels_rows(self, client):
        self.accepted_session(client)
        response = client.put("/threshold", json={"tau": 0.9})
        assert response.json()["provenance"] == "expert_set"
        rows = client.get("/points/c0000/neighbors?k=11").json()["neighbors"]
        for row in rows:
            expected = "similar" if row["score"] >= 0.9 else "not_similar"
            assert row["label"] == expected

    def test_put_threshold_validates_range(self, client):
        assert client.put("/threshold", json={"tau": 1.5}).status_code == 400

    def test_calibrate_after_labels(self, client):
        session_id = start(client, point_ids=[f"c{i:04d}" for i in range(12)])
        client.post(f"/sessions/{session_id}/generate")
        # same cluster (stride 3 apart) labeled similar; different labeled not
        labels = [
            ("c0000", "c0003", "similar"),
            ("c0001", "c0004", "similar"),
            ("c0000", "c0001", "not_similar"),
            ("c0002", "c0003", "not_similar"),
        ]
        for a, b, label in labels:
            response = client.post(
                f"/sessions/{session_id}/labels", json={"a": a, "b": b, "label": label}
            )
            assert response.status_code == 200, response.text
        doc = client.post("/threshold/calibrate", json={"session_id": session_id}).json()
        assert doc["provenance"] == "calibrated"
        assert doc["calibration_stats"]["positives"] == 2
        assert doc["calibration_stats"]["negatives"] == 2
        assert -1.0 <= doc["tau"] <= 1.0

    def test_calibrate_without_labels(self, client):
        session_id = start(client)
        client.post(f"/sessions/{session_id}/generate")
        response = client.post("/threshold/calibrate", json={"session_id": session_id})
        assert response.status_code == 400

    def test_label_validation(self, client):
        session_id = start(client)
        response = client.post(
            f"/sessions/{session_id}/labels",
            json={"a": "c0000", "b": "c0000", "label": "similar"},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "self_pair"


class TestPersistenceAcrossRestart:
    def test_state_survives_reload(self, client, tmp_path):
        session_id = start(client)
        client.post(f"/sessions/{session_id}/generate")
        client.post(f"/sessions/{session_id}/review", json={"action": "accept"})
        client.put("/threshold", json={"tau": 0.5})

        fresh = create_app(tmp_path / "proj", STUB)
        with TestClient(fresh) as second:
            doc = second.get(f"/sessions/{session_id}").json()
            assert doc["state"] == "accepted"
            rows = second.get("/points/c0000/neighbors?k=3").json()["neighbors"]
            assert len(rows) == 3
            assert all(r["label"] in ("similar", "not_similar") for r in rows)
