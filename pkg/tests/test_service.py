import pytest
from fastapi.testclient import TestClient

from coneflats.service.app import create_app

SMALL = {"steps": 9, "verify": {"random_checks": 10, "convergence_check": False}}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestInfo:
    def test_info(self, client):
        response = client.get("/info")
        assert response.status_code == 200
        payload = response.json()
        assert payload["commands"] == ["build", "verify", "export", "info"]
        assert "semisimple" in payload["variants"]


class TestVerify:
    def test_default_small_config_passes(self, client):
        response = client.post("/verify", json={"config": SMALL})
        assert response.status_code == 200
        payload = response.json()
        assert payload["exit_code"] == 0
        assert payload["summary"]["failed"] == 0
        assert any(r["name"] == "dressed_uk_residual" for r in payload["records"])

    def test_invalid_config_is_422(self, client):
        response = client.post("/verify", json={"config": {"c": [1, 2, 3]}})
        assert response.status_code == 422

    def test_report_text_included(self, client):
        response = client.post("/verify", json={"config": SMALL})
        assert "records passed" in response.json()["report_text"]


class TestBuildExport:
    def test_build_files(self, client):
        response = client.post("/build", json={"config": {"steps": 5}})
        assert response.status_code == 200
        payload = response.json()
        assert set(payload["files"]) == {"immersion.csv", "curvature.csv", "manifest.json"}
        assert payload["grid_points"] == 125

    def test_export_with_artifacts(self, client):
        build = client.post("/build", json={"config": {"steps": 5}}).json()
        response = client.post("/export", json={"config": {"steps": 5},
                                                "artifacts": build["files"]})
        assert response.status_code == 200
        files = response.json()["files"]
        assert "export.csv" in files and "slice.obj" in files

    def test_export_stateless_rebuild(self, client):
        response = client.post("/export", json={"config": {"steps": 5}})
        assert response.status_code == 200

    def test_build_and_export_agree(self, client):
        build = client.post("/build", json={"config": {"steps": 5}}).json()
        via_artifacts = client.post("/export", json={
            "config": {"steps": 5}, "artifacts": build["files"]}).json()["files"]
        rebuilt = client.post("/export", json={"config": {"steps": 5}}).json()["files"]
        assert via_artifacts == rebuilt
