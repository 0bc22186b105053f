import numpy as np
import pytest
from fastapi.testclient import TestClient

from hdmean.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def duplicated_column_rows():
    xi = [1.0, -1.0, 0.0, 2.0, 3.0]
    return [[x, x, x] for x in xi]


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


class TestOneSampleEndpoint:
    def test_report_schema_and_p_value(self, client):
        rows = np.random.default_rng(1).standard_normal((20, 6)).tolist()
        resp = client.post(
            "/tests/one-sample",
            json={"rows": rows, "variant": "tp1", "law": "normal", "seed": 9},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert 0.0 < body["p_value"] < 1.0
        assert body["law"] == {"b": 1.0, "rho": []}
        assert body["n"] == 20
        assert body["seed"] == {"master_seed": 9, "stream_id": 0}
        assert set(body["trace_estimate"]) == {"tr_r2_hat", "correction", "estimate"}

    def test_duplicated_column_statistic(self, client):
        resp = client.post(
            "/tests/one-sample",
            json={"rows": duplicated_column_rows(), "variant": "tsd", "law": "normal"},
        )
        assert resp.status_code == 200
        assert abs(resp.json()["statistic"] - 0.40824829046386296) < 1e-9

    def test_constant_column_degenerate(self, client):
        rows = [[float(i), 5.0] for i in range(6)]
        resp = client.post("/tests/one-sample", json={"rows": rows, "variant": "tp1"})
        assert resp.status_code == 400
        detail = resp.json()["detail"]
        assert detail["code"] == "degenerate-data"
        assert detail["column"] == 1

    def test_too_few_rows(self, client):
        resp = client.post("/tests/one-sample", json={"rows": [[1.0], [2.0]], "variant": "tsd"})
        assert resp.status_code == 400
        assert resp.json()["detail"]["code"] == "domain-error"

    def test_deterministic_given_seed(self, client):
        payload = {
            "rows": np.random.default_rng(2).standard_normal((12, 4)).tolist(),
            "variant": "tp1",
            "seed": {"master_seed": 4, "stream_id": 1},
            "mc_draws": 50_000,
        }
        a = client.post("/tests/one-sample", json=payload).json()
        b = client.post("/tests/one-sample", json=payload).json()
        assert a == b


class TestTwoSampleEndpoint:
    def test_same_sample_twice(self, client):
        rows = np.random.default_rng(3).standard_normal((6, 5)).tolist()
        resp = client.post(
            "/tests/two-sample",
            json={"rows1": rows, "rows2": rows, "variant": "tp2", "law": "normal"},
        )
        assert resp.status_code == 200
        body = resp.json()
        n = 12
        assert abs(body["numerator"] - (-(n - 1) * 5 / (n - 4))) < 1e-12
        assert body["p_value"] > 0.5
        assert body["n"] == [6, 6]

    def test_dimension_mismatch(self, client):
        resp = client.post(
            "/tests/two-sample",
            json={
                "rows1": [[1.0, 2.0]] * 5,
                "rows2": [[1.0]] * 5,
                "variant": "tsd2",
            },
        )
        assert resp.status_code == 400
        assert resp.json()["detail"]["code"] == "domain-error"

    def test_auto_law_detects_spike(self, client):
        rng = np.random.default_rng(4)
        z1 = rng.standard_normal((30, 1)) * np.sqrt(0.5)
        w1 = rng.standard_normal((30, 100)) * np.sqrt(0.5)
        z2 = rng.standard_normal((30, 1)) * np.sqrt(0.5)
        w2 = rng.standard_normal((30, 100)) * np.sqrt(0.5)
        resp = client.post(
            "/tests/two-sample",
            json={
                "rows1": (z1 + w1).tolist(),
                "rows2": (z2 + w2).tolist(),
                "variant": "tp2",
                "law": "auto",
            },
        )
        assert resp.status_code == 200
        assert len(resp.json()["law"]["rho"]) >= 1


class TestMatrixEndpoint:
    def test_compound(self, client):
        resp = client.post("/matrices/generate", json={"model": "cs", "p": 3, "r": 0.5})
        assert resp.status_code == 200
        m = np.asarray(resp.json()["matrix"])
        assert np.all(m[~np.eye(3, dtype=bool)] == 0.5)

    def test_ar1(self, client):
        resp = client.post("/matrices/generate", json={"model": "ar1", "p": 3, "gamma": 0.5})
        m = np.asarray(resp.json()["matrix"])
        assert np.allclose(m, [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]])

    def test_spectrum_happy_path(self, client):
        resp = client.post(
            "/matrices/generate", json={"model": "spectrum", "spectrum": [2.0, 0.5, 0.5]}
        )
        m = np.asarray(resp.json()["matrix"])
        assert np.allclose(np.diag(m), 1.0)

    def test_spectrum_rejects_non_majorizing(self, client):
        resp = client.post(
            "/matrices/generate", json={"model": "spectrum", "spectrum": [1.5, 1.0, 0.2]}
        )
        assert resp.status_code == 400
        assert "not a correlation spectrum" in resp.json()["detail"]["message"]

    def test_missing_parameter(self, client):
        resp = client.post("/matrices/generate", json={"model": "cs", "p": 3})
        assert resp.status_code == 400


class TestLawEndpoint:
    def test_normal_quantile(self, client):
        resp = client.post(
            "/laws/p-value",
            json={"law": {"rho": []}, "statistic": 1.6449, "method": "cf_inversion"},
        )
        assert resp.status_code == 200
        assert abs(resp.json()["p_value"] - 0.05) < 5e-4


class TestMomentsEndpoint:
    def test_closed_forms_match_oracle(self, client):
        corr4 = [[1, 0.3, 0.2, 0.1], [0.3, 1, 0.25, 0.15], [0.2, 0.25, 1, 0.35], [0.1, 0.15, 0.35, 1]]
        resp = client.post("/moments/corr4-check", json={"corr4": corr4})
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert {r["kind"] for r in rows} == {"m112244", "m222", "m2222", "m44"}
        assert all(r["abs_diff"] < 1e-12 for r in rows)


class TestSimulateEndpoint:
    def test_runs_and_reproduces(self, client):
        payload = {
            "variant": "tp1",
            "model": {"name": "identity"},
            "p": 10,
            "n": 12,
            "reps": 120,
            "seed": {"master_seed": 5, "stream_id": 0},
            "law": "normal",
            "mc_draws": 20_000,
            "grid": {"lo": -3, "hi": 3, "points": 31},
        }
        a = client.post("/simulations/run", json=payload).json()
        b = client.post("/simulations/run", json=payload).json()
        assert a["draws"] == b["draws"]
        assert a["summary"]["ks_vs_law"] == b["summary"]["ks_vs_law"]
        assert len(a["density"]) == 31

    def test_reps_floor(self, client):
        payload = {
            "variant": "tp1",
            "model": {"name": "identity"},
            "p": 10,
            "n": 12,
            "reps": 50,
        }
        resp = client.post("/simulations/run", json=payload)
        assert resp.status_code == 400
        assert "reps" in resp.json()["detail"]["message"]

    def test_two_sample_needs_pair(self, client):
        payload = {
            "variant": "tp2",
            "model": {"name": "identity"},
            "p": 10,
            "n": 12,
            "reps": 120,
        }
        resp = client.post("/simulations/run", json=payload)
        assert resp.status_code == 400
