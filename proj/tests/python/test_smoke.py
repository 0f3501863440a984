import json
import math
import os
import subprocess

import numpy as np
import pytest

import urbanembed as ue


def small_city():
    c = ue.CityConfig()
    c.n_regions = 10
    c.n_districts = 2
    c.n_trips = 200
    return ue.generate_city(c)


def small_config(epochs=3):
    c = ue.TrainConfig()
    c.epochs = epochs
    c.dim = 8
    c.heads = 2
    c.memory = 4
    return c


def test_soft_threshold():
    assert ue.soft_threshold(0.3, 0.1) == pytest.approx(0.2)
    assert ue.soft_threshold(-0.05, 0.1) == 0.0
    m = ue.soft_threshold_matrix(np.array([[0.5, -0.5], [0.01, 0.0]]), 0.1)
    np.testing.assert_allclose(m, [[0.4, -0.4], [0.0, 0.0]])


def test_generate_and_round_trip(tmp_path):
    d = small_city()
    assert d.n_regions == 10
    assert d.poi.shape[0] == 10
    assert d.trips.shape[1] == 2
    assert d == small_city()
    ue.write_dataset(d, str(tmp_path))
    assert ue.load_dataset(str(tmp_path)) == d


def test_graphs_are_symmetric():
    g = ue.build_graphs(small_city())
    for tag in ("O", "D", "F", "S"):
        np.testing.assert_allclose(g[tag], g[tag].T, atol=1e-12)


def test_train_reduces_loss():
    r = ue.train(small_city(), small_config(epochs=20))
    assert r["embedding"].shape == (10, 32)
    assert len(r["log"]) == 20
    assert r["log"][-1]["total"] < r["log"][0]["total"]
    assert all(math.isfinite(x["total"]) for x in r["log"])


def test_clustering_metrics():
    a = [0, 0, 1, 1, 2, 2]
    assert ue.nmi(a, [7, 7, 3, 3, 5, 5]) == 1.0
    assert ue.ari(a, a) == 1.0
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]])
    km = ue.kmeans(pts, 2, seed=1)
    assert km["assignments"][0] == km["assignments"][1]
    assert km["assignments"][2] != km["assignments"][0]


def test_lasso_recovers_line():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 3))
    y = 2.0 * x[:, 0] + 1.0
    fit = ue.lasso_fit(x, y, 0.0)
    assert fit["converged"]
    np.testing.assert_allclose(fit["coefficients"], [2.0, 0.0, 0.0], atol=1e-6)
    assert fit["intercept"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.skipif("URBANEMBED_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_train(tmp_path):
    tool = os.environ["URBANEMBED_CLI"]
    subprocess.run([tool, "generate", "--regions", "8", "--districts", "2", "--trips", "100",
                    "--out", str(tmp_path)], check=True, capture_output=True)
    out = tmp_path / "run"
    out.mkdir()
    r = subprocess.run([tool, "train", "--data", str(tmp_path), "--out", str(out), "--epochs", "2",
                        "--dim", "8", "--heads", "2", "--memory", "4"],
                       check=True, capture_output=True, text=True)
    assert json.loads(r.stdout)["command"] == "train"
    assert (out / "embeddings.csv").exists()
