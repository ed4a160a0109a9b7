import json
import math
import os
import subprocess

import numpy as np
import pytest

import sketchls


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def test_sketch_matches_dense(rng):
    a = rng.normal(size=(40, 3))
    for kind in ("gaussian", "rademacher", "ros"):
        s = sketchls.sketch_dense(kind, 7, 3, 40)
        assert s.shape == (7, 40)
        np.testing.assert_allclose(sketchls.sketch_apply(kind, 7, 3, a), s @ a, atol=1e-10)
        np.testing.assert_allclose(sketchls.sketch_apply(kind, 7, 3, a[:, 0]), s @ a[:, 0], atol=1e-10)


def test_solve_unconstrained_matches_lstsq(rng):
    a = rng.normal(size=(30, 4))
    y = rng.normal(size=30)
    out = sketchls.solve(a, y)
    np.testing.assert_allclose(out["x"], np.linalg.lstsq(a, y, rcond=None)[0], atol=1e-10)
    assert out["converged"]


def test_solve_l1_is_feasible(rng):
    a = rng.normal(size=(30, 6))
    y = rng.normal(size=30)
    out = sketchls.solve(a, y, {"kind": "l1", "radius": 0.3})
    assert np.abs(out["x"]).sum() <= 0.3 + 1e-9


def test_project_simplex():
    x = sketchls.project(np.array([0.5, 2.0, -1.0]), {"kind": "simplex"})
    np.testing.assert_allclose(x, [0.0, 1.0, 0.0], atol=1e-12)


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        sketchls.project(np.ones(3), {"kind": "l1", "radius": -1.0})
    with pytest.raises(ValueError):
        sketchls.sketch_dense("srht", 2, 0, 4)


def test_recommend():
    r = sketchls.recommend("cor2a", {"rank": 500}, delta=1.0, c0=1.5)
    assert r["m"] == 750
    assert sketchls.recommend("cor2a", {"rank": 500}, delta=0.5, c0=1.5)["m"] == 3000


def test_width_and_restricted_eig(rng):
    a = rng.normal(size=(60, 10))
    value, stderr = sketchls.width_subspace_mc(a, 500, 1)
    chi = math.sqrt(2) * math.exp(math.lgamma(5.5) - math.lgamma(5.0))
    assert abs(value - chi) < 5 * stderr
    lo, hi = sketchls.restricted_eig(a, 1)
    assert 0 <= lo <= hi


def test_certificate_bounds_ratio(rng):
    a = rng.normal(size=(128, 5))
    y = rng.normal(size=128)
    xstar = sketchls.solve(a, y)["x"]
    cert = sketchls.certificate_subspace(a, y, xstar, "gaussian", 40, 2)
    s = sketchls.sketch_dense("gaussian", 40, 2, 128)
    xhat = np.linalg.lstsq(s @ a, s @ y, rcond=None)[0]
    ratio = np.sum((a @ xhat - y) ** 2) / np.sum((a @ xstar - y) ** 2)
    assert ratio <= cert["bound"] * (1 + 1e-8)


def test_run_experiment_is_deterministic():
    cfg = {"experiment": "unc_ls", "n": 64, "d": 8, "trials": 2, "alpha_grid": [0.5, 1.0],
           "kinds": ["gaussian", "ros"], "seed": 5}
    a = sketchls.run_experiment(cfg)
    b = sketchls.run_experiment(dict(cfg, workers=1))
    assert repr(a) == repr(b)  # nan fields defeat ==
    assert len(a) == 8
    assert all(r["ratio"] >= 1 - 1e-8 for r in a)


@pytest.mark.skipif("SKETCHLS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_recommend():
    out = subprocess.run([os.environ["SKETCHLS_CLI"], "recommend", "cor2a", "--c0", "1.5",
                          "--params", '{"rank": 500}'], check=True, capture_output=True, text=True)
    assert json.loads(out.stdout)["m"] == 750
