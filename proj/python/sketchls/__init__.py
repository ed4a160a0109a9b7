"""Sketched constrained least squares."""

import csv
import io
import json

import numpy as np

from . import _core
from ._core import InvalidArgument

__all__ = [
    "InvalidArgument",
    "certificate_subspace",
    "project",
    "recommend",
    "restricted_eig",
    "run_experiment",
    "sketch_apply",
    "sketch_dense",
    "solve",
    "width_subspace_mc",
]


def _f64(a):
    return np.asarray(a, dtype=np.float64)


def sketch_apply(kind, m, seed, matrix):
    """S @ matrix for a sketch of the given kind ("gaussian", "rademacher", "ros")."""
    mat = _f64(matrix)
    if mat.ndim == 1:
        return _core.sketch_apply(kind, m, seed, mat[:, None])[:, 0]
    return _core.sketch_apply(kind, m, seed, mat)


def sketch_dense(kind, m, seed, n):
    return _core.sketch_dense(kind, m, seed, n)


def project(v, constraint):
    return _core.project(_f64(v), json.dumps(constraint))


def solve(a, y, constraint=None, solver=None):
    """Minimize ||a x - y||^2 over the constraint set; returns a dict."""
    return _core.solve(_f64(a), _f64(y), json.dumps(constraint or {"kind": "unconstrained"}),
                       json.dumps(solver or {}))


def recommend(formula, params, delta=1.0, c0=1.0):
    return json.loads(_core.recommend(formula, delta, c0, json.dumps(params)))


def width_subspace_mc(a, samples, seed=0):
    return _core.width_subspace_mc(_f64(a), samples, seed)


def restricted_eig(a, k, brute_force=False):
    return _core.restricted_eig(_f64(a), k, brute_force)


def certificate_subspace(a, y, xstar, kind, m, seed):
    out = json.loads(_core.certificate_subspace(_f64(a), _f64(y), _f64(xstar), kind, m, seed))
    if out["bound"] is None:
        out["bound"] = float("inf")
    return out


def run_experiment(config, include_timings=False):
    """Runs an experiment and returns its records as a list of dicts."""
    text = _core.run_experiment(json.dumps(config), include_timings)
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key, value in row.items():
            if key in ("experiment", "kind"):
                continue
            if key in ("n", "d", "m", "trial"):
                row[key] = int(value)
            elif key == "converged":
                row[key] = value == "1"
            else:
                row[key] = float(value)
    return rows
