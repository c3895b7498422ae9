"""Smoke tests for the Python module."""
import csv
import io
import math
import os
import pathlib

import numpy as np
import pytest

import ieti_stokes as ie

ASSETS = pathlib.Path(os.environ.get("IETI_ASSET_DIR", pathlib.Path(__file__).parents[2] / "assets"))


def test_partition_of_unity_and_derivative():
    t = np.linspace(0.0, 1.0, 101)
    vals = ie.basis(3, 1, 2, t)
    # (degree + 1) + (elements - 1) * (degree - smoothness)
    assert vals.shape == (101, 4 + 3 * 2)
    assert np.allclose(vals.sum(axis=1), 1.0, atol=1e-13)
    h = 1e-6
    x = np.array([0.123, 0.377, 0.8])
    fd = (ie.basis(3, 1, 2, x + h) - ie.basis(3, 1, 2, x - h)) / (2 * h)
    assert np.allclose(ie.basis(3, 1, 2, x, deriv=1), fd, atol=1e-6)


def test_single_solve_matches_reference():
    out = ie.solve("unit-square", 1, 2, variant="cn", precond="sd2", tol=1e-12, compare=True)
    assert out["converged"]
    assert out["reference_difference"] <= 1e-8
    assert out["max_jump"] <= 1e-8
    assert abs(out["pressure_mean"]) <= 1e-10
    assert len(out["residuals"]) == out["iterations"] + 1
    assert out["kappa"] >= 1.0


def test_sweep_and_report():
    rows = ie.run("unit-square", levels=[1], degrees=[2], variants=["c", "ce"], preconds=["sd2"])
    assert [r["variant"] for r in rows] == ["c", "ce"]
    assert all(r["status"] == "ok" and r["iterations"] >= 1 for r in rows)
    text = ie.report(rows, "csv")
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["iterations"]) for r in parsed] == [r["iterations"] for r in rows]
    md = ie.report(rows, "markdown")
    assert md.startswith("### unit-square: variant c, preconditioner sd2")


def test_deterministic_seed():
    a = ie.solve("quarter-annulus", 1, 2, seed=5)
    b = ie.solve("quarter-annulus", 1, 2, seed=5)
    assert a["residuals"] == b["residuals"]


def test_geometry_info():
    d = ie.info(str(ASSETS / "yeti_like_84.mp"))
    assert d["patches"] == 84
    assert len(d["interfaces"]) == 140
    assert math.isfinite(d["diameter"])


def test_errors_are_translated():
    with pytest.raises(ie.IetiError, match="unknown"):
        ie.solve("unit-square", 1, 2, variant="xyz")
    with pytest.raises(ie.IetiError):
        ie.info("/nonexistent.mp")
