import json
import math

import numpy as np
import pytest

import beltrami_lab as bl


def test_dilatation_values():
    assert abs(bl.mu_example3(0.75, 0.5) - 5 / 7) < 1e-15
    assert abs(bl.K_mu(bl.mu_example4(math.exp(-0.25))) - 2.0) < 1e-12
    assert bl.example3_truncation_radius(0.5, 10.0) == pytest.approx(0.625)


def test_zero_solve_is_identity():
    res = bl.solve(grid=64)
    g = res["grid"]
    x = g.x_min + g.dx * np.arange(g.nx)
    y = g.y_min + g.dy * np.arange(g.ny)
    z = x[None, :] + 1j * y[:, None]
    assert np.max(np.abs(res["f"] - z)) < 1e-14
    assert res["f"].shape == (64, 64)


def test_constant_solve():
    res = bl.solve(mu="const", c=0.3, grid=128)
    assert res["residual_linf"] < 2e-2
    with pytest.raises(ArithmeticError):
        bl.solve(mu="example4", grid=64)


def test_transforms_of_zero():
    g = bl.GridSpec.square(32, 2.0)
    zero = np.zeros((32, 32), dtype=complex)
    assert np.all(bl.cauchy_transform(g, zero) == 0)
    with pytest.raises(ValueError):
        bl.beurling_transform(g, np.zeros((3, 3)))


def test_kip_bound():
    w, z = bl.example4_KIp_integral(16.0, 1.5)
    assert abs(w - z) / w < 1e-3
    assert w <= 0.99 * bl.example4_KIp_bound(1.5)


def test_poletsky_worked_example():
    rep = bl.inverse_poletsky_check("example4-limit", 0.9, 1.0)
    assert rep["holds"]
    assert rep["rhs"] == pytest.approx(4 * math.pi / 0.19)


def test_l1_and_holder():
    value, divergent = bl.l1_norm("one")
    assert value == pytest.approx(math.pi)
    assert not divergent
    assert bl.l1_norm("example1")[1]
    scan = bl.holder_scan("example3", j_max=9, pairs_per_scale=200)
    assert scan["bounded"]


def test_cli_roundtrip(tmp_path):
    code, out, err = bl.run_cli(["report", "--out", str(tmp_path)])
    assert code == 0, err
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "pass"
    code, _, err = bl.run_cli(["solve", "--mu", "example3", "--alpha", "2.5", "--k", "4"])
    assert code == 2
    assert "alpha" in err
