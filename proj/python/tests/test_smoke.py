import math

import numpy as np
import pytest

import bctk

CHEB = bctk.quadratic_map(-2)


def test_map_basics():
    R = bctk.RationalMap.quadratic(-2)
    assert R.degree == 2
    assert R(0) == -2
    assert R(None) is None
    crit = R.critical_points()
    assert crit[0]["point"] == 0
    assert crit[0]["in_julia"] == "yes"
    assert crit[1]["point"] is None
    assert sorted(p.real for p, _ in R.preimages(2)) == pytest.approx([-2, 2])
    assert bctk.chordal_distance(0, None) == pytest.approx(2.0)


def test_checks():
    summ = bctk.run("check-summ", CHEB, depth=30)
    assert summ["reports"][0]["partial_sum"] == pytest.approx(1 / 3, abs=1e-12)
    ce = bctk.run("check-ce", CHEB, depth=30)
    assert ce["reports"][0]["lambda_hat"] == pytest.approx(math.log(4), abs=1e-6)
    bc = bctk.run("check-bc", CHEB, delta=0.02, delta_prime=0.08, depth=6)
    assert bc["verdict"] == "holds"


def test_modulus_and_qc():
    assert bctk.modulus_round(1, math.e) == pytest.approx(1.0)
    assert bctk.qc_modulus_bounds(2, 2 * math.pi, 1) == (0.5, 2.0)
    m = bctk.run("modulus", annulus={"round": {"r": 1, "R": math.e}}, grid=128)
    assert m["lower"] <= 1.0 <= m["upper"]


def test_thurston_driver():
    out = bctk.run("thurston", CHEB, delta=0.05)
    assert out["converged"]
    assert out["nonrecurrence"]["verdict"] == "holds"


def test_render():
    mask = bctk.render(bctk.quadratic_map(0), width=64, height=64, viewport=[-2, 2, -2, 2])
    assert mask.shape == (64, 64)
    ys, xs = np.nonzero(mask == 255)
    r = np.hypot(-2 + (xs + 0.5) / 16, 2 - (ys + 0.5) / 16)
    assert len(r) > 0
    assert np.all(np.abs(r - 1) < 0.15)


def test_errors():
    with pytest.raises(bctk.PreconditionError):
        bctk.run("check-bc", CHEB, delta=0.08, delta_prime=0.02)
    with pytest.raises(ValueError):
        bctk.run("analyze", {"numerator": [[0, 0], [1, 0]], "denominator": [[1, 0]]})
    with pytest.raises(bctk.NumericError):
        bctk.run("thurston", CHEB, delta=0.001, depth=0, max_period=1)
    with pytest.raises(bctk.PreconditionError):
        bctk.run("no-such-command", CHEB)
