from __future__ import annotations

import numpy as np
import pytest

from subfactor_gpa.commuting_square import square_from_generators, vertical_tower
from subfactor_gpa.embedding_check import GENERATORS, SquareBridge, check_intertwining, embed_report, psi
from subfactor_gpa.errors import DepthUnavailable
from subfactor_gpa.matrix_algebra import dagger

TOL = 1e-8


@pytest.fixture(scope="module")
def bridge(fourier2):
    return SquareBridge(vertical_tower(fourier2, 3))


def test_bridge_graph_is_first_inclusion(bridge):
    assert bridge.units.inclusion.tolist() == [[1, 1]]
    assert bridge.d == pytest.approx(np.sqrt(2))


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("parity", ["+", "-"])
def test_psi_is_injective_star_homomorphism(bridge, n, parity):
    data = psi(bridge, n, parity)
    assert data.injective
    assert data.homomorphism_residual < TOL
    assert data.star_residual < TOL
    assert data.unit_residual < TOL


CASES = [(g, n) for g in GENERATORS for n in range(3) if n >= 1 or g not in ("alpha", "beta", "E")]


@pytest.mark.parametrize("g, n", CASES)
def test_intertwining(bridge, g, n):
    res = check_intertwining(bridge, g, n)
    assert res["residual"] < TOL
    if g == "beta":
        assert res["averaging_vs_projection"] < TOL


def test_minus_commutants_reported_both_ways(bridge):
    for n in range(3):
        p11 = bridge.P(n, "-")
        q10 = bridge.Q(n, "-")
        assert q10.contains_algebra(p11)


def test_square_pimsner_popa_basis(bridge):
    tower = bridge.tower
    sq = tower.square
    basis = bridge.pp_basis()
    e1 = tower.jones[0]
    total = sum(s @ e1 @ dagger(s) for s in basis)
    assert np.allclose(total, np.eye(tower.ambient_dim), atol=1e-9)
    index = sum(sq["A00"].trace(sq["A00"].project(dagger(s) @ s)) for s in basis)
    assert abs(index - 2.0) < 1e-9
    rng = np.random.default_rng(3)
    for name, small in (("A10", "A00"), ("A11", "A01")):
        x = sq[name].random_element(rng)
        recon = sum(s @ sq[small].project(dagger(s) @ x) for s in basis)
        assert np.allclose(recon, x, atol=1e-9)


def test_depth_guard(bridge):
    with pytest.raises(DepthUnavailable):
        bridge.psi(4, "+", np.eye(bridge.tower.ambient_dim))


def test_embed_report_fourier2(fourier2):
    rep = embed_report(fourier2, 2)
    assert rep["passed"] and rep["verdict"] == "embedding verified to depth 2"
    assert {"index", "d", "levels", "generators", "verdict"} <= set(rep)
    for g in ("iota+", "iota-", "alpha", "beta", "E"):
        assert rep["generators"][g] and all(r["pass"] for r in rep["generators"][g])


def test_embed_report_fourier4_depth1(fourier4):
    rep = embed_report(fourier4, 1)
    assert rep["passed"], rep["verdict"]
    assert rep["index"] == pytest.approx(4.0)


def test_embed_report_partial_depth(fourier2):
    rep = embed_report(fourier2, 3, cap=8)
    assert not rep["passed"]
    assert rep["verdict"].startswith("partial") and rep["depth_reached"] < 3


def test_embed_report_gates_on_commuting_square():
    diag = [np.diag(np.eye(2)[i]).astype(complex) for i in range(2)]
    units = [np.outer(np.eye(2)[i], np.eye(2)[j]).astype(complex) for i in range(2) for j in range(2)]
    sq = square_from_generators({"A00": [], "A10": diag, "A01": diag, "A11": units})
    rep = embed_report(sq, 2)
    assert rep["verdict"] == "precondition failed: not a commuting square"
