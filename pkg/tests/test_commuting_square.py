from __future__ import annotations

import json

import numpy as np
import pytest

from subfactor_gpa.commuting_square import (
    catalan,
    horizontal_stability,
    load_square,
    markov_residual,
    relative_commutant_profile,
    spin_model,
    square_from_generators,
    tl_dimension_loop,
    tl_profile,
    verify,
    vertical_tower,
)
from subfactor_gpa.errors import InputError, NotHadamard, NotUnitary
from subfactor_gpa.graph_core import haagerup_gamma, star
from subfactor_gpa.loop_tower import LoopModel
from subfactor_gpa.matrix_algebra import algebra_from_generators, dagger

from conftest import fourier


def nullspace_commutant_dim(gens, algebra):
    """Commutant of gens inside a given algebra, by an SVD of the commutator map on its basis."""
    basis = algebra.basis
    cols = []
    for b in basis:
        cols.append(np.concatenate([(b @ g - g @ b).ravel() for g in gens]))
    mat = np.stack(cols, axis=1)
    sv = np.linalg.svd(mat, compute_uv=False)
    return len(basis) - int(np.sum(sv > 1e-8 * max(sv.max(), 1.0)))


def test_catalan_numbers():
    assert [catalan(j) for j in range(1, 9)] == [1, 2, 5, 14, 42, 132, 429, 1430]


def test_fourier2_is_a_nondegenerate_commuting_square(fourier2):
    rep = verify(fourier2)
    assert rep.passed
    assert rep.commuting_residual < 1e-12
    assert rep.index == pytest.approx(2.0, abs=1e-12)
    assert rep.graphs == {"G": [[1, 1]], "H": [[1], [1]], "K": [[1, 1]], "L": [[1], [1]]}
    G, H, K, L = (np.array(rep.graphs[k]) for k in "GHKL")
    assert np.array_equal(G @ H, K @ L) and np.array_equal(H @ L.T, G.T @ K)


def test_fourier4_verifies_with_index_4(fourier4):
    rep = verify(fourier4)
    assert rep.passed and rep.index == pytest.approx(4.0, abs=1e-12)


def test_spin_model_rescales_and_rejects():
    u = fourier(3)
    assert np.allclose(spin_model(u).hadamard, u / np.sqrt(3))
    with pytest.raises(NotHadamard):
        spin_model(np.array([[1, 2], [1, -1]]))
    with pytest.raises(NotUnitary):
        spin_model(np.array([[1, 1], [1, 1]]))
    with pytest.raises(NotHadamard):
        spin_model(np.ones((2, 3)))


def test_non_commuting_square_fails_verification():
    # A10 = A01 = diagonal: E_{A10} E_{A01} = E_{A10}, which is not E_{A00}
    n = 2
    diag = [np.diag(np.eye(n)[i]).astype(complex) for i in range(n)]
    units = [np.outer(np.eye(n)[i], np.eye(n)[j]).astype(complex) for i in range(n) for j in range(n)]
    sq = square_from_generators({"A00": [], "A10": diag, "A01": diag, "A11": units})
    rep = verify(sq)
    assert not rep.passed and rep.commuting_residual > 0.1


def test_markov_residual_oracle():
    lam = np.array([[1, 1]])
    t_big = np.array([0.5, 0.5])
    t_small = np.array([1.0])
    assert markov_residual(lam, t_big, t_small) < 1e-12
    assert markov_residual(lam, np.array([0.3, 0.7]), t_small) > 0.1


def test_vertical_tower_dimensions(fourier2):
    tower = vertical_tower(fourier2, 3)
    assert tower.depth_reached == 3
    # A_{k,0}: C, C^2, M_2, M_2 + M_2 (the tower for a 2-vertex star)
    assert [a.dim for a in tower.col0] == [1, 2, 4, 8]
    assert max(tower.markov_residuals) < 1e-9
    for j, e in enumerate(tower.jones, start=1):
        assert np.allclose(e @ e, e, atol=1e-9) and np.allclose(e, dagger(e), atol=1e-9)
        assert tower.col0[j + 1].contains(e)
    e1, e2 = tower.jones[0], tower.jones[1]
    rho = tower.col0[0].rho
    assert np.allclose(e1 @ e2 @ e1, 0.5 * e1, atol=1e-9)
    assert abs(np.trace(rho @ e1) - 0.5) < 1e-9


def test_tower_stops_at_cap(fourier2):
    tower = vertical_tower(fourier2, 4, cap=8)
    assert tower.depth_reached < 4
    rep = tower.to_json()
    assert rep["depth_reached"] == tower.depth_reached and rep["depth_requested"] == 4


def test_fourier2_profile_against_nullspace(fourier2):
    prof = relative_commutant_profile(fourier2, 3)
    assert [lv.dim_P for lv in prof.levels] == [1, 2, 4]
    assert [lv.dim_TL for lv in prof.levels] == [1, 2, 4]
    tower = vertical_tower(fourier2, 3)
    for j in (1, 2, 3):
        oracle = nullspace_commutant_dim(tower.square["A01"].gens(), tower.col0[j])
        assert prof.levels[j - 1].dim_P == oracle
    assert prof.levels[2].dim_TL < catalan(3)
    assert prof.to_json()["levels"][2]["tl_vs_catalan"] == "below"


def test_fourier4_first_commutant(fourier4):
    prof = relative_commutant_profile(fourier4, 1)
    assert prof.levels[0].dim_P == 1
    assert prof.index == pytest.approx(4.0)


def test_tl_dimensions_in_loop_models():
    hg = LoopModel(haagerup_gamma())
    assert [tl_dimension_loop(hg, j) for j in range(1, 5)] == [1, 2, 5, 14]
    small = LoopModel(star(2))
    assert [tl_dimension_loop(small, j) for j in range(1, 5)] == [1, 2, 4, 8]
    prof = tl_profile(haagerup_gamma(), 4)
    assert all(lv.verdict == "equal" for lv in prof.levels)


def test_horizontal_stability(fourier2):
    res = horizontal_stability(fourier2)
    assert res["equal"] and res["dim_before"] == res["dim_after"]


def test_load_square_formats(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"hadamard": [[1, 1], [1, -1]]}))
    assert verify(load_square(str(p))).passed
    c = tmp_path / "f4.csv"
    c.write_text("1,1,1,1\n1,i,-1,-i\n1,-1,1,-1\n1,-i,-1,i\n")
    assert verify(load_square(str(c))).index == pytest.approx(4.0)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nothing": 1}))
    with pytest.raises(InputError):
        load_square(str(bad))
    worse = tmp_path / "worse.csv"
    worse.write_text("1,x\n1,-1\n")
    with pytest.raises(InputError):
        load_square(str(worse))


def test_square_from_generators_with_trace_vector():
    n = 3
    units = [np.outer(np.eye(n)[i], np.eye(n)[j]).astype(complex) for i in range(2) for j in range(2)]
    e22 = np.diag([0, 0, 1]).astype(complex)
    sq = square_from_generators({"A11": units + [e22], "A10": [e22], "A01": [e22], "A00": []},
                                trace_vector=[1.0, 1.0])
    # blocks of sizes 2 and 1 with equal minimal-projection trace
    assert np.trace(sq.A11.rho @ e22).real == pytest.approx(1 / 3)
    with pytest.raises(InputError):
        square_from_generators({"A11": units + [e22]}, trace_vector=[1.0])


def test_generated_square_equals_spin_model():
    u = fourier(2) / np.sqrt(2)
    diag = [np.diag(np.eye(2)[i]).astype(complex) for i in range(2)]
    gens = {
        "A00": [],
        "A10": diag,
        "A01": [u @ p @ dagger(u) for p in diag],
        "A11": [np.outer(np.eye(2)[0], np.eye(2)[1]).astype(complex)] + diag,
    }
    sq = square_from_generators(gens)
    assert verify(sq).passed
    assert algebra_from_generators(gens["A11"]).dim == 4
