from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfactor_gpa.errors import AmbientMismatch, BasisTooLarge, NotInCommutant
from subfactor_gpa.graph_core import haagerup_gamma
from subfactor_gpa.loop_tower import LoopModel, dim_oracle, tl_residuals

from conftest import GRAPHS

NAMES = list(GRAPHS) + ["multiplicity"]
TOL = 1e-9


def numpy_trace_power(g, n, parity):
    lam = g.inclusion_matrix().astype(float)
    gram = lam @ lam.T if parity == "+" else lam.T @ lam
    return int(round(np.trace(np.linalg.matrix_power(gram, n))))


def b_dimension_oracle(g, n):
    """sum over endpoints of (number of star paths of length n+1 ending there)^2."""
    lam = g.inclusion_matrix().astype(float)
    counts = np.array(g.m_plus, dtype=float)
    for step in range(n):
        counts = lam.T @ counts if step % 2 == 0 else lam @ counts
    return int(round(float(np.sum(counts**2))))


def commutant_dim_oracle(model, n, parity):
    """Nullspace dimension of x -> [x, b] over b in B_0 (or B_1), by dense SVD."""
    keys = model.bn_basis(n)
    basis = model.basis_elements("B", n)
    small = model.basis_elements("B", 0 if parity == "+" else 1)
    rows = []
    for b in small:
        b = model.promote(b, n)
        cols = [model.to_vector(x * b - b * x, keys) for x in basis]
        rows.append(np.stack(cols, axis=1))
    mat = np.vstack(rows)
    sv = np.linalg.svd(mat, compute_uv=False)
    return len(keys) - int(np.sum(sv > 1e-9 * sv.max()))


# -- dimensions ----------------------------------------------------------------

def test_haagerup_dimensions():
    m = LoopModel(haagerup_gamma())
    assert [len(m.bn_basis(n)) for n in range(5)] == [6, 20, 80, 336, 1432]
    assert [len(m.loop_basis(n, "+")) for n in range(5)] == [6, 10, 30, 106, 406]


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("parity", ["+", "-"])
def test_loop_dimension_matches_adjacency_powers(models, name, parity):
    m = models[name]
    for n in range(5):
        enum = len(m.loop_basis(n, parity))
        assert enum == dim_oracle(m.graph, n, parity) == numpy_trace_power(m.graph, n, parity)


@pytest.mark.parametrize("name", NAMES)
def test_bn_dimension(models, name):
    m = models[name]
    for n in range(4):
        assert len(m.bn_basis(n)) == b_dimension_oracle(m.graph, n)


def test_basis_cap():
    m = LoopModel(haagerup_gamma(), basis_cap=100)
    with pytest.raises(BasisTooLarge):
        m.bn_basis(3)


# -- algebra structure -----------------------------------------------------------

@pytest.mark.parametrize("name", NAMES)
def test_associativity_and_star(models, name, rng):
    m = models[name]
    for n in range(4):
        x, y, z = (m.random_element("B", n, rng, density=0.5) for _ in range(3))
        assert ((x * y) * z).distance(x * (y * z)) < TOL
        assert (x * y).star().distance(y.star() * x.star()) < TOL
        assert (m.unit("B", n) * x).distance(x) < TOL


@pytest.mark.parametrize("name", NAMES)
def test_trace_is_tracial_and_normalized(models, name, rng):
    m = models[name]
    for n in range(4):
        assert m.trace(m.unit("B", n)) == pytest.approx(1.0, abs=1e-12)
        x, y = m.random_element("B", n, rng), m.random_element("B", n, rng)
        assert abs(m.trace(x * y) - m.trace(y * x)) < TOL
        assert m.trace(x * x.star()).real > 0


@pytest.mark.parametrize("name", NAMES)
def test_inclusion_is_unital_homomorphism(models, name, rng):
    m = models[name]
    for n in range(3):
        x, y = m.random_element("B", n, rng), m.random_element("B", n, rng)
        assert m.include_step(x * y).distance(m.include_step(x) * m.include_step(y)) < TOL
        assert m.include_step(m.unit("B", n)).distance(m.unit("B", n + 1)) < TOL
        assert abs(m.trace(m.include_step(x)) - m.trace(x)) < TOL


@pytest.mark.parametrize("name", NAMES)
def test_conditional_expectation_properties(models, name, rng):
    m = models[name]
    for n in range(1, 4):
        x = m.random_element("B", n, rng)
        a, b = m.random_element("B", n - 1, rng), m.random_element("B", n - 1, rng)
        ex = m.cond_exp_down(x)
        assert abs(m.trace(ex) - m.trace(x)) < TOL
        assert m.cond_exp_down(a * x * b).distance(a * ex * b) < TOL
        assert m.cond_exp_down(m.include_step(a)).distance(a) < TOL
        # orthogonality: tr((x - E x) a) = 0
        assert abs(m.trace((x - m.include_step(ex)) * m.include_step(a))) < TOL


def test_lambda_n_is_minimal_projection_trace(models):
    m = models["haagerup"]
    for n in range(4):
        for key in m.bn_basis(n)[:20]:
            l, r = key
            if l == r:
                p = m.element("B", n, {key: 1})
                assert m.trace(p) == pytest.approx(m.lambda_n(n, m.endpoint("B", l)))


# -- Jones projections -------------------------------------------------------------

@pytest.mark.parametrize("name", NAMES)
def test_temperley_lieb_relations(models, name):
    res = tl_residuals(models[name], 4)
    assert max(res.values()) < TOL


@pytest.mark.parametrize("name", NAMES)
def test_standardness(models, name):
    m = models[name]
    d = m.d
    for n in range(1, 4):
        e = m.jones_e(n)
        for x in m.basis_elements("B", n):
            assert (e * x * e).distance(m.cond_exp_down(x) * e) < TOL
            assert abs(m.trace(e * x) - d**-2 * m.trace(x)) < TOL


@pytest.mark.parametrize("name", NAMES)
def test_pimsner_popa_identities(models, name):
    m = models[name]
    basis = m.pp_basis()
    e1 = m.jones_e(1)
    total = m.zero("B", 2)
    for s in basis:
        total = total + s * e1 * s.star()
    assert total.distance(m.unit("B", 2)) < TOL
    for x in m.basis_elements("B", 1):
        recon = m.zero("B", 1)
        for s in basis:
            recon = recon + s * m.cond_exp_down(s.star() * x)
        assert recon.distance(x) < TOL
    index = sum(m.trace(m.cond_exp_down(s.star() * s)) for s in basis)
    assert abs(index - m.spectral.d_squared) < TOL


# -- commutants and phi ---------------------------------------------------------------

@pytest.mark.parametrize("name", NAMES)
def test_commutant_dimensions_match_nullspace(models, name):
    m = models[name]
    for n in range(3):
        assert commutant_dim_oracle(m, n, "+") == len(m.loop_basis(n, "+"))
    for n in range(1, 3):
        assert commutant_dim_oracle(m, n, "-") == len(m.loop_basis(n - 1, "-"))


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("parity", ["+", "-"])
def test_phi_is_star_isomorphism(models, name, parity, rng):
    m = models[name]
    kind = "G" + parity
    basis, phi, phi_inv = m.commutant_iso(2, parity)
    for b in basis:
        assert m.commutant_residual(b, parity) < TOL
    for _ in range(5):
        x, y = m.random_element(kind, 2, rng), m.random_element(kind, 2, rng)
        bx, by = phi_inv(x), phi_inv(y)
        assert phi(bx).distance(x) < TOL
        assert phi(bx * by).distance(x * y) < TOL
        assert phi(bx.star()).distance(x.star()) < TOL


@pytest.mark.parametrize("name", NAMES)
def test_commutant_expectation_closed_form_matches_averaging(models, name, rng):
    m = models[name]
    for n in range(1, 4):
        for _ in range(100):
            x = m.phi_plus_inv(m.random_element("G+", n, rng, density=0.7))
            closed = m.cond_exp_onto_B1_commutant(x)
            assert closed.distance(m.pp_average(x)) < TOL
            assert m.commutant_residual(closed, "-") < TOL


def test_commutant_expectation_rejects_non_commutant(models):
    # B_0 is M_2 + C here, so a loop rooted at a single star edge does not commute with it
    m = models["multiplicity"]
    x = next(b for b in m.basis_elements("B", 1) if m.commutant_residual(b, "+") > 0.1)
    with pytest.raises(NotInCommutant):
        m.cond_exp_onto_B1_commutant(x)


def test_exact_commutation_check(models):
    m = models["haagerup"]
    x = m.phi_plus_inv(m.basis_elements("G+", 2)[3])
    assert m.commutes_with_B0_exactly(x)


# -- plumbing ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["B", "G+", "G-"])
def test_serialize_roundtrip(models, kind, rng):
    m = models["multiplicity"]
    x = m.random_element(kind, 2, rng, density=0.5)
    assert m.deserialize(m.serialize(x)).distance(x) == 0


def test_deserialize_rejects_foreign_loops(models):
    m = models["a3"]
    with pytest.raises(AmbientMismatch):
        m.deserialize({"kind": "G+", "level": 1, "terms": [{"base": "v", "left": [0], "right": [1]}]})


def test_mixed_kinds_rejected(models):
    m = models["a3"]
    with pytest.raises(AmbientMismatch):
        m.unit("B", 1) * m.unit("G+", 1)
    with pytest.raises(AmbientMismatch):
        m.unit("G+", 1) * m.unit("G+", 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_b_level_promotion_in_products(seed, n):
    m = LoopModel(GRAPHS["a3"])
    rng = np.random.default_rng(seed)
    x = m.random_element("B", n, rng)
    y = m.random_element("B", n + 1, rng)
    assert (x * y).distance(m.include_step(x) * y) < TOL
