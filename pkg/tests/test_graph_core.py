from __future__ import annotations

import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subfactor_gpa.errors import (
    Disconnected,
    EmptyGraph,
    InputError,
    NonPositiveDimension,
    NotBipartite,
)
from subfactor_gpa.graph_core import (
    a3,
    augment,
    haagerup_gamma,
    load_graph,
    single_edge,
    spectral_data,
    star,
    validate_and_canonicalize,
)

from conftest import multiplicity_graph

HAAGERUP_D2 = (5 + math.sqrt(13)) / 2


def test_single_edge_spectral_data():
    s = spectral_data(single_edge())
    assert s.inclusion_matrix.tolist() == [[1]]
    assert s.d == pytest.approx(1.0)
    assert s.lambda0.tolist() == pytest.approx([1.0])
    assert s.lambda1.tolist() == pytest.approx([1.0])


def test_a3_spectral_data():
    s = spectral_data(a3())
    assert s.inclusion_matrix.tolist() == [[1, 1]]
    assert s.d == pytest.approx(math.sqrt(2), rel=1e-12)
    assert s.lambda0.tolist() == pytest.approx([1.0])
    assert s.lambda1.tolist() == pytest.approx([0.5, 0.5])


def test_haagerup_index():
    g = haagerup_gamma()
    assert g.num_vertices == 11 and len(g.edges) == 10
    s = spectral_data(g)
    assert abs(s.d_squared - HAAGERUP_D2) / HAAGERUP_D2 < 1e-9


def test_haagerup_high_precision():
    s = spectral_data(haagerup_gamma(), dps=40)
    with mpmath.workdps(50):
        exact = (5 + mpmath.sqrt(13)) / 2
        assert abs(s.d_squared_mp - exact) < mpmath.mpf(10) ** -38
        assert s.report()["d_squared_hp"] == mpmath.nstr(exact, 40)


def test_haagerup_degrees():
    g = haagerup_gamma()
    degrees = sorted(len(g.incident[v]) for v in range(g.num_vertices))
    # a tree: three leaves, one trivalent vertex, the rest of degree two
    assert degrees == [1, 1, 1] + [2] * 7 + [3]


def test_augment_star_edges():
    assert len(augment(single_edge()).star_edges) == 1
    ag = augment(a3())
    assert [v for _, v in ag.star_edges] == [0]
    mg = augment(multiplicity_graph())
    assert len(mg.star_edges_at(0)) == 2 and len(mg.star_edges_at(1)) == 1
    base_ids = set(range(len(mg.base.edges)))
    assert not base_ids & {e for e, _ in mg.star_edges}


def test_validation_errors():
    with pytest.raises(NotBipartite):
        validate_and_canonicalize({"even": ["a", "b"], "odd": ["x"], "edges": [["a", "b"]]})
    with pytest.raises(Disconnected):
        validate_and_canonicalize(
            {"even": ["a", "b"], "odd": ["x", "y"], "edges": [["a", "x"], ["b", "y"]]}
        )
    with pytest.raises(EmptyGraph):
        validate_and_canonicalize({"even": ["a"], "odd": ["x"], "edges": []})
    with pytest.raises(NonPositiveDimension):
        validate_and_canonicalize({"even": ["a"], "odd": ["x"], "edges": [["a", "x"]], "m_plus": {"a": 0}})
    with pytest.raises(InputError):
        validate_and_canonicalize({"even": ["a"], "odd": ["x"], "edges": [["a", "z"]]})
    with pytest.raises(InputError):
        validate_and_canonicalize({"even": ["a"]})


def test_edge_order_preserved_and_reversed_pairs_accepted():
    g = validate_and_canonicalize({"even": ["v"], "odd": ["w2", "w1"], "edges": [["w1", "v"], ["v", "w2"]]})
    assert g.edges == (("v", "w1"), ("v", "w2"))
    assert g.odd == ("w2", "w1")


def test_load_graph_roundtrip(tmp_path):
    g = haagerup_gamma()
    p = tmp_path / "g.json"
    p.write_text(json.dumps(g.to_dict()))
    assert load_graph(str(p)) == g


def test_report_keys():
    rep = spectral_data(a3()).report()
    assert {"d", "d_squared", "lambda0", "lambda1", "inclusion_matrix"} <= set(rep)


@st.composite
def bipartite_graphs(draw):
    k = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    mat = draw(st.lists(st.lists(st.integers(0, 2), min_size=m, max_size=m), min_size=k, max_size=k))
    # force connectivity with a spanning zigzag
    for i in range(k):
        mat[i][min(i, m - 1)] = max(mat[i][min(i, m - 1)], 1)
    for j in range(m):
        mat[min(j, k - 1)][j] = max(mat[min(j, k - 1)][j], 1)
    for i in range(k - 1):
        mat[i + 1][min(i, m - 1)] = max(mat[i + 1][min(i, m - 1)], 1)
    mplus = draw(st.lists(st.integers(1, 3), min_size=k, max_size=k))
    even = [f"e{i}" for i in range(k)]
    odd = [f"o{j}" for j in range(m)]
    edges = [[even[i], odd[j]] for i in range(k) for j in range(m) for _ in range(mat[i][j])]
    return validate_and_canonicalize({"even": even, "odd": odd, "edges": edges,
                                      "m_plus": dict(zip(even, mplus))})


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs())
def test_pf_matches_dense_eigensolver(g):
    s = spectral_data(g)
    lam = g.inclusion_matrix().astype(float)
    oracle = float(np.linalg.eigvalsh(lam @ lam.T)[-1])
    assert abs(s.d_squared - oracle) <= 1e-9 * oracle


@settings(max_examples=60, deadline=None)
@given(bipartite_graphs())
def test_pf_vector_identities(g):
    s = spectral_data(g)
    lam = g.inclusion_matrix().astype(float)
    assert np.allclose(lam @ s.lambda1, s.lambda0, atol=1e-12)
    assert np.allclose(lam @ lam.T @ s.lambda0, s.d_squared * s.lambda0, atol=1e-10)
    assert float(np.dot(g.m_plus, s.lambda0)) == pytest.approx(1.0, abs=1e-12)
    assert float(np.dot(g.m_minus(), s.lambda1)) == pytest.approx(1.0, abs=1e-12)
    assert np.all(s.lambda0 > 0) and np.all(s.lambda1 > 0)


@settings(max_examples=30, deadline=None)
@given(bipartite_graphs())
def test_canonicalization_is_deterministic(g):
    again = validate_and_canonicalize(g.to_dict())
    assert again == g
    assert json.dumps(again.to_dict()) == json.dumps(g.to_dict())


def test_star_graph_is_a3():
    assert star(2).inclusion_matrix().tolist() == a3().inclusion_matrix().tolist()
