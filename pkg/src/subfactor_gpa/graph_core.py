"""Bipartite multigraphs, Perron-Frobenius data and the star augmentation.

Vertices are addressed internally by a single integer index: even vertices
occupy ``0..k-1`` in insertion order and odd vertices ``k..k+l-1``.  Edges
always run from an even vertex to an odd vertex and keep their input order
as their id.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping

import mpmath
import numpy as np

from .errors import (
    ConvergenceFailure,
    Disconnected,
    EmptyGraph,
    InputError,
    NonPositiveDimension,
    NotBipartite,
)


@dataclass(frozen=True)
class BipartiteGraph:
    even: tuple[str, ...]
    odd: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    m_plus: tuple[int, ...]

    # derived integer views, filled in __post_init__
    src: tuple[int, ...] = field(init=False, repr=False, compare=False)
    tgt: tuple[int, ...] = field(init=False, repr=False, compare=False)
    incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = self.vertex_index
        src = tuple(index[a] for a, _ in self.edges)
        tgt = tuple(index[b] for _, b in self.edges)
        incident: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for e, (a, b) in enumerate(zip(src, tgt)):
            incident[a].append(e)
            incident[b].append(e)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "incident", tuple(tuple(x) for x in incident))

    @property
    def num_even(self) -> int:
        return len(self.even)

    @property
    def num_vertices(self) -> int:
        return len(self.even) + len(self.odd)

    @property
    def vertex_names(self) -> tuple[str, ...]:
        return self.even + self.odd

    @property
    def vertex_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.vertex_names)}

    def is_even(self, v: int) -> bool:
        return v < len(self.even)

    def other_end(self, e: int, v: int) -> int:
        """Endpoint of edge ``e`` opposite to vertex ``v``."""
        return self.tgt[e] if self.src[e] == v else self.src[e]

    def inclusion_matrix(self) -> np.ndarray:
        lam = np.zeros((len(self.even), len(self.odd)), dtype=np.int64)
        k = len(self.even)
        for a, b in zip(self.src, self.tgt):
            lam[a, b - k] += 1
        return lam

    def m_minus(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.inclusion_matrix().T @ np.array(self.m_plus, dtype=np.int64))

    def to_dict(self) -> dict[str, Any]:
        return {
            "even": list(self.even),
            "odd": list(self.odd),
            "edges": [list(e) for e in self.edges],
            "m_plus": {v: m for v, m in zip(self.even, self.m_plus)},
        }


def validate_and_canonicalize(spec: Mapping[str, Any]) -> BipartiteGraph:
    """Build a validated graph from ``{"even", "odd", "edges", "m_plus"}``.

    Input order of vertices and edges is preserved; edge ids are the
    positions in ``edges``.  ``m_plus`` defaults to 1 on every even vertex.
    """
    try:
        even = tuple(str(v) for v in spec["even"])
        odd = tuple(str(v) for v in spec["odd"])
        raw_edges = spec["edges"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"graph description needs 'even', 'odd' and 'edges': {exc}") from None

    if not even or not odd or not raw_edges:
        raise EmptyGraph("graph must have at least one even vertex, one odd vertex and one edge")
    names = even + odd
    if len(set(names)) != len(names):
        raise InputError("vertex names must be unique across both sides")

    even_set, odd_set = set(even), set(odd)
    edges: list[tuple[str, str]] = []
    for raw in raw_edges:
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            raise InputError(f"edge {raw!r} must be a pair of vertex names")
        a, b = str(raw[0]), str(raw[1])
        for x in (a, b):
            if x not in even_set and x not in odd_set:
                raise InputError(f"edge {raw!r} mentions unknown vertex {x!r}")
        if a in even_set and b in odd_set:
            edges.append((a, b))
        elif a in odd_set and b in even_set:
            edges.append((b, a))
        else:
            raise NotBipartite(f"edge {raw!r} joins two vertices on the same side")

    m_raw = spec.get("m_plus") or {}
    unknown = set(m_raw) - even_set
    if unknown:
        raise InputError(f"m_plus given for non-even vertices {sorted(unknown)}")
    m_plus = []
    for v in even:
        m = m_raw.get(v, 1)
        if not isinstance(m, int) or isinstance(m, bool) or m <= 0:
            raise NonPositiveDimension(f"m_plus({v}) = {m!r} must be a positive integer")
        m_plus.append(m)

    graph = BipartiteGraph(even, odd, tuple(edges), tuple(m_plus))
    _check_connected(graph)
    return graph


def _check_connected(g: BipartiteGraph) -> None:
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for e in g.incident[v]:
            w = g.other_end(e, v)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != g.num_vertices:
        missing = [g.vertex_names[v] for v in range(g.num_vertices) if v not in seen]
        raise Disconnected(f"graph is not connected; unreachable vertices {missing}")


def load_graph(path: str) -> BipartiteGraph:
    with open(path) as fh:
        return validate_and_canonicalize(json.load(fh))


@dataclass(frozen=True)
class SpectralData:
    graph: BipartiteGraph
    inclusion_matrix: np.ndarray
    d: float
    lambda0: np.ndarray
    lambda1: np.ndarray
    nu0: np.ndarray
    nu1: np.ndarray
    # high-precision values, present only when requested
    d_squared_mp: Any = None
    lambda0_mp: Any = None
    lambda1_mp: Any = None
    dps: int | None = None

    @property
    def d_squared(self) -> float:
        return self.d * self.d

    def weight(self, v: int) -> float:
        """Planar-algebra vertex weight: lambda0 on even vertices, d*lambda1 on odd."""
        k = self.graph.num_even
        return float(self.lambda0[v]) if v < k else self.d * float(self.lambda1[v - k])

    def markov(self, v: int) -> float:
        """lambda0(v) for even v, lambda1(v) for odd v."""
        k = self.graph.num_even
        return float(self.lambda0[v]) if v < k else float(self.lambda1[v - k])

    def lambda_n(self, n: int) -> np.ndarray:
        """Trace vector of the n-th algebra of the tower."""
        if n % 2 == 0:
            return self.d ** (-n) * self.lambda0
        return self.d ** (-n + 1) * self.lambda1

    def report(self) -> dict[str, Any]:
        g = self.graph
        out = {
            "d": self.d,
            "d_squared": self.d_squared,
            "lambda0": {v: float(x) for v, x in zip(g.even, self.lambda0)},
            "lambda1": {v: float(x) for v, x in zip(g.odd, self.lambda1)},
            "inclusion_matrix": self.inclusion_matrix.tolist(),
        }
        if self.d_squared_mp is not None:
            out["d_squared_hp"] = mpmath.nstr(self.d_squared_mp, self.dps)
        return out


def _power_iteration(mat: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray]:
    x = np.ones(mat.shape[0])
    x /= np.linalg.norm(x)
    mu = 0.0
    for _ in range(max_iter):
        y = mat @ x
        mu = float(x @ y)
        if np.linalg.norm(y - mu * x) <= tol * max(mu, 1.0):
            return mu, x
        x = y / np.linalg.norm(y)
    raise ConvergenceFailure(f"power iteration did not reach {tol:g} in {max_iter} steps")


def _power_iteration_mp(mat: np.ndarray, dps: int, max_iter: int):
    with mpmath.workdps(dps + 10):
        m = mpmath.matrix(mat.tolist())
        n = m.rows
        x = mpmath.matrix([1] * n)
        x /= mpmath.norm(x)
        tol = mpmath.mpf(10) ** (-(dps + 2))
        for _ in range(max_iter):
            y = m * x
            mu = (x.T * y)[0]
            if mpmath.norm(y - mu * x) <= tol * mu:
                return +mu, x
            x = y / mpmath.norm(y)
    raise ConvergenceFailure(f"high-precision power iteration did not converge at {dps} digits")


def spectral_data(
    g: BipartiteGraph, tol: float = 1e-14, dps: int | None = None, max_iter: int = 200_000
) -> SpectralData:
    """Perron-Frobenius data of ``g``.

    ``lambda0`` is the PF eigenvector of Lambda Lambda^t normalised by
    ``sum(m_plus * lambda0) == 1`` and ``lambda1 = d**-2 Lambda^t lambda0``,
    which makes ``Lambda lambda1 == lambda0`` and the odd normalisation hold
    automatically.  With ``dps`` set, the eigenpair is also computed with
    mpmath at that many significant digits and the float fields are rounded
    from it.
    """
    lam = g.inclusion_matrix()
    gram = (lam @ lam.T).astype(float)
    nu0 = np.array(g.m_plus, dtype=np.int64)
    nu1 = lam.T @ nu0

    hp = {}
    if dps is None:
        d2, vec = _power_iteration(gram, tol, max_iter)
        vec = np.abs(vec)
    else:
        d2_mp, vec_mp = _power_iteration_mp(lam @ lam.T, dps, max_iter)
        with mpmath.workdps(dps + 10):
            vec_mp = [abs(x) for x in vec_mp]
            scale = mpmath.fsum(int(m) * x for m, x in zip(nu0, vec_mp))
            l0 = [x / scale for x in vec_mp]
            l1 = [
                mpmath.fsum(int(lam[i, j]) * l0[i] for i in range(lam.shape[0])) / d2_mp
                for j in range(lam.shape[1])
            ]
        hp = {"d_squared_mp": d2_mp, "lambda0_mp": l0, "lambda1_mp": l1, "dps": dps}
        d2 = float(d2_mp)
        vec = np.array([float(x) for x in vec_mp])

    lambda0 = vec / float(nu0 @ vec)
    lambda1 = (lam.T @ lambda0) / d2
    if np.any(lambda0 <= 0) or np.any(lambda1 <= 0):
        raise ConvergenceFailure("Perron-Frobenius vector has non-positive entries")
    return SpectralData(
        graph=g,
        inclusion_matrix=lam,
        d=float(np.sqrt(d2)),
        lambda0=lambda0,
        lambda1=lambda1,
        nu0=nu0,
        nu1=nu1,
        **hp,
    )


@dataclass(frozen=True)
class AugmentedGraph:
    """``base`` plus a star vertex joined to each even v by ``m_plus(v)`` edges.

    Star edge ids continue after the base edge ids, so the two id ranges
    never collide.  ``star_edges[i] = (edge_id, even_vertex)``.
    """

    base: BipartiteGraph
    star_edges: tuple[tuple[int, int], ...]

    @property
    def star_target(self) -> dict[int, int]:
        return dict(self.star_edges)

    def star_edges_at(self, v: int) -> tuple[int, ...]:
        return tuple(eid for eid, w in self.star_edges if w == v)


def augment(g: BipartiteGraph) -> AugmentedGraph:
    first = len(g.edges)
    star = []
    for v, m in enumerate(g.m_plus):
        for _ in range(m):
            star.append((first + len(star), v))
    return AugmentedGraph(g, tuple(star))


def inclusion_norm_squared(lam: np.ndarray) -> float:
    """Largest eigenvalue of Lambda Lambda^t by a dense symmetric solver."""
    lam = np.asarray(lam, dtype=float)
    if lam.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(lam @ lam.T)[-1])


# -- reference graphs ---------------------------------------------------------

def single_edge() -> BipartiteGraph:
    return validate_and_canonicalize({"even": ["v"], "odd": ["w"], "edges": [["v", "w"]]})


def a3() -> BipartiteGraph:
    """Path w1 - v - w2 with the even vertex in the middle (Lambda = [1 1])."""
    return validate_and_canonicalize(
        {"even": ["v"], "odd": ["w1", "w2"], "edges": [["v", "w1"], ["v", "w2"]]}
    )


def star(n: int) -> BipartiteGraph:
    """Bratteli diagram of C inside the diagonal n x n matrices."""
    odd = [f"w{i + 1}" for i in range(n)]
    return validate_and_canonicalize({"even": ["c"], "odd": odd, "edges": [["c", w] for w in odd]})


def haagerup_gamma() -> BipartiteGraph:
    """The 11-vertex tree with arms of length 4, 4 and 2 at a trivalent vertex P.

    Bipartition is by distance parity from the end of the first arm.
    """
    path = ["A2", "A3", "A4", "A5", "P", "C1", "C2", "C3", "C4"]
    edges = list(zip(path, path[1:])) + [("P", "B1"), ("B1", "B2")]
    return validate_and_canonicalize(
        {
            "even": ["A2", "A4", "P", "C2", "C4", "B2"],
            "odd": ["A3", "A5", "C1", "C3", "B1"],
            "edges": [list(e) for e in edges],
        }
    )


def reference_graphs() -> dict[str, BipartiteGraph]:
    return {"single_edge": single_edge(), "a3": a3(), "star2": star(2), "haagerup": haagerup_gamma()}
