"""Commuting squares of multi-matrix algebras and their vertical towers.

Square layout and inclusion graphs::

    A10  --L-->  A11
     ^K           ^H
    A00  --G-->  A01
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import ClosureOverflow, Disconnected, InputError, NotHadamard, NotUnitary
from .graph_core import inclusion_norm_squared, validate_and_canonicalize
from .loop_tower import LoopModel
from .matrix_algebra import (
    RepresentedAlgebra,
    algebra_from_generators,
    basic_construction_gns,
    bratteli_matrix,
    dagger,
    decompose,
    normalized_trace_density,
    relative_commutant,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429]


def catalan(j: int) -> int:
    if j < len(CATALAN):
        return CATALAN[j]
    from math import comb

    return comb(2 * j, j) // (j + 1)


def _unit(i: int, j: int, n: int) -> np.ndarray:
    x = np.zeros((n, n), dtype=complex)
    x[i, j] = 1
    return x


@dataclass(frozen=True, eq=False)
class CommutingSquareSpec:
    A00: RepresentedAlgebra
    A10: RepresentedAlgebra
    A01: RepresentedAlgebra
    A11: RepresentedAlgebra
    name: str = ""
    hadamard: np.ndarray | None = None

    @property
    def ambient_dim(self) -> int:
        return self.A11.ambient_dim

    def graphs(self) -> dict[str, np.ndarray]:
        return {
            "G": bratteli_matrix(self.A00, self.A01),
            "H": bratteli_matrix(self.A01, self.A11),
            "K": bratteli_matrix(self.A00, self.A10),
            "L": bratteli_matrix(self.A10, self.A11),
        }

    def index(self) -> float:
        return inclusion_norm_squared(bratteli_matrix(self.A00, self.A10))


def spin_model(u: np.ndarray, tol: float = 1e-9) -> CommutingSquareSpec:
    """C in Delta_n over C in u Delta_n u^* inside M_n with the normalized trace.

    A matrix with unimodular entries and u u^* = n I is rescaled by 1/sqrt(n).
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
        raise NotHadamard("Hadamard input must be a non-empty square matrix")
    n = u.shape[0]
    mod = np.abs(u)
    if np.allclose(mod, 1.0, atol=tol):
        u = u / np.sqrt(n)
        mod = np.abs(u)
    if not np.allclose(mod, 1 / np.sqrt(n), atol=tol):
        raise NotHadamard("entries do not all have modulus 1/sqrt(n)")
    if not np.allclose(u @ dagger(u), np.eye(n), atol=tol):
        raise NotUnitary("matrix is not unitary")
    rho = normalized_trace_density(n)
    diag = [_unit(i, i, n) for i in range(n)]
    A00 = algebra_from_generators([], rho, name="A00")
    A10 = algebra_from_generators(diag, rho, name="A10")
    A01 = algebra_from_generators([u @ p @ dagger(u) for p in diag], rho, name="A01")
    A11 = algebra_from_generators([_unit(i, i + 1, n) for i in range(n - 1)] + diag, rho, name="A11")
    return CommutingSquareSpec(A00, A10, A01, A11, name=f"spin model n={n}", hadamard=u)


def square_from_generators(gens: dict[str, Sequence[np.ndarray]],
                           trace_vector: Sequence[float] | None = None,
                           name: str = "") -> CommutingSquareSpec:
    """Four algebras from explicit generators; the trace is given on the blocks of A11."""
    mats = {k: [np.asarray(g, dtype=complex) for g in v] for k, v in gens.items()}
    sizes = {g.shape for v in mats.values() for g in v}
    if len(sizes) != 1:
        raise InputError(f"generators have inconsistent shapes {sorted(sizes)}")
    n = next(iter(sizes))[0]
    rho = normalized_trace_density(n)
    A11 = algebra_from_generators(mats.get("A11", []), rho, name="A11")
    if trace_vector is not None:
        dec = decompose(A11)
        tv = np.asarray(trace_vector, dtype=float)
        if tv.shape != (len(dec.sizes),) or np.any(tv <= 0):
            raise InputError("trace vector must be positive with one entry per block of A11")
        tv = tv / float(np.dot(tv, dec.sizes))
        rho = sum(t / m * q for t, m, q in zip(tv, dec.multiplicities, dec.projections))
        A11 = A11.with_rho(rho)
    algs = {k: algebra_from_generators(mats.get(k, []), rho, name=k) for k in ("A00", "A10", "A01")}
    return CommutingSquareSpec(algs["A00"], algs["A10"], algs["A01"], A11, name=name)


# -- parsing ----------------------------------------------------------------

def parse_complex(text: str | float | int | list) -> complex:
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise InputError(f"cannot parse complex entry {text!r}") from exc


def load_square(path: str) -> CommutingSquareSpec:
    """JSON ({"hadamard": [[...]]} or {"generators": {...}, "trace_vector": [...]}) or CSV."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".csv"):
        rows = [r for r in text.strip().splitlines() if r.strip()]
        u = np.array([[parse_complex(c) for c in r.split(",")] for r in rows])
        return spin_model(u)
    obj = json.loads(text)
    if "hadamard" in obj:
        u = np.array([[parse_complex(c) for c in row] for row in obj["hadamard"]])
        return spin_model(u)
    if "generators" in obj:
        gens = {
            k: [np.array([[parse_complex(c) for c in row] for row in g]) for g in v]
            for k, v in obj["generators"].items()
        }
        return square_from_generators(gens, obj.get("trace_vector"), obj.get("name", ""))
    raise InputError("square file needs a 'hadamard' or 'generators' entry")


# -- verification -------------------------------------------------------------

@dataclass
class VerificationReport:
    inclusions: dict[str, bool]
    commuting_residual: float
    graphs: dict[str, list]
    nondegenerate: dict[str, bool]
    markov_residuals: dict[str, float]
    connected: dict[str, bool]
    index: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (
            all(self.inclusions.values())
            and self.commuting_residual < self.tol
            and all(self.nondegenerate.values())
            and all(r < self.tol for r in self.markov_residuals.values())
            and all(self.connected.values())
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "inclusions": self.inclusions,
            "commuting_residual": self.commuting_residual,
            "graphs": self.graphs,
            "nondegenerate": self.nondegenerate,
            "markov_residuals": self.markov_residuals,
            "connected": self.connected,
            "index": self.index,
            "passed": self.passed,
        }


def _connected(lam: np.ndarray) -> bool:
    even = [f"a{i}" for i in range(lam.shape[0])]
    odd = [f"b{j}" for j in range(lam.shape[1])]
    edges = [[even[i], odd[j]] for i in range(lam.shape[0]) for j in range(lam.shape[1]) if lam[i, j]]
    try:
        validate_and_canonicalize({"even": even, "odd": odd, "edges": edges})
    except (Disconnected, InputError):
        return False
    return True


def markov_residual(lam: np.ndarray, t_big: np.ndarray, t_small: np.ndarray) -> float:
    """Restriction plus Markov eigen-equation for an inclusion with matrix lam."""
    d2 = inclusion_norm_squared(lam)
    scale = max(float(np.linalg.norm(t_big)), 1e-300)
    eig = float(np.linalg.norm(lam.T @ lam @ t_big - d2 * t_big)) / scale
    restr = float(np.linalg.norm(lam @ t_big - t_small)) / max(float(np.linalg.norm(t_small)), 1e-300)
    return max(eig, restr)


def verify(spec: CommutingSquareSpec, tol: float = 1e-9) -> VerificationReport:
    s = spec
    inclusions = {
        "A00<A10": s.A10.contains_algebra(s.A00, tol),
        "A00<A01": s.A01.contains_algebra(s.A00, tol),
        "A10<A11": s.A11.contains_algebra(s.A10, tol),
        "A01<A11": s.A11.contains_algebra(s.A01, tol),
    }
    resid = 0.0
    for x in s.A11.basis:
        diff = s.A10.project(s.A01.project(x)) - s.A00.project(x)
        resid = max(resid, float(np.linalg.norm(diff)))
    decs = {k: decompose(getattr(s, k)) for k in ("A00", "A10", "A01", "A11")}
    graphs = {
        "G": bratteli_matrix(s.A00, s.A01, decs["A00"], decs["A01"]),
        "H": bratteli_matrix(s.A01, s.A11, decs["A01"], decs["A11"]),
        "K": bratteli_matrix(s.A00, s.A10, decs["A00"], decs["A10"]),
        "L": bratteli_matrix(s.A10, s.A11, decs["A10"], decs["A11"]),
    }
    G, H, K, L = (graphs[k] for k in "GHKL")
    nondeg = {
        "GH=KL": bool(np.array_equal(G @ H, K @ L)),
        "HLt=GtK": bool(np.array_equal(H @ L.T, G.T @ K)),
    }
    tv = {k: d.trace_vector for k, d in decs.items()}
    markov = {
        "G": markov_residual(G, tv["A01"], tv["A00"]),
        "H": markov_residual(H, tv["A11"], tv["A01"]),
        "K": markov_residual(K, tv["A10"], tv["A00"]),
        "L": markov_residual(L, tv["A11"], tv["A10"]),
    }
    connected = {k: _connected(v) for k, v in graphs.items()}
    return VerificationReport(
        inclusions, resid, {k: v.tolist() for k, v in graphs.items()}, nondeg, markov,
        connected, inclusion_norm_squared(K), tol,
    )


# -- vertical tower -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TowerSlice:
    depth: int
    A0: RepresentedAlgebra
    A1: RepresentedAlgebra
    jones: tuple[np.ndarray, ...]


@dataclass(eq=False)
class VerticalTower:
    """A_{k,0} and A_{k,1} for k <= depth_reached, all in the last GNS ambient.

    ``jones[j-1]`` is e_j, the projection onto L^2(A_{j-1,1}) inside
    L^2(A_{j,1}), lifted to the final ambient.
    """

    spec: CommutingSquareSpec
    col0: list[RepresentedAlgebra]
    col1: list[RepresentedAlgebra]
    jones: list[np.ndarray]
    depth_requested: int
    markov_residuals: list[float]
    # the square's algebras A00, A10, A01, A11 lifted to the final ambient
    square: dict[str, RepresentedAlgebra]

    @property
    def depth_reached(self) -> int:
        return len(self.col0) - 1

    @property
    def ambient_dim(self) -> int:
        return self.col0[0].ambient_dim

    def to_json(self) -> dict[str, Any]:
        return {
            "index": self.spec.index(),
            "depth_requested": self.depth_requested,
            "depth_reached": self.depth_reached,
            "ambient_dim": self.ambient_dim,
            "dim_A0": [a.dim for a in self.col0],
            "dim_A1": [a.dim for a in self.col1],
            "markov_residuals": self.markov_residuals,
        }

    def slices(self) -> list[TowerSlice]:
        return [
            TowerSlice(k, self.col0[k], self.col1[k], tuple(self.jones[: max(k - 1, 0)]))
            for k in range(len(self.col0))
        ]


def vertical_tower(spec: CommutingSquareSpec, depth: int, cap: int = 4096,
                   strict: bool = False) -> VerticalTower:
    """Iterate the basic construction for A_{k-1,1} in A_{k,1}.

    A_{k+1,0} is generated by A_{k,0} and the same Jones projection.  When
    the GNS space would exceed ``cap`` the tower stops; with ``strict`` a
    ClosureOverflow carrying the reached depth is raised instead.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    col0 = [spec.A00, spec.A10]
    col1 = [spec.A01, spec.A11]
    jones: list[np.ndarray] = []
    residuals: list[float] = []
    for k in range(1, depth):
        try:
            B2, gns, info = basic_construction_gns(col1[k], col1[k - 1], cap=cap)
        except ClosureOverflow as exc:
            if strict:
                raise ClosureOverflow(str(exc), depth_reached=k) from exc
            break
        rho, lift = B2.rho, gns.left
        col0 = [a.mapped(lift, rho) for a in col0]
        col1 = [a.mapped(lift, rho) for a in col1]
        jones = [lift(e) for e in jones] + [gns.e]
        col1.append(B2)
        col0.append(algebra_from_generators(list(col0[k].gens()) + [gns.e], rho, name=f"A{k + 1},0"))
        residuals.append(info["markov_residual"])
    square = {"A00": col0[0], "A10": col0[1], "A01": col1[0], "A11": col1[1]}
    return VerticalTower(spec, col0, col1, jones, depth, residuals, square)


# -- relative commutants and Temperley-Lieb profiles --------------------------

def _span_dim(elements: list[np.ndarray], tol: float = 1e-9) -> int:
    if not elements:
        return 0
    mat = np.stack([np.asarray(x).ravel() for x in elements])
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0


def tl_words(jones: Sequence[np.ndarray], identity: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    """Spanning set of the unital algebra generated by the given projections."""
    ortho = []
    words = [identity]
    frontier = [identity]
    basis = [identity.ravel() / np.linalg.norm(identity)]

    def novel(x):
        v = x.ravel().astype(complex)
        n0 = np.linalg.norm(v)
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > tol * max(n0, 1e-3):
            basis.append(v / nv)
            return True
        return False

    while frontier:
        nxt = []
        for w in frontier:
            for e in jones:
                y = w @ e
                if novel(y):
                    words.append(y)
                    nxt.append(y)
        frontier = nxt
    del ortho
    return words


def tl_dimension_matrix(jones: Sequence[np.ndarray], identity: np.ndarray) -> int:
    return len(tl_words(jones, identity))


def tl_dimension_loop(model: LoopModel, j: int) -> int:
    """dim of the unital algebra generated by e_1, ..., e_{j-1} inside B_j."""
    keys = model.bn_basis(j)
    gens = [model.promote(model.jones_e(i), j) for i in range(1, j)]
    one = model.unit("B", j)
    v0 = model.to_vector(one, keys)
    basis = [v0 / np.linalg.norm(v0)]
    frontier = [one]
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                y = w * g
                v = model.to_vector(y, keys)
                n0 = np.linalg.norm(v)
                for _ in range(2):
                    for b in basis:
                        v = v - b * np.vdot(b, v)
                nv = np.linalg.norm(v)
                if nv > 1e-9 * max(n0, 1e-3):
                    basis.append(v / nv)
                    nxt.append(y)
        frontier = nxt
    return len(basis)


@dataclass
class ProfileLevel:
    j: int
    dim_P: int | None
    dim_Q: int | None
    dim_TL: int
    catalan: int

    @property
    def verdict(self) -> str:
        if self.dim_P is None:
            return "equal" if self.dim_TL == self.catalan else "below-catalan"
        return "equal" if self.dim_P == self.dim_TL else "strictly-larger"

    def to_json(self) -> dict[str, Any]:
        out = {"j": self.j, "dim_TL": self.dim_TL, "catalan": self.catalan, "verdict": self.verdict,
               "tl_vs_catalan": "equal" if self.dim_TL == self.catalan else
               ("below" if self.dim_TL < self.catalan else "above")}
        if self.dim_P is not None:
            out["dim_P"] = self.dim_P
            out["dim_Q"] = self.dim_Q
        return out


@dataclass
class Profile:
    levels: list[ProfileLevel]
    index: float
    depth_requested: int
    depth_reached: int
    P: dict[int, RepresentedAlgebra] = field(default_factory=dict, repr=False)
    Q: dict[int, RepresentedAlgebra] = field(default_factory=dict, repr=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "levels": [lv.to_json() for lv in self.levels],
            "index": self.index,
            "depth_requested": self.depth_requested,
            "depth_reached": self.depth_reached,
        }


def relative_commutant_profile(spec_or_tower, depth: int | None = None, cap: int = 4096) -> Profile:
    """dim P_{j,+} = A'_{0,1} cap A_{j,0} and dim Q_{j,+} = A'_{0,0} cap A_{j,0} for 1 <= j <= depth."""
    if isinstance(spec_or_tower, VerticalTower):
        tower = spec_or_tower
        depth = depth or tower.depth_reached
    else:
        if depth is None:
            raise ValueError("depth required")
        tower = vertical_tower(spec_or_tower, depth, cap=cap)
    reached = min(depth, tower.depth_reached)
    sq = tower.square
    levels, P, Q = [], {}, {}
    ident = np.eye(tower.ambient_dim, dtype=complex)
    for j in range(1, reached + 1):
        Aj = tower.col0[j]
        p = relative_commutant(sq["A01"].gens(), Aj, name=f"P{j}+")
        q = relative_commutant(sq["A00"].gens(), Aj, name=f"Q{j}+")
        if not q.contains_algebra(p):
            raise ArithmeticError(f"P_{j} is not contained in Q_{j}")
        P[j], Q[j] = p, q
        dim_tl = tl_dimension_matrix(tower.jones[: j - 1], ident)
        levels.append(ProfileLevel(j, p.dim, q.dim, dim_tl, catalan(j)))
    return Profile(levels, tower.spec.index(), depth, reached, P, Q)


def tl_profile(obj, depth: int) -> Profile:
    """Catalan comparison for a loop model (graph) or a commuting square."""
    if isinstance(obj, (CommutingSquareSpec, VerticalTower)):
        return relative_commutant_profile(obj, depth)
    model = obj if isinstance(obj, LoopModel) else LoopModel(obj)
    levels = [ProfileLevel(j, None, None, tl_dimension_loop(model, j), catalan(j))
              for j in range(1, depth + 1)]
    return Profile(levels, model.spectral.d_squared, depth, depth)


def horizontal_stability(spec: CommutingSquareSpec) -> dict[str, Any]:
    """Compare A'_{0,1} cap A_{1,0} with A'_{0,2} cap A_{1,0}.

    A_{0,2} is generated by A_{0,1} and the Jones projection of A_{1,0} in
    A_{1,1}, realized on L^2(A_{1,1}).
    """
    B2, gns, _ = basic_construction_gns(spec.A11, spec.A10)
    rho, lift = B2.rho, gns.left
    a10 = spec.A10.mapped(lift, rho)
    before = relative_commutant(spec.A01.gens(), spec.A10)
    after = relative_commutant([lift(g) for g in spec.A01.gens()] + [gns.e], a10)
    lifted_before = before.mapped(lift, rho)
    same = after.contains_algebra(lifted_before) and lifted_before.contains_algebra(after)
    return {"dim_before": before.dim, "dim_after": after.dim, "equal": bool(same)}
