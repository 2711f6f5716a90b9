"""Loop algebras G_{n,+-} and the tower B_n on the augmented graph.

A path is a tuple ``(root, e1, ..., en)``.  For the tower ``B_n`` the root
is a star edge id and the path has ``n`` graph edges after it; for
``G_{n,+-}`` the root is the base vertex index.  A basis loop
``[l1 (l2)^*]`` is stored as the key ``(l1, l2)``, where ``l2`` is the
second half of the loop read backwards.  Two loops multiply when the right
half of the first equals the left half of the second, so products are a
hash join on half-paths.
"""

from __future__ import annotations

import functools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import AmbientMismatch, BasisTooLarge, NotInCommutant
from .graph_core import AugmentedGraph, BipartiteGraph, SpectralData, augment, spectral_data

Path = tuple[int, ...]
Key = tuple[Path, Path]

KINDS = ("B", "G+", "G-")


@dataclass(frozen=True, eq=False)
class LoopElement:
    model: "LoopModel"
    kind: str
    level: int
    terms: Mapping[Key, complex]

    # -- arithmetic ------------------------------------------------------
    def _same_ambient(self, other: "LoopElement") -> None:
        if self.model is not other.model or self.kind != other.kind or self.level != other.level:
            raise AmbientMismatch(
                f"cannot combine {self.kind}_{self.level} with {other.kind}_{other.level}"
            )

    def __add__(self, other: "LoopElement") -> "LoopElement":
        if self.kind == "B" == other.kind and self.level != other.level:
            top = max(self.level, other.level)
            return self.model.promote(self, top) + self.model.promote(other, top)
        self._same_ambient(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self.model.element(self.kind, self.level, out)

    def __neg__(self) -> "LoopElement":
        return self.scale(-1)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        return self + (-other)

    def scale(self, c: complex) -> "LoopElement":
        return self.model.element(self.kind, self.level, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, LoopElement):
            return self.model.multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def star(self) -> "LoopElement":
        return self.model.star(self)

    # -- inspection ------------------------------------------------------
    def norm(self) -> float:
        """Entrywise max modulus of the coefficients."""
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def distance(self, other: "LoopElement") -> float:
        return (self - other).norm()

    def coeff(self, left: Path, right: Path) -> complex:
        return self.terms.get((left, right), 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"LoopElement({self.kind}_{self.level}, {len(self.terms)} terms)"

    def to_json(self) -> dict[str, Any]:
        return self.model.serialize(self)


class LoopModel:
    """All loop-algebra structure attached to one bipartite graph."""

    def __init__(self, graph: BipartiteGraph, spectral: SpectralData | None = None,
                 basis_cap: int = 10**6):
        self.graph = graph
        self.spectral = spectral if spectral is not None else spectral_data(graph)
        self.aug: AugmentedGraph = augment(graph)
        self.d = self.spectral.d
        self.basis_cap = basis_cap
        self._star_target = self.aug.star_target
        self._star_at = {v: self.aug.star_edges_at(v) for v in range(graph.num_even)}
        self._end_cache: dict[tuple[str, Path], int] = {}
        self._paths_cache: dict[tuple[int, int], tuple[Path, ...]] = {}

    # -- elements ----------------------------------------------------------
    def element(self, kind: str, level: int, terms: Mapping[Key, complex]) -> LoopElement:
        if kind not in KINDS:
            raise ValueError(f"unknown loop kind {kind!r}")
        return LoopElement(self, kind, level, {k: complex(c) for k, c in terms.items() if c != 0})

    def zero(self, kind: str, level: int) -> LoopElement:
        return LoopElement(self, kind, level, {})

    def unit(self, kind: str, level: int) -> LoopElement:
        if kind == "B":
            paths = self.b_paths(level)
        else:
            paths = self.g_paths(level, kind[1])
        return self.element(kind, level, {(p, p): 1.0 for p in paths})

    # -- paths -------------------------------------------------------------
    def start_vertex(self, kind: str, path: Path) -> int:
        return self._star_target[path[0]] if kind == "B" else path[0]

    def endpoint(self, kind: str, path: Path) -> int:
        key = (kind == "B" and "B" or "G", path)
        v = self._end_cache.get(key)
        if v is None:
            v = self.start_vertex(kind, path)
            for e in path[1:]:
                v = self.graph.other_end(e, v)
            self._end_cache[key] = v
        return v

    def paths_from(self, v: int, length: int) -> tuple[Path, ...]:
        """Graph paths of ``length`` edges from vertex ``v`` as edge-id tuples."""
        key = (v, length)
        cached = self._paths_cache.get(key)
        if cached is not None:
            return cached
        g = self.graph
        out: list[Path] = []

        def walk(cur: int, acc: list[int]):
            if len(acc) == length:
                out.append(tuple(acc))
                return
            for e in g.incident[cur]:
                acc.append(e)
                walk(g.other_end(e, cur), acc)
                acc.pop()

        walk(v, [])
        result = tuple(out)
        self._paths_cache[key] = result
        return result

    def g_paths(self, n: int, parity: str) -> list[Path]:
        g = self.graph
        bases = range(g.num_even) if parity == "+" else range(g.num_even, g.num_vertices)
        return [(v,) + p for v in bases for p in self.paths_from(v, n)]

    def b_paths(self, n: int) -> list[Path]:
        return [(eta,) + p for eta, v in self.aug.star_edges for p in self.paths_from(v, n)]

    def _pair_paths(self, kind: str, paths: Iterable[Path], level: int) -> list[Key]:
        groups: dict[tuple[int, int], list[Path]] = defaultdict(list)
        for p in paths:
            start = self.start_vertex(kind, p) if kind != "B" else -1
            groups[(start, self.endpoint(kind, p))].append(p)
        total = sum(len(v) ** 2 for v in groups.values())
        if total > self.basis_cap:
            raise BasisTooLarge(f"{kind}_{level} has {total} basis loops (cap {self.basis_cap})")
        return sorted((a, b) for grp in groups.values() for a in grp for b in grp)

    def loop_basis(self, n: int, parity: str) -> list[Key]:
        """Basis loops of length 2n based at vertices of the given parity."""
        kind = "G" + parity
        return self._pair_paths(kind, self.g_paths(n, parity), n)

    def bn_basis(self, n: int) -> list[Key]:
        return self._pair_paths("B", self.b_paths(n), n)

    def basis_elements(self, kind: str, level: int) -> list[LoopElement]:
        keys = self.bn_basis(level) if kind == "B" else self.loop_basis(level, kind[1])
        return [LoopElement(self, kind, level, {k: 1 + 0j}) for k in keys]

    # -- algebra -----------------------------------------------------------
    def multiply(self, x: LoopElement, y: LoopElement) -> LoopElement:
        if x.model is not self or y.model is not self:
            raise AmbientMismatch("elements belong to different graphs")
        if x.kind != y.kind:
            raise AmbientMismatch(f"cannot multiply {x.kind} by {y.kind}")
        if x.level != y.level:
            if x.kind != "B":
                raise AmbientMismatch(f"G-levels differ: {x.level} vs {y.level}")
            top = max(x.level, y.level)
            x, y = self.promote(x, top), self.promote(y, top)
        index: dict[Path, list[tuple[Path, complex]]] = defaultdict(list)
        for (left, right), c in y.terms.items():
            index[left].append((right, c))
        out: dict[Key, complex] = defaultdict(complex)
        for (left, right), c in x.terms.items():
            for right2, c2 in index.get(right, ()):
                out[(left, right2)] += c * c2
        return self.element(x.kind, x.level, out)

    def star(self, x: LoopElement) -> LoopElement:
        return self.element(x.kind, x.level, {(r, l): c.conjugate() for (l, r), c in x.terms.items()})

    def include_step(self, x: LoopElement) -> LoopElement:
        """The inclusion B_n -> B_{n+1}: append eps eps^* (or eps^* eps) in every admissible way."""
        if x.kind != "B":
            raise AmbientMismatch("include_step acts on the tower B_n only")
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            for e in self.graph.incident[self.endpoint("B", l)]:
                out[(l + (e,), r + (e,))] += c
        return self.element("B", x.level + 1, out)

    def promote(self, x: LoopElement, level: int) -> LoopElement:
        if level < x.level:
            raise AmbientMismatch(f"cannot promote B_{x.level} down to B_{level}")
        while x.level < level:
            x = self.include_step(x)
        return x

    # -- traces and expectations ------------------------------------------
    def lambda_n(self, n: int, v: int) -> float:
        """Trace of a minimal projection of the v-summand of B_n."""
        s, d = self.spectral, self.d
        k = self.graph.num_even
        if n % 2 == 0:
            return d ** (-n) * float(s.lambda0[v])
        return d ** (-n + 1) * float(s.lambda1[v - k])

    def trace(self, x: LoopElement) -> complex:
        if x.kind != "B":
            raise AmbientMismatch("trace_n is defined on the tower B_n")
        n = x.level
        return sum(
            (c * self.lambda_n(n, self.endpoint("B", l)) for (l, r), c in x.terms.items() if l == r),
            0j,
        )

    def _edge_ratio(self, e: int) -> float:
        """lambda1(t(e)) / lambda0(s(e))."""
        g, s = self.graph, self.spectral
        return float(s.lambda1[g.tgt[e] - g.num_even]) / float(s.lambda0[g.src[e]])

    def cond_exp_down(self, x: LoopElement) -> LoopElement:
        """Trace-preserving conditional expectation B_n -> B_{n-1}."""
        if x.kind != "B" or x.level < 1:
            raise AmbientMismatch("cond_exp_down needs an element of B_n with n >= 1")
        n = x.level
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            e = l[-1]
            if e != r[-1]:
                continue
            ratio = self._edge_ratio(e)
            factor = 1.0 / (self.d**2 * ratio) if n % 2 == 0 else ratio
            out[(l[:-1], r[:-1])] += factor * c
        return self.element("B", n - 1, out)

    def cond_exp_to(self, x: LoopElement, level: int) -> LoopElement:
        while x.level > level:
            x = self.cond_exp_down(x)
        return x

    # -- Jones projections -------------------------------------------------
    @functools.lru_cache(maxsize=None)
    def jones_F(self, n: int) -> LoopElement:
        """The element F_n of B_{n+1}; d^{-1} F_n is the n-th Jones projection."""
        if n < 1:
            raise ValueError("F_n is defined for n >= 1")
        g, s, d = self.graph, self.spectral, self.d
        k = g.num_even
        out: dict[Key, complex] = {}
        for ell in self.b_paths(n - 1):
            v = self.endpoint("B", ell)
            inc = g.incident[v]
            for e in inc:
                for f in inc:
                    if n % 2 == 1:
                        coef = d * math.sqrt(s.lambda1[g.tgt[e] - k] * s.lambda1[g.tgt[f] - k]) / s.lambda0[v]
                    else:
                        coef = math.sqrt(s.lambda0[g.src[e]] * s.lambda0[g.src[f]]) / (d * s.lambda1[v - k])
                    out[(ell + (e, e), ell + (f, f))] = coef
        return self.element("B", n + 1, out)

    def jones_e(self, n: int) -> LoopElement:
        return self.jones_F(n).scale(1.0 / self.d)

    # -- Pimsner-Popa basis ------------------------------------------------
    def pp_basis(self) -> list[LoopElement]:
        """Pimsner-Popa basis S1 + S2 of B_1 over B_0.

        The S2 family uses the lowest-id star edge at s(eps2); at s(eps1) it
        runs over every star edge, which is the printed family when all
        m_plus are 1 and keeps the basis complete when they are not.
        """
        g = self.graph
        out: list[LoopElement] = []
        for (a, b) in self.loop_basis(1, "+"):
            v, e1, e2 = a[0], a[1], b[1]
            scale = math.sqrt(1.0 / self._edge_ratio(e2))
            terms = {((eta, e1), (eta, e2)): scale for eta in self._star_at[v]}
            out.append(self.element("B", 1, terms))
        for e1 in range(len(g.edges)):
            for e2 in range(len(g.edges)):
                if g.tgt[e1] != g.tgt[e2] or g.src[e1] == g.src[e2]:
                    continue
                scale = math.sqrt(1.0 / self._edge_ratio(e2))
                eta2 = self._star_at[g.src[e2]][0]
                for eta1 in self._star_at[g.src[e1]]:
                    out.append(self.element("B", 1, {((eta1, e1), (eta2, e2)): scale}))
        return out

    def pp_average(self, x: LoopElement) -> LoopElement:
        """d^{-2} sum_s s x s^* over the Pimsner-Popa basis."""
        acc = self.zero("B", max(x.level, 1))
        for s in self.pp_basis():
            acc = acc + s * x * s.star()
        return acc.scale(self.d ** -2)

    # -- relative commutants and the isomorphisms phi_{n,+-} --------------
    def phi_plus_inv(self, x: LoopElement) -> LoopElement:
        """G_{n,+} -> B_0' cap B_n: sum over the star edges at the base vertex."""
        if x.kind != "G+":
            raise AmbientMismatch("phi_plus_inv takes an element of G_{n,+}")
        out: dict[Key, complex] = {}
        for (l, r), c in x.terms.items():
            for eta in self._star_at[l[0]]:
                out[((eta,) + l[1:], (eta,) + r[1:])] = c
        return self.element("B", x.level, out)

    def phi_plus(self, x: LoopElement) -> LoopElement:
        """B_0' cap B_n -> G_{n,+}, averaging over the star-edge prefix."""
        if x.kind != "B":
            raise AmbientMismatch("phi_plus takes an element of B_n")
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            if l[0] != r[0]:
                continue
            v = self._star_target[l[0]]
            out[((v,) + l[1:], (v,) + r[1:])] += c / len(self._star_at[v])
        return self.element("G+", x.level, out)

    def _prefixes_minus(self, w: int) -> list[tuple[int, int]]:
        g = self.graph
        return [(eta, e) for e in g.incident[w] for eta in self._star_at[g.src[e]]]

    def phi_minus_inv(self, x: LoopElement) -> LoopElement:
        """G_{n,-} -> B_1' cap B_{n+1}."""
        if x.kind != "G-":
            raise AmbientMismatch("phi_minus_inv takes an element of G_{n,-}")
        out: dict[Key, complex] = {}
        for (l, r), c in x.terms.items():
            for eta, e in self._prefixes_minus(l[0]):
                out[((eta, e) + l[1:], (eta, e) + r[1:])] = c
        return self.element("B", x.level + 1, out)

    def phi_minus(self, x: LoopElement) -> LoopElement:
        """B_1' cap B_{n+1} -> G_{n,-}."""
        if x.kind != "B" or x.level < 1:
            raise AmbientMismatch("phi_minus takes an element of B_{n+1}")
        g = self.graph
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            if l[:2] != r[:2]:
                continue
            w = g.tgt[l[1]]
            out[((w,) + l[2:], (w,) + r[2:])] += c / len(self._prefixes_minus(w))
        return self.element("G-", x.level - 1, out)

    def commutant_residual(self, x: LoopElement, parity: str = "+") -> float:
        """Distance of x from B_0' cap B_n (parity +) or B_1' cap B_n (parity -)."""
        if parity == "+":
            return x.distance(self.phi_plus_inv(self.phi_plus(x)))
        return x.distance(self.phi_minus_inv(self.phi_minus(x)))

    def commutant_iso(self, n: int, parity: str):
        """Spanning set of H_{n,+-} with the maps phi and phi^{-1}.

        Returns ``(basis, phi, phi_inv)`` where ``basis[i] = phi_inv(G basis i)``.
        """
        kind = "G" + parity
        g_basis = self.basis_elements(kind, n)
        if parity == "+":
            phi, phi_inv = self.phi_plus, self.phi_plus_inv
        else:
            phi, phi_inv = self.phi_minus, self.phi_minus_inv
        return [phi_inv(x) for x in g_basis], phi, phi_inv

    def cond_exp_onto_B1_commutant(self, x: LoopElement, tol: float = 1e-9) -> LoopElement:
        """Closed-form expectation B_0' cap B_n -> B_1' cap B_n."""
        if x.kind != "B" or x.level < 1:
            raise AmbientMismatch("expects an element of B_0' cap B_n with n >= 1")
        if self.commutant_residual(x, "+") > tol * max(1.0, x.norm()):
            raise NotInCommutant("element does not commute with B_0")
        xg = self.phi_plus(x)
        return self.phi_minus_inv(self.beta_closed_form(xg).scale(1.0 / self.d))

    def beta_closed_form(self, x: LoopElement) -> LoopElement:
        """G_{n,+} -> G_{n-1,-}: d times the B_1'-expectation read through phi."""
        if x.kind != "G+" or x.level < 1:
            raise AmbientMismatch("beta acts on G_{n,+}, n >= 1")
        g, d = self.graph, self.d
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            e = l[1]
            if e != r[1]:
                continue
            w = g.tgt[e]
            out[((w,) + l[2:], (w,) + r[2:])] += c / (d * self._edge_ratio(e))
        return self.element("G-", x.level - 1, out)

    def commutes_with_B0_exactly(self, x: LoopElement) -> bool:
        for b in self.basis_elements("B", 0):
            if dict(self.multiply(x, b).terms) != dict(self.multiply(self.promote(b, x.level), x).terms):
                return False
        return True

    # -- dense views -------------------------------------------------------
    def to_vector(self, x: LoopElement, basis: Sequence[Key]) -> np.ndarray:
        index = {k: i for i, k in enumerate(basis)}
        vec = np.zeros(len(basis), dtype=complex)
        for k, c in x.terms.items():
            vec[index[k]] = c
        return vec

    def from_vector(self, kind: str, level: int, vec: np.ndarray, basis: Sequence[Key]) -> LoopElement:
        return self.element(kind, level, {k: c for k, c in zip(basis, vec) if c != 0})

    def random_element(self, kind: str, level: int, rng: np.random.Generator,
                       density: float = 1.0) -> LoopElement:
        keys = self.bn_basis(level) if kind == "B" else self.loop_basis(level, kind[1])
        terms = {}
        for k in keys:
            if density >= 1.0 or rng.random() < density:
                terms[k] = complex(rng.normal(), rng.normal())
        return self.element(kind, level, terms)

    # -- serialisation -----------------------------------------------------
    def serialize(self, x: LoopElement) -> dict[str, Any]:
        names = self.graph.vertex_names
        terms = []
        for (l, r), c in sorted(x.terms.items()):
            if x.kind == "B":
                term = {"left": list(l), "right": list(r)}
            else:
                term = {"base": names[l[0]], "left": list(l[1:]), "right": list(r[1:])}
            term["re"] = float(c.real)
            term["im"] = float(c.imag)
            terms.append(term)
        return {"level": x.level, "kind": x.kind, "terms": terms}

    def deserialize(self, obj: Mapping[str, Any]) -> LoopElement:
        kind, level = obj["kind"], int(obj["level"])
        if kind not in KINDS:
            raise AmbientMismatch(f"unknown kind {kind!r}")
        index = self.graph.vertex_index
        valid = set(self.bn_basis(level) if kind == "B" else self.loop_basis(level, kind[1]))
        terms: dict[Key, complex] = defaultdict(complex)
        for t in obj["terms"]:
            if kind == "B":
                key = (tuple(t["left"]), tuple(t["right"]))
            else:
                v = index[t["base"]]
                key = ((v,) + tuple(t["left"]), (v,) + tuple(t["right"]))
            if key not in valid:
                raise AmbientMismatch(f"term {t} is not a basis loop of {kind}_{level}")
            terms[key] += complex(t.get("re", 0.0), t.get("im", 0.0))
        return self.element(kind, level, terms)


@functools.lru_cache(maxsize=32)
def model_for(graph: BipartiteGraph) -> LoopModel:
    return LoopModel(graph)


def _as_model(obj) -> LoopModel:
    if isinstance(obj, LoopModel):
        return obj
    if isinstance(obj, AugmentedGraph):
        return model_for(obj.base)
    return model_for(obj)


# Thin functional surface over LoopModel.
def loop_basis(g, n: int, parity: str) -> list[Key]:
    return _as_model(g).loop_basis(n, parity)


def bn_basis(ag, n: int) -> list[Key]:
    return _as_model(ag).bn_basis(n)


def multiply(x: LoopElement, y: LoopElement) -> LoopElement:
    return x.model.multiply(x, y)


def include_step(x: LoopElement) -> LoopElement:
    return x.model.include_step(x)


def trace_n(x: LoopElement) -> complex:
    return x.model.trace(x)


def cond_exp_down(x: LoopElement) -> LoopElement:
    return x.model.cond_exp_down(x)


def jones_projection(ag, n: int) -> LoopElement:
    return _as_model(ag).jones_F(n)


def pp_basis(ag) -> list[LoopElement]:
    return _as_model(ag).pp_basis()


def commutant_iso(ag, n: int, parity: str):
    return _as_model(ag).commutant_iso(n, parity)


def cond_exp_onto_B1_commutant(x: LoopElement) -> LoopElement:
    return x.model.cond_exp_onto_B1_commutant(x)


def dim_oracle(g: BipartiteGraph, n: int, parity: str = "+") -> int:
    """sum_v ((Lambda Lambda^t)^n)_{vv} over the requested side, in exact integers."""
    lam = g.inclusion_matrix().astype(object)
    gram = lam.dot(lam.T) if parity == "+" else lam.T.dot(lam)
    power = np.identity(gram.shape[0], dtype=object)
    for _ in range(n):
        power = power.dot(gram)
    return int(sum(power[i, i] for i in range(gram.shape[0])))


def tl_residuals(model: LoopModel, n: int) -> dict[str, float]:
    """Max residual of each Temperley-Lieb relation among e_1..e_n."""
    d = model.d
    e = {i: model.jones_e(i) for i in range(1, n + 1)}
    out = {"idempotent": 0.0, "selfadjoint": 0.0, "braid": 0.0, "far_commute": 0.0}
    for i, ei in e.items():
        out["idempotent"] = max(out["idempotent"], (ei * ei).distance(ei))
        out["selfadjoint"] = max(out["selfadjoint"], ei.star().distance(ei))
        for j, ej in e.items():
            if abs(i - j) == 1:
                out["braid"] = max(out["braid"], (ei * ej * ei).distance(ei.scale(d ** -2)))
            elif abs(i - j) >= 2:
                out["far_commute"] = max(out["far_commute"], (ei * ej).distance(ej * ei))
    return out
