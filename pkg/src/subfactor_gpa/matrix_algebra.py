"""Finite-dimensional *-algebras inside an ambient matrix algebra M_N.

Every algebra carries a trace density ``rho`` (positive, trace one) so that
``tr(x) = Tr(rho x)``.  The ambient need not be a trace, but ``rho`` is
always central in the largest algebra of a construction, so restricted to
that algebra and its subalgebras ``tr`` is a faithful trace and the
trace-preserving conditional expectation is orthogonal projection for
``<x, y> = Tr(rho x^* y)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ClosureOverflow, DegenerateDecomposition, NonFaithfulTrace
from .graph_core import BipartiteGraph, augment, validate_and_canonicalize

RANK_TOL = 1e-10
DEFAULT_SEED = 20240611
# refuse closures whose orthonormal basis would need more memory than this
MEMORY_LIMIT_BYTES = 2 * 1024**3


def dagger(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x.conj(), -1, -2)


def _sqrt_psd(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
    if w.min() <= 1e-14 * max(w.max(), 1e-300):
        raise NonFaithfulTrace("trace density is not positive definite")
    s = (v * np.sqrt(w)) @ dagger(v)
    si = (v / np.sqrt(w)) @ dagger(v)
    return s, si


class _Orthonormalizer:
    """Incremental Gram-Schmidt (two passes) in the rho-weighted inner product."""

    def __init__(self, rho: np.ndarray, cap: int, tol: float = RANK_TOL):
        self.n = rho.shape[0]
        self.sqrt_rho, self.isqrt_rho = _sqrt_psd(rho)
        self.cap = cap
        self.tol = tol
        if 16 * self.n**2 * min(cap, self.n**2) > MEMORY_LIMIT_BYTES:
            raise ClosureOverflow(
                f"basis for ambient {self.n} with cap {cap} exceeds the memory guard"
            )
        self.q = np.zeros((min(cap, self.n**2), self.n**2), dtype=complex)
        self.k = 0

    def _vec(self, x: np.ndarray) -> np.ndarray:
        return (x @ self.sqrt_rho).ravel()

    def residual(self, x: np.ndarray) -> tuple[np.ndarray, float, float]:
        v = self._vec(x).astype(complex)
        norm0 = float(np.linalg.norm(v))
        if self.k:
            q = self.q[: self.k]
            for _ in range(2):
                v = v - q.T @ (q.conj() @ v)
        return v, float(np.linalg.norm(v)), norm0

    def add(self, x: np.ndarray, scale: float = 1.0) -> bool:
        """Accept x if its residual exceeds tol relative to max(|x|, scale)."""
        v, nv, n0 = self.residual(x)
        if nv <= self.tol * max(n0, scale):
            return False
        if self.k >= self.q.shape[0]:
            raise ClosureOverflow(f"algebra dimension exceeds cap {self.cap}")
        self.q[self.k] = v / nv
        self.k += 1
        return True

    def basis(self, start: int = 0) -> np.ndarray:
        return self.q[start: self.k].reshape(-1, self.n, self.n) @ self.isqrt_rho


@dataclass(frozen=True, eq=False)
class RepresentedAlgebra:
    basis: np.ndarray  # (k, N, N), orthonormal for Tr(rho x^* y)
    rho: np.ndarray
    generators: tuple[np.ndarray, ...] = ()
    name: str = ""
    _flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = self.basis.shape[0]
        object.__setattr__(self, "_flat", self.basis.reshape(k, -1).conj())

    @property
    def ambient_dim(self) -> int:
        return self.rho.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def trace(self, x: np.ndarray) -> complex:
        return complex(np.sum(self.rho.T * x))

    def inner(self, x: np.ndarray, y: np.ndarray) -> complex:
        return self.trace(dagger(x) @ y)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return self._flat @ (x @ self.rho).ravel()

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(c, self.basis, axes=1)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Trace-preserving conditional expectation onto this algebra."""
        return self.from_coords(self.coords(x))

    def residual(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def contains_algebra(self, other: "RepresentedAlgebra", tol: float = 1e-9) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex)

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> np.ndarray:
        c = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        x = self.from_coords(c)
        return (x + dagger(x)) / 2 if hermitian else x

    def gens(self) -> tuple[np.ndarray, ...]:
        return self.generators if self.generators else tuple(self.basis)

    def with_rho(self, rho: np.ndarray, name: str | None = None) -> "RepresentedAlgebra":
        """Re-orthonormalize the same subspace for a new trace density."""
        ortho = _Orthonormalizer(rho, self.dim)
        for b in self.basis:
            ortho.add(b)
        return RepresentedAlgebra(ortho.basis(), rho, self.generators, name or self.name)

    def mapped(self, f: Callable[[np.ndarray], np.ndarray], rho: np.ndarray,
               name: str | None = None) -> "RepresentedAlgebra":
        """Image under an injective *-homomorphism f into a new ambient with density rho."""
        ortho = _Orthonormalizer(rho, self.dim)
        for b in self.basis:
            ortho.add(f(b))
        return RepresentedAlgebra(ortho.basis(), rho, tuple(f(g) for g in self.generators),
                                  name or self.name)

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [matrix_to_json(b) for b in self.basis],
            "trace_vector": decompose(self).trace_vector.tolist() if self.dim else [],
        }


def matrix_to_json(x: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(x)]


def normalized_trace_density(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex) / n


def algebra_from_generators(
    gens: Sequence[np.ndarray],
    rho: np.ndarray | None = None,
    cap: int | None = None,
    name: str = "",
    tol: float = RANK_TOL,
) -> RepresentedAlgebra:
    """Smallest unital *-algebra containing ``gens``.

    Words are grown by right multiplication with the generators and their
    adjoints; only newly accepted basis elements are extended at each round.
    """
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if not gens and rho is None:
        raise ValueError("need a generator or a trace density to fix the ambient")
    n = gens[0].shape[0] if gens else rho.shape[0]
    if rho is None:
        rho = normalized_trace_density(n)
    cap = n * n if cap is None else cap
    ortho = _Orthonormalizer(rho, cap, tol)
    letters = []
    for g in gens:
        nrm = float(np.linalg.norm(ortho._vec(g)))
        if nrm == 0:
            continue
        g = g / nrm
        letters.append(g)
        if not np.allclose(g, dagger(g), atol=1e-13):
            letters.append(dagger(g))
    ortho.add(np.eye(n, dtype=complex))
    frontier = [np.eye(n, dtype=complex)]
    for g in letters:
        if ortho.add(g):
            frontier.append(ortho.basis(ortho.k - 1)[0])
    while frontier:
        start = ortho.k
        for f in frontier:
            for s in letters:
                ortho.add(f @ s)
        frontier = list(ortho.basis(start))
    return RepresentedAlgebra(ortho.basis(), rho, tuple(gens), name)


def span_algebra(elements: Sequence[np.ndarray], rho: np.ndarray, name: str = "") -> RepresentedAlgebra:
    """Orthonormal basis of the linear span of ``elements`` (caller asserts it is an algebra)."""
    n = rho.shape[0]
    ortho = _Orthonormalizer(rho, n * n)
    for x in elements:
        ortho.add(np.asarray(x, dtype=complex))
    return RepresentedAlgebra(ortho.basis(), rho, (), name)


def conditional_expectation(x: np.ndarray, A: RepresentedAlgebra) -> np.ndarray:
    return A.project(x)


def relative_commutant(S: Sequence[np.ndarray], C: RepresentedAlgebra, tol: float = 1e-9,
                       name: str = "") -> RepresentedAlgebra:
    """{x in C : xs = sx for all s in S}, via the nullspace of stacked commutators."""
    k = C.dim
    if not S:
        return C
    letters = []
    for s in S:
        letters.append(s)
        if not np.allclose(s, dagger(s), atol=1e-13):
            letters.append(dagger(s))
    blocks = []
    for s in letters:
        blocks.append((C.basis @ s - s @ C.basis).reshape(k, -1).T)
    m = np.vstack(blocks)
    # shrink the tall system before the SVD
    r = np.linalg.qr(m, mode="r") if m.shape[0] > k else m
    # rank threshold relative to the commutator scale, not just to the largest
    # singular value, so an all-zero system keeps every direction
    ref = float(np.linalg.norm(C.basis.reshape(k, -1), axis=1).max()) * max(
        float(np.linalg.norm(x)) for x in letters
    )
    _, sv, vh = np.linalg.svd(r)
    rank = int(np.sum(sv > tol * max(sv.max(initial=0.0), ref)))
    null = vh[rank:].conj().T
    elems = [C.from_coords(c) for c in null.T]
    return span_algebra(elems, C.rho, name)


def center(A: RepresentedAlgebra) -> RepresentedAlgebra:
    return relative_commutant(A.gens(), A, name=f"Z({A.name})")


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Central decomposition: projections q_j, block sizes k_j, ambient multiplicities."""

    projections: tuple[np.ndarray, ...]
    sizes: tuple[int, ...]
    multiplicities: tuple[int, ...]
    trace_vector: np.ndarray  # trace of a minimal projection in each block

    @property
    def dims(self) -> int:
        return sum(k * k for k in self.sizes)


def _cluster(values: np.ndarray, gap: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = [[int(order[0])]]
    for a, b in zip(order, order[1:]):
        if values[b] - values[a] > gap:
            groups.append([])
        groups[-1].append(int(b))
    return groups


def _first_support(p: np.ndarray) -> int:
    d = np.abs(np.diag(p))
    return int(np.argmax(d > 0.5 * d.max()))


def decompose(A: RepresentedAlgebra, seed: int = DEFAULT_SEED) -> Decomposition:
    z = center(A)
    # real and imaginary parts span the center by self-adjoint elements
    herm = np.concatenate([z.basis + dagger(z.basis), 1j * (z.basis - dagger(z.basis))]) / 2
    for attempt in range(4):
        rng = np.random.default_rng(seed + attempt)
        h = np.tensordot(rng.normal(size=len(herm)), herm, axes=1)
        w, v = np.linalg.eigh(h)
        spread = max(float(w.max() - w.min()), 1.0)
        groups = _cluster(w, 1e-7 * spread)
        if len(groups) == z.dim:
            break
    else:
        raise DegenerateDecomposition(
            f"center of dimension {z.dim} did not separate into that many projections"
        )
    projs = []
    for grp in groups:
        vv = v[:, grp]
        projs.append(vv @ dagger(vv))
    projs.sort(key=_first_support)
    sizes, mults, tvec = [], [], []
    flat = A.basis
    for q in projs:
        dim_q = float(np.real(sum(A.inner(b, q @ b) for b in flat)))
        k = int(round(np.sqrt(dim_q)))
        rank = int(round(float(np.real(np.trace(q)))))
        if abs(k * k - dim_q) > 1e-6 or rank % k:
            raise DegenerateDecomposition(f"block of dimension {dim_q:.6g} is not a full matrix block")
        sizes.append(k)
        mults.append(rank // k)
        tvec.append(float(np.real(A.trace(q))) / k)
    return Decomposition(tuple(projs), tuple(sizes), tuple(mults), np.array(tvec))


def bratteli_matrix(A: RepresentedAlgebra, B: RepresentedAlgebra,
                    da: Decomposition | None = None, db: Decomposition | None = None) -> np.ndarray:
    """Inclusion matrix of A in B (rows: blocks of A, columns: blocks of B)."""
    da = da or decompose(A)
    db = db or decompose(B)
    lam = np.zeros((len(da.sizes), len(db.sizes)), dtype=int)
    for i, p in enumerate(da.projections):
        for j, q in enumerate(db.projections):
            rank = float(np.real(np.trace(p @ q)))
            val = rank * db.sizes[j] / (da.sizes[i] * db.multiplicities[j] * db.sizes[j])
            iv = int(round(val))
            if abs(val - iv) > 1e-6:
                raise DegenerateDecomposition(f"non-integer inclusion multiplicity {val}")
            lam[i, j] = iv
    return lam


def minimal_projections(A: RepresentedAlgebra, q: np.ndarray, k: int,
                        rng: np.random.Generator) -> list[np.ndarray]:
    """k mutually orthogonal minimal projections of A summing to the projection q.

    ``q`` may be any projection of A whose corner qAq is a full k x k block
    (with multiplicity).
    """
    w, v = np.linalg.eigh((q + dagger(q)) / 2)
    u = v[:, w > 0.5]
    for _ in range(4):
        herm = rng.normal(size=(A.ambient_dim,) * 2) + 1j * rng.normal(size=(A.ambient_dim,) * 2)
        h = A.project(herm + dagger(herm))
        hc = dagger(u) @ h @ u
        hw, hv = np.linalg.eigh((hc + dagger(hc)) / 2)
        groups = _cluster(hw, 1e-7 * max(float(hw.max() - hw.min()), 1.0))
        if len(groups) == k and len({len(g) for g in groups}) == 1:
            out = []
            for grp in groups:
                x = u @ hv[:, grp]
                out.append(x @ dagger(x))
            out.sort(key=_first_support)
            return out
    raise DegenerateDecomposition(f"could not split a block into {k} minimal projections")


def partial_isometry(A: RepresentedAlgebra, target: np.ndarray, source: np.ndarray,
                     tol: float = 1e-8) -> np.ndarray:
    """The partial isometry v in A with v^*v = source, vv^* = target.

    Both projections are minimal in the same block; we take the first basis
    element b with target b source nonzero and normalize.
    """
    tr_src = float(np.real(np.trace(source)))
    for b in A.basis:
        y = target @ b @ source
        nrm = float(np.real(np.trace(dagger(y) @ y)))
        if nrm > tol * tr_src:
            return y / np.sqrt(nrm / tr_src)
    raise DegenerateDecomposition("minimal projections lie in different blocks")


# -- GNS basic construction ------------------------------------------------

@dataclass(frozen=True, eq=False)
class GnsSpace:
    """L^2(B, tr) with B acting by left multiplication and e projecting onto L^2(A)."""

    B: RepresentedAlgebra
    A: RepresentedAlgebra
    e: np.ndarray

    @property
    def dim(self) -> int:
        return self.B.dim

    def left(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication by x in the orthonormal basis of B."""
        B = self.B
        prods = x @ B.basis  # (k, N, N)
        return np.stack([B.coords(p) for p in prods], axis=1)


def basic_construction_gns(B: RepresentedAlgebra, A: RepresentedAlgebra,
                           cap: int = 4096) -> tuple[RepresentedAlgebra, GnsSpace, dict]:
    """<L(B), e_A> on L^2(B) with its Markov trace.

    The trace density is sum_j w_j q_j over the central projections of the
    new algebra; the w_j and t = tr(e) solve tr(L(x)) = tr(x) and
    tr(e L(x)) = t tr(x) for x in B in the least-squares sense.
    """
    if B.dim > cap:
        raise ClosureOverflow(f"GNS space of dimension {B.dim} exceeds cap {cap}")
    coords_a = np.stack([B.coords(a) for a in A.basis], axis=1)
    e = coords_a @ dagger(coords_a)
    gns = GnsSpace(B, A, e)
    gens = [gns.left(g) for g in B.gens()] + [e]
    n = B.dim
    flat = normalized_trace_density(n)
    B2 = algebra_from_generators(gens, flat, cap=n * n)
    dec = decompose(B2)
    lefts = [gns.left(b) for b in B.basis]
    rows, rhs = [], []
    for b, lb in zip(B.basis, lefts):
        tb = B.trace(b)
        rows.append([np.trace(q @ lb) for q in dec.projections] + [0.0])
        rhs.append(tb)
        rows.append([np.trace(q @ e @ lb) for q in dec.projections] + [-tb])
        rhs.append(0.0)
    mat = np.array(rows, dtype=complex)
    vec = np.array(rhs, dtype=complex)
    sol, *_ = np.linalg.lstsq(mat, vec, rcond=None)
    residual = float(np.linalg.norm(mat @ sol - vec))
    w = np.real(sol[:-1])
    if np.any(w <= 0):
        raise NonFaithfulTrace("basic construction admits no faithful Markov trace")
    rho = sum(wj * q for wj, q in zip(w, dec.projections))
    B2 = B2.with_rho(rho, name="basic construction")
    info = {"markov_residual": residual, "tau": float(np.real(sol[-1])), "weights": w}
    return B2, gns, info


# -- path matrix units and the tower isomorphism ---------------------------

@dataclass(frozen=True, eq=False)
class PathUnits:
    """Matrix units for A subset B indexed by augmented-graph paths.

    ``graph`` has one even vertex per block of A (m_plus = block size) and
    one odd vertex per block of B.  ``small[((a,), (b,))]`` are the units of A
    keyed by star edge ids; ``big[(p, q)]`` those of B keyed by paths
    ``(eta, eps)``.
    """

    graph: BipartiteGraph
    small: dict
    big: dict
    inclusion: np.ndarray


def path_matrix_units(A: RepresentedAlgebra, B: RepresentedAlgebra,
                      seed: int = DEFAULT_SEED) -> PathUnits:
    rng = np.random.default_rng(seed)
    da, db = decompose(A), decompose(B)
    lam = bratteli_matrix(A, B, da, db)
    even = [f"a{i}" for i in range(len(da.sizes))]
    odd = [f"b{j}" for j in range(len(db.sizes))]
    edges = [[even[i], odd[j]] for i in range(lam.shape[0]) for j in range(lam.shape[1])
             for _ in range(lam[i, j])]
    graph = validate_and_canonicalize(
        {"even": even, "odd": odd, "edges": edges, "m_plus": dict(zip(even, da.sizes))}
    )
    aug = augment(graph)
    k = graph.num_even
    small: dict = {}
    first_min: dict[int, np.ndarray] = {}
    small_iso: dict[tuple[int, int], np.ndarray] = {}
    for v, (p, size) in enumerate(zip(da.projections, da.sizes)):
        mins = minimal_projections(A, p, size, rng)
        stars = aug.star_edges_at(v)
        isos = [mins[0]] + [partial_isometry(A, f, mins[0]) for f in mins[1:]]
        for a, ea in enumerate(stars):
            small_iso[(v, a)] = isos[a]
            for b, eb in enumerate(stars):
                small[((ea,), (eb,))] = isos[a] @ dagger(isos[b])
        first_min[v] = mins[0]
    # minimal projections g_eps under the first minimal projection of each block of A
    big: dict = {}
    for w, q in enumerate(db.projections):
        wv = k + w
        g_of: dict[int, np.ndarray] = {}
        for v in range(k):
            eps_list = [e for e in graph.incident[wv] if graph.src[e] == v]
            if not eps_list:
                continue
            corner = first_min[v] @ q
            mins = minimal_projections(B, corner, len(eps_list), rng)
            for e, g in zip(eps_list, mins):
                g_of[e] = g
        # reference path: lowest star edge into the first edge at w
        paths = [(eta, e) for e in graph.incident[wv] for eta in aug.star_edges_at(graph.src[e])]
        ref_eta, ref_e = paths[0]
        ref = g_of[ref_e]
        iso: dict[tuple[int, int], np.ndarray] = {}
        for eta, e in paths:
            v = graph.src[e]
            a = aug.star_edges_at(v).index(eta)
            base = ref if e == ref_e else partial_isometry(B, g_of[e], ref)
            iso[(eta, e)] = small_iso[(v, a)] @ base
        for p in paths:
            for r in paths:
                big[(p, r)] = iso[p] @ dagger(iso[r])
    return PathUnits(graph, small, big, lam)


def unit_coefficients(x: np.ndarray, units: dict) -> dict:
    """Coefficients of x in a system of matrix units (x assumed in their span)."""
    out = {}
    for (p, q), u in units.items():
        diag = units[(q, q)]
        c = np.trace(dagger(u) @ x) / np.trace(diag)
        if abs(c) > 0:
            out[(p, q)] = complex(c)
    return out


@dataclass(eq=False)
class LevelMap:
    """phi_k as a matrix from A_{k,0} coordinates to B_k loop coordinates."""

    level: int
    algebra: RepresentedAlgebra
    loop_basis: list
    matrix: np.ndarray
    inverse: np.ndarray


class TowerIsomorphism:
    """phi_k : A_{k,0} -> B_k for a tower generated by A_{1,0} and Jones projections.

    ``levels[k]`` is A_{k,0} in a common ambient; ``jones[j-1]`` is e_j.
    """

    def __init__(self, model, units: PathUnits, levels: Sequence[RepresentedAlgebra],
                 jones: Sequence[np.ndarray], tol: float = RANK_TOL):
        self.model = model
        self.units = units
        self.levels = list(levels)
        self.jones = list(jones)
        self.tol = tol
        self.maps: dict[int, LevelMap] = {}

    def _lift_units(self, top: int):
        """Generators with known images: the units of B at level 1, and e_j."""
        m = self.model
        gens = []
        for key, u in self.units.big.items():
            gens.append((u, m.element("B", 1, {key: 1.0})))
        for j in range(1, top):
            gens.append((self.jones[j - 1], m.jones_e(j)))
        return gens

    def level(self, k: int) -> LevelMap:
        if k in self.maps:
            return self.maps[k]
        m = self.model
        alg = self.levels[k]
        basis_keys = m.bn_basis(k)
        if k == 0:
            words = [(u, m.element("B", 0, {key: 1.0})) for key, u in self.units.small.items()]
        else:
            gens = self._lift_units(k)
            ortho = _Orthonormalizer(alg.rho, alg.dim + 1, self.tol)
            words = []
            frontier = []
            for x, img in [(np.eye(alg.ambient_dim, dtype=complex), m.unit("B", 0))] + gens:
                if ortho.add(x):
                    words.append((x, img))
                    frontier.append((x, img))
            while frontier and len(words) < alg.dim:
                nxt = []
                for x, img in frontier:
                    for s, simg in gens:
                        y = x @ s
                        if ortho.add(y):
                            pair = (y, img * simg)
                            words.append(pair)
                            nxt.append(pair)
                frontier = nxt
        if len(words) != alg.dim or len(basis_keys) != alg.dim:
            raise DegenerateDecomposition(
                f"level {k}: {len(words)} words, dim A = {alg.dim}, dim B = {len(basis_keys)}"
            )
        coords = np.stack([alg.coords(x) for x, _ in words], axis=1)
        images = np.stack([m.to_vector(m.promote(img, k), basis_keys) for _, img in words], axis=1)
        mat = images @ np.linalg.inv(coords)
        lm = LevelMap(k, alg, basis_keys, mat, np.linalg.inv(mat))
        self.maps[k] = lm
        return lm

    def phi(self, k: int, x: np.ndarray):
        lm = self.level(k)
        vec = lm.matrix @ lm.algebra.coords(x)
        return self.model.from_vector("B", k, _clean(vec), lm.loop_basis)

    def phi_inv(self, y) -> np.ndarray:
        lm = self.level(y.level)
        vec = self.model.to_vector(y, lm.loop_basis)
        return lm.algebra.from_coords(lm.inverse @ vec)


def _clean(vec: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    scale = max(float(np.abs(vec).max(initial=0.0)), 1.0)
    out = vec.copy()
    out[np.abs(out) < tol * scale] = 0
    return out


def tower_isomorphism(model, units: PathUnits, levels, jones) -> TowerIsomorphism:
    return TowerIsomorphism(model, units, levels, jones)
