"""The map psi from the commuting-square tower into the graph planar algebra.

psi_{n,+} = phi_{n,+} o phi_n on Q_{n,+} = A'_{0,0} cap A_{n,0} and
psi_{n,-} = phi_{n,-} o phi_{n+1} on Q_{n,-} = A'_{1,0} cap A_{n+1,0}, where
phi_k : A_{k,0} -> B_k comes from path matrix units of A_{0,0} in A_{1,0}.
The generator actions on the matrix side are: inclusion for iota+-,
d E_{A_{n-1,0}} for alpha, d^{-1} sum_s s x s^* over a Pimsner-Popa basis
for beta, and d e_n for E_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .commuting_square import CommutingSquareSpec, VerticalTower, verify, vertical_tower
from .errors import DepthUnavailable, RankDeficient
from .loop_tower import LoopElement, LoopModel
from .matrix_algebra import (
    PathUnits,
    RepresentedAlgebra,
    TowerIsomorphism,
    dagger,
    path_matrix_units,
    relative_commutant,
)
from .tangles.evaluate import GraphPlanarAlgebra

GENERATORS = ("iota+", "iota-", "alpha", "beta", "E", "m")


class SquareBridge:
    """Everything needed to compare the tower of a square with its loop model."""

    def __init__(self, tower: VerticalTower):
        self.tower = tower
        sq = tower.square
        self.units: PathUnits = path_matrix_units(sq["A00"], sq["A10"])
        self.model = LoopModel(self.units.graph)
        self.gpa = GraphPlanarAlgebra(self.model)
        self.d = self.model.d
        self.iso = TowerIsomorphism(self.model, self.units, tower.col0, tower.jones)
        self._Q: dict[tuple[int, str], RepresentedAlgebra] = {}
        self._P: dict[tuple[int, str], RepresentedAlgebra] = {}
        self._pp: list[np.ndarray] | None = None

    @property
    def max_level(self) -> int:
        return self.tower.depth_reached

    def _need(self, k: int) -> None:
        if k > self.max_level:
            raise DepthUnavailable(f"level {k} needed, tower reaches {self.max_level}")

    # -- commutants ----------------------------------------------------------
    def Q(self, n: int, parity: str) -> RepresentedAlgebra:
        key = (n, parity)
        if key not in self._Q:
            sq = self.tower.square
            k = n if parity == "+" else n + 1
            self._need(k)
            gens = sq["A00"].gens() if parity == "+" else sq["A10"].gens()
            self._Q[key] = relative_commutant(gens, self.tower.col0[k], name=f"Q{n}{parity}")
        return self._Q[key]

    def P(self, n: int, parity: str) -> RepresentedAlgebra:
        """A'_{0,1} cap A_{n,0} (parity +) or A'_{1,1} cap A_{n+1,0} (parity -)."""
        key = (n, parity)
        if key not in self._P:
            sq = self.tower.square
            k = n if parity == "+" else n + 1
            self._need(k)
            gens = sq["A01"].gens() if parity == "+" else sq["A11"].gens()
            self._P[key] = relative_commutant(gens, self.tower.col0[k], name=f"P{n}{parity}")
        return self._P[key]

    # -- psi -------------------------------------------------------------------
    def psi(self, n: int, parity: str, x: np.ndarray) -> LoopElement:
        m = self.model
        if parity == "+":
            self._need(n)
            return m.phi_plus(self.iso.phi(n, x))
        self._need(n + 1)
        return m.phi_minus(self.iso.phi(n + 1, x))

    # -- matrix-side generator actions ----------------------------------------
    def pp_basis(self) -> list[np.ndarray]:
        """Pimsner-Popa basis of A_{1,0} over A_{0,0}, pulled back from the loop model."""
        if self._pp is None:
            self._pp = [self.iso.phi_inv(s) for s in self.model.pp_basis()]
        return self._pp

    def z1_alpha(self, n: int, x: np.ndarray) -> np.ndarray:
        return self.d * self.tower.col0[n - 1].project(x)

    def z1_beta(self, x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x)
        for s in self.pp_basis():
            acc = acc + s @ x @ dagger(s)
        return acc / self.d

    def z1_jones(self, n: int) -> np.ndarray:
        self._need(n + 1)
        return self.d * self.tower.jones[n - 1]


@dataclass
class EmbeddingData:
    level: int
    parity: str
    matrix: np.ndarray  # columns: psi of the Q basis, in G-loop coordinates
    rank: int
    dim_Q: int
    dim_P: int
    homomorphism_residual: float
    star_residual: float
    unit_residual: float

    @property
    def injective(self) -> bool:
        return self.rank == self.dim_Q

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.level,
            "parity": self.parity,
            "dim_Q": self.dim_Q,
            "dim_P": self.dim_P,
            "rank": self.rank,
            "injective": self.injective,
            "homomorphism_residual": self.homomorphism_residual,
            "star_residual": self.star_residual,
            "unit_residual": self.unit_residual,
        }


def psi(bridge: SquareBridge, n: int, parity: str, max_pairs: int = 400,
        tol: float = 1e-8) -> EmbeddingData:
    Q = bridge.Q(n, parity)
    P = bridge.P(n, parity)
    m = bridge.model
    kind = "G" + parity
    keys = m.loop_basis(n, parity)
    images = [bridge.psi(n, parity, b) for b in Q.basis]
    mat = np.stack([m.to_vector(y, keys) for y in images], axis=1)
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > tol * max(sv.max(initial=0.0), 1.0)))
    hom = 0.0
    count = 0
    for i, a in enumerate(Q.basis):
        for j, b in enumerate(Q.basis):
            if count >= max_pairs:
                break
            hom = max(hom, bridge.psi(n, parity, a @ b).distance(images[i] * images[j]))
            count += 1
    star = max((bridge.psi(n, parity, dagger(b)).distance(y.star()) for b, y in zip(Q.basis, images)),
               default=0.0)
    unit = bridge.psi(n, parity, np.eye(Q.ambient_dim, dtype=complex)).distance(m.unit(kind, n))
    data = EmbeddingData(n, parity, mat, rank, Q.dim, P.dim, hom, star, unit)
    if not data.injective:
        raise RankDeficient(f"psi_{n},{parity} has rank {rank} on a {Q.dim}-dimensional domain")
    return data


def check_intertwining(bridge: SquareBridge, g: str, n: int) -> dict[str, Any]:
    """max over a basis of P of |psi(Z1_g(x)) - Z2_g(psi(x))|, entrywise."""
    gpa = bridge.gpa
    res = 0.0
    extra: dict[str, Any] = {}
    if g == "iota+":
        for x in bridge.P(n, "+").basis:
            res = max(res, bridge.psi(n + 1, "+", x).distance(gpa.iota_plus(bridge.psi(n, "+", x))))
    elif g == "iota-":
        for x in bridge.P(n, "-").basis:
            res = max(res, bridge.psi(n + 1, "+", x).distance(gpa.iota_minus(bridge.psi(n, "-", x))))
    elif g == "alpha":
        if n < 1:
            raise ValueError("alpha_n needs n >= 1")
        for x in bridge.P(n, "+").basis:
            lhs = bridge.psi(n - 1, "+", bridge.z1_alpha(n, x))
            res = max(res, lhs.distance(gpa.alpha(bridge.psi(n, "+", x))))
    elif g == "beta":
        if n < 1:
            raise ValueError("beta_n needs n >= 1")
        target = bridge.Q(n - 1, "-")
        cross = 0.0
        for x in bridge.P(n, "+").basis:
            z = bridge.z1_beta(x)
            cross = max(cross, float(np.abs(z - bridge.d * target.project(x)).max()))
            lhs = bridge.psi(n - 1, "-", z)
            res = max(res, lhs.distance(gpa.beta(bridge.psi(n, "+", x))))
        extra["averaging_vs_projection"] = cross
    elif g == "E":
        if n < 1:
            raise ValueError("E_n needs n >= 1")
        res = bridge.psi(n + 1, "+", bridge.z1_jones(n)).distance(gpa.jones(n))
    elif g == "m":
        basis = bridge.P(n, "+").basis
        for a in basis:
            for b in basis:
                lhs = bridge.psi(n, "+", a @ b)
                res = max(res, lhs.distance(gpa.mult(bridge.psi(n, "+", a), bridge.psi(n, "+", b))))
    else:
        raise ValueError(f"unknown generator {g!r}")
    return {"n": n, "residual": res, **extra}


def _levels_for(g: str, n: int) -> int:
    """Highest tower level A_{k,0} that the check of g at n touches."""
    return {"iota+": n + 1, "iota-": n + 1, "alpha": n, "beta": n, "E": n + 1, "m": n}[g]


def embed_report(spec: CommutingSquareSpec, depth: int, cap: int = 4096,
                 tol: float = 1e-8) -> dict[str, Any]:
    report = verify(spec)
    index = report.index
    if not report.passed:
        return {
            "index": index,
            "verdict": "precondition failed: not a commuting square",
            "verification": report.to_json(),
        }
    tower = vertical_tower(spec, depth + 1, cap=cap)
    bridge = SquareBridge(tower)
    reached = tower.depth_reached
    d_graph = bridge.d
    out: dict[str, Any] = {
        "index": index,
        "d": d_graph,
        "loop_parameter_residual": abs(d_graph - math.sqrt(index)),
        "depth_requested": depth,
        "depth_reached": min(depth, max(reached - 1, 0)),
        "tower_depth": reached,
    }
    levels = []
    all_pass = out["loop_parameter_residual"] < tol
    for n in range(0, depth + 1):
        entry: dict[str, Any] = {"n": n}
        for parity in ("+", "-"):
            k = n if parity == "+" else n + 1
            if k > reached:
                continue
            data = psi(bridge, n, parity)
            entry[f"psi{parity}"] = data.to_json()
            ok = (data.injective and data.homomorphism_residual < tol and data.star_residual < tol
                  and data.unit_residual < tol)
            all_pass &= ok
        if n + 1 <= reached:
            entry["dim_P_minus_A11"] = bridge.P(n, "-").dim
            entry["dim_P_minus_A10"] = bridge.Q(n, "-").dim
        levels.append(entry)
    out["levels"] = levels
    gens: dict[str, list] = {g: [] for g in GENERATORS}
    for g in GENERATORS:
        for n in range(0, depth + 1):
            if g in ("alpha", "beta", "E") and n < 1:
                continue
            if _levels_for(g, n) > reached:
                continue
            r = check_intertwining(bridge, g, n)
            r["pass"] = r["residual"] < tol
            all_pass &= r["pass"]
            gens[g].append(r)
    out["generators"] = gens
    complete = reached >= depth + 1
    if all_pass and complete:
        out["verdict"] = f"embedding verified to depth {depth}"
    elif all_pass:
        out["verdict"] = f"partial: embedding verified to depth {out['depth_reached']}"
    else:
        out["verdict"] = "embedding check failed"
    out["passed"] = bool(all_pass and complete)
    return out
