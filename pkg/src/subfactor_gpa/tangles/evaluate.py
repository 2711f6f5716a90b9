"""Action of the generating tangles on the graph planar algebra G_{n,+-}.

Closed forms in terms of the vertex weight ``lam`` (lambda0 on even
vertices, d*lambda1 on odd ones):

* alpha_n removes the last edge pair, weight lam(old end) / lam(new end);
* beta_n removes the first edge pair, weight lam(old base) / lam(new base);
* iota+_n appends an edge pair, iota-_n prepends one;
* E_n sums sqrt(lam(far) lam(far')) / lam(near) over cup-cap pairs.

These agree with conjugating the loop-tower operations by phi; the test
suite checks that the two stay in sync.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from ..errors import AmbientMismatch, SlotUnbound
from ..loop_tower import Key, LoopElement, LoopModel
from .parser import Boundary, TangleExpr, parse_tangle


def _kind(shading: str) -> str:
    return "G" + shading


@dataclass(frozen=True)
class TraceValue:
    """tr_n of an element: the raw G_{0,+} vector and its lambda0-contraction."""

    element: LoopElement
    scalar: complex


class GraphPlanarAlgebra:
    def __init__(self, model: LoopModel):
        self.model = model
        self.graph = model.graph
        self.d = model.d
        g, s = self.graph, model.spectral
        self.lam = [s.weight(v) for v in range(g.num_vertices)]

    def _end(self, path) -> int:
        return self.model.endpoint("G", path)

    def _need(self, x: LoopElement, kind: str, level: int | None = None) -> None:
        if x.kind != kind or (level is not None and x.level != level):
            want = f"{kind}_{level}" if level is not None else kind
            raise AmbientMismatch(f"expected an element of {want}, got {x.kind}_{x.level}")

    # -- generators --------------------------------------------------------
    def unit(self, n: int, shading: str) -> LoopElement:
        return self.model.unit(_kind(shading), n)

    def mult(self, x: LoopElement, y: LoopElement) -> LoopElement:
        if x.kind != y.kind or x.level != y.level:
            raise AmbientMismatch(f"m needs equal ambients, got {x.kind}_{x.level} and {y.kind}_{y.level}")
        return self.model.multiply(x, y)

    def star(self, x: LoopElement) -> LoopElement:
        return self.model.star(x)

    def alpha(self, x: LoopElement) -> LoopElement:
        self._need(x, "G+")
        if x.level < 1:
            raise AmbientMismatch("alpha_n needs n >= 1")
        lam = self.lam
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            if l[-1] != r[-1]:
                continue
            nl, nr = l[:-1], r[:-1]
            out[(nl, nr)] += c * lam[self._end(l)] / lam[self._end(nl)]
        return self.model.element("G+", x.level - 1, out)

    def beta(self, x: LoopElement) -> LoopElement:
        self._need(x, "G+")
        if x.level < 1:
            raise AmbientMismatch("beta_n needs n >= 1")
        g, lam = self.graph, self.lam
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            e = l[1]
            if e != r[1]:
                continue
            w = g.other_end(e, l[0])
            out[((w,) + l[2:], (w,) + r[2:])] += c * lam[l[0]] / lam[w]
        return self.model.element("G-", x.level - 1, out)

    def iota_plus(self, x: LoopElement) -> LoopElement:
        self._need(x, "G+")
        g = self.graph
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            for e in g.incident[self._end(l)]:
                out[(l + (e,), r + (e,))] += c
        return self.model.element("G+", x.level + 1, out)

    def iota_minus(self, x: LoopElement) -> LoopElement:
        self._need(x, "G-")
        g = self.graph
        out: dict[Key, complex] = defaultdict(complex)
        for (l, r), c in x.terms.items():
            w = l[0]
            for e in g.incident[w]:
                v = g.other_end(e, w)
                out[((v, e) + l[1:], (v, e) + r[1:])] += c
        return self.model.element("G+", x.level + 1, out)

    def jones(self, n: int) -> LoopElement:
        """E_n in G_{n+1,+}."""
        if n < 1:
            raise AmbientMismatch("E_n needs n >= 1")
        g, lam = self.graph, self.lam
        out: dict[Key, complex] = {}
        for ell in self.model.g_paths(n - 1, "+"):
            v = self._end(ell)
            for e in g.incident[v]:
                fe = g.other_end(e, v)
                for f in g.incident[v]:
                    ff = g.other_end(f, v)
                    out[(ell + (e, e), ell + (f, f))] = math.sqrt(lam[fe] * lam[ff]) / lam[v]
        return self.model.element("G+", n + 1, out)

    def trace(self, x: LoopElement) -> TraceValue:
        """d^{-n} alpha_1 ... alpha_n, plus its contraction against m_plus * lambda0."""
        self._need(x, "G+")
        n = x.level
        y = x
        while y.level > 0:
            y = self.alpha(y)
        y = y.scale(self.d ** (-n))
        g, s = self.graph, self.model.spectral
        scalar = sum(
            (c * g.m_plus[l[0]] * float(s.lambda0[l[0]]) for (l, r), c in y.terms.items()), 0j
        )
        return TraceValue(y, scalar)

    # -- phi-conjugated loop-tower forms (reference implementation) --------
    def alpha_via_tower(self, x: LoopElement) -> LoopElement:
        m = self.model
        return m.phi_plus(m.cond_exp_down(m.phi_plus_inv(x))).scale(self.d)

    def beta_via_tower(self, x: LoopElement) -> LoopElement:
        m = self.model
        return m.phi_minus(m.cond_exp_onto_B1_commutant(m.phi_plus_inv(x))).scale(self.d)

    def iota_plus_via_tower(self, x: LoopElement) -> LoopElement:
        m = self.model
        return m.phi_plus(m.include_step(m.phi_plus_inv(x)))

    def iota_minus_via_tower(self, x: LoopElement) -> LoopElement:
        m = self.model
        return m.phi_plus(m.phi_minus_inv(x))

    def jones_via_tower(self, n: int) -> LoopElement:
        return self.model.phi_plus(self.model.jones_F(n))


def evaluate(expr: TangleExpr | str, gpa: GraphPlanarAlgebra | LoopModel,
             inputs: Sequence[LoopElement] = ()) -> LoopElement | TraceValue:
    """Evaluate bottom-up.  A top-level ``tr_n`` returns a TraceValue."""
    if isinstance(expr, str):
        expr = parse_tangle(expr)
    if isinstance(gpa, LoopModel):
        gpa = GraphPlanarAlgebra(gpa)
    result = _eval(expr, gpa, list(inputs))
    return result


def _eval(node: TangleExpr, gpa: GraphPlanarAlgebra, inputs: list[LoopElement]):
    if node.op == "input":
        k = node.slot
        if k is None or k > len(inputs):
            raise SlotUnbound(f"no input bound to ${k}")
        x = inputs[k - 1]
        if node.boundary is not None and (x.kind, x.level) != (_kind(node.boundary.shading), node.boundary.n):
            raise AmbientMismatch(f"${k} expects {node.boundary}, got {x.kind}_{x.level}")
        return x
    args = [_eval(a, gpa, inputs) for a in node.args]
    for a in args:
        if isinstance(a, TraceValue):
            raise AmbientMismatch("tr_n output can only appear at the top level")
    op = node.op
    if op == "unit":
        out = gpa.unit(node.n, node.shading)
    elif op == "id":
        out = args[0]
    elif op == "mult":
        out = gpa.mult(args[0], args[1])
    elif op == "incl":
        out = gpa.iota_plus(args[0]) if node.shading == "+" else gpa.iota_minus(args[0])
    elif op == "alpha":
        out = gpa.alpha(args[0])
    elif op == "beta":
        out = gpa.beta(args[0])
    elif op == "jones":
        out = gpa.jones(node.n)
    elif op == "trace":
        return gpa.trace(args[0])
    else:
        raise ValueError(f"unknown node {op}")
    b: Boundary = node.boundary
    if (out.kind, out.level) != (_kind(b.shading), b.n):
        raise AmbientMismatch(f"{node} produced {out.kind}_{out.level}, boundary says {b}")
    return out


def gpa_trace(x: LoopElement) -> TraceValue:
    return GraphPlanarAlgebra(x.model).trace(x)


def involution(x: LoopElement) -> LoopElement:
    return x.model.star(x)
