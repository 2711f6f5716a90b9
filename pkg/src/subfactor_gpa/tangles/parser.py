"""Recursive-descent parser for the generating-tangle expression language.

Grammar (whitespace is ignored everywhere)::

    expr  := atom | gen "(" expr {"," expr} ")" | "E" "_" INT
    gen   := ("alpha" | "beta") "_" INT | ("m" | "iota" | "id") SIGN "_" INT
           | ("E" | "tr") "_" INT
    atom  := "$" INT | "1" SIGN "_" INT
    SIGN  := "+" | "-"

``E_n`` takes no inputs, so it may be written bare or with empty parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ArityMismatch, ShadingMismatch, TangleSyntaxError


@dataclass(frozen=True)
class Boundary:
    n: int
    shading: str

    def __str__(self) -> str:
        return f"({self.n},{self.shading})"


@dataclass(frozen=True)
class TangleExpr:
    """One node of a tangle expression.

    ``op`` is one of unit, id, mult, incl, alpha, beta, jones, trace, input.
    ``boundary`` is the output boundary; for a bare top-level ``$k`` it is
    None until an input is supplied.
    """

    op: str
    n: int
    shading: str | None
    args: tuple["TangleExpr", ...] = ()
    slot: int | None = None
    boundary: Boundary | None = None
    pos: int = field(default=0, compare=False)
    slots: tuple[tuple[int, Boundary | None], ...] = field(default=(), compare=False)

    def __str__(self) -> str:
        if self.op == "input":
            return f"${self.slot}"
        if self.op == "unit":
            return f"1{self.shading}_{self.n}"
        head = {
            "id": f"id{self.shading}_{self.n}",
            "mult": f"m{self.shading}_{self.n}",
            "incl": f"iota{self.shading}_{self.n}",
            "alpha": f"alpha_{self.n}",
            "beta": f"beta_{self.n}",
            "jones": f"E_{self.n}",
            "trace": f"tr_{self.n}",
        }[self.op]
        if not self.args:
            return head
        return head + "(" + ", ".join(str(a) for a in self.args) + ")"


def signature(op: str, n: int, shading: str | None) -> tuple[tuple[Boundary, ...], Boundary]:
    """(argument boundaries, output boundary) of a generator."""
    P, M = "+", "-"
    if op == "alpha":
        return (Boundary(n, P),), Boundary(n - 1, P)
    if op == "beta":
        return (Boundary(n, P),), Boundary(n - 1, M)
    if op == "mult":
        return (Boundary(n, shading), Boundary(n, shading)), Boundary(n, shading)
    if op == "incl":
        return (Boundary(n, shading),), Boundary(n + 1, P)
    if op == "jones":
        return (), Boundary(n + 1, P)
    if op == "trace":
        return (Boundary(n, P),), Boundary(0, P)
    if op == "id":
        return (Boundary(n, shading),), Boundary(n, shading)
    if op == "unit":
        return (), Boundary(n, shading)
    raise ValueError(op)


_TOKEN = re.compile(
    r"(?P<ab>alpha|beta)_(?P<ab_n>\d+)"
    r"|(?P<sg>iota|id|m)(?P<sg_s>[+-])_(?P<sg_n>\d+)"
    r"|(?P<et>E|tr)_(?P<et_n>\d+)"
    r"|1(?P<u_s>[+-])_(?P<u_n>\d+)"
    r"|\$(?P<slot>\d+)"
    r"|(?P<punct>[(),])"
)

_EXPR_START = ["alpha_N", "beta_N", "m±_N", "iota±_N", "id±_N", "E_N", "tr_N", "1±_N", "$K"]


@dataclass
class _Tok:
    kind: str  # gen, atom, slot, punct, end
    text: str
    pos: int
    op: str = ""
    n: int = 0
    shading: str | None = None


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        # compact copy without whitespace plus a map back to original offsets
        self.chars: list[str] = []
        self.offsets: list[int] = []
        for i, ch in enumerate(text):
            if not ch.isspace():
                self.chars.append(ch)
                self.offsets.append(i)
        self.compact = "".join(self.chars)
        self.i = 0

    def orig(self, i: int) -> int:
        return self.offsets[i] if i < len(self.offsets) else len(self.text)

    def next(self, expected: list[str]) -> _Tok:
        if self.i >= len(self.compact):
            return _Tok("end", "", len(self.text))
        m = _TOKEN.match(self.compact, self.i)
        if m is None:
            raise TangleSyntaxError(
                f"unexpected character {self.compact[self.i]!r}", self.orig(self.i), expected
            )
        pos = self.orig(self.i)
        self.i = m.end()
        g = m.groupdict()
        if g["ab"]:
            return _Tok("gen", m.group(0), pos, g["ab"], int(g["ab_n"]))
        if g["sg"]:
            op = {"iota": "incl", "id": "id", "m": "mult"}[g["sg"]]
            return _Tok("gen", m.group(0), pos, op, int(g["sg_n"]), g["sg_s"])
        if g["et"]:
            op = "jones" if g["et"] == "E" else "trace"
            return _Tok("gen", m.group(0), pos, op, int(g["et_n"]))
        if g["u_s"]:
            return _Tok("atom", m.group(0), pos, "unit", int(g["u_n"]), g["u_s"])
        if g["slot"] is not None:
            return _Tok("slot", m.group(0), pos, "input", int(g["slot"]))
        return _Tok("punct", m.group(0), pos)

    def peek(self) -> str | None:
        return self.compact[self.i] if self.i < len(self.compact) else None


class _Parser:
    def __init__(self, text: str):
        self.lex = _Lexer(text)
        self.slot_bounds: dict[int, Boundary | None] = {}

    def parse(self) -> TangleExpr:
        expr = self.expr(None)
        tok = self.lex.next(["end of input"])
        if tok.kind != "end":
            raise TangleSyntaxError(f"unexpected {tok.text!r}", tok.pos, ["end of input"])
        slots = sorted(self.slot_bounds)
        if slots and slots != list(range(1, len(slots) + 1)):
            raise ArityMismatch(f"input slots must be numbered contiguously from $1, got {slots}")
        return TangleExpr(
            expr.op, expr.n, expr.shading, expr.args, expr.slot, expr.boundary, expr.pos,
            tuple((k, self.slot_bounds[k]) for k in slots),
        )

    def expect_punct(self, ch: str, expected: list[str]) -> _Tok:
        tok = self.lex.next(expected)
        if tok.kind != "punct" or tok.text != ch:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise TangleSyntaxError(f"expected {' or '.join(expected)}, got {what}", tok.pos, expected)
        return tok

    def expr(self, want: Boundary | None) -> TangleExpr:
        tok = self.lex.next(_EXPR_START)
        if tok.kind == "end":
            raise TangleSyntaxError("unexpected end of input", tok.pos, _EXPR_START)
        if tok.kind == "punct":
            raise TangleSyntaxError(f"unexpected {tok.text!r}", tok.pos, _EXPR_START)
        if tok.kind == "slot":
            if tok.n < 1:
                raise TangleSyntaxError("input slots start at $1", tok.pos, ["$K with K >= 1"])
            prev = self.slot_bounds.get(tok.n)
            if prev is not None and want is not None and prev != want:
                _mismatch(prev, want, f"slot ${tok.n}", tok.pos)
            self.slot_bounds[tok.n] = want if want is not None else prev
            return TangleExpr("input", 0, None, slot=tok.n, boundary=want, pos=tok.pos)
        if tok.kind == "atom":
            node = TangleExpr("unit", tok.n, tok.shading, boundary=Boundary(tok.n, tok.shading), pos=tok.pos)
            _check(node, want)
            return node

        op, n = tok.op, tok.n
        if op in ("alpha", "beta") and n < 1:
            raise ArityMismatch(f"{tok.text} needs n >= 1 (at {tok.pos})")
        if op == "jones" and n < 1:
            raise ArityMismatch(f"{tok.text} needs n >= 1 (at {tok.pos})")
        arg_bounds, out = signature(op, n, tok.shading)
        args: list[TangleExpr] = []
        if self.lex.peek() == "(":
            self.lex.next(["("])
            if arg_bounds or self.lex.peek() != ")":
                while True:
                    if len(args) >= len(arg_bounds):
                        raise ArityMismatch(
                            f"{tok.text} takes {len(arg_bounds)} input(s) (at {tok.pos})"
                        )
                    args.append(self.expr(arg_bounds[len(args)]))
                    if self.lex.peek() == ",":
                        self.lex.next([","])
                        continue
                    break
            self.expect_punct(")", [",", ")"] if arg_bounds else [")"])
        elif arg_bounds:
            self.expect_punct("(", ["("])
        if len(args) != len(arg_bounds):
            raise ArityMismatch(
                f"{tok.text} takes {len(arg_bounds)} input(s), got {len(args)} (at {tok.pos})"
            )
        node = TangleExpr(op, n, tok.shading, tuple(args), boundary=out, pos=tok.pos)
        _check(node, want)
        return node


def _mismatch(got: Boundary, want: Boundary, what: str, pos: int) -> None:
    if got.shading != want.shading:
        raise ShadingMismatch(f"{what} at {pos} has boundary {got}, slot expects {want}")
    raise ArityMismatch(f"{what} at {pos} has boundary {got}, slot expects {want}")


def _check(node: TangleExpr, want: Boundary | None) -> None:
    if want is not None and node.boundary != want:
        _mismatch(node.boundary, want, str(node), node.pos)


def parse_tangle(text: str) -> TangleExpr:
    return _Parser(text).parse()
