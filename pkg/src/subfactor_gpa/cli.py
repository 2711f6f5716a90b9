"""The ``pf`` command line.

Every command prints one JSON document (sorted keys, floats at 12
significant digits).  Exit codes: 0 success, 1 a mathematical check failed,
2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .commuting_square import load_square, relative_commutant_profile, verify, vertical_tower
from .data import annotate_index
from .embedding_check import embed_report
from .errors import AmbientMismatch, BasisTooLarge, InputError, PfError, SlotUnbound
from .graph_core import load_graph, spectral_data
from .loop_tower import LoopModel, dim_oracle, tl_residuals
from .tangles import GraphPlanarAlgebra, TraceValue, evaluate, parse_tangle

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits and make everything JSON-native."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _emit(report: dict[str, Any], out: str | None) -> None:
    text = dumps(report)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------

def cmd_graph_analyze(args) -> tuple[dict, int]:
    g = load_graph(args.file)
    s = spectral_data(g, dps=args.dps)
    report = s.report()
    report["vertices"] = {"even": list(g.even), "odd": list(g.odd)}
    report["m_plus"] = dict(zip(g.even, g.m_plus))
    known = annotate_index(s.d_squared)
    if known is not None:
        report["known_index"] = known
    return report, EXIT_OK


def cmd_loops(args) -> tuple[dict, int]:
    g = load_graph(args.file)
    model = LoopModel(g, basis_cap=args.cap)
    keys = model.loop_basis(args.n, args.parity)
    oracle = dim_oracle(g, args.n, args.parity)
    report = {
        "n": args.n,
        "parity": args.parity,
        "dim": len(keys),
        "dim_oracle": oracle,
        "dim_B": len(model.bn_basis(args.n)),
    }
    if args.list:
        names = g.vertex_names
        report["basis"] = [{"base": names[l[0]], "left": list(l[1:]), "right": list(r[1:])} for l, r in keys]
    return report, EXIT_OK if oracle == len(keys) else EXIT_FAIL


def cmd_tl(args) -> tuple[dict, int]:
    g = load_graph(args.file)
    res = tl_residuals(LoopModel(g), args.n)
    worst = max(res.values(), default=0.0)
    ok = worst < args.precision
    return {"n": args.n, "residuals": res, "max_residual": worst, "passed": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_tangle(args) -> tuple[dict, int]:
    g = load_graph(args.file)
    model = LoopModel(g, basis_cap=args.cap)
    expr = parse_tangle(args.expr)
    inputs = []
    for path in args.input or []:
        with open(path) as fh:
            inputs.append(model.deserialize(json.load(fh)))
    result = evaluate(expr, GraphPlanarAlgebra(model), inputs)
    report: dict[str, Any] = {"expr": str(expr)}
    if isinstance(result, TraceValue):
        report["result"] = model.serialize(result.element)
        report["scalar"] = result.scalar
    else:
        report["result"] = model.serialize(result)
    return report, EXIT_OK


def cmd_cs(args) -> tuple[dict, int]:
    spec = load_square(args.file)
    tol = args.precision
    if args.sub == "verify":
        rep = verify(spec, tol=tol)
        return rep.to_json(), EXIT_OK if rep.passed else EXIT_FAIL
    if args.sub == "tower":
        tower = vertical_tower(spec, args.depth, cap=args.cap)
        report = tower.to_json()
        return report, EXIT_OK if tower.depth_reached >= args.depth else EXIT_FAIL
    if args.sub == "profile":
        rep = verify(spec, tol=tol)
        if not rep.passed:
            return {"verdict": "precondition failed: not a commuting square",
                    "verification": rep.to_json()}, EXIT_FAIL
        # P_j lives in A_{j,0}, so the tower needs depth j
        report = relative_commutant_profile(spec, args.depth, cap=args.cap).to_json()
        known = annotate_index(report["index"])
        if known is not None:
            report["known_index"] = known
        return report, EXIT_OK if report["depth_reached"] >= args.depth else EXIT_FAIL
    if args.sub == "embed":
        report = embed_report(spec, args.depth, cap=args.cap, tol=max(tol, 1e-8))
        return report, EXIT_OK if report.get("passed") else EXIT_FAIL
    raise InputError(f"unknown cs subcommand {args.sub!r}")


# -- parser -----------------------------------------------------------------------

def _tolerance(text: str) -> float:
    x = float(text)
    if not 0 < x <= 1e-3:
        raise argparse.ArgumentTypeError("precision must lie in (0, 1e-3]")
    return x


def _positive(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return k


def _nonnegative(text: str) -> int:
    k = int(text)
    if k < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pf", description="Loop algebras, graph planar algebras and commuting squares.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q: argparse.ArgumentParser) -> None:
        q.add_argument("--precision", type=_tolerance, default=1e-9, help="tolerance for approximate checks")
        q.add_argument("--cap", type=_positive, default=None, help="basis size cap")
        q.add_argument("--threads", type=_positive, default=None, help="BLAS threads")
        q.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    graph = sub.add_parser("graph", help="bipartite graph utilities")
    gsub = graph.add_subparsers(dest="action", required=True)
    ga = gsub.add_parser("analyze", help="Perron-Frobenius data of a graph")
    ga.add_argument("file")
    ga.add_argument("--dps", type=_positive, default=None, help="also compute with this many digits")
    common(ga)
    ga.set_defaults(func=cmd_graph_analyze)

    lp = sub.add_parser("loops", help="basis of G_{n,+-}")
    lp.add_argument("file")
    lp.add_argument("--n", type=_nonnegative, required=True)
    lp.add_argument("--parity", choices=["+", "-"], default="+")
    lp.add_argument("--list", action="store_true", help="include the basis loops")
    common(lp)
    lp.set_defaults(func=cmd_loops)

    tl = sub.add_parser("tl", help="Temperley-Lieb relation residuals")
    tl.add_argument("file")
    tl.add_argument("--n", type=_positive, required=True)
    common(tl)
    tl.set_defaults(func=cmd_tl)

    tg = sub.add_parser("tangle", help="evaluate a tangle expression")
    tg.add_argument("file")
    tg.add_argument("--expr", required=True)
    tg.add_argument("--input", nargs="*", default=[], help="serialized input elements, in slot order")
    common(tg)
    tg.set_defaults(func=cmd_tangle)

    cs = sub.add_parser("cs", help="commuting squares")
    cs.add_argument("sub", choices=["verify", "tower", "profile", "embed"])
    cs.add_argument("file")
    cs.add_argument("--depth", type=_positive, default=2)
    common(cs)
    cs.set_defaults(func=cmd_cs)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.cap is None:
        args.cap = 4096 if args.command == "cs" else 10**6
    try:
        with threadpool_limits(limits=args.threads):
            report, code = args.func(args)
    except json.JSONDecodeError as exc:
        report = {"error": "invalid JSON", "message": exc.msg, "line": exc.lineno,
                  "column": exc.colno, "position": exc.pos}
        code = EXIT_INPUT
    except (InputError, SlotUnbound, AmbientMismatch, BasisTooLarge, OSError, KeyError) as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        pos = getattr(exc, "pos", None)
        if pos is not None:
            report["position"] = pos
            report["expected"] = list(getattr(exc, "expected", ()))
        code = EXIT_INPUT
    except PfError as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        code = EXIT_FAIL
    if "error" in report:
        sys.stderr.write(dumps(report))
        return code
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
