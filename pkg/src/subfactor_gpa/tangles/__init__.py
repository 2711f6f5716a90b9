from .evaluate import GraphPlanarAlgebra, TraceValue, evaluate, gpa_trace, involution
from .parser import Boundary, TangleExpr, parse_tangle, signature

__all__ = [
    "Boundary",
    "GraphPlanarAlgebra",
    "TangleExpr",
    "TraceValue",
    "evaluate",
    "gpa_trace",
    "involution",
    "parse_tangle",
    "signature",
]
