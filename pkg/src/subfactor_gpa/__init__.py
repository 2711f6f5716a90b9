"""Loop algebras, graph planar algebras and commuting-square subfactors at desk scale."""

from __future__ import annotations

from .commuting_square import (
    CommutingSquareSpec,
    load_square,
    relative_commutant_profile,
    spin_model,
    tl_profile,
    verify,
    vertical_tower,
)
from .embedding_check import SquareBridge, check_intertwining, embed_report, psi
from .graph_core import (
    BipartiteGraph,
    SpectralData,
    augment,
    haagerup_gamma,
    load_graph,
    reference_graphs,
    spectral_data,
    validate_and_canonicalize,
)
from .loop_tower import LoopElement, LoopModel, dim_oracle, tl_residuals
from .tangles import GraphPlanarAlgebra, evaluate, parse_tangle

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "CommutingSquareSpec",
    "GraphPlanarAlgebra",
    "LoopElement",
    "LoopModel",
    "SpectralData",
    "SquareBridge",
    "augment",
    "check_intertwining",
    "dim_oracle",
    "embed_report",
    "evaluate",
    "haagerup_gamma",
    "load_graph",
    "load_square",
    "parse_tangle",
    "psi",
    "reference_graphs",
    "relative_commutant_profile",
    "spectral_data",
    "spin_model",
    "tl_profile",
    "tl_residuals",
    "validate_and_canonicalize",
    "verify",
    "vertical_tower",
]
