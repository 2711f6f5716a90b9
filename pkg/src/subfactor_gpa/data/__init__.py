"""Bundled reference data: example graphs, Hadamard squares and known indices."""

from __future__ import annotations

import json
from importlib import resources
from typing import Any


def path(*parts: str) -> str:
    return str(resources.files(__name__).joinpath(*parts))


def known_indices() -> list[dict[str, Any]]:
    with resources.files(__name__).joinpath("indices.json").open() as fh:
        return json.load(fh)["entries"]


def annotate_index(value: float, tol: float = 1e-4) -> dict[str, Any] | None:
    """The known finite-depth entry at ``value``, if any (approximate entries use 5 digits)."""
    for entry in known_indices():
        if abs(entry["value"] - value) <= (tol if entry["approximate"] else 1e-9 * max(1.0, value)):
            return entry
    return None
