from __future__ import annotations

import numpy as np
import pytest

from subfactor_gpa.commuting_square import spin_model
from subfactor_gpa.graph_core import reference_graphs, validate_and_canonicalize
from subfactor_gpa.loop_tower import LoopModel

GRAPHS = reference_graphs()


def multiplicity_graph():
    """A small graph with m_plus = 2 at one vertex."""
    return validate_and_canonicalize(
        {
            "even": ["a", "b"],
            "odd": ["x", "y"],
            "edges": [["a", "x"], ["b", "x"], ["a", "y"]],
            "m_plus": {"a": 2, "b": 1},
        }
    )


def fourier(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n)


@pytest.fixture(scope="session")
def models() -> dict[str, LoopModel]:
    out = {name: LoopModel(g) for name, g in GRAPHS.items()}
    out["multiplicity"] = LoopModel(multiplicity_graph())
    return out


@pytest.fixture(scope="session")
def fourier2():
    return spin_model(fourier(2))


@pytest.fixture(scope="session")
def fourier4():
    return spin_model(fourier(4))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
