"""Shared graph fixtures for the test suite."""
from __future__ import annotations

import pytest

from percobound import WeightedGraph, generate


def petersen_graph() -> WeightedGraph:
    """Outer 5-cycle, inner pentagram, five spokes; spectrum {3, 1^5, (-2)^4}."""
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5, 1.0))
        edges.append((i, i + 5, 1.0))
        edges.append((5 + i, 5 + (i + 2) % 5, 1.0))
    return WeightedGraph(10, tuple(edges))


def petersen_induced_8() -> WeightedGraph:
    """Subgraph of the Petersen graph induced on vertices 0..7."""
    full = petersen_graph()
    edges = tuple((i, j, w) for i, j, w in full.edges if i < 8 and j < 8)
    return WeightedGraph(8, edges)


@pytest.fixture
def petersen() -> WeightedGraph:
    return petersen_graph()


@pytest.fixture
def paley13() -> WeightedGraph:
    return generate("paley", q=13)


@pytest.fixture
def c4() -> WeightedGraph:
    return generate("cycle", n=4)


@pytest.fixture
def p3() -> WeightedGraph:
    return generate("path", n=3)
