import numpy as np
import pytest

from commn import Graph, Partition

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def path5():
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def star4():
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def bridged_triangles():
    """Two 3-cliques {0,1,2} and {3,4,5} joined by the edge 2-3."""
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    return g, Partition([0, 0, 0, 1, 1, 1])


def clique_edges(nodes):
    nodes = list(nodes)
    return [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]]


@pytest.fixture
def two_cliques():
    """Two 5-cliques joined by the single edge 4-5."""
    edges = clique_edges(range(5)) + clique_edges(range(5, 10)) + [(4, 5)]
    return Graph.from_edges(10, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
