"""Shared fixtures: the worked example graphs and frozen reference data."""

from fractions import Fraction

import pytest

from hcp.graph import DirectedGraph, complete_graph

BETA = Fraction(9, 10)

# 5-node Hamiltonian example: bidirected edges 1-2, 2-3, 3-4, 4-5, 5-1, 1-4.
FIG_HAM_ARCS = frozenset({
    (1, 2), (2, 1), (2, 3), (3, 2), (3, 4), (4, 3),
    (4, 5), (5, 4), (5, 1), (1, 5), (1, 4), (4, 1),
})

# 5-node non-Hamiltonian example: bidirected 1-2, 2-3, 2-4, 4-5, 5-1, 1-4.
FIG_NONHAM_ARCS = frozenset({
    (1, 2), (2, 1), (2, 3), (3, 2), (2, 4), (4, 2),
    (4, 5), (5, 4), (5, 1), (1, 5), (1, 4), (4, 1),
})

# Worked quasi-Hamiltonian point of the wedge system on K6 at beta = 0.999;
# every other coordinate is zero.
K6_QUASI_POINT = {
    (1, 2): 1.00000, (2, 6): 0.999000, (3, 4): 0.994013, (3, 6): 0.000997,
    (4, 5): 0.995010, (5, 1): 0.995010, (5, 4): 0.001993, (6, 3): 0.996006,
    (6, 5): 0.00299101,
}
K6_QUASI_CYCLE = (1, 2, 6, 3, 4, 5, 1)

# Type-4 support on K7 and the two 4-arc completions: `good` yields a feasible
# basis, `bad` is linearly dependent (its added arcs close a balanced cycle).
K7_SUPPORT = [(1, 2), (2, 3), (3, 2), (3, 1)]
K7_GOOD_EXTRA = [(3, 4), (5, 4), (6, 7), (7, 6)]
K7_BAD_EXTRA = [(4, 5), (6, 5), (7, 6), (7, 4)]


@pytest.fixture(scope="session")
def fig_ham() -> DirectedGraph:
    return DirectedGraph(5, FIG_HAM_ARCS)


@pytest.fixture(scope="session")
def fig_nonham() -> DirectedGraph:
    return DirectedGraph(5, FIG_NONHAM_ARCS)


@pytest.fixture(scope="session")
def k4() -> DirectedGraph:
    return complete_graph(4)


@pytest.fixture(scope="session")
def k5() -> DirectedGraph:
    return complete_graph(5)


@pytest.fixture(scope="session")
def k6() -> DirectedGraph:
    return complete_graph(6)


@pytest.fixture(scope="session")
def k7() -> DirectedGraph:
    return complete_graph(7)


def arc_cols(sys_, arcs):
    return [sys_.col_index(a) for a in arcs]
