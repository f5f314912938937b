"""Directed graphs on nodes 1..n: representation, random generation, file I/O.

Random generation is fully reproducible.  All randomness comes from a single
PCG64 stream per call, consumed in a documented order:

  * ``gen_binomial(n, p, seed)`` draws one uniform per ordered pair, row-major
    over (1,2), (1,3), ..., (1,n), (2,1), (2,3), ..., (n,n-1); the arc is kept
    iff the uniform is < p.
  * ``gen_hamiltonian_binomial`` first consumes the same n(n-1) uniforms, then
    shuffles the node list [2..n] by Fisher-Yates (for k = n-2 down to 1, one
    integer draw uniform on {0..k}) to obtain the planted cycle
    1 -> v_1 -> ... -> v_{n-1} -> 1.

Edge-list file format: first non-comment line is ``n``; every following
non-empty, non-comment line is ``i j`` (1-based tail and head).  ``#`` starts
a comment line.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


class EdgeListParseError(ValueError):
    """Malformed edge-list file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph: nodes 1..n, arc set without self-loops."""

    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one node, got n={self.n}")
        object.__setattr__(self, "arcs", frozenset(self.arcs))
        for (i, j) in self.arcs:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"arc ({i},{j}) has an endpoint outside 1..{self.n}")
            if i == j:
                raise ValueError(f"self-loop ({i},{i}) is not allowed")

    @cached_property
    def sorted_arcs(self) -> tuple[tuple[int, int], ...]:
        """Arcs in lexicographic order; the canonical column order downstream."""
        return tuple(sorted(self.arcs))

    @cached_property
    def _out(self) -> dict[int, tuple[int, ...]]:
        d: dict[int, list[int]] = {i: [] for i in range(1, self.n + 1)}
        for (i, j) in self.sorted_arcs:
            d[i].append(j)
        return {i: tuple(js) for i, js in d.items()}

    @cached_property
    def _in(self) -> dict[int, tuple[int, ...]]:
        d: dict[int, list[int]] = {i: [] for i in range(1, self.n + 1)}
        for (i, j) in sorted(self.arcs, key=lambda a: (a[1], a[0])):
            d[j].append(i)
        return {i: tuple(js) for i, js in d.items()}

    def _check_node(self, i: int):
        if not 1 <= i <= self.n:
            raise ValueError(f"node {i} out of range 1..{self.n}")

    def out_neighbors(self, i: int) -> tuple[int, ...]:
        """Heads of arcs leaving i, ascending."""
        self._check_node(i)
        return self._out[i]

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Tails of arcs entering i, ascending."""
        self._check_node(i)
        return self._in[i]

    def out_degree(self, i: int) -> int:
        return len(self.out_neighbors(i))

    def in_degree(self, i: int) -> int:
        return len(self.in_neighbors(i))

    def degree(self, i: int) -> int:
        return self.out_degree(i) + self.in_degree(i)

    def has_arc(self, i: int, j: int) -> bool:
        return (i, j) in self.arcs

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)


def cycle_arcs(order: tuple[int, ...] | list[int]) -> tuple[tuple[int, int], ...]:
    """Arc set of the directed cycle visiting `order` and returning to its start."""
    k = len(order)
    if k < 2:
        raise ValueError("a cycle needs at least two nodes")
    if len(set(order)) != k:
        raise ValueError("cycle nodes must be distinct")
    return tuple((order[i], order[(i + 1) % k]) for i in range(k))


@dataclass(frozen=True)
class PlantedInstance:
    """A graph guaranteed Hamiltonian by construction, plus the inserted cycle."""

    graph: DirectedGraph
    planted_cycle: tuple[int, ...]

    def __post_init__(self):
        if len(self.planted_cycle) != self.graph.n:
            raise ValueError("planted cycle must visit every node exactly once")
        if sorted(self.planted_cycle) != list(range(1, self.graph.n + 1)):
            raise ValueError("planted cycle is not a permutation of 1..n")
        missing = set(cycle_arcs(self.planted_cycle)) - self.graph.arcs
        if missing:
            raise ValueError(f"planted cycle arcs missing from graph: {sorted(missing)}")


def complete_graph(n: int) -> DirectedGraph:
    """K_n with all n(n-1) ordered arcs."""
    return DirectedGraph(n, frozenset((i, j) for i in range(1, n + 1)
                                      for j in range(1, n + 1) if i != j))


def _check_gen_args(n: int, p: float):
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"arc probability must lie in [0, 1], got {p}")


def gen_binomial(n: int, p: float, seed: int) -> DirectedGraph:
    """Directed binomial random graph: each ordered pair kept independently with probability p.

    Identical (n, p, seed) always yields an identical graph; see the module
    docstring for the draw order.
    """
    _check_gen_args(n, p)
    rng = np.random.default_rng(seed)
    u = rng.random(n * (n - 1))
    arcs = set()
    k = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            if u[k] < p:
                arcs.add((i, j))
            k += 1
    return DirectedGraph(n, frozenset(arcs))


def gen_hamiltonian_binomial(n: int, p: float, seed: int) -> PlantedInstance:
    """Binomial random graph augmented with one uniformly random planted cycle.

    The cycle fixes node 1 in first position; its remaining order is a uniform
    permutation of [2..n].  Cycle arcs absent from the binomial draw are added.
    """
    _check_gen_args(n, p)
    rng = np.random.default_rng(seed)
    u = rng.random(n * (n - 1))
    arcs = set()
    k = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            if u[k] < p:
                arcs.add((i, j))
            k += 1
    rest = list(range(2, n + 1))
    for k in range(len(rest) - 1, 0, -1):
        r = int(rng.integers(0, k + 1))
        rest[k], rest[r] = rest[r], rest[k]
    order = (1, *rest)
    arcs.update(cycle_arcs(order))
    return PlantedInstance(DirectedGraph(n, frozenset(arcs)), order)


def read_edge_list(path: str | Path) -> DirectedGraph:
    """Parse an edge-list file (format in the module docstring)."""
    n = None
    arcs = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 1:
                    raise EdgeListParseError("expected a single node count", lineno)
                try:
                    n = int(parts[0])
                except ValueError:
                    raise EdgeListParseError(f"bad node count {parts[0]!r}", lineno) from None
                if n < 1:
                    raise EdgeListParseError(f"node count must be positive, got {n}", lineno)
                continue
            if len(parts) != 2:
                raise EdgeListParseError(f"expected 'i j', got {line!r}", lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(f"non-integer endpoint in {line!r}", lineno) from None
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise EdgeListParseError(f"arc ({i},{j}) invalid for n={n}", lineno)
            arcs.add((i, j))
    if n is None:
        raise EdgeListParseError("empty file: missing node count", 1)
    return DirectedGraph(n, frozenset(arcs))


def write_edge_list(g: DirectedGraph, path: str | Path, header: str | None = None):
    """Write the graph in canonical form: node count, then sorted arcs."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{g.n}\n")
        for (i, j) in g.sorted_arcs:
            fh.write(f"{i} {j}\n")
