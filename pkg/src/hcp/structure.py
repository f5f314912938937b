"""Structural analysis of arc sets and basic solutions.

The feasibility and the taxonomy of (n+1)-arc bases of the flow system are
decided here by pure graph structure, independently of any linear algebra:

  * a basis containing a full directed tour of 1..n is "type0";
  * otherwise the arc set must split into connected components where the
    node-1 component carries one arc more than its node count and every
    other component exactly as many arcs as nodes, no other component's
    unique cycle may be balanced (equally many forward and backward arcs
    under any traversal), and the 2-core of the node-1 component must be a
    cycle through node 1 shorter than n together with a path that leaves
    it and re-enters itself ("short cycle plus noose path");
  * feasible non-tour bases are typed 1-4 by the shape of the support of
    their basic solution: disjoint secondary cycle attached by a single
    arc (type1) or by a longer path (type2), secondary cycle sharing nodes
    with the first (type3), or a support leaving some node untouched
    (type4).

`classify_basis` can cross-check the structural verdict against the
direct nonsingularity + nonnegativity test from `hcp.basis`; any
disagreement raises OracleDisagreementError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import basis as basis_mod
from .graph import DirectedGraph
from .polytope import PolytopeSystem

LABELS = ("type0", "type1", "type2", "type3", "type4")

QUASI_TIE_TOL = 1e-7
_TRACE_BUDGET = 1_000_000


class OracleDisagreementError(RuntimeError):
    """Structural verdict contradicted the linear-algebra feasibility check."""


@dataclass(frozen=True)
class SupportGraph:
    """Subgraph given by an arc subset of a graph on nodes 1..n."""

    n: int
    arcs: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    @property
    def touched_nodes(self) -> frozenset[int]:
        return frozenset(v for a in self.arcs for v in a)

    def degree(self, v: int) -> int:
        return sum((i == v) + (j == v) for (i, j) in self.arcs)


@dataclass(frozen=True)
class OrientedWalk:
    """An undirected path or cycle with a realized arc per edge.

    ``nodes`` lists v_0..v_k (a cycle iff v_k == v_0); edge t joins
    v_{t-1} and v_t and is realized by the arc (v_{t-1}, v_t) when
    ``forward[t-1]`` is true, else by (v_t, v_{t-1}).
    """

    nodes: tuple[int, ...]
    forward: tuple[bool, ...]

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.forward) != len(self.nodes) - 1:
            raise ValueError("walk needs k+1 nodes and k orientation flags")

    @property
    def is_cycle(self) -> bool:
        return self.nodes[0] == self.nodes[-1]

    @property
    def through_node_1(self) -> bool:
        return 1 in self.nodes[:-1] if self.is_cycle else 1 in self.nodes

    def arcs(self) -> tuple[tuple[int, int], ...]:
        out = []
        for t, fwd in enumerate(self.forward):
            u, w = self.nodes[t], self.nodes[t + 1]
            out.append((u, w) if fwd else (w, u))
        return tuple(out)


def defect(w: OrientedWalk) -> int:
    """Forward minus backward arc count.

    Conventions: a single-arc path and the two-arc cycle {(u,w),(w,u)}
    count every arc as forward, giving defects 1 and 2.
    """
    arcs = w.arcs()
    if len(arcs) == 1 and not w.is_cycle:
        return 1
    if w.is_cycle and len(arcs) == 2 and arcs[0] == arcs[1][::-1]:
        return 2
    return sum(1 if f else -1 for f in w.forward)


def support(x: Sequence, sys_: PolytopeSystem) -> SupportGraph:
    """Arcs whose solution entry is nonzero (exact) or above tolerance (float)."""
    if len(x) not in (sys_.num_cols, sys_.num_arc_cols):
        raise ValueError(f"need one entry per column, got {len(x)}")
    arcs = []
    for c in range(sys_.num_arc_cols):
        d = sys_.col_map[c]
        v = x[c]
        keep = (v != 0) if sys_.is_exact else (float(v) > sys_.tolerance)
        if keep:
            arcs.append((d[1], d[2]))
    return SupportGraph(sys_.n, frozenset(arcs))


def two_core(sg: SupportGraph) -> SupportGraph:
    """Fixed point of deleting nodes of total degree <= 1 (a tree shrinks to nothing)."""
    arcs = set(sg.arcs)
    while True:
        deg: dict[int, int] = {}
        for (i, j) in arcs:
            deg[i] = deg.get(i, 0) + 1
            deg[j] = deg.get(j, 0) + 1
        drop = {v for v, d in deg.items() if d <= 1}
        if not drop:
            return SupportGraph(sg.n, frozenset(arcs))
        arcs = {(i, j) for (i, j) in arcs if i not in drop and j not in drop}


# ---------------------------------------------------------------------------
# cycles and balance
# ---------------------------------------------------------------------------

def _adjacency(arcs: Sequence[tuple[int, int]]):
    adj: dict[int, list[tuple[int, int, tuple[int, int]]]] = {}
    for eid, (i, j) in enumerate(arcs):
        adj.setdefault(i, []).append((eid, j, (i, j)))
        adj.setdefault(j, []).append((eid, i, (i, j)))
    for v in adj:
        adj[v].sort(key=lambda t: (t[1], t[0]))
    return adj


def _walk_from_cycle(nodes: list[int], arcs_used: list[tuple[int, int]]) -> OrientedWalk:
    flags = tuple(arc == (nodes[t], nodes[t + 1]) for t, arc in enumerate(arcs_used))
    return OrientedWalk(tuple(nodes), flags)


def simple_cycles(arcs: Iterable[tuple[int, int]]):
    """Yield every simple cycle of the underlying undirected multigraph once.

    Each cycle is an OrientedWalk whose orientation is induced by the arc
    directions.  Cycles are rooted at their smallest node; enumeration
    order is deterministic.  Intended for the small arc sets (at most a
    few dozen arcs) that basis analysis deals in.
    """
    arcs = sorted(set(arcs))
    adj = _adjacency(arcs)
    nodes_sorted = sorted(adj)
    for root in nodes_sorted:
        # paths start and end at root, all interior nodes > root
        stack = [(root, [root], [], set())]
        while stack:
            cur, path, used_arcs, used_ids = stack.pop()
            for (eid, other, arc) in reversed(adj.get(cur, [])):
                if eid in used_ids:
                    continue
                if other == root:
                    if len(path) >= 2:
                        first, last = path[1], path[-1]
                        canonical = (first < last) or (len(path) == 2 and
                                                       used_arcs[0] <= arc)
                        if canonical:
                            yield _walk_from_cycle(path + [root], used_arcs + [arc])
                    continue
                if other < root or other in path:
                    continue
                stack.append((other, path + [other], used_arcs + [arc],
                              used_ids | {eid}))


def find_balanced_cycle(arcs: Iterable[tuple[int, int]]) -> OrientedWalk | None:
    """Some simple cycle with defect zero, or None.

    Cycles through node 1 are eligible and can be recognized by the
    caller via ``walk.through_node_1``.
    """
    for cyc in simple_cycles(arcs):
        if defect(cyc) == 0:
            return cyc
    return None


def _unique_cycle(arcs: set[tuple[int, int]]) -> OrientedWalk:
    """The sole cycle of a connected arc set with #arcs == #nodes."""
    core = two_core(SupportGraph(0, frozenset(arcs))).arcs
    adj = _adjacency(sorted(core))
    start = min(adj)
    nodes = [start]
    arcs_used: list[tuple[int, int]] = []
    used: set[int] = set()
    cur = start
    while True:
        eid, other, arc = next(t for t in adj[cur] if t[0] not in used)
        used.add(eid)
        nodes.append(other)
        arcs_used.append(arc)
        cur = other
        if cur == start:
            break
    if len(used) != len(core):
        raise ValueError("arc set is not unicyclic")
    return _walk_from_cycle(nodes, arcs_used)


# ---------------------------------------------------------------------------
# tour containment and the short-cycle + noose-path shape
# ---------------------------------------------------------------------------

def _exact_tour(n: int, arcs: Sequence[tuple[int, int]]) -> tuple[int, ...] | None:
    succ: dict[int, int] = {}
    for (i, j) in arcs:
        if i in succ:
            return None
        succ[i] = j
    if len(succ) != n:
        return None
    order = [1]
    cur = 1
    for _ in range(n - 1):
        cur = succ.get(cur, 0)
        if cur in order or cur == 0:
            return None
        order.append(cur)
    return tuple(order) if succ.get(cur) == 1 else None


def hamiltonian_cycle_in(n: int, arcs: Iterable[tuple[int, int]]) -> tuple[int, ...] | None:
    """A full directed tour of 1..n inside the arc set, or None.

    Sets of exactly n or n+1 arcs are decided by direct checks; larger
    sets fall back to backtracking search (fine at desk scale).
    """
    arcs = sorted(set(arcs))
    if len(arcs) < n:
        return None
    if len(arcs) == n:
        return _exact_tour(n, arcs)
    if len(arcs) == n + 1:
        for k in range(n + 1):
            t = _exact_tour(n, arcs[:k] + arcs[k + 1:])
            if t is not None:
                return t
        return None
    out: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    indeg = {v: 0 for v in range(1, n + 1)}
    for (i, j) in arcs:
        out[i].append(j)
        indeg[j] += 1
    if any(not out[v] or not indeg[v] for v in range(1, n + 1)):
        return None

    path = [1]
    onpath = {1}

    def extend() -> bool:
        cur = path[-1]
        if len(path) == n:
            return 1 in out[cur]
        for j in out[cur]:
            if j not in onpath:
                path.append(j)
                onpath.add(j)
                if extend():
                    return True
                path.pop()
                onpath.discard(j)
        return False

    return tuple(path) if extend() else None


def contains_hamiltonian_cycle(n: int, arcs: Iterable[tuple[int, int]]) -> bool:
    return hamiltonian_cycle_in(n, arcs) is not None


@dataclass(frozen=True)
class _ShapeInfo:
    type_index: int            # 1, 2 or 3
    short_cycle: tuple[int, ...]
    nodes: frozenset[int]


def _decompose_short_noose(arcs: Iterable[tuple[int, int]], n_total: int) -> _ShapeInfo | None:
    """Decompose an arc set as short cycle through 1 plus self-re-entering path.

    Degree profile first (one out-degree-2 node s, one in-degree-2 node
    t != 1, all others exactly 1/1), then an explicit walk: prefix from
    node 1 to s, one branch of s closing the cycle back at 1 with fewer
    than n_total nodes, the other branch re-entering either the prefix
    (type 3) or itself (its first node: type 1, deeper: type 2).
    """
    arcs = list(set(arcs))
    if not arcs:
        return None
    out: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    nodes: set[int] = set()
    for (i, j) in arcs:
        nodes.add(i)
        nodes.add(j)
        out.setdefault(i, []).append(j)
        indeg[j] = indeg.get(j, 0) + 1
    if 1 not in nodes or len(arcs) != len(nodes) + 1:
        return None
    s = t = None
    for v in nodes:
        od = len(out.get(v, ()))
        if od == 2:
            if s is not None:
                return None
            s = v
        elif od != 1:
            return None
        ind = indeg.get(v, 0)
        if ind == 2:
            if t is not None:
                return None
            t = v
        elif ind != 1:
            return None
    if s is None or t is None or t == 1:
        return None

    prefix = [1]
    prefix_set = {1}
    cur = 1
    while cur != s:
        cur = out[cur][0]
        if cur in prefix_set:
            return None
        prefix.append(cur)
        prefix_set.add(cur)

    first_a, first_b = sorted(out[s])
    for first_short, first_noose in ((first_a, first_b), (first_b, first_a)):
        tail: list[int] = []
        tail_set: set[int] = set()
        cur = first_short
        ok = True
        while cur != 1:
            if cur in prefix_set or cur in tail_set:
                ok = False
                break
            tail.append(cur)
            tail_set.add(cur)
            cur = out[cur][0]
        if not ok:
            continue
        short_cycle = tuple(prefix + tail)
        if not 2 <= len(short_cycle) < n_total:
            continue
        branch: list[int] = []
        branch_set: set[int] = set()
        cur = first_noose
        type_index = None
        while True:
            if cur == 1 or cur in tail_set:
                break                       # second tour through 1 / bad re-entry
            if cur in prefix_set:           # re-enters the 1..s stretch
                type_index = 3 if cur == t else None
                break
            if cur in branch_set:
                if cur == t:
                    type_index = 1 if cur == branch[0] else 2
                break
            branch.append(cur)
            branch_set.add(cur)
            cur = out[cur][0]
        if type_index is None:
            continue
        if prefix_set | tail_set | branch_set != nodes:
            continue
        return _ShapeInfo(type_index, short_cycle, frozenset(nodes))
    return None


def is_short_cycle_plus_noose_path(g2core: SupportGraph, n_total: int) -> bool:
    """True iff the 2-core decomposes as short cycle through node 1 plus noose path."""
    return _decompose_short_noose(g2core.arcs, n_total) is not None


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisClass:
    """Outcome of classifying one basis.

    label: "type0".."type4" for feasible bases, "infeasible", or
        "wedge-other" for wedge-system bases outside the flow taxonomy.
    reason: which condition failed when infeasible ("component-count",
        "balanced-cycle", "two-core-shape", "B1-singular", "B2-negative").
    quasi_hamiltonian: argmax-trace verdict; None for plain flow systems.
    components: connected component count of the basis subgraph.
    two_core: 2-core of the node-1 component (the support of any feasible
        basic solution lives inside it).
    balanced_cycle: a witness when reason == "balanced-cycle".
    """

    label: str
    reason: str | None = None
    quasi_hamiltonian: bool | None = None
    components: int | None = None
    two_core: SupportGraph | None = None
    balanced_cycle: OrientedWalk | None = None

    @property
    def feasible(self) -> bool:
        return self.label != "infeasible"


def _components(n: int, arcs: Sequence[tuple[int, int]]):
    parent = list(range(n + 1))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for (i, j) in arcs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    comp_nodes: dict[int, list[int]] = {}
    for v in range(1, n + 1):
        comp_nodes.setdefault(find(v), []).append(v)
    comp_arcs: dict[int, list[tuple[int, int]]] = {r: [] for r in comp_nodes}
    for (i, j) in arcs:
        comp_arcs[find(i)].append((i, j))
    return comp_nodes, comp_arcs, find(1)


def classify_arc_set(n: int, arcs: Iterable[tuple[int, int]]) -> BasisClass:
    """Structural classification of an (n+1)-arc set, no linear algebra involved."""
    arcs = tuple(sorted(set(arcs)))
    if len(arcs) != n + 1:
        raise ValueError(f"need exactly n+1 = {n + 1} distinct arcs, got {len(arcs)}")
    comp_nodes, comp_arcs, root1 = _components(n, arcs)
    m = len(comp_nodes)
    core1 = two_core(SupportGraph(n, frozenset(comp_arcs[root1])))
    if hamiltonian_cycle_in(n, arcs) is not None:
        return BasisClass("type0", components=m, two_core=core1)
    for r, vs in comp_nodes.items():
        want = len(vs) + 1 if r == root1 else len(vs)
        if len(comp_arcs[r]) != want:
            return BasisClass("infeasible", reason="component-count",
                              components=m, two_core=core1)
    for r in comp_nodes:
        if r == root1:
            continue
        cyc = _unique_cycle(set(comp_arcs[r]))
        if defect(cyc) == 0:
            return BasisClass("infeasible", reason="balanced-cycle",
                              components=m, two_core=core1, balanced_cycle=cyc)
    shape = _decompose_short_noose(core1.arcs, n)
    if shape is None:
        return BasisClass("infeasible", reason="two-core-shape",
                          components=m, two_core=core1)
    if len(shape.nodes) == n:
        label = f"type{shape.type_index}"
    else:
        label = "type4"
    return BasisClass(label, components=m, two_core=core1)


def classify_basis(sys_: PolytopeSystem, g: DirectedGraph, columns: Iterable[int],
                   cross_check: bool | None = None) -> BasisClass:
    """Classify a basis column set of the given system.

    Flow systems are classified structurally from the arc set; when
    `cross_check` is enabled (default in exact mode) the verdict is
    compared against the direct nonsingular + nonnegative test and the
    support of the basic solution, raising OracleDisagreementError on any
    mismatch.  Wedge systems are classified from the basic solution: a
    basis whose arc columns contain a full tour is "type0", any other
    feasible basis is "wedge-other"; the quasi_hamiltonian flag is
    computed from the solution.
    """
    cols = basis_mod._check_columns(sys_, columns)
    arcs = [sys_.arc_of(c) for c in cols]
    arcs = [a for a in arcs if a is not None]
    if cross_check is None:
        cross_check = sys_.is_exact
    if sys_.kind == "H":
        result = classify_arc_set(sys_.n, arcs)
        if cross_check:
            _verify_against_solve(sys_, g, cols, result)
        return result
    return _classify_wedge(sys_, g, cols, arcs)


def _verify_against_solve(sys_: PolytopeSystem, g: DirectedGraph,
                          cols: tuple[int, ...], result: BasisClass):
    x = basis_mod.basic_solution(sys_, cols)
    if x is None:
        la_feasible = False
    elif sys_.is_exact:
        la_feasible = all(v >= 0 for v in x)
    else:
        la_feasible = bool(np.min(np.asarray(x)[list(cols)]) >= -sys_.tolerance)
    if la_feasible != result.feasible:
        raise OracleDisagreementError(
            f"structural verdict {result.label} ({result.reason}) vs linear-algebra "
            f"feasible={la_feasible} for columns {cols}")
    if la_feasible and result.label != "type0":
        sup = support(x, sys_)
        if sup.arcs != result.two_core.arcs:
            raise OracleDisagreementError(
                f"support {sorted(sup.arcs)} differs from node-1 two-core "
                f"{sorted(result.two_core.arcs)} for columns {cols}")


def _classify_wedge(sys_: PolytopeSystem, g: DirectedGraph,
                    cols: tuple[int, ...], arcs: list[tuple[int, int]]) -> BasisClass:
    x = basis_mod.basic_solution(sys_, cols)
    if x is None:
        return BasisClass("infeasible", reason="B1-singular")
    if sys_.is_exact:
        feasible = all(v >= 0 for v in x)
    else:
        feasible = bool(np.min(np.asarray(x)[list(cols)]) >= -sys_.tolerance)
    if not feasible:
        return BasisClass("infeasible", reason="B2-negative")
    comp_nodes, comp_arcs, root1 = _components(sys_.n, arcs)
    core1 = two_core(SupportGraph(sys_.n, frozenset(comp_arcs[root1])))
    label = "type0" if hamiltonian_cycle_in(sys_.n, arcs) else "wedge-other"
    quasi = is_quasi_hamiltonian(g, x, sys_)
    return BasisClass(label, quasi_hamiltonian=quasi,
                      components=len(comp_nodes), two_core=core1)


# ---------------------------------------------------------------------------
# quasi-Hamiltonian traces
# ---------------------------------------------------------------------------

def quasi_hamiltonian_cycle(g: DirectedGraph, x: Sequence, sys_: PolytopeSystem,
                            tie_tol: float = QUASI_TIE_TOL) -> tuple[int, ...] | None:
    """The tour traced by greedy argmax successors, if every such trace is one.

    From node 1 every successor attaining the maximum arc value (ties
    within `tie_tol` in float mode, exact ties in exact mode) is explored;
    the result is the first complete tour when all branches of length n
    return to node 1 having visited every node once, otherwise None.
    """
    vals = sys_.arc_values(x)
    n = g.n
    exact = sys_.is_exact

    def argmax(i: int) -> list[int] | None:
        outs = g.out_neighbors(i)
        if not outs:
            return None
        best = max(vals[(i, j)] for j in outs)
        if exact:
            return [j for j in outs if vals[(i, j)] == best]
        cut = float(best) - tie_tol
        return [j for j in outs if float(vals[(i, j)]) >= cut]

    found: list[tuple[int, ...]] = []
    budget = [_TRACE_BUDGET]

    def explore(path: list[int], onpath: set[int]) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("argmax trace exploration budget exceeded")
        cur = path[-1]
        cands = argmax(cur)
        if cands is None:
            return False
        for j in cands:
            if len(path) == n:
                if j != 1:
                    return False
                if not found:
                    found.append(tuple(path) + (1,))
                continue
            if j in onpath:
                return False
            path.append(j)
            onpath.add(j)
            ok = explore(path, onpath)
            path.pop()
            onpath.discard(j)
            if not ok:
                return False
        return True

    if not explore([1], {1}):
        return None
    return found[0] if found else None


def is_quasi_hamiltonian(g: DirectedGraph, x: Sequence, sys_: PolytopeSystem,
                         tie_tol: float = QUASI_TIE_TOL) -> bool:
    """True iff every argmax-successor trace from node 1 is a full tour."""
    return quasi_hamiltonian_cycle(g, x, sys_, tie_tol) is not None
