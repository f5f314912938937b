import numpy as np
import pytest

from hcp.basis import is_feasible_basis
from hcp.graph import DirectedGraph, complete_graph, gen_hamiltonian_binomial
from hcp.polytope import build_h, build_wh, wedge_beta_threshold
from hcp.structure import classify_arc_set, contains_hamiltonian_cycle
from hcp.walk import WalkConfig, WalkResult, walk_count_visits, walk_until_target


@pytest.fixture(scope="module")
def tour_only_graph():
    # only one basis exists (all four arcs), and it contains the tour
    return DirectedGraph(3, frozenset({(1, 2), (2, 3), (3, 1), (2, 1)}))


def test_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(max_step=-1)
    with pytest.raises(ValueError):
        WalkConfig(max_step=5, target="nope")


def test_target_kind_mismatch(tour_only_graph):
    h = build_h(tour_only_graph, 0.9)
    wh = build_wh(tour_only_graph, 0.9)
    with pytest.raises(ValueError):
        walk_until_target(h, tour_only_graph, WalkConfig(max_step=1, target="quasi_hamiltonian"))
    with pytest.raises(ValueError):
        walk_until_target(wh, tour_only_graph, WalkConfig(max_step=1, target="hamiltonian"))


def test_found_at_step_zero(tour_only_graph):
    sys_ = build_h(tour_only_graph, 0.9)
    res = walk_until_target(sys_, tour_only_graph,
                            WalkConfig(max_step=10, target="hamiltonian"))
    assert res.found and res.steps == 0
    assert res.cycle == (1, 2, 3)
    assert res.outcome == ("found", 0)


def test_count_visits_zero_steps(tour_only_graph):
    sys_ = build_h(tour_only_graph, 0.9)
    res = walk_count_visits(sys_, tour_only_graph,
                            WalkConfig(max_step=0, target="hamiltonian"))
    assert res.visit_counter == 0 and res.outcome == ("completed", 0)


def test_count_visits_isolated_basis(tour_only_graph):
    sys_ = build_h(tour_only_graph, 0.9)
    res = walk_count_visits(sys_, tour_only_graph,
                            WalkConfig(max_step=3, target="hamiltonian"))
    assert not res.found and res.fail_reason == "isolated"


def test_fail_at_max_step(fig_nonham):
    # non-Hamiltonian graph: tour target can never be reached
    assert not contains_hamiltonian_cycle(5, fig_nonham.arcs)
    sys_ = build_h(fig_nonham, 0.9)
    res = walk_until_target(sys_, fig_nonham, WalkConfig(max_step=25, target="hamiltonian"))
    assert not res.found and res.fail_reason == "max_step"


def test_walk_reproducible_and_moves_are_single_swaps():
    inst = gen_hamiltonian_binomial(8, 0.3, 41)
    sys_ = build_wh(inst.graph, 0.999)
    trails = []
    for _ in range(2):
        seen = []
        res = walk_until_target(sys_, inst.graph,
                                WalkConfig(max_step=400, seed=9),
                                on_visit=lambda s, cols, x: seen.append(cols))
        trails.append((res.outcome, tuple(seen)))
    assert trails[0] == trails[1]
    outcome, seen = trails[0]
    for a, b in zip(seen, seen[1:]):
        assert len(set(a) ^ set(b)) == 2
    for cols in seen[:10]:
        assert is_feasible_basis(sys_, cols)


def test_wh_walk_finds_quasi_hamiltonian():
    inst = gen_hamiltonian_binomial(8, 0.3, 4)
    sys_ = build_wh(inst.graph, 0.999)
    res = walk_until_target(sys_, inst.graph, WalkConfig(max_step=2000, seed=0))
    assert res.found
    cyc = res.cycle
    assert cyc[0] == cyc[-1] == 1 and sorted(cyc[:-1]) == list(range(1, 9))
    arcs = set(zip(cyc, cyc[1:]))
    assert arcs <= inst.graph.arcs


def test_walk_seed_changes_trajectory():
    inst = gen_hamiltonian_binomial(9, 0.3, 14)
    sys_ = build_wh(inst.graph, 0.999)
    r1 = walk_until_target(sys_, inst.graph, WalkConfig(max_step=300, seed=1))
    r2 = walk_until_target(sys_, inst.graph, WalkConfig(max_step=300, seed=2))
    assert (r1.steps, r1.basis_columns) != (r2.steps, r2.basis_columns)


def test_record_types_histogram():
    inst = gen_hamiltonian_binomial(8, 0.35, 6)
    sys_ = build_h(inst.graph, 0.999)
    cfg = WalkConfig(max_step=150, seed=5, target="hamiltonian", record_types=True)
    res = walk_count_visits(sys_, inst.graph, cfg)
    assert res.type_histogram
    allowed = {"type0", "type1", "type2", "type3", "type4"}
    assert set(res.type_histogram) <= allowed
    assert sum(res.type_histogram.values()) == 150
    assert res.visit_counter == res.type_histogram.get("type0", 0)


def test_visited_h_feasible_projections_above_threshold_are_type0_or_1():
    # wedge-system walk above the threshold: any visited basis whose arc
    # columns form a feasible flow basis must classify as type0 or type1
    inst = gen_hamiltonian_binomial(7, 0.4, 19)
    beta = 0.999
    assert beta > wedge_beta_threshold(7)
    wh = build_wh(inst.graph, beta)
    h = build_h(inst.graph, beta)
    n = inst.graph.n
    seen_types = []

    def check(step, cols, x):
        arcs = [wh.arc_of(c) for c in cols]
        arcs = [a for a in arcs if a is not None]
        if len(arcs) != n + 1:
            return
        hcols = [h.col_index(a) for a in arcs]
        if not is_feasible_basis(h, hcols):
            return
        label = classify_arc_set(n, arcs).label
        seen_types.append(label)
        assert label in ("type0", "type1"), (step, arcs, label)

    walk_count_visits(wh, inst.graph, WalkConfig(max_step=400, seed=8), on_visit=check)


def test_walk_result_outcome_shapes():
    r = WalkResult(True, 4, (1, 2), (1, 2, 1), None, 0, 10, 0)
    assert r.outcome == ("found", 4)
    r = WalkResult(False, None, (1, 2), None, "isolated", 0, 10, 0)
    assert r.outcome == ("fail", "isolated")
