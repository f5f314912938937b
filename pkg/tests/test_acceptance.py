"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria (tolerances fixed here, nothing deferred):

  01  exhaustive census of the complete 4-graph at beta = 9/10: type 0..3
      counts exactly 48 / 12 / 0 / 24, type-4 count >= 6; < 10 s.
  02  exhaustive census of the complete 5-graph: 360 / 120 / 48 / 240; < 5 min.
  03  structural-vs-linear-algebra equivalence on every (n+1)-subset of 20
      seeded random graphs, n in {5,6,7}, p in {0.4,0.7}: zero disagreements
      (exact arithmetic).
  04  1000 random oriented cycles avoiding node 1: column dependence holds
      exactly when the cycle's defect is 0; zero counterexamples.
  05  complete 6-graph: every tour + extra arc (120 * 24 = 2880 bases) is
      feasible with values 1, b, ..., b^5 along the relabeled tour; every
      tour point has exactly |E| - n = 24 bases.
  06  sampled expectation at n=5, p=0.5, 2000 seeded trials: per-type means
      within 3 standard errors of f_k * 0.5^6; < 10 min.
  07  wedge filter at beta = 999/1000 (> threshold) on 10 planted graphs,
      n in {6,7}: every flow-feasible basis whose solution also satisfies
      the wedge bounds is type0 or type1 - zero type 2/3/4 survivors.
  08  walk benchmark, planted graphs with p = 3/n at beta = 0.999, wedge
      system, n in {10,20,30}, 10 seeded replicas each: >= 8/10 replicas
      find a quasi-Hamiltonian basis within 50x the reference step counts
      (6, 454, 1358); < 30 min total.
  09  flow-system walk (no wedge) on a planted 20-node graph, 100000 steps
      with type recording: zero tour bases found and >= 99% of visited
      bases of type 4.
  10  beta dependence on one planted 30-node graph, 30000-step wedge walks:
      fails for beta in {0.5, 0.7, 0.9} and succeeds for beta in
      {0.999, 0.9999}, each in >= 8/10 replicas.
  11  the printed 6-node wedge point is quasi-Hamiltonian with trace
      1 -> 2 -> 6 -> 3 -> 4 -> 5 -> 1.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from hcp.basis import basic_solution, exact_column_rank, exact_feasibility
from hcp.census import enumerate_feasible_bases, monte_carlo_census
from hcp.cli import _run_replicas, _walk_seed
from hcp.graph import complete_graph, cycle_arcs, gen_binomial, gen_hamiltonian_binomial
from hcp.polytope import ExactRational, build_h, build_wh, wedge_beta_threshold
from hcp.structure import classify_arc_set, defect, is_quasi_hamiltonian, \
    quasi_hamiltonian_cycle, simple_cycles
from hcp.walk import WalkConfig, walk_count_visits
from conftest import K6_QUASI_CYCLE, K6_QUASI_POINT

NINE_TENTHS = Fraction(9, 10)
THREADS = 2


def gate(num: int, ok: bool, detail: str):
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line, file=sys.__stdout__, flush=True)
    assert ok, line


def test_criterion_01_k4_census():
    t0 = time.monotonic()
    rep = enumerate_feasible_bases(complete_graph(4), NINE_TENTHS)
    dt = time.monotonic() - t0
    got = tuple(rep.counts.get(k, 0) for k in ("type0", "type1", "type2", "type3"))
    ok = (rep.subsets_total == 792 and got == (48, 12, 0, 24)
          and rep.counts.get("type4", 0) >= 6 and dt < 10.0)
    gate(1, ok, f"K4 census {got}, type4={rep.counts.get('type4', 0)}>=6, "
                f"792 subsets in {dt:.2f}s")


def test_criterion_02_k5_census():
    t0 = time.monotonic()
    rep = enumerate_feasible_bases(complete_graph(5), NINE_TENTHS)
    dt = time.monotonic() - t0
    got = tuple(rep.counts.get(k, 0) for k in ("type0", "type1", "type2", "type3"))
    ok = (rep.subsets_total == 38760 and got == (360, 120, 48, 240) and dt < 300.0)
    gate(2, ok, f"K5 census {got}, 38760 subsets in {dt:.1f}s")


def test_criterion_03_structural_oracle_equivalence():
    # 20 seeded graphs covering every (n, p) combination; enumeration
    # raises OracleDisagreementError on the first mismatch
    plan = ([(5, 0.4, s, NINE_TENTHS) for s in range(4)] +
            [(5, 0.7, s, NINE_TENTHS) for s in range(4, 8)] +
            [(6, 0.4, s, NINE_TENTHS) for s in range(8, 12)] +
            [(6, 0.7, s, Fraction(1, 2)) for s in range(12, 15)] +
            [(7, 0.4, s, Fraction(1, 2)) for s in range(15, 19)] +
            [(7, 0.7, 19, Fraction(1, 2))])
    assert len(plan) == 20
    t0 = time.monotonic()
    subsets = 0
    graphs = 0
    for (n, p, seed, beta) in plan:
        g = gen_binomial(n, p, seed)
        if g.num_arcs < n + 1:
            continue
        rep = enumerate_feasible_bases(g, beta, budget=50_000_000, cross_check=True)
        subsets += rep.subsets_total
        graphs += 1
    dt = time.monotonic() - t0
    gate(3, graphs == 20 and subsets > 1_000_000,
         f"{graphs} graphs, {subsets} subsets, 100% structural/linear-algebra "
         f"agreement in {dt:.0f}s")


def random_oriented_cycle_avoiding_1(rng: random.Random, n: int):
    k = rng.randint(2, n - 1)
    nodes = rng.sample(range(2, n + 1), k)
    while True:
        arcs = []
        for t in range(k):
            u, w = nodes[t], nodes[(t + 1) % k]
            arcs.append((u, w) if rng.random() < 0.5 else (w, u))
        if len(set(arcs)) == k:
            return arcs


def test_criterion_04_balance_dependence_equivalence():
    rng = random.Random(2024)
    systems = {n: build_h(complete_graph(n), NINE_TENTHS, ExactRational())
               for n in range(5, 10)}
    bad = 0
    balanced_seen = 0
    for _ in range(1000):
        n = rng.randint(5, 9)
        arcs = random_oriented_cycle_avoiding_1(rng, n)
        sys_ = systems[n]
        cols = [sys_.col_index(a) for a in arcs]
        dependent = exact_column_rank(sys_, cols) < len(cols)
        delta = defect(next(simple_cycles(arcs)))
        balanced_seen += delta == 0
        if dependent != (delta == 0):
            bad += 1
    gate(4, bad == 0,
         f"1000 oriented cycles, {balanced_seen} balanced, {bad} counterexamples")


def test_criterion_05_tour_bases_k6():
    g = complete_graph(6)
    sys_ = build_h(g, NINE_TENTHS, ExactRational())
    import itertools as it
    checked = 0
    for perm_rest in it.permutations(range(2, 7)):
        perm = (1, *perm_rest)
        tour = cycle_arcs(perm)
        tour_cols = [sys_.col_index(a) for a in tour]
        extras = [a for a in g.sorted_arcs if a not in set(tour)]
        assert len(extras) == g.num_arcs - 6 == 24
        bases = set()
        for extra in extras:
            cols = sorted(tour_cols + [sys_.col_index(extra)])
            x = basic_solution(sys_, cols)
            assert x is not None, (perm, extra)
            vals = sys_.arc_values(x)
            for k in range(6):
                assert vals[(perm[k], perm[(k + 1) % 6])] == NINE_TENTHS ** k, (perm, extra)
            assert vals[extra] == 0
            assert min(x) >= 0
            bases.add(tuple(cols))
        assert len(bases) == 24
        checked += len(bases)
    gate(5, checked == 120 * 24,
         f"{checked} tour bases on K6 all feasible with values 1, b, ..., b^5; "
         f"24 bases per tour point")


def test_criterion_06_monte_carlo_expectation():
    t0 = time.monotonic()
    mc = monte_carlo_census(5, 0.5, 2000, NINE_TENTHS, seed=0)
    dt = time.monotonic() - t0
    expected = {"type0": 360 * 0.5 ** 6, "type1": 120 * 0.5 ** 6,
                "type2": 48 * 0.5 ** 6, "type3": 240 * 0.5 ** 6}
    deviations = {}
    ok = dt < 600.0
    for k, exp in expected.items():
        se = mc.std_errors[k]
        dev = abs(mc.means[k] - exp)
        deviations[k] = f"{mc.means[k]:.3f} vs {exp:.4g} ({dev / se:.2f} se)"
        ok = ok and dev <= 3.0 * se
    gate(6, ok, f"2000 trials in {dt:.0f}s; " + "; ".join(
        f"{k} {v}" for k, v in deviations.items()))


def wedge_bounds_hold(g, vals, beta):
    n = g.n
    lo, hi = beta ** (n - 1), beta
    for i in range(2, n + 1):
        s = sum(vals[(i, j)] for j in g.out_neighbors(i))
        if not lo <= s <= hi:
            return False
    return True


def test_criterion_07_wedge_filter_above_threshold():
    beta = Fraction(999, 1000)
    plan = [(6, 0.5, s) for s in range(5)] + [(7, 0.35, s) for s in range(5, 10)]
    survivors = {"type0": 0, "type1": 0}
    offenders = 0
    feasible_total = 0
    for (n, p, seed) in plan:
        assert float(beta) > wedge_beta_threshold(n)
        g = gen_hamiltonian_binomial(n, p, seed).graph
        sys_ = build_h(g, beta, ExactRational())
        arcs = g.sorted_arcs
        for combo in itertools.combinations(range(len(arcs)), n + 1):
            nonsing, feas = exact_feasibility(sys_, combo)
            if not (nonsing and feas):
                continue
            feasible_total += 1
            x = basic_solution(sys_, combo)
            vals = sys_.arc_values(x)
            if not wedge_bounds_hold(g, vals, beta):
                continue
            label = classify_arc_set(n, [arcs[c] for c in combo]).label
            if label in survivors:
                survivors[label] += 1
            else:
                offenders += 1
    gate(7, offenders == 0 and survivors["type0"] > 0,
         f"10 graphs, {feasible_total} feasible bases, wedge survivors "
         f"type0={survivors['type0']} type1={survivors['type1']}, "
         f"type2/3/4 survivors={offenders}")


REFERENCE_STEPS = {10: 6, 20: 454, 30: 1358}


def test_criterion_08_walk_benchmark():
    t0 = time.monotonic()
    lines = []
    ok = True
    for row_idx, n in enumerate((10, 20, 30)):
        cap = 50 * REFERENCE_STEPS[n]
        tasks = [{
            "n": n, "p": 3.0 / n, "beta": 0.999, "wedge": True,
            "target": "quasi_hamiltonian", "max_steps": cap, "count": False,
            "seed_entropy": 1, "graph_key": (8, row_idx), "arcs": None,
            "walk_seed": _walk_seed(1, (8, row_idx, r)),
        } for r in range(10)]
        results = _run_replicas(tasks, THREADS)
        found = [r["steps"] for r in results if r["found"]]
        ok = ok and len(found) >= 8
        lines.append(f"n={n}: {len(found)}/10 within {cap} steps"
                     + (f", median {int(np.median(found))}" if found else ""))
    dt = time.monotonic() - t0
    ok = ok and dt < 1800.0
    gate(8, ok, "; ".join(lines) + f"; total {dt:.0f}s")


def test_criterion_09_flow_walk_finds_only_type4():
    inst = gen_hamiltonian_binomial(20, 3.0 / 20, 2)
    sys_ = build_h(inst.graph, 0.999)
    cfg = WalkConfig(max_step=100_000, seed=3, target="hamiltonian", record_types=True)
    res = walk_count_visits(sys_, inst.graph, cfg)
    hist = res.type_histogram
    total = sum(hist.values())
    share4 = hist.get("type4", 0) / total
    ok = res.visit_counter == 0 and share4 >= 0.99 and total == 100_000
    gate(9, ok, f"100000 visited bases, tour hits={res.visit_counter}, "
                f"type4 share={share4:.4%} (histogram {hist})")


def test_criterion_10_beta_dependence():
    n = 30
    arcs = [list(a) for a in
            gen_hamiltonian_binomial(n, 3.0 / n, 77).graph.sorted_arcs]
    lines = []
    ok = True
    for bi, (beta, want_found) in enumerate(
            [(0.5, False), (0.7, False), (0.9, False),
             (0.999, True), (0.9999, True)]):
        tasks = [{
            "n": n, "p": None, "beta": beta, "wedge": True,
            "target": "quasi_hamiltonian", "max_steps": 30_000, "count": False,
            "seed_entropy": 5, "graph_key": None, "arcs": arcs,
            "walk_seed": _walk_seed(5, (10, bi, r)),
        } for r in range(10)]
        results = _run_replicas(tasks, THREADS)
        n_found = sum(1 for r in results if r["found"])
        good = (n_found if want_found else 10 - n_found) >= 8
        ok = ok and good
        lines.append(f"beta={beta}: found {n_found}/10 "
                     f"(want {'success' if want_found else 'failure'})")
    gate(10, ok, "; ".join(lines))


def test_criterion_11_worked_quasi_point(k6):
    sys_ = build_wh(k6, 0.999)
    x = np.zeros(sys_.num_cols)
    for arc, v in K6_QUASI_POINT.items():
        x[sys_.col_index(arc)] = v
    cyc = quasi_hamiltonian_cycle(k6, x, sys_)
    ok = is_quasi_hamiltonian(k6, x, sys_) and cyc == K6_QUASI_CYCLE
    gate(11, ok, f"printed wedge point traces {'->'.join(map(str, cyc or ()))}")
