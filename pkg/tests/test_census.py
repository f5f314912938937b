from fractions import Fraction

import pytest

from hcp.census import (BudgetExceededError, closed_form_counts,
                        enumerate_feasible_bases, expected_counts, merge_reports,
                        monte_carlo_census, ratio_bounds)
from hcp.graph import DirectedGraph, complete_graph, cycle_arcs, gen_binomial

HALF = Fraction(1, 2)
NINE_TENTHS = Fraction(9, 10)


def test_closed_forms_small_n():
    assert closed_form_counts(5) == {"type0": 360, "type1": 120, "type2": 48,
                                     "type3": 240, "type4_lower": 6 * 4}
    cf4 = closed_form_counts(4)
    assert cf4["type2"] == 0
    assert cf4 == {"type0": 48, "type1": 12, "type2": 0, "type3": 24, "type4_lower": 6}
    assert closed_form_counts(7)["type4_lower"] == 3840
    with pytest.raises(ValueError):
        closed_form_counts(3)


def test_census_k4_matches_closed_forms(k4):
    rep = enumerate_feasible_bases(k4, NINE_TENTHS)
    assert rep.subsets_total == 792
    for k in ("type0", "type1", "type2", "type3"):
        assert rep.counts.get(k, 0) == rep.closed_form[k]
    assert rep.counts["type4"] >= rep.closed_form["type4_lower"]
    assert sum(rep.counts.values()) == rep.feasible_total
    assert rep.feasible_total + sum(rep.infeasible.values()) == 792
    assert rep.cross_checked


def test_census_empty_when_too_few_arcs():
    g = DirectedGraph(5, frozenset(cycle_arcs((1, 2, 3, 4, 5))))
    rep = enumerate_feasible_bases(g, HALF)
    assert rep.subsets_total == 0 and rep.counts == {} and rep.feasible_total == 0


def test_census_beta_independence(k4, k5):
    for g in (k4, k5):
        a = enumerate_feasible_bases(g, HALF)
        b = enumerate_feasible_bases(g, NINE_TENTHS)
        assert a.counts == b.counts
        assert a.infeasible == b.infeasible


def test_census_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_feasible_bases(complete_graph(5), HALF, budget=100)


def test_census_requires_exact_beta(k4):
    with pytest.raises(TypeError):
        enumerate_feasible_bases(k4, 0.9)


def test_census_shards_merge(k4):
    whole = enumerate_feasible_bases(k4, NINE_TENTHS)
    parts = [enumerate_feasible_bases(k4, NINE_TENTHS, shard=(i, 3)) for i in range(3)]
    merged = merge_reports(parts)
    assert merged.counts == whole.counts
    assert merged.infeasible == whole.infeasible
    assert merged.subsets_total == whole.subsets_total


def test_expected_counts_endpoints():
    cf = closed_form_counts(6)
    at1 = expected_counts(6, 1.0)
    assert all(at1[k] == cf[k] for k in cf)
    at0 = expected_counts(6, 0.0)
    assert all(v == 0 for v in at0.values())
    with pytest.raises(ValueError):
        expected_counts(6, 1.2)


def test_expected_share_independent_of_p():
    def share(p):
        e = expected_counts(7, p)
        total = e["type0"] + e["type1"] + e["type2"] + e["type3"] + e["type4_lower"]
        return e["type0"] / total

    assert share(0.3) == pytest.approx(share(0.9), rel=1e-12)


def test_monte_carlo_p_one_has_zero_variance():
    mc = monte_carlo_census(4, 1.0, 3, NINE_TENTHS, seed=0)
    rep = enumerate_feasible_bases(complete_graph(4), NINE_TENTHS)
    for k in ("type0", "type1", "type2", "type3", "type4"):
        assert mc.means[k] == rep.counts.get(k, 0)
        assert mc.std_errors[k] == 0.0


def test_monte_carlo_deterministic_and_sane():
    a = monte_carlo_census(4, 0.6, 40, HALF, seed=7)
    b = monte_carlo_census(4, 0.6, 40, HALF, seed=7)
    assert a.means == b.means and a.std_errors == b.std_errors
    assert all(v >= 0 for v in a.means.values())
    assert a.expected["type0"] == 48 * 0.6 ** 5


def test_ratio_bounds_values():
    rb = ratio_bounds(30)
    assert 0.0 < rb["type4_share_lower"] < 1.0
    assert 0.0 < rb["hamiltonian_share_upper"] < 1.0
    assert 0.0 < rb["hamiltonian_share_formula"] < 1.0
    assert 0.0 < rb["type4_share_formula"] < 1.0
    with pytest.raises(ValueError):
        ratio_bounds(4)


def test_ratio_bound_decreasing_in_range():
    vals = [ratio_bounds(n)["hamiltonian_share_upper"] for n in range(20, 71)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_report_text_table(k4):
    rep = enumerate_feasible_bases(k4, NINE_TENTHS, p=0.5)
    text = rep.text_table()
    assert "type0" in text and "48" in text
    doc = rep.to_json_dict()
    assert doc["beta"] == "9/10"
    assert doc["counts"]["type0"] == 48


def test_random_graph_census_consistency():
    # non-complete graphs: feasible partition + cross-check hold as well
    for seed in (0, 1):
        g = gen_binomial(5, 0.7, seed)
        if g.num_arcs < 6:
            continue
        rep = enumerate_feasible_bases(g, HALF)
        assert rep.feasible_total == sum(rep.counts.values())
        assert rep.subsets_total == rep.feasible_total + sum(rep.infeasible.values())
