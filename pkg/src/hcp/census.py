"""Exhaustive feasible-basis census and its closed-form / sampled counterparts.

`enumerate_feasible_bases` walks every (n+1)-subset of the arc set in
lexicographic order (deterministic, shardable), classifies each subset
structurally, and - by default - cross-checks the verdict against the
exact linear-algebra feasibility test, raising on any disagreement.
`closed_form_counts` evaluates the per-type subgraph counts for the
complete graph; `expected_counts` turns them into expectations for the
binomial random graph (count times p^(n+1)); `monte_carlo_census`
validates those expectations by seeded sampling; `ratio_bounds`
evaluates the asymptotic share bounds implied by the type-4 floor.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .basis import exact_feasibility
from .graph import DirectedGraph, gen_binomial
from .polytope import ExactRational, build_h
from .structure import OracleDisagreementError, classify_arc_set

DEFAULT_BUDGET = 10_000_000

TYPE_KEYS = ("type0", "type1", "type2", "type3", "type4")


class BudgetExceededError(RuntimeError):
    """The subset count exceeds the configured enumeration budget."""


@dataclass
class CensusReport:
    """Tallies of one exhaustive enumeration.

    counts: feasible subsets per type label; they sum to feasible_total.
    infeasible: infeasible subsets keyed by failed condition.
    closed_form: complete-graph reference counts f_k(n) (n >= 4).
    expected: closed-form counts scaled by p^(n+1) when p was supplied.
    ratios: share bounds from `ratio_bounds` (n >= 5).
    """

    n: int
    beta: Fraction
    arc_count: int
    subsets_total: int
    feasible_total: int
    counts: dict[str, int]
    infeasible: dict[str, int]
    closed_form: dict[str, int] | None = None
    expected: dict[str, float] | None = None
    ratios: dict[str, float] | None = None
    shard: tuple[int, int] | None = None
    cross_checked: bool = True

    def to_json_dict(self) -> dict:
        d = {
            "n": self.n,
            "beta": f"{self.beta.numerator}/{self.beta.denominator}",
            "arc_count": self.arc_count,
            "subsets_total": self.subsets_total,
            "feasible_total": self.feasible_total,
            "counts": dict(self.counts),
            "infeasible": dict(self.infeasible),
            "cross_checked": self.cross_checked,
        }
        if self.closed_form is not None:
            d["closed_form"] = dict(self.closed_form)
        if self.expected is not None:
            d["expected"] = dict(self.expected)
        if self.ratios is not None:
            d["ratios"] = dict(self.ratios)
        if self.shard is not None:
            d["shard"] = list(self.shard)
        return d

    def text_table(self) -> str:
        rows = [f"census: n={self.n} beta={self.beta} arcs={self.arc_count} "
                f"subsets={self.subsets_total} feasible={self.feasible_total}"]
        header = f"{'type':<8}{'count':>12}"
        if self.closed_form:
            header += f"{'closed form':>16}"
        if self.expected:
            header += f"{'expected':>14}"
        rows.append(header)
        for k in TYPE_KEYS:
            line = f"{k:<8}{self.counts.get(k, 0):>12}"
            if self.closed_form:
                ref = self.closed_form.get(k, self.closed_form.get("type4_lower") if k == "type4" else None)
                mark = ">=" if k == "type4" else "  "
                line += f"{'' if ref is None else f'{mark}{ref}':>16}"
            if self.expected:
                exp = self.expected.get(k, self.expected.get("type4_lower") if k == "type4" else None)
                line += f"{'' if exp is None else f'{exp:.4g}':>14}"
            rows.append(line)
        if self.infeasible:
            rows.append("infeasible: " + ", ".join(f"{k}={v}" for k, v in sorted(self.infeasible.items())))
        return "\n".join(rows)


def closed_form_counts(n: int) -> dict[str, int]:
    """Per-type counts of basis subgraphs of the complete graph, plus a type-4 floor.

    Exact integers: type0 = (n-2) n!, type1 = (n-3) n!/2,
    type2 = (n-4)(n-3)(n+1)(n-1)!/6, type3 = (n-2)(n-1) n!/6,
    type4_lower = (n-1)(n-2)(n-3)^(n-5) 2^(n-4).  Defined for n >= 4
    (type2 vanishes there through the n-4 factor).
    """
    if n < 4:
        raise ValueError(f"closed forms need n >= 4, got {n}")
    fact_n = math.factorial(n)
    fact_n1 = math.factorial(n - 1)
    f0 = (n - 2) * fact_n
    f1 = (n - 3) * fact_n // 2
    f2 = (n - 4) * (n - 3) * (n + 1) * fact_n1 // 6
    f3 = (n - 2) * (n - 1) * fact_n // 6
    f4l = (n - 1) * (n - 2) * Fraction(n - 3) ** (n - 5) * 2 ** (n - 4)
    assert f4l.denominator == 1
    return {"type0": f0, "type1": f1, "type2": f2, "type3": f3,
            "type4_lower": int(f4l)}


def expected_counts(n: int, p: float) -> dict[str, float]:
    """Closed-form counts scaled by p^(n+1): expected per-type counts at density p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    cf = closed_form_counts(n)
    scale = p ** (n + 1)
    return {k: v * scale for k, v in cf.items()}


def ratio_bounds(n: int) -> dict[str, float]:
    """Share bounds implied by the type-4 floor, for large n.

    type4_share_lower = 1 - n^(11/2) / (e^n 2^(n-9));
    hamiltonian_share_upper = n^(9/2) / (e^(n-1) 2^(n-9)).
    Also returns the shares computed from the closed forms with the
    type-4 floor standing in for the unknown exact type-4 count (a valid
    lower/upper bound respectively).
    """
    if n < 5:
        raise ValueError(f"ratio bounds need n >= 5, got {n}")
    t4 = 1.0 - n ** 5.5 / (math.exp(n) * 2.0 ** (n - 9))
    ham = n ** 4.5 / (math.exp(n - 1) * 2.0 ** (n - 9))
    cf = closed_form_counts(n)
    denom = cf["type0"] + cf["type1"] + cf["type2"] + cf["type3"] + cf["type4_lower"]
    return {
        "type4_share_lower": t4,
        "hamiltonian_share_upper": ham,
        "type4_share_formula": cf["type4_lower"] / denom,
        "hamiltonian_share_formula": cf["type0"] / denom,
    }


def enumerate_feasible_bases(g: DirectedGraph, beta, *, budget: int = DEFAULT_BUDGET,
                             cross_check: bool = True, p: float | None = None,
                             shard: tuple[int, int] | None = None) -> CensusReport:
    """Classify every (n+1)-subset of g's arcs; exact arithmetic throughout.

    beta must be a ratio of integers.  With `shard` = (index, count) only
    subsets whose lexicographic rank is congruent to index mod count are
    examined; shard reports merge with `merge_reports`.  Raises
    BudgetExceededError when C(|E|, n+1) exceeds `budget`, and
    OracleDisagreementError if cross-checking ever contradicts the
    structural classification.
    """
    n = g.n
    k = n + 1
    arcs = g.sorted_arcs
    total = math.comb(len(arcs), k) if len(arcs) >= k else 0
    if total > budget:
        raise BudgetExceededError(
            f"C({len(arcs)}, {k}) = {total} exceeds the budget of {budget}")
    if shard is not None:
        idx, cnt = shard
        if not (cnt >= 1 and 0 <= idx < cnt):
            raise ValueError(f"bad shard {shard}")
    sys_ = build_h(g, beta, ExactRational()) if total else None
    counts: Counter[str] = Counter()
    infeasible: Counter[str] = Counter()
    examined = 0
    for rank, combo in enumerate(itertools.combinations(range(len(arcs)), k)):
        if shard is not None and rank % shard[1] != shard[0]:
            continue
        examined += 1
        subset = tuple(arcs[c] for c in combo)
        res = classify_arc_set(n, subset)
        if cross_check:
            nonsing, feas = exact_feasibility(sys_, combo)
            if (nonsing and feas) != res.feasible:
                raise OracleDisagreementError(
                    f"structural={res.label}({res.reason}) but linear algebra says "
                    f"nonsingular={nonsing} feasible={feas} for {subset}")
        if res.feasible:
            counts[res.label] += 1
        else:
            infeasible[res.reason] += 1
    beta_frac = Fraction(beta)
    report = CensusReport(
        n=n, beta=beta_frac, arc_count=len(arcs),
        subsets_total=total if shard is None else examined,
        feasible_total=sum(counts.values()),
        counts=dict(counts), infeasible=dict(infeasible),
        closed_form=closed_form_counts(n) if n >= 4 else None,
        expected=expected_counts(n, p) if (p is not None and n >= 4) else None,
        ratios=ratio_bounds(n) if n >= 5 else None,
        shard=shard, cross_checked=cross_check)
    return report


def merge_reports(reports: list[CensusReport]) -> CensusReport:
    """Combine shard reports produced over the same graph and beta."""
    if not reports:
        raise ValueError("nothing to merge")
    first = reports[0]
    counts: Counter[str] = Counter()
    infeasible: Counter[str] = Counter()
    subsets = 0
    for r in reports:
        if (r.n, r.beta, r.arc_count) != (first.n, first.beta, first.arc_count):
            raise ValueError("reports cover different enumerations")
        counts.update(r.counts)
        infeasible.update(r.infeasible)
        subsets += r.subsets_total
    return CensusReport(
        n=first.n, beta=first.beta, arc_count=first.arc_count,
        subsets_total=subsets, feasible_total=sum(counts.values()),
        counts=dict(counts), infeasible=dict(infeasible),
        closed_form=first.closed_form, expected=first.expected,
        ratios=first.ratios, shard=None,
        cross_checked=all(r.cross_checked for r in reports))


@dataclass
class MonteCarloCensus:
    """Sampled per-type feasible-basis counts over independent graph draws."""

    n: int
    p: float
    beta: Fraction
    trials: int
    seed: int
    means: dict[str, float]
    std_errors: dict[str, float]
    expected: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p,
            "beta": f"{self.beta.numerator}/{self.beta.denominator}",
            "trials": self.trials, "seed": self.seed,
            "means": self.means, "std_errors": self.std_errors,
            "expected": self.expected,
        }


def monte_carlo_census(n: int, p: float, trials: int, beta, seed: int, *,
                       budget: int = DEFAULT_BUDGET,
                       cross_check: bool = True) -> MonteCarloCensus:
    """Sample mean and standard error of per-type counts over seeded graph draws.

    Trial t uses the PCG64 stream seeded by SeedSequence(seed, spawn_key=(t,)).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    samples = {k: np.zeros(trials) for k in TYPE_KEYS}
    for t in range(trials):
        g = gen_binomial(n, p, np.random.SeedSequence(entropy=seed, spawn_key=(t,)))
        rep = enumerate_feasible_bases(g, beta, budget=budget, cross_check=cross_check)
        for k in TYPE_KEYS:
            samples[k][t] = rep.counts.get(k, 0)
    means = {k: float(v.mean()) for k, v in samples.items()}
    if trials > 1:
        ses = {k: float(v.std(ddof=1) / math.sqrt(trials)) for k, v in samples.items()}
    else:
        ses = {k: float("nan") for k in TYPE_KEYS}
    return MonteCarloCensus(n=n, p=p, beta=Fraction(beta), trials=trials, seed=seed,
                            means=means, std_errors=ses,
                            expected=expected_counts(n, p) if n >= 4 else {})
