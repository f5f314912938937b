"""Uniform random walks on the feasible bases of a constraint system.

Both walks start from a phase-1 basis and move, at every step, to a
basis drawn uniformly at random from the full list of feasible
single-column exchanges of the current one (the list is enumerated, not
rejection-sampled).  `walk_until_target` stops as soon as the current
basis satisfies the target predicate - the initial basis counts, so a
hit at step 0 is possible - or gives up after max_step accepted moves.
`walk_count_visits` performs exactly max_step moves and counts how many
of the visited bases satisfy the target (the initial basis is not
counted; max_step = 0 therefore yields counter 0).

Targets: "hamiltonian" (flow systems; the basis arc set contains a full
tour) and "quasi_hamiltonian" (wedge systems; every argmax trace of the
basic solution is a tour).  With a fixed seed the whole trajectory is
reproducible bit for bit: SeedSequence(seed) spawns one child stream for
phase 1 and one for the uniform choices.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import basis as basis_mod
from .graph import DirectedGraph
from .polytope import PolytopeSystem
from .structure import classify_arc_set, hamiltonian_cycle_in, quasi_hamiltonian_cycle

TARGETS = ("hamiltonian", "quasi_hamiltonian")

# on_visit callback: (step, columns, full_solution) for every basis the
# walk occupies, the initial one included.
VisitHook = Callable[[int, tuple[int, ...], object], None]


@dataclass(frozen=True)
class WalkConfig:
    max_step: int
    seed: int = 0
    target: str = "quasi_hamiltonian"
    record_types: bool = False

    def __post_init__(self):
        if self.max_step < 0:
            raise ValueError(f"max_step must be >= 0, got {self.max_step}")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}, got {self.target!r}")


@dataclass(frozen=True)
class WalkResult:
    """Outcome of one walk.

    found/steps/basis_columns/cycle describe a successful target search;
    fail_reason is "max_step" or "isolated" otherwise (None for counting
    runs, which always complete).  visit_counter is the number of
    post-move bases satisfying the target in counting mode.
    """

    found: bool
    steps: int | None
    basis_columns: tuple[int, ...] | None
    cycle: tuple[int, ...] | None
    fail_reason: str | None
    visit_counter: int
    max_step: int
    seed: int
    type_histogram: dict[str, int] | None = field(default=None)

    @property
    def outcome(self) -> tuple:
        if self.found:
            return ("found", self.steps)
        return ("fail", self.fail_reason) if self.fail_reason else ("completed", self.max_step)


def _check_target(sys_: PolytopeSystem, cfg: WalkConfig):
    if cfg.target == "quasi_hamiltonian" and sys_.kind != "WH":
        raise ValueError("quasi_hamiltonian target needs a WH system")
    if cfg.target == "hamiltonian" and sys_.kind != "H":
        raise ValueError("hamiltonian target needs an H system")


def _target_cycle(sys_: PolytopeSystem, g: DirectedGraph, cols, x, target: str):
    if target == "hamiltonian":
        arcs = [sys_.arc_of(c) for c in cols]
        return hamiltonian_cycle_in(g.n, [a for a in arcs if a is not None])
    return quasi_hamiltonian_cycle(g, x, sys_)


def _visit_label(sys_: PolytopeSystem, g: DirectedGraph, cols) -> str:
    arcs = [a for a in (sys_.arc_of(c) for c in cols) if a is not None]
    if sys_.kind == "H":
        res = classify_arc_set(g.n, arcs)
        return res.label if res.feasible else f"infeasible:{res.reason}"
    return "type0" if hamiltonian_cycle_in(g.n, arcs) else "wedge-other"


def _start(sys_: PolytopeSystem, cfg: WalkConfig):
    ss = np.random.SeedSequence(cfg.seed)
    init_ss, walk_ss = ss.spawn(2)
    start = basis_mod.initial_feasible_basis(sys_, init_ss)
    return start.columns, np.random.default_rng(walk_ss)


def walk_until_target(sys_: PolytopeSystem, g: DirectedGraph, cfg: WalkConfig,
                      on_visit: VisitHook | None = None) -> WalkResult:
    """Walk until the target predicate holds; report the accepted-move count."""
    _check_target(sys_, cfg)
    cols, rng = _start(sys_, cfg)
    hist: Counter[str] | None = Counter() if cfg.record_types else None
    steps = 0
    while True:
        x, swaps = basis_mod.walk_state(sys_, cols)
        if on_visit is not None:
            on_visit(steps, cols, x)
        if hist is not None:
            hist[_visit_label(sys_, g, cols)] += 1
        cyc = _target_cycle(sys_, g, cols, x, cfg.target)
        if cyc is not None:
            return WalkResult(True, steps, cols, cyc, None, 0, cfg.max_step, cfg.seed,
                              dict(hist) if hist is not None else None)
        if steps >= cfg.max_step:
            return WalkResult(False, None, cols, None, "max_step", 0,
                              cfg.max_step, cfg.seed,
                              dict(hist) if hist is not None else None)
        if not swaps:
            return WalkResult(False, None, cols, None, "isolated", 0,
                              cfg.max_step, cfg.seed,
                              dict(hist) if hist is not None else None)
        mv = swaps[int(rng.integers(len(swaps)))]
        cols = mv.apply(cols)
        steps += 1


def walk_count_visits(sys_: PolytopeSystem, g: DirectedGraph, cfg: WalkConfig,
                      on_visit: VisitHook | None = None) -> WalkResult:
    """Make exactly max_step moves; count post-move bases hitting the target."""
    _check_target(sys_, cfg)
    cols, rng = _start(sys_, cfg)
    hist: Counter[str] | None = Counter() if cfg.record_types else None
    counter = 0
    x, swaps = basis_mod.walk_state(sys_, cols)
    if on_visit is not None:
        on_visit(0, cols, x)
    for step in range(1, cfg.max_step + 1):
        if not swaps:
            return WalkResult(False, None, cols, None, "isolated", counter,
                              cfg.max_step, cfg.seed,
                              dict(hist) if hist is not None else None)
        mv = swaps[int(rng.integers(len(swaps)))]
        cols = mv.apply(cols)
        x, swaps = basis_mod.walk_state(sys_, cols)
        if on_visit is not None:
            on_visit(step, cols, x)
        if hist is not None:
            hist[_visit_label(sys_, g, cols)] += 1
        if _target_cycle(sys_, g, cols, x, cfg.target) is not None:
            counter += 1
    return WalkResult(False, None, cols, None, None, counter, cfg.max_step, cfg.seed,
                      dict(hist) if hist is not None else None)
