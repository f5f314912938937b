"""Command-line surface: graph generation, system building, classification,
census, walks, beta sweeps, and the three benchmark tables.

Every randomized command echoes its seed into the output for replay.
Machine-readable JSON is always written to ``-o``; ``--format`` controls
what is printed on stdout.  beta is parsed as exact ("p/q", or any
decimal together with --exact) or as a float.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys as _sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import basis as basis_mod
from . import census as census_mod
from . import structure, walk as walk_mod
from .graph import (DirectedGraph, complete_graph, gen_binomial,
                    gen_hamiltonian_binomial, read_edge_list, write_edge_list)
from .polytope import ExactRational, FloatMode, PolytopeSystem, build_h, build_wh

TABLE_ROWS_N = (10, 20, 30, 40, 50, 60, 70)
TABLE2_BETAS = (0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.995, 0.999, 0.9995, 0.9999)
TABLE1_MAX_STEPS = 100_000
TABLE2_MAX_STEPS = 30_000
TABLE3_MAX_STEPS = 100_000


@dataclass
class ExperimentSpec:
    """Validated invocation: command name, per-command parameters, output, seed."""

    command: str
    params: dict
    output: str | None
    seed: int | None


def _json_default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, frozenset):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _emit(payload: dict, output: str | None, fmt: str, text: str | None = None):
    blob = json.dumps(payload, indent=2, default=_json_default, sort_keys=True)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    if fmt == "json" or text is None:
        print(blob)
    else:
        print(text)


def _parse_beta(text: str, exact_flag: bool):
    """Exact Fraction for 'p/q' or --exact; float otherwise."""
    if "/" in text or exact_flag:
        try:
            val = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"cannot parse beta {text!r} as a rational")
        mode = ExactRational()
    else:
        try:
            val = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse beta {text!r}")
        mode = FloatMode()
    if not 0 < val < 1:
        raise argparse.ArgumentTypeError(f"beta must lie strictly in (0, 1), got {text}")
    return val, mode


def _probability(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {text}")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcp",
                                 description="Feasible-basis census and random-walk "
                                             "search for Hamiltonian cycles")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker processes for replicated experiments")
    ap.add_argument("--format", choices=("json", "csv", "text"), default="text",
                    help="stdout rendering (JSON is always written to -o)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random graph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=_probability, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--plant", action="store_true",
                   help="insert a random tour to guarantee Hamiltonicity")
    g.add_argument("-o", "--output", required=True)

    b = sub.add_parser("build", help="assemble a constraint system")
    b.add_argument("--graph", required=True)
    b.add_argument("--beta", required=True)
    b.add_argument("--wedge", action="store_true")
    b.add_argument("--exact", action="store_true")
    b.add_argument("-o", "--output", required=True)

    c = sub.add_parser("classify", help="classify one basis of a built system")
    c.add_argument("--system", required=True)
    c.add_argument("--basis", required=True,
                   help="comma-separated columns: arc 'i j' or slack 's+i'/'s-i'")
    c.add_argument("-o", "--output")

    ce = sub.add_parser("census", help="exhaustive or sampled feasible-basis census")
    ce.add_argument("--n", type=int)
    ce.add_argument("--complete", action="store_true", help="use the complete graph on n nodes")
    ce.add_argument("--graph")
    ce.add_argument("--beta", required=True, help="exact rational p/q")
    ce.add_argument("--p", type=_probability)
    ce.add_argument("--trials", type=int)
    ce.add_argument("--seed", type=int, default=0)
    ce.add_argument("--budget", type=int, default=census_mod.DEFAULT_BUDGET)
    ce.add_argument("--no-cross-check", action="store_true")
    ce.add_argument("-o", "--output")

    w = sub.add_parser("walk", help="random walk on feasible bases")
    w.add_argument("--graph", required=True)
    w.add_argument("--beta", required=True)
    w.add_argument("--wedge", action="store_true")
    w.add_argument("--target", choices=("quasi", "ham"), required=True)
    w.add_argument("--max-steps", type=int, required=True)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--record-types", action="store_true")
    w.add_argument("--count-visits", action="store_true",
                   help="run exactly max-steps moves and count target visits")
    w.add_argument("-o", "--output")

    s = sub.add_parser("sweep-beta", help="walk the same graph over several betas")
    s.add_argument("--graph", required=True)
    s.add_argument("--betas", required=True, help="comma-separated list")
    s.add_argument("--max-steps", type=int, default=TABLE2_MAX_STEPS)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")

    t = sub.add_parser("tables", help="regenerate a benchmark table")
    t.add_argument("--which", type=int, choices=(1, 2, 3), required=True)
    t.add_argument("--replicas", type=int, default=3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--max-n", type=int, default=None,
                   help="drop rows with larger n")
    t.add_argument("--row-time-limit", type=float,
                   default=float(os.environ.get("HCP_ROW_TIME_LIMIT", "nan")),
                   help="seconds per row; later rows are skipped once exceeded "
                         "(env HCP_ROW_TIME_LIMIT)")
    t.add_argument("-o", "--output")
    return ap


def parse_args(argv) -> ExperimentSpec:
    ap = build_parser()
    ns = ap.parse_args(argv)
    params = dict(vars(ns))
    command = params.pop("command")
    output = params.pop("output", None)
    seed = params.get("seed")

    if command in ("build", "walk"):
        try:
            _parse_beta(params["beta"], params.get("exact", False))
        except argparse.ArgumentTypeError as exc:
            ap.error(str(exc))
    if command == "sweep-beta":
        for token in params["betas"].split(","):
            if token.strip():
                try:
                    _parse_beta(token.strip(), False)
                except argparse.ArgumentTypeError as exc:
                    ap.error(str(exc))
    if command == "census":
        if bool(params.get("graph")) == bool(params.get("complete")):
            ap.error("census needs exactly one of --graph or --complete")
        if params.get("complete") and not params.get("n"):
            ap.error("--complete needs --n")
        if "/" not in params["beta"]:
            ap.error("census requires an exact beta written as p/q")
        try:
            _parse_beta(params["beta"], True)
        except argparse.ArgumentTypeError as exc:
            ap.error(str(exc))
        if (params.get("p") is None) != (params.get("trials") is None):
            ap.error("sampled census needs both --p and --trials")
    if command == "walk" and params.get("max_steps", 0) < 0:
        ap.error("--max-steps must be >= 0")
    return ExperimentSpec(command=command, params=params, output=output, seed=seed)


# ---------------------------------------------------------------------------
# system JSON round trip
# ---------------------------------------------------------------------------

def system_to_json(sys_: PolytopeSystem) -> dict:
    def render(v):
        return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v

    if sys_.is_exact:
        A = [[render(Fraction(v)) for v in row] for row in sys_.A]
        b = [render(Fraction(v)) for v in sys_.b]
        beta = render(sys_.beta)
    else:
        A = np.asarray(sys_.A).tolist()
        b = np.asarray(sys_.b).tolist()
        beta = sys_.beta
    return {
        "kind": sys_.kind, "n": sys_.n, "beta": beta,
        "exact": sys_.is_exact,
        "tolerance": None if sys_.is_exact else sys_.tolerance,
        "rows": sys_.num_rows, "cols": sys_.num_cols,
        "col_map": [list(d) for d in sys_.col_map],
        "arcs": [list(a) for a in sys_.arcs()],
        "A": A, "b": b,
    }


def system_from_json(doc: dict) -> tuple[PolytopeSystem, DirectedGraph]:
    g = DirectedGraph(doc["n"], frozenset(tuple(a) for a in doc["arcs"]))
    if doc["exact"]:
        beta = Fraction(doc["beta"])
        mode = ExactRational()
    else:
        beta = float(doc["beta"])
        mode = FloatMode(doc["tolerance"]) if doc.get("tolerance") else FloatMode()
    builder = build_wh if doc["kind"] == "WH" else build_h
    sys_ = builder(g, beta, mode)
    if sys_.num_rows != doc["rows"] or sys_.num_cols != doc["cols"]:
        raise ValueError("system file inconsistent with its own graph")
    return sys_, g


def _parse_basis_tokens(text: str, sys_: PolytopeSystem) -> list[int]:
    cols = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token.startswith("s+") or token.startswith("s-"):
            node = int(token[2:])
            want = ("slack_upper" if token[1] == "+" else "slack_lower", node)
            idx = next((c for c, d in enumerate(sys_.col_map) if d == want), None)
            if idx is None:
                raise ValueError(f"no slack column {token!r} in this system")
            cols.append(idx)
        else:
            parts = token.split()
            if len(parts) != 2:
                raise ValueError(f"bad basis token {token!r}; expected 'i j'")
            try:
                cols.append(sys_.col_index((int(parts[0]), int(parts[1]))))
            except KeyError:
                raise ValueError(f"arc {token!r} is not a column of this system") from None
    return cols


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _cmd_gen(spec: ExperimentSpec, fmt: str) -> int:
    p = spec.params
    if p["plant"]:
        inst = gen_hamiltonian_binomial(p["n"], p["p"], p["seed"])
        g = inst.graph
        header = (f"generated: n={p['n']} p={p['p']} seed={p['seed']} planted\n"
                  f"planted-cycle: {' '.join(map(str, inst.planted_cycle))}")
    else:
        g = gen_binomial(p["n"], p["p"], p["seed"])
        header = f"generated: n={p['n']} p={p['p']} seed={p['seed']}"
    write_edge_list(g, spec.output, header=header)
    print(f"wrote {spec.output}: n={g.n}, {g.num_arcs} arcs, seed={p['seed']}")
    return 0


def _cmd_build(spec: ExperimentSpec, fmt: str) -> int:
    p = spec.params
    g = read_edge_list(p["graph"])
    beta, mode = _parse_beta(p["beta"], p["exact"])
    sys_ = (build_wh if p["wedge"] else build_h)(g, beta, mode)
    doc = system_to_json(sys_)
    _emit(doc, spec.output, "json" if fmt == "json" else "text",
          text=f"{sys_.kind} system: {sys_.num_rows} rows x {sys_.num_cols} cols, "
               f"beta={p['beta']}, {'exact' if sys_.is_exact else 'float'} -> {spec.output}")
    return 0


def _cmd_classify(spec: ExperimentSpec, fmt: str) -> int:
    p = spec.params
    with open(p["system"], "r", encoding="utf-8") as fh:
        sys_, g = system_from_json(json.load(fh))
    cols = _parse_basis_tokens(p["basis"], sys_)
    res = structure.classify_basis(sys_, g, cols)
    x = basis_mod.basic_solution(sys_, cols)
    feasible = basis_mod.is_feasible_basis(sys_, cols)
    payload = {
        "class": res.label,
        "reason": res.reason,
        "feasible": feasible,
        "components": res.components,
        "two_core_arcs": sorted(res.two_core.arcs) if res.two_core else None,
        "balanced_cycle": list(res.balanced_cycle.arcs()) if res.balanced_cycle else None,
        "quasi_hamiltonian": res.quasi_hamiltonian,
        "columns": list(cols),
        "solution": None if x is None else
            {sys_.describe_column(c): x[c] for c in cols},
    }
    _emit(payload, spec.output, "json" if fmt == "json" else "text",
          text=f"class={res.label}" +
               (f" reason={res.reason}" if res.reason else "") +
               f" feasible={feasible}" +
               (f" quasi_hamiltonian={res.quasi_hamiltonian}"
                if res.quasi_hamiltonian is not None else ""))
    return 0


def _cmd_census(spec: ExperimentSpec, fmt: str) -> int:
    p = spec.params
    beta = Fraction(p["beta"])
    if p.get("trials") is not None:
        mc = census_mod.monte_carlo_census(p["n"], p["p"], p["trials"], beta, p["seed"],
                                           budget=p["budget"],
                                           cross_check=not p["no_cross_check"])
        text = "\n".join(
            [f"sampled census: n={mc.n} p={mc.p} trials={mc.trials} seed={mc.seed}"] +
            [f"  {k}: mean={mc.means[k]:.4f} se={mc.std_errors[k]:.4f}"
             + (f" expected={mc.expected[k]:.4f}" if k in mc.expected else "")
             for k in census_mod.TYPE_KEYS])
        _emit(mc.to_json_dict(), spec.output, "json" if fmt == "json" else "text", text)
        return 0
    g = complete_graph(p["n"]) if p["complete"] else read_edge_list(p["graph"])
    rep = census_mod.enumerate_feasible_bases(g, beta, budget=p["budget"],
                                              cross_check=not p["no_cross_check"],
                                              p=p.get("p"))
    _emit(rep.to_json_dict(), spec.output, "json" if fmt == "json" else "text",
          rep.text_table())
    return 0


def _cmd_walk(spec: ExperimentSpec, fmt: str) -> int:
    p = spec.params
    g = read_edge_list(p["graph"])
    beta, mode = _parse_beta(p["beta"], False)
    sys_ = (build_wh if p["wedge"] else build_h)(g, beta, mode)
    target = "quasi_hamiltonian" if p["target"] == "quasi" else "hamiltonian"
    cfg = walk_mod.WalkConfig(max_step=p["max_steps"], seed=p["seed"], target=target,
                              record_types=p["record_types"])
    runner = walk_mod.walk_count_visits if p["count_visits"] else walk_mod.walk_until_target
    res = runner(sys_, g, cfg)
    payload = {
        "outcome": list(res.outcome), "found": res.found, "steps": res.steps,
        "cycle": list(res.cycle) if res.cycle else None,
        "visit_counter": res.visit_counter, "max_step": res.max_step,
        "seed": res.seed, "target": target, "kind": sys_.kind,
        "type_histogram": res.type_histogram,
    }
    _emit(payload, spec.output, "json" if fmt == "json" else "text",
          text=f"outcome={res.outcome} counter={res.visit_counter} seed={res.seed}")
    return 0


# -- replicated experiments -------------------------------------------------

def _replica_task(payload: dict) -> dict:
    """Worker body for one replica; reconstructs everything from the payload."""
    n, p = payload["n"], payload["p"]
    if payload.get("arcs") is not None:
        g = DirectedGraph(n, frozenset(tuple(a) for a in payload["arcs"]))
    else:
        g = gen_hamiltonian_binomial(
            n, p, np.random.SeedSequence(entropy=payload["seed_entropy"],
                                         spawn_key=tuple(payload["graph_key"]))).graph
    builder = build_wh if payload["wedge"] else build_h
    sys_ = builder(g, payload["beta"], FloatMode())
    cfg = walk_mod.WalkConfig(max_step=payload["max_steps"],
                              seed=payload["walk_seed"],
                              target=payload["target"],
                              record_types=payload.get("record_types", False))
    runner = walk_mod.walk_count_visits if payload["count"] else walk_mod.walk_until_target
    t0 = time.monotonic()
    res = runner(sys_, g, cfg)
    return {
        "found": res.found, "steps": res.steps, "counter": res.visit_counter,
        "fail_reason": res.fail_reason, "seconds": time.monotonic() - t0,
        "type_histogram": res.type_histogram,
    }


def _walk_seed(entropy: int, key: tuple) -> int:
    # stable 63-bit stream id for a replica, derived from (seed, indices)
    return int(np.random.SeedSequence(entropy=entropy, spawn_key=key).generate_state(1)[0] >> 1)


def _run_replicas(tasks: list[dict], threads: int | None) -> list[dict]:
    workers = threads if threads and threads > 0 else (os.cpu_count() or 1)
    if workers <= 1 or len(tasks) <= 1:
        return [_replica_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_replica_task, tasks))


def run_tables(which: int, replicas: int, seed: int, *, threads: int | None = None,
               max_n: int | None = None, row_time_limit: float | None = None) -> dict:
    """Regenerate one benchmark table with this run's numbers.

    Each row aggregates `replicas` independently seeded walks on one
    seeded graph (median and range of the step counts / visit counters).
    Rows are skipped with a note once `row_time_limit` seconds have been
    spent on a single row.
    """
    if which not in (1, 2, 3):
        raise ValueError("which must be 1, 2 or 3")
    if row_time_limit is not None and math.isnan(row_time_limit):
        row_time_limit = None
    rows = []
    if which in (1, 3):
        ns = [n for n in TABLE_ROWS_N if max_n is None or n <= max_n]
        plan = [(n, 3.0 / n, 0.999) for n in ns]
        max_steps = TABLE1_MAX_STEPS if which == 1 else TABLE3_MAX_STEPS
        count = which == 3
    else:
        n0 = 30 if (max_n is None or max_n >= 30) else max_n
        plan = [(n0, 3.0 / n0, b) for b in TABLE2_BETAS]
        max_steps = TABLE2_MAX_STEPS
        count = False
    skipped_note = None
    for row_idx, (n, p, beta) in enumerate(plan):
        if skipped_note is not None:
            rows.append({"n": n, "p": p, "beta": beta, "skipped": skipped_note})
            continue
        t_row = time.monotonic()
        tasks = [{
            "n": n, "p": p, "beta": beta, "wedge": True,
            "target": "quasi_hamiltonian", "max_steps": max_steps, "count": count,
            "seed_entropy": seed, "graph_key": (which, row_idx), "arcs": None,
            "walk_seed": _walk_seed(seed, (which, row_idx, r)),
        } for r in range(replicas)]
        results = _run_replicas(tasks, threads)
        rows.append(_aggregate_row(n, p, beta, results, count))
        if row_time_limit is not None and time.monotonic() - t_row > row_time_limit:
            skipped_note = f"row time limit {row_time_limit}s exceeded at n={n}"
    return {"table": which, "replicas": replicas, "seed": seed,
            "max_steps": max_steps, "rows": rows}


def _aggregate_row(n, p, beta, results: list[dict], count: bool) -> dict:
    row = {"n": n, "p": p, "beta": beta, "replicas": len(results),
           "seconds": round(sum(r["seconds"] for r in results), 2)}
    if count:
        counters = [r["counter"] for r in results]
        row.update(counter_median=statistics.median(counters),
                   counter_min=min(counters), counter_max=max(counters))
    else:
        found = [r["steps"] for r in results if r["found"]]
        row.update(found=len(found), failed=len(results) - len(found))
        if found:
            row.update(steps_median=statistics.median(found),
                       steps_min=min(found), steps_max=max(found))
    return row


def _table_text(doc: dict) -> str:
    lines = [f"table {doc['table']} (replicas={doc['replicas']}, seed={doc['seed']}, "
             f"max_steps={doc['max_steps']})"]
    for row in doc["rows"]:
        if "skipped" in row:
            lines.append(f"  n={row['n']:>3} beta={row['beta']:<7} skipped: {row['skipped']}")
        elif "counter_median" in row:
            lines.append(f"  n={row['n']:>3} beta={row['beta']:<7} "
                         f"visits median={row['counter_median']} "
                         f"range=[{row['counter_min']},{row['counter_max']}]")
        else:
            extra = (f" steps median={row['steps_median']} "
                     f"range=[{row['steps_min']},{row['steps_max']}]"
                     if row["found"] else "")
            lines.append(f"  n={row['n']:>3} beta={row['beta']:<7} "
                         f"found {row['found']}/{row['replicas']}{extra}")
    return "\n".join(lines)


def _table_csv(doc: dict) -> str:
    buf = io.StringIO()
    rows = doc["rows"]
    keys = sorted({k for r in rows for k in r})
    writer = csv.DictWriter(buf, fieldnames=keys)
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _cmd_sweep(spec: ExperimentSpec, fmt: str, threads: int | None) -> int:
    p = spec.params
    g = read_edge_list(p["graph"])
    betas = [float(x) for x in p["betas"].split(",") if x.strip()]
    for b in betas:
        if not 0 < b < 1:
            raise ValueError(f"beta must lie in (0, 1), got {b}")
    rows = []
    arcs = [list(a) for a in g.sorted_arcs]
    for bi, beta in enumerate(betas):
        tasks = [{
            "n": g.n, "p": None, "beta": beta, "wedge": True,
            "target": "quasi_hamiltonian", "max_steps": p["max_steps"], "count": False,
            "seed_entropy": p["seed"], "graph_key": None, "arcs": arcs,
            "walk_seed": _walk_seed(p["seed"], (bi, r)),
        } for r in range(p["replicas"])]
        results = _run_replicas(tasks, threads)
        rows.append(_aggregate_row(g.n, None, beta, results, count=False))
    doc = {"graph": p["graph"], "seed": p["seed"], "max_steps": p["max_steps"],
           "replicas": p["replicas"], "rows": rows, "table": "beta-sweep"}
    text = "\n".join(
        [f"beta sweep of {p['graph']} (max_steps={p['max_steps']})"] +
        [f"  beta={r['beta']:<7} found {r['found']}/{r['replicas']}" +
         (f" steps median={r['steps_median']}" if r["found"] else "")
         for r in rows])
    _emit(doc, spec.output, "json" if fmt == "json" else "text", text)
    return 0


def _cmd_tables(spec: ExperimentSpec, fmt: str, threads: int | None) -> int:
    p = spec.params
    limit = p["row_time_limit"]
    doc = run_tables(p["which"], p["replicas"], p["seed"], threads=threads,
                     max_n=p["max_n"],
                     row_time_limit=None if (limit is None or math.isnan(limit)) else limit)
    text = _table_csv(doc) if fmt == "csv" else _table_text(doc)
    _emit(doc, spec.output, "json" if fmt == "json" else "text", text)
    return 0


def main(argv=None) -> int:
    argv = list(_sys.argv[1:] if argv is None else argv)
    try:
        spec = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    fmt = spec.params.pop("format", "text")
    threads = spec.params.pop("threads", None)
    try:
        if spec.command == "gen":
            return _cmd_gen(spec, fmt)
        if spec.command == "build":
            return _cmd_build(spec, fmt)
        if spec.command == "classify":
            return _cmd_classify(spec, fmt)
        if spec.command == "census":
            return _cmd_census(spec, fmt)
        if spec.command == "walk":
            return _cmd_walk(spec, fmt)
        if spec.command == "sweep-beta":
            return _cmd_sweep(spec, fmt, threads)
        if spec.command == "tables":
            return _cmd_tables(spec, fmt, threads)
        raise ValueError(f"unknown command {spec.command!r}")
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
