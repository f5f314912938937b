"""Constraint systems H (discounted flow) and WH (flow + wedge bounds) over a graph.

For a graph on nodes 1..n with arc variables x_ij >= 0 and a discount
beta in (0,1), the H system has n+1 equality rows over the arc columns:

  row 0        sum_j x_1j - beta * sum_j x_j1 = 1 - beta^n
  row i-1      sum_j x_ij - beta * sum_j x_ji = 0          (i = 2..n)
  row n        sum_j x_1j                     = 1

so the column of arc (i,j) holds +1 in row i-1, -beta in row j-1, and +1 in
row n iff i = 1.  The WH system appends, for every node i != 1, an upper
bound row  sum_j x_ij + s+_i = beta  and a lower bound row
sum_j x_ij - s-_i = beta^(n-1): all upper rows first (i = 2..n), then all
lower rows.  Slack columns come after the arc columns, s+_2..s+_n then
s-_2..s-_n, so every wedge row owns exactly one slack column.

Columns are ordered by the lexicographically sorted arc list.  Two numeric
backends are supported: exact rationals (beta = p/q, used by the census and
the theorem-validation suites) and float64 with a feasibility tolerance
(used by the random walks at beta close to 1).  Exact systems additionally
carry an integer row-scaling of (A, b) so that basis solves stay in integer
arithmetic: flow rows are scaled by q, upper wedge rows by q, lower wedge
rows by q^(n-1), the rhs by a further q^(n-1); solutions un-scale by
1/q^(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .graph import DirectedGraph


@dataclass(frozen=True)
class ExactRational:
    """Exact rational backend; beta must be supplied as a ratio of integers."""


@dataclass(frozen=True)
class FloatMode:
    """Float64 backend; values within `tolerance` of 0 are treated as 0."""

    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")


NumericMode = Union[ExactRational, FloatMode]

# Column descriptors: ("arc", i, j) | ("slack_upper", i) | ("slack_lower", i)
ColumnDesc = tuple


def _coerce_beta_exact(beta) -> Fraction:
    if isinstance(beta, float):
        raise TypeError("exact mode needs beta as a ratio of integers, e.g. Fraction(9, 10) or '9/10'")
    b = Fraction(beta)
    if not 0 < b < 1:
        raise ValueError(f"beta must lie strictly in (0, 1), got {b}")
    return b


def _coerce_beta_float(beta) -> float:
    b = float(beta)
    if not 0.0 < b < 1.0:
        raise ValueError(f"beta must lie strictly in (0, 1), got {b}")
    return b


class PolytopeSystem:
    """Immutable assembled constraint system A x = b, x >= 0.

    Attributes:
        kind: "H" or "WH".
        n: node count of the underlying graph.
        beta: Fraction (exact mode) or float.
        mode: the numeric backend.
        col_map: per-column descriptors (arcs, then slack columns for WH).
        num_rows / num_cols: matrix shape.
    """

    def __init__(self, kind: str, n: int, beta, mode: NumericMode,
                 col_map: tuple[ColumnDesc, ...]):
        self.kind = kind
        self.n = n
        self.beta = beta
        self.mode = mode
        self.col_map = col_map
        self.num_rows = n + 1 if kind == "H" else 3 * n - 1
        self.num_cols = len(col_map)
        self.num_arc_cols = sum(1 for d in col_map if d[0] == "arc")
        self._arc_col = {(d[1], d[2]): c for c, d in enumerate(col_map) if d[0] == "arc"}
        # backend storage, filled by the builder
        self.A: object = None
        self.b: object = None
        self._int_cols: tuple | None = None   # exact: per-column ((row, int), ...)
        self._int_b: tuple | None = None
        self._x_unscale: Fraction | None = None

    # -- shared helpers -------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return isinstance(self.mode, ExactRational)

    @property
    def tolerance(self) -> float:
        return self.mode.tolerance if isinstance(self.mode, FloatMode) else 0.0

    def col_index(self, arc: tuple[int, int]) -> int:
        """Column index of an arc; raises KeyError if the arc is absent."""
        return self._arc_col[arc]

    def arc_of(self, col: int) -> tuple[int, int] | None:
        d = self.col_map[col]
        return (d[1], d[2]) if d[0] == "arc" else None

    def arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((d[1], d[2]) for d in self.col_map if d[0] == "arc")

    def arc_values(self, x: Sequence) -> dict[tuple[int, int], object]:
        """Map arcs to their entries of a full-length solution vector."""
        return {(d[1], d[2]): x[c] for c, d in enumerate(self.col_map) if d[0] == "arc"}

    def describe_column(self, col: int) -> str:
        d = self.col_map[col]
        if d[0] == "arc":
            return f"x[{d[1]},{d[2]}]"
        return ("s+" if d[0] == "slack_upper" else "s-") + f"[{d[1]}]"


def _wedge_rows(n: int, i: int) -> tuple[int, int]:
    """(upper row, lower row) indices for node i != 1."""
    return n + (i - 1), 2 * n + (i - 2)


def _assemble(g: DirectedGraph, beta, mode: NumericMode, wedge: bool) -> PolytopeSystem:
    n = g.n
    if n < 2:
        raise ValueError(f"need a graph on at least 2 nodes, got n={n}")
    arcs = g.sorted_arcs
    col_map: list[ColumnDesc] = [("arc", i, j) for (i, j) in arcs]
    if wedge:
        col_map += [("slack_upper", i) for i in range(2, n + 1)]
        col_map += [("slack_lower", i) for i in range(2, n + 1)]
    kind = "WH" if wedge else "H"

    if isinstance(mode, ExactRational):
        b_ = _coerce_beta_exact(beta)
        sys_ = PolytopeSystem(kind, n, b_, mode, tuple(col_map))
        _fill_exact(sys_, arcs, wedge)
    else:
        b_ = _coerce_beta_float(beta)
        sys_ = PolytopeSystem(kind, n, b_, mode, tuple(col_map))
        _fill_float(sys_, arcs, wedge)
    return sys_


def _fill_float(sys_: PolytopeSystem, arcs, wedge: bool):
    n, beta = sys_.n, sys_.beta
    A = np.zeros((sys_.num_rows, sys_.num_cols))
    b = np.zeros(sys_.num_rows)
    for c, (i, j) in enumerate(arcs):
        A[i - 1, c] += 1.0
        A[j - 1, c] += -beta
        if i == 1:
            A[n, c] += 1.0
        if wedge and i != 1:
            up, lo = _wedge_rows(n, i)
            A[up, c] = 1.0
            A[lo, c] = 1.0
    b[0] = 1.0 - beta ** n
    b[n] = 1.0
    if wedge:
        for k, i in enumerate(range(2, n + 1)):
            up, lo = _wedge_rows(n, i)
            A[up, len(arcs) + k] = 1.0
            A[lo, len(arcs) + (n - 1) + k] = -1.0
            b[up] = beta
            b[lo] = beta ** (n - 1)
    A.flags.writeable = False
    b.flags.writeable = False
    sys_.A, sys_.b = A, b


def _fill_exact(sys_: PolytopeSystem, arcs, wedge: bool):
    n, beta = sys_.n, sys_.beta
    p, q = beta.numerator, beta.denominator
    zero = Fraction(0)
    A = [[zero] * sys_.num_cols for _ in range(sys_.num_rows)]
    b = [zero] * sys_.num_rows
    qn1 = q ** (n - 1)
    int_cols: list[tuple] = []
    for c, (i, j) in enumerate(arcs):
        A[i - 1][c] += 1
        A[j - 1][c] += -beta
        entries = [(i - 1, q), (j - 1, -p)]
        if i == 1:
            A[n][c] += 1
            entries.append((n, 1))
        if wedge and i != 1:
            up, lo = _wedge_rows(n, i)
            A[up][c] = Fraction(1)
            A[lo][c] = Fraction(1)
            entries.append((up, q))
            entries.append((lo, qn1))
        int_cols.append(tuple(entries))
    b[0] = 1 - beta ** n
    b[n] = Fraction(1)
    int_b = [0] * sys_.num_rows
    int_b[0] = q ** n - p ** n
    int_b[n] = qn1
    if wedge:
        for k, i in enumerate(range(2, n + 1)):
            up, lo = _wedge_rows(n, i)
            A[up][len(arcs) + k] = Fraction(1)
            A[lo][len(arcs) + (n - 1) + k] = Fraction(-1)
            b[up] = beta
            b[lo] = beta ** (n - 1)
            int_cols.append(((up, q),))
            int_b[up] = p * qn1
            int_b[lo] = p ** (n - 1) * qn1
        # slack_lower columns come after all slack_upper columns
        for i in range(2, n + 1):
            _, lo = _wedge_rows(n, i)
            int_cols.append(((lo, -qn1),))
    sys_.A = tuple(tuple(row) for row in A)
    sys_.b = tuple(b)
    sys_._int_cols = tuple(int_cols)
    sys_._int_b = tuple(int_b)
    sys_._x_unscale = Fraction(1, qn1)


def build_h(g: DirectedGraph, beta, mode: NumericMode = FloatMode()) -> PolytopeSystem:
    """Assemble the n+1 row discounted-flow system over g's arc columns."""
    return _assemble(g, beta, mode, wedge=False)


def build_wh(g: DirectedGraph, beta, mode: NumericMode = FloatMode()) -> PolytopeSystem:
    """Assemble the 3n-1 row system: flow rows plus slack-equipped wedge bounds."""
    return _assemble(g, beta, mode, wedge=True)


def rescale_f_to_h(y: Sequence, beta, n: int):
    """Componentwise x = (1 - beta^n) y, mapping unit-sum coordinates onto the H scaling."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if isinstance(beta, Fraction):
        if not 0 < beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {beta}")
        f = 1 - beta ** n
        return type(y)(v * f for v in y) if not isinstance(y, np.ndarray) else np.asarray(y) * float(f)
    bf = _coerce_beta_float(beta)
    f = 1.0 - bf ** n
    if isinstance(y, np.ndarray):
        return y * f
    return type(y)(v * f for v in y)


def rescale_h_to_f(x: Sequence, beta, n: int):
    """Inverse of rescale_f_to_h: y = x / (1 - beta^n)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if isinstance(beta, Fraction):
        if not 0 < beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {beta}")
        f = 1 - beta ** n
        return type(x)(v / f for v in x) if not isinstance(x, np.ndarray) else np.asarray(x) / float(f)
    bf = _coerce_beta_float(beta)
    f = 1.0 - bf ** n
    if isinstance(x, np.ndarray):
        return x / f
    return type(x)(v / f for v in x)


def wedge_beta_threshold(n: int) -> float:
    """Discount value above which the wedge bounds start excising non-target bases.

    Defined for n >= 4 as (1 - 1/(n-2))^(1/(n-2)); strictly increasing in n.
    """
    if n < 4:
        raise ValueError(f"threshold needs n >= 4, got {n}")
    return (1.0 - 1.0 / (n - 2)) ** (1.0 / (n - 2))


def wedge_row_residuals(g: DirectedGraph, arc_values: dict, beta) -> dict[int, tuple]:
    """Per-node (upper, lower) wedge gaps for an arc-valued point.

    Returns {i: (beta - sum_j x_ij, sum_j x_ij - beta^(n-1))} for i != 1; both
    entries nonnegative exactly when the point satisfies the wedge bounds.
    """
    n = g.n
    out = {}
    for i in range(2, n + 1):
        s = sum(arc_values.get((i, j), 0) for j in g.out_neighbors(i))
        out[i] = (beta - s, s - beta ** (n - 1))
    return out
