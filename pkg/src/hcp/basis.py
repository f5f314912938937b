"""Bases of a constraint system: exact/float solves, feasibility, phase-1, adjacency.

A basis is a set of `num_rows` column indices whose submatrix A_B is
nonsingular; its basic solution solves A_B x_B = b with all other
components 0, and the basis is feasible when x_B >= 0 (>= -tolerance in
float mode).

Exact systems are solved by fraction-free (Bareiss) elimination on the
integer row-scaled matrix carried by the system, so feasibility verdicts
involve no rounding at all.  Float systems use LU with partial pivoting;
a basis whose U-diagonal falls below ``PIVOT_TOL`` is declared singular,
which deliberately rejects near-singular bases rather than admitting
false feasibility at beta close to 1.

Adjacency (all feasible single-column exchanges) is computed from one
factorization of A_B: with d = A_B^-1 A_e for an entering column e and a
leaving position r, the exchanged basis is nonsingular iff d_r != 0 and
its solution is x'_e = x_r/d_r, x'_i = x_i - x'_e d_i, so each candidate
costs O(m) after the O(m^2)-per-column solve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .polytope import PolytopeSystem

PIVOT_TOL = 1e-10


class InfeasibleSystemError(RuntimeError):
    """Phase-1 terminated with a positive optimum: the polytope is empty."""


@dataclass(frozen=True, eq=False)
class Basis:
    """Column index set plus its cached basic solution (None when singular).

    `solution` is full length: one entry per system column, nonbasic
    entries exactly zero.  Exact systems store Fractions, float systems
    a read-only float64 array.
    """

    columns: tuple[int, ...]
    solution: tuple | np.ndarray | None

    @property
    def is_singular(self) -> bool:
        return self.solution is None


@dataclass(frozen=True)
class PivotMove:
    leaving: int
    entering: int

    def apply(self, columns: Sequence[int]) -> tuple[int, ...]:
        cols = set(columns)
        if self.leaving not in cols or self.entering in cols:
            raise ValueError(f"move {self} does not apply to {tuple(columns)}")
        cols.discard(self.leaving)
        cols.add(self.entering)
        return tuple(sorted(cols))


def _check_columns(sys_: PolytopeSystem, columns: Iterable[int]) -> tuple[int, ...]:
    cols = tuple(columns)
    if len(cols) != sys_.num_rows:
        raise ValueError(f"basis needs {sys_.num_rows} columns, got {len(cols)}")
    if len(set(cols)) != len(cols):
        raise ValueError("basis columns must be distinct")
    for c in cols:
        if not 0 <= c < sys_.num_cols:
            raise ValueError(f"column {c} out of range 0..{sys_.num_cols - 1}")
    return tuple(sorted(cols))


# ---------------------------------------------------------------------------
# exact backend: integer Bareiss elimination
# ---------------------------------------------------------------------------

def _bareiss_solve(M: list[list[int]], v: Sequence[int]):
    """Solve M x = v over the integers: returns (D, y) with x_i = y_i / D, or None.

    Fraction-free forward elimination followed by all-integer back
    substitution; D is the (signed) last pivot, y_i the Cramer numerators
    relative to the triangularized system.  Every division is exact.
    """
    m = len(M)
    U = [list(M[r]) + [v[r]] for r in range(m)]
    prev = 1
    for k in range(m):
        piv = None
        for r in range(k, m):
            if U[r][k] != 0:
                piv = r
                break
        if piv is None:
            return None
        if piv != k:
            U[k], U[piv] = U[piv], U[k]
        rowk = U[k]
        ukk = rowk[k]
        for i in range(k + 1, m):
            rowi = U[i]
            uik = rowi[k]
            for j in range(k + 1, m + 1):
                rowi[j] = (rowi[j] * ukk - uik * rowk[j]) // prev
            rowi[k] = 0
        prev = ukk
    D = U[m - 1][m - 1]
    if D == 0:
        return None
    y = [0] * m
    y[m - 1] = U[m - 1][m]
    for i in range(m - 2, -1, -1):
        s = D * U[i][m]
        rowi = U[i]
        for j in range(i + 1, m):
            s -= rowi[j] * y[j]
        y[i] = s // rowi[i]
    return D, y


def _exact_square(sys_: PolytopeSystem, cols: Sequence[int]):
    m = sys_.num_rows
    M = [[0] * m for _ in range(m)]
    int_cols = sys_._int_cols
    for c, col in enumerate(cols):
        for (r, val) in int_cols[col]:
            M[r][c] = val
    return M


def _exact_solution(sys_: PolytopeSystem, cols: Sequence[int]):
    res = _bareiss_solve(_exact_square(sys_, cols), sys_._int_b)
    if res is None:
        return None
    D, y = res
    unscale = sys_._x_unscale
    zero = Fraction(0)
    full = [zero] * sys_.num_cols
    for c, col in enumerate(cols):
        full[col] = Fraction(y[c], D) * unscale
    return tuple(full)


def exact_feasibility(sys_: PolytopeSystem, cols: Sequence[int]) -> tuple[bool, bool]:
    """(nonsingular, feasible) by pure integer arithmetic; no Fractions built."""
    res = _bareiss_solve(_exact_square(sys_, cols), sys_._int_b)
    if res is None:
        return False, False
    D, y = res
    if D > 0:
        return True, all(yy >= 0 for yy in y)
    return True, all(yy <= 0 for yy in y)


def exact_column_rank(sys_: PolytopeSystem, cols: Sequence[int]) -> int:
    """Rank of the chosen columns of A by exact Gaussian elimination."""
    m = sys_.num_rows
    W = [[Fraction(sys_.A[r][c]) for c in cols] for r in range(m)]
    rank = 0
    k = 0
    for c in range(len(cols)):
        piv = next((r for r in range(k, m) if W[r][c] != 0), None)
        if piv is None:
            continue
        W[k], W[piv] = W[piv], W[k]
        rowk = W[k]
        pk = rowk[c]
        for r in range(k + 1, m):
            f = W[r][c] / pk
            if f != 0:
                W[r] = [a - f * bb for a, bb in zip(W[r], rowk)]
        rank += 1
        k += 1
        if k == m:
            break
    return rank


# ---------------------------------------------------------------------------
# float backend
# ---------------------------------------------------------------------------

def _float_lu(sys_: PolytopeSystem, cols: Sequence[int]):
    AB = sys_.A[:, list(cols)]
    try:
        with warnings.catch_warnings():
            # exact singularity is an expected verdict here, not an anomaly
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(AB, check_finite=False)
    except Exception:
        return None
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL:
        return None
    return lu, piv


def _float_solution(sys_: PolytopeSystem, cols: Sequence[int]):
    fac = _float_lu(sys_, cols)
    if fac is None:
        return None
    xB = lu_solve(fac, sys_.b, check_finite=False)
    full = np.zeros(sys_.num_cols)
    full[list(cols)] = xB
    full.flags.writeable = False
    return full


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def basic_solution(sys_: PolytopeSystem, columns: Iterable[int]):
    """Full-length basic solution for the column set, or None when A_B is singular."""
    cols = _check_columns(sys_, columns)
    if sys_.is_exact:
        return _exact_solution(sys_, cols)
    return _float_solution(sys_, cols)


def is_feasible_basis(sys_: PolytopeSystem, columns: Iterable[int]) -> bool:
    """True iff A_B is nonsingular and the basic solution is componentwise >= 0."""
    cols = _check_columns(sys_, columns)
    if sys_.is_exact:
        nonsing, feas = exact_feasibility(sys_, cols)
        return nonsing and feas
    fac = _float_lu(sys_, cols)
    if fac is None:
        return False
    xB = lu_solve(fac, sys_.b, check_finite=False)
    return bool(np.min(xB) >= -sys_.tolerance)


def make_basis(sys_: PolytopeSystem, columns: Iterable[int]) -> Basis:
    cols = _check_columns(sys_, columns)
    return Basis(cols, basic_solution(sys_, cols))


# ---------------------------------------------------------------------------
# phase-1 initialization (artificial variables, Bland's rule on a seeded order)
# ---------------------------------------------------------------------------

def initial_feasible_basis(sys_: PolytopeSystem, seed: int = 0) -> Basis:
    """Find some feasible basis by phase-1 simplex.

    The candidate scan order is a seeded permutation of the columns and
    Bland's rule is applied in that order, so the result is deterministic
    for a given (system, seed).  Raises InfeasibleSystemError when the
    phase-1 optimum is positive (empty polytope), RuntimeError when the
    constraint rows are rank deficient (no basis exists at all).
    """
    if sys_.is_exact:
        cols = _phase1_exact(sys_, seed)
    else:
        cols = _phase1_float(sys_, seed)
    b = make_basis(sys_, cols)
    assert not b.is_singular
    return b


def _phase1_float(sys_: PolytopeSystem, seed: int) -> list[int]:
    A, b = sys_.A, sys_.b
    m, ncols = A.shape
    rng = np.random.default_rng(seed)
    order = rng.permutation(ncols)
    pos = np.empty(ncols + m, dtype=int)
    pos[order] = np.arange(ncols)
    pos[ncols:] = ncols + np.arange(m)
    T = np.hstack([A, np.eye(m), b.reshape(-1, 1)])
    basis = list(range(ncols, ncols + m))
    in_basis = np.zeros(ncols + m, dtype=bool)
    in_basis[ncols:] = True
    guard = 500 * (m + ncols)
    for _ in range(guard):
        art_rows = [r for r in range(m) if basis[r] >= ncols]
        if not art_rows:
            break
        z = T[art_rows, :ncols].sum(axis=0)
        cand = np.where((z > 1e-9) & ~in_basis[:ncols])[0]
        if cand.size == 0:
            break
        enter = cand[np.argmin(pos[cand])]
        colv = T[:, enter]
        rows = np.where(colv > PIVOT_TOL)[0]
        if rows.size == 0:
            break
        ratios = T[rows, -1] / colv[rows]
        best = np.min(ratios)
        ties = rows[ratios <= best + 1e-12]
        r = min(ties, key=lambda rr: pos[basis[rr]])
        _pivot_float(T, basis, in_basis, r, enter)
    else:
        raise RuntimeError("phase-1 iteration guard tripped")
    obj = sum(T[r, -1] for r in range(m) if basis[r] >= ncols)
    if obj > 1e-7:
        raise InfeasibleSystemError(f"phase-1 optimum {obj:.3e} > 0: system has no feasible point")
    for r in range(m):
        if basis[r] < ncols:
            continue
        row = np.abs(T[r, :ncols])
        row[in_basis[:ncols]] = 0.0
        j = int(np.argmax(row))
        if row[j] <= 1e-9:
            raise RuntimeError("constraint rows are rank deficient: no basis of real columns exists")
        _pivot_float(T, basis, in_basis, r, j)
    return sorted(basis)


def _pivot_float(T, basis, in_basis, r, enter):
    T[r] /= T[r, enter]
    factor = T[:, enter].copy()
    factor[r] = 0.0
    T -= np.outer(factor, T[r])
    in_basis[basis[r]] = False
    in_basis[enter] = True
    basis[r] = enter


def _phase1_exact(sys_: PolytopeSystem, seed: int) -> list[int]:
    m, ncols = sys_.num_rows, sys_.num_cols
    rng = np.random.default_rng(seed)
    order = list(map(int, rng.permutation(ncols)))
    pos = {j: k for k, j in enumerate(order)}
    for k in range(m):
        pos[ncols + k] = ncols + k
    zero, one = Fraction(0), Fraction(1)
    T = [list(sys_.A[r]) + [one if k == r else zero for k in range(m)] + [sys_.b[r]]
         for r in range(m)]
    basis = list(range(ncols, ncols + m))
    in_basis = set(basis)
    guard = 500 * (m + ncols)
    for _ in range(guard):
        art_rows = [r for r in range(m) if basis[r] >= ncols]
        if not art_rows:
            break
        enter = None
        for j in order:
            if j in in_basis:
                continue
            if sum(T[r][j] for r in art_rows) > 0:
                enter = j
                break
        if enter is None:
            break
        ratios = [(T[r][-1] / T[r][enter], pos[basis[r]], r)
                  for r in range(m) if T[r][enter] > 0]
        if not ratios:
            break
        best = min(x[0] for x in ratios)
        r = min((x for x in ratios if x[0] == best), key=lambda x: x[1])[2]
        _pivot_exact(T, basis, in_basis, r, enter, m)
    else:
        raise RuntimeError("phase-1 iteration guard tripped")
    obj = sum(T[r][-1] for r in range(m) if basis[r] >= ncols)
    if obj > 0:
        raise InfeasibleSystemError(f"phase-1 optimum {obj} > 0: system has no feasible point")
    for r in range(m):
        if basis[r] < ncols:
            continue
        enter = next((j for j in order if j not in in_basis and T[r][j] != 0), None)
        if enter is None:
            raise RuntimeError("constraint rows are rank deficient: no basis of real columns exists")
        _pivot_exact(T, basis, in_basis, r, enter, m)
    return sorted(basis)


def _pivot_exact(T, basis, in_basis, r, enter, m):
    piv = T[r][enter]
    T[r] = [v / piv for v in T[r]]
    rowr = T[r]
    for rr in range(m):
        if rr == r:
            continue
        f = T[rr][enter]
        if f != 0:
            T[rr] = [a - f * b for a, b in zip(T[rr], rowr)]
    in_basis.discard(basis[r])
    in_basis.add(enter)
    basis[r] = enter


# ---------------------------------------------------------------------------
# adjacency: all feasible one-column exchanges
# ---------------------------------------------------------------------------

try:
    from numba import njit

    @njit(cache=True)
    def _swap_kernel(xB, D, tau, pivtol):  # pragma: no cover - exercised via wrapper
        m, k = D.shape
        out = np.zeros((m, k), dtype=np.bool_)
        for e in range(k):
            for r in range(m):
                d = D[r, e]
                if d > pivtol or d < -pivtol:
                    t = xB[r] / d
                    if t < -tau:
                        continue
                    ok = True
                    for i in range(m):
                        if xB[i] - t * D[i, e] < -tau:
                            ok = False
                            break
                    if ok:
                        out[r, e] = True
        return out

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False


def _swap_kernel_numpy(xB, D, tau, pivtol):
    with np.errstate(divide="ignore", invalid="ignore"):
        T = xB[:, None] / D
        M = xB[:, None, None] - D[:, None, :] * T[None, :, :]
        feas = (np.abs(D) > pivtol) & (T >= -tau)
        feas &= np.all(np.nan_to_num(M, nan=-1.0, posinf=np.inf, neginf=-np.inf) >= -tau, axis=0)
    return feas


def _feasible_swap_matrix(xB, D, tau):
    if _HAVE_NUMBA:
        return _swap_kernel(xB, D, tau, PIVOT_TOL)
    return _swap_kernel_numpy(xB, D, tau, PIVOT_TOL)


def _walk_state_float(sys_: PolytopeSystem, cols: tuple[int, ...]):
    """(full solution, feasible swap list) from a single factorization."""
    A, b = sys_.A, sys_.b
    m = sys_.num_rows
    collist = list(cols)
    nonbasic = np.setdiff1d(np.arange(sys_.num_cols), collist, assume_unique=False)
    rhs = np.empty((m, 1 + nonbasic.size))
    rhs[:, 0] = b
    rhs[:, 1:] = A[:, nonbasic]
    try:
        S = np.linalg.solve(A[:, collist], rhs)
    except np.linalg.LinAlgError:
        raise ValueError("current basis is singular") from None
    xB, D = S[:, 0], S[:, 1:]
    feas = _feasible_swap_matrix(np.ascontiguousarray(xB), np.ascontiguousarray(D),
                                 sys_.tolerance)
    swaps = [PivotMove(collist[r], int(nonbasic[e])) for r, e in np.argwhere(feas)]
    swaps.sort(key=lambda mv: (mv.leaving, mv.entering))
    full = np.zeros(sys_.num_cols)
    full[collist] = xB
    return full, swaps


def _walk_state_exact(sys_: PolytopeSystem, cols: tuple[int, ...]):
    full = _exact_solution(sys_, cols)
    if full is None:
        raise ValueError("current basis is singular")
    colset = set(cols)
    swaps = []
    for leave in cols:
        for enter in range(sys_.num_cols):
            if enter in colset:
                continue
            cand = tuple(sorted((colset - {leave}) | {enter}))
            nonsing, feas = exact_feasibility(sys_, cand)
            if nonsing and feas:
                swaps.append(PivotMove(leave, enter))
    swaps.sort(key=lambda mv: (mv.leaving, mv.entering))
    return full, swaps


def walk_state(sys_: PolytopeSystem, columns: Iterable[int]):
    """Current basic solution plus all feasible one-swap moves, deterministic order."""
    cols = _check_columns(sys_, columns)
    if sys_.is_exact:
        return _walk_state_exact(sys_, cols)
    return _walk_state_float(sys_, cols)


def feasible_swaps(sys_: PolytopeSystem, columns: Iterable[int]) -> list[PivotMove]:
    """All PivotMoves whose application yields a feasible basis, sorted."""
    return walk_state(sys_, columns)[1]


def adjacent_feasible_bases(sys_: PolytopeSystem, basis: Basis | Iterable[int]) -> list[Basis]:
    """Every feasible basis differing from the given one in exactly one column."""
    cols = basis.columns if isinstance(basis, Basis) else _check_columns(sys_, basis)
    moves = feasible_swaps(sys_, cols)
    return [make_basis(sys_, mv.apply(cols)) for mv in moves]
