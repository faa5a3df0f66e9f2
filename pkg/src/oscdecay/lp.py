"""Exact rational linear programming with a tiny two-phase simplex.

Everything is fractions.Fraction; Bland's rule guarantees termination.  Meant
for the polytope layer's small instances (tens of variables), where exactness
matters far more than speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            tableau[r] = [v - factor * p for v, p in zip(line, tableau[row])]
    basis[row] = col


def _run_simplex(tableau: list[list[Fraction]], basis: list[int], ncols: int) -> None:
    # Objective row is tableau[-1]; minimize. Bland's rule on reduced costs.
    while True:
        obj = tableau[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return
        best_row, best_ratio = None, None
        for r in range(len(tableau) - 1):
            a = tableau[r][col]
            if a > 0:
                ratio = tableau[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[best_row])
                ):
                    best_row, best_ratio = r, ratio
        if best_row is None:
            raise _Unbounded()
        _pivot(tableau, basis, best_row, col)


class _Unbounded(Exception):
    pass


def lp_solve(
    c: Sequence[Fraction], A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> tuple[str, list[Fraction] | None, Fraction | None]:
    """Minimize c.x subject to A x = b, x >= 0, exactly.

    Returns (status, x, value) with status one of 'optimal', 'infeasible',
    'unbounded'.
    """
    m, n = len(A), len(c)
    rows = [[Fraction(v) for v in row] for row in A]
    rhs = [Fraction(v) for v in b]
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    # Phase 1: artificials n..n+m-1.
    tableau = [rows[i] + [ONE if j == i else ZERO for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    obj = [ZERO] * (n + m + 1)
    for i in range(m):
        for j in range(n + m + 1):
            obj[j] -= tableau[i][j]
    for j in range(n, n + m):
        obj[j] = ZERO
    tableau.append(obj)
    try:
        _run_simplex(tableau, basis, n + m)
    except _Unbounded:  # pragma: no cover - phase 1 objective is bounded below
        return "infeasible", None, None
    if tableau[-1][-1] != 0:
        return "infeasible", None, None

    # Drive leftover artificials out of the basis where possible.
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    # Rows still basic in an artificial are redundant (all-zero structurals).

    # Phase 2 objective in terms of the current basis.
    obj = [Fraction(v) for v in c] + [ZERO] * (m + 1)
    for r in range(m):
        if basis[r] < n and obj[basis[r]] != 0:
            factor = obj[basis[r]]
            obj = [v - factor * p for v, p in zip(obj, tableau[r])]
    tableau[-1] = obj
    # Forbid re-entering artificial columns.
    try:
        _run_simplex(tableau, basis, n)
    except _Unbounded:
        return "unbounded", None, None

    x = [ZERO] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = tableau[r][-1]
    value = -tableau[-1][-1]
    return "optimal", x, value


def lp_feasible(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> bool:
    """Exact feasibility of {A x = b, x >= 0}."""
    n = len(A[0]) if A else 0
    status, _, _ = lp_solve([ZERO] * n, A, b)
    return status == "optimal"
