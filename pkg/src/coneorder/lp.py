"""Exact rational linear programming via two-phase simplex with Bland's rule.

Problems are solved in standard form: minimize c.x subject to A x = b, x >= 0,
entirely over Fraction arithmetic.  Bland's entering/leaving rule guarantees
termination, and the small sizes used here (a handful of variables per
geometric oracle) keep exact pivoting cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import Vec, ZERO, ONE, frac

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: str
    x: Vec | None
    objective: Fraction | None


def _pivot(tab, basis, row, col):
    pv = tab[row][col]
    tab[row] = [a / pv for a in tab[row]]
    for i in range(len(tab)):
        if i != row and tab[i][col] != 0:
            f = tab[i][col]
            tab[i] = [a - f * b for a, b in zip(tab[i], tab[row])]
    basis[row] = col


def _simplex(tab, basis, nvars):
    """Run Bland's rule to optimality on a tableau with objective in last row.

    Tableau layout: rows 0..m-1 are constraints [A | b], last row is
    [reduced costs | -objective].  Returns OPTIMAL or UNBOUNDED.
    """
    m = len(tab) - 1
    while True:
        cost = tab[-1]
        col = next((j for j in range(nvars) if cost[j] < 0), None)
        if col is None:
            return OPTIMAL
        row = None
        best = None
        for i in range(m):
            if tab[i][col] > 0:
                ratio = tab[i][-1] / tab[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row is None:
            return UNBOUNDED
        _pivot(tab, basis, row, col)


def solve_lp(c, a_rows, b) -> LpResult:
    """Minimize c.x subject to A x = b, x >= 0, exactly."""
    c = [frac(v) for v in c]
    a = [[frac(v) for v in row] for row in a_rows]
    b = [frac(v) for v in b]
    m, n = len(a), len(c)
    if any(len(row) != n for row in a) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")
    for i in range(m):
        if b[i] < 0:
            a[i] = [-v for v in a[i]]
            b[i] = -b[i]

    # Phase 1: artificial variables, minimize their sum.
    total = n + m
    tab = [a[i] + [ONE if j == i else ZERO for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    obj = [ZERO] * (total + 1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, tab[i])]
    for j in range(n, total):
        obj[j] = ZERO
    tab.append(obj)
    _simplex(tab, basis, total)
    if -tab[-1][-1] != 0:
        return LpResult(INFEASIBLE, None, None)

    # Drive leftover artificial variables out of the basis.
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    rows = [i for i in range(m) if basis[i] < n]
    tab = [[tab[i][j] for j in range(n)] + [tab[i][-1]] for i in rows]
    basis = [basis[i] for i in rows]

    # Phase 2 with the real costs expressed in the current basis.
    obj = list(c) + [ZERO]
    for i, bi in enumerate(basis):
        if obj[bi] != 0:
            f = obj[bi]
            obj = [o - f * v for o, v in zip(obj, tab[i])]
    tab.append(obj)
    status = _simplex(tab, basis, n)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)
    x = [ZERO] * n
    for i, bi in enumerate(basis):
        x[bi] = tab[i][-1]
    return LpResult(OPTIMAL, tuple(x), -tab[-1][-1])


def positive_combination(vectors, target) -> Vec | None:
    """Coefficients lam >= 0 with sum(lam_i * vectors[i]) == target, or None.

    The returned point is a basic feasible solution, so its support indexes
    a linearly independent subset of the vectors.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return () if all(t == 0 for t in target) else None
    a_rows = [ [v[k] for v in vectors] for k in range(len(vectors[0])) ]
    res = solve_lp([ZERO] * len(vectors), a_rows, list(target))
    return res.x if res.status == OPTIMAL else None
