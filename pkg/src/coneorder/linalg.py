"""Exact linear algebra over rationals.

Vectors are tuples of Fraction, matrices are tuples of row vectors.
Everything here is pure Gaussian elimination with exact pivots; there are
no tolerances anywhere.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Vec = tuple[Fraction, ...]
Matrix = tuple[Vec, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


def as_vec(xs) -> Vec:
    return tuple(frac(x) for x in xs)


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c, v: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in v)


def vec_neg(v: Vec) -> Vec:
    return tuple(-a for a in v)


def vec_dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def is_zero_vec(v: Vec) -> bool:
    return all(a == 0 for a in v)


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(n))


def int_scaled(v: Vec) -> tuple[int, ...]:
    """Integer vector on the same ray through v (positive scaling only)."""
    den = 1
    for a in v:
        den = lcm(den, a.denominator)
    return tuple(a.numerator * (den // a.denominator) for a in v)


def normalize_ray(v: Vec) -> Vec:
    """Canonical representative of the ray through v.

    Scales by a positive rational so coordinates are coprime integers.  The
    sign pattern is intrinsic to the ray and never flipped.
    """
    ints = int_scaled(v)
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("cannot normalize the zero vector")
    return tuple(Fraction(a // g) for a in ints)


def normalize_sign_free(v: Vec) -> Vec:
    """Like normalize_ray but also flips so the first nonzero entry is positive.

    Only valid for sign-free vectors (lineality directions, kernel elements).
    """
    w = normalize_ray(v)
    for a in w:
        if a != 0:
            return w if a > 0 else vec_neg(w)
    raise ValueError("cannot normalize the zero vector")


def identity_matrix(n: int) -> Matrix:
    return tuple(unit_vec(n, i) for i in range(n))


def mat_vec(rows: Matrix, v: Vec) -> Vec:
    return tuple(vec_dot(r, v) for r in rows)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(vec_dot(r, c) for c in bt) for r in a)


def transpose(rows) -> Matrix:
    return tuple(tuple(col) for col in zip(*rows)) if rows else ()


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [a / pv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def mat_rank(rows) -> int:
    return len(rref(rows)[1])


def solve(a_rows, b: Vec) -> Vec | None:
    """One exact solution of A x = b, or None if the system is inconsistent."""
    if not a_rows:
        return None if any(x != 0 for x in b) else ()
    ncols = len(a_rows[0])
    aug = [list(r) + [bb] for r, bb in zip(a_rows, b, strict=True)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, c in zip(m, pivots):
        x[c] = row[-1]
    return tuple(x)


def kernel_basis(a_rows, ncols: int) -> list[Vec]:
    """Basis of {x : A x = 0} for A with ncols columns."""
    m, pivots = rref(a_rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, c in zip(m, pivots):
            x[c] = -row[f]
        basis.append(tuple(x))
    return basis


def invert_matrix(rows) -> Matrix | None:
    """Exact inverse of a square matrix, or None if singular."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    aug = [list(r) + list(unit_vec(n, i)) for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return tuple(tuple(m[i][n:]) for i in range(n))


def independent_subset(vectors) -> list[int]:
    """Indices of a greedy maximal linearly independent subset, in order."""
    chosen: list[int] = []
    rows: list[Vec] = []
    for i, v in enumerate(vectors):
        if mat_rank(rows + [tuple(v)]) > len(rows):
            rows.append(tuple(v))
            chosen.append(i)
    return chosen
