"""Deterministic seeded sampling helpers.

Every randomized check in the library derives its draws from
``random.Random((seed, *salt))`` so that results are a pure function of the
inputs and the seed, independent of how work is chunked across workers.
Integer hashing in CPython is stable, so reports are reproducible across
runs and platforms.
"""
from __future__ import annotations

import random
import zlib
from fractions import Fraction

from .cones import PolyhedralCone
from .linalg import Vec, as_vec


def rng_for(seed: int, *salt) -> random.Random:
    # Integer seeds are stable across runs, platforms, and PYTHONHASHSEED
    # settings; crc32 on the salt repr keeps derivation cheap enough to buy
    # one independent stream per sample index.
    mixed = (int(seed) + 1) * 0x9E3779B97F4A7C15
    mixed ^= zlib.crc32(repr(salt).encode())
    return random.Random(mixed & 0xFFFFFFFFFFFFFFFF)


def rand_fraction(rng: random.Random, lo, hi, den: int = 1024) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randrange(den + 1), den)


def rand_int_vec(rng: random.Random, dim: int, bound: int = 3) -> Vec:
    return as_vec(rng.randint(-bound, bound) for _ in range(dim))


def cone_point(cone: PolyhedralCone, rng: random.Random, coeff_max: int = 4) -> Vec:
    """Random cone member as an integer nonnegative combination of generators.

    Accumulates in machine integers (the stored generators are integer
    normalized), which keeps the exact membership tests on the fast path.
    """
    coords = [0] * cone.dim
    span = coeff_max + 1
    for g in cone._gen_ints:
        c = rng.getrandbits(20) % span
        if c:
            for i, gi in enumerate(g):
                if gi:
                    coords[i] += c * gi
    return tuple(Fraction(x) for x in coords)


def incomparable_pair(cone: PolyhedralCone, rng: random.Random,
                      coeff_max: int = 4, max_tries: int = 200):
    """A pair of cone points incomparable in the cone order, or None.

    None is returned when rejection sampling stalls, e.g. on totally
    ordered (one-dimensional) cones where no such pair exists.
    """
    for _ in range(max_tries):
        x = cone_point(cone, rng, coeff_max)
        y = cone_point(cone, rng, coeff_max)
        if not cone.leq(x, y) and not cone.leq(y, x):
            return x, y
    return None


def unimodular_matrix(rng: random.Random, n: int, steps: int = 8):
    """Random unimodular integer matrix built from elementary row operations."""
    rows = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    if rng.random() < 0.5:
        i, j = rng.randrange(n), rng.randrange(n)
        rows[i], rows[j] = rows[j], rows[i]
    return tuple(tuple(r) for r in rows)


def random_pointed_cone(rng: random.Random, dim: int, n_gens: int,
                        bound: int = 3, require_generating: bool = False) -> PolyhedralCone:
    """Random pointed cone from integer generators, resampled until pointed."""
    from .cones import cone_from_generators

    if require_generating:
        n_gens = max(n_gens, dim)
    while True:
        gens = [rand_int_vec(rng, dim, bound) for _ in range(n_gens)]
        if all(all(c == 0 for c in g) for g in gens):
            continue
        cone = cone_from_generators(dim, gens)
        if not cone.pointed or not cone.generators:
            continue
        if require_generating and not cone.generating:
            continue
        return cone
