"""Polyhedral cones over exact rationals.

A cone is carried in double description: a generator (V) side and a facet
(H) side, converted into each other with the incremental double description
method of Motzkin.  All arithmetic is exact, so the induced partial order
x <= y iff y - x in C has no tolerance anywhere.

Normalization convention: every stored generator and facet normal is scaled
by a positive rational to coprime integer coordinates (the sign pattern of a
ray is intrinsic and never flipped), and the stored lists are sorted
lexicographically.  This makes set equality of cones canonical.  The choice
of representative on each ray is an artifact convention, nothing in the
underlying order theory depends on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from .errors import DimensionMismatch, NotInCone, NotPointed
from .linalg import (
    Vec,
    ZERO,
    as_vec,
    identity_matrix,
    is_zero_vec,
    mat_rank,
    normalize_ray,
    normalize_sign_free,
    unit_vec,
    vec_dot,
    vec_neg,
    vec_scale,
    vec_sub,
)
from .lp import positive_combination


def double_description(dim: int, constraints) -> tuple[list[Vec], list[Vec]]:
    """Extreme rays of {x : <h, x> >= 0 for all h in constraints}.

    Returns (lineality_basis, rays): the feasible cone equals
    span(lineality_basis) + cone(rays), with the rays extreme modulo the
    lineality space.  Constraints are processed incrementally; while a
    constraint is not orthogonal to the current lineality space the space is
    reduced by one dimension, afterwards the classical positive/negative ray
    combination step applies, with the combinatorial adjacency test on tight
    sets kept as bitmasks.
    """
    lineality: list[Vec] = list(identity_matrix(dim))
    rays: list[Vec] = []
    tight: list[int] = []

    for i, h in enumerate(constraints):
        vals = [vec_dot(h, l) for l in lineality]
        k = next((j for j in range(len(lineality)) if vals[j] != 0), None)
        if k is not None:
            z = lineality[k] if vals[k] > 0 else vec_neg(lineality[k])
            c = abs(vals[k])
            new_lin = []
            for j, l in enumerate(lineality):
                if j != k:
                    new_lin.append(vec_sub(l, vec_scale(vals[j] / c, z)))
            lineality = new_lin
            rays = [vec_sub(r, vec_scale(vec_dot(h, r) / c, z)) for r in rays]
            tight = [t | (1 << i) for t in tight]
            rays.append(z)
            tight.append((1 << i) - 1)
            continue

        vals = [vec_dot(h, r) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > 0]
        zer = [j for j, v in enumerate(vals) if v == 0]
        neg = [j for j, v in enumerate(vals) if v < 0]
        if not neg:
            tight = [t | (1 << i) if vals[j] == 0 else t for j, t in enumerate(tight)]
            continue
        new_rays: list[Vec] = []
        new_tight: list[int] = []
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                adjacent = True
                for o in range(len(rays)):
                    if o != p and o != q and (common & ~tight[o]) == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                comb = vec_sub(vec_scale(vals[p], rays[q]), vec_scale(vals[q], rays[p]))
                new_rays.append(normalize_ray(comb))
                new_tight.append(common | (1 << i))
        keep_rays = [rays[j] for j in pos] + [rays[j] for j in zer]
        keep_tight = [tight[j] for j in pos] + [tight[j] | (1 << i) for j in zer]
        seen = set()
        rays, tight = [], []
        for r, t in zip(keep_rays + new_rays, keep_tight + new_tight):
            key = normalize_ray(r)
            if key not in seen:
                seen.add(key)
                rays.append(r)
                tight.append(t)

    return lineality, rays


def _canonical_rays(rays, lineality) -> tuple[Vec, ...]:
    out = {normalize_ray(r) for r in rays}
    for l in lineality:
        n = normalize_sign_free(l)
        out.add(n)
        out.add(vec_neg(n))
    return tuple(sorted(out))


def _dual_facets(dim: int, generators) -> tuple[Vec, ...]:
    """Canonical facet list of cone(generators): extreme rays of the dual
    cone plus a +/- pair for each direction orthogonal to the span."""
    lin, rays = double_description(dim, generators)
    return _canonical_rays(rays, lin)


@dataclass(frozen=True)
class PolyhedralCone:
    """Pointed or non-pointed finitely generated cone in Q^dim.

    generators and facets are canonical (normalized, sorted, minimal); for a
    pointed cone the generators are exactly its extreme rays.  Non-pointed
    cones carry +/- pairs of lineality directions among the generators and
    refuse extreme-ray operations with NotPointed.  Instances are immutable
    and safe to share across threads.
    """

    dim: int
    generators: tuple[Vec, ...]
    facets: tuple[Vec, ...]
    pointed: bool
    generating: bool

    @cached_property
    def _facet_ints(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(c) for c in f) for f in self.facets)

    @cached_property
    def _gen_ints(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(c) for c in g) for g in self.generators)

    def _check_dim(self, x) -> Vec:
        if len(x) != self.dim:
            raise DimensionMismatch(f"expected length {self.dim}, got {len(x)}")
        return tuple(x)

    def _facet_values_int(self, x: Vec) -> list[int]:
        den = 1
        for a in x:
            den = lcm(den, a.denominator)
        xi = [a.numerator * (den // a.denominator) for a in x]
        out = []
        for row in self._facet_ints:
            s = 0
            for h, z in zip(row, xi):
                if h:
                    s += h * z
            out.append(s)
        return out

    def contains(self, x) -> bool:
        """Exact membership: <h, x> >= 0 for every facet normal h."""
        x = self._check_dim(x)
        den = 1
        for a in x:
            d = a.denominator
            if d != 1:
                den = lcm(den, d)
        if den == 1:
            xi = [a.numerator for a in x]
        else:
            xi = [a.numerator * (den // a.denominator) for a in x]
        for row in self._facet_ints:
            s = 0
            for h, z in zip(row, xi):
                if h:
                    s += h * z
            if s < 0:
                return False
        return True

    def leq(self, x, y) -> bool:
        """The induced partial order: x <= y iff y - x in C."""
        x = self._check_dim(x)
        y = self._check_dim(y)
        den = 1
        for a in x:
            d = a.denominator
            if d != 1:
                den = lcm(den, d)
        for a in y:
            d = a.denominator
            if d != 1:
                den = lcm(den, d)
        if den == 1:
            zi = [b.numerator - a.numerator for a, b in zip(x, y)]
        else:
            zi = [
                b.numerator * (den // b.denominator) - a.numerator * (den // a.denominator)
                for a, b in zip(x, y)
            ]
        for row in self._facet_ints:
            s = 0
            for h, z in zip(row, zi):
                if h:
                    s += h * z
            if s < 0:
                return False
        return True

    def tight_facets(self, x) -> list[int]:
        """Indices of facets satisfied with equality at x (x must be in C)."""
        x = self._check_dim(x)
        vals = self._facet_values_int(x)
        if any(v < 0 for v in vals):
            raise NotInCone("point is outside the cone")
        return [i for i, v in enumerate(vals) if v == 0]

    def is_extreme_vector(self, r) -> bool:
        """True iff r spans an extreme ray: its tight facets have rank dim-1."""
        r = self._check_dim(r)
        if not self.pointed:
            raise NotPointed("extreme vectors are only defined for pointed cones")
        if is_zero_vec(r) or not self.contains(r):
            raise NotInCone("extreme test needs a nonzero vector inside the cone")
        tight = [self.facets[i] for i in self.tight_facets(r)]
        return mat_rank(tight) == self.dim - 1

    def extreme_rays(self) -> tuple[Vec, ...]:
        if not self.pointed:
            raise NotPointed("non-pointed cones have no extreme rays")
        return self.generators

    def caratheodory_decompose(self, x) -> list[tuple[Fraction, Vec]]:
        """Write x in C as an exact nonnegative combination of at most dim
        extreme generators (a basic feasible solution, so the support is
        linearly independent)."""
        x = self._check_dim(x)
        if not self.pointed:
            raise NotPointed("decomposition needs a pointed cone")
        if not self.contains(x):
            raise NotInCone("cannot decompose a point outside the cone")
        if is_zero_vec(x):
            return []
        coeffs = positive_combination(self.generators, x)
        if coeffs is None:
            raise NotInCone("decomposition LP infeasible for a cone member")
        return [(c, g) for c, g in zip(coeffs, self.generators) if c != 0]

    def lineality_dim(self) -> int:
        return self.dim - mat_rank(self.facets)

    def __repr__(self) -> str:
        kind = "pointed" if self.pointed else "non-pointed"
        return (
            f"PolyhedralCone(dim={self.dim}, {len(self.generators)} generators, "
            f"{len(self.facets)} facets, {kind})"
        )


def _build(dim: int, facet_system) -> PolyhedralCone:
    lin, rays = double_description(dim, facet_system)
    generators = _canonical_rays(rays, lin)
    if generators:
        facets = _dual_facets(dim, generators)
    else:
        facets = tuple(sorted([unit_vec(dim, i) for i in range(dim)]
                              + [vec_neg(unit_vec(dim, i)) for i in range(dim)]))
    return PolyhedralCone(
        dim=dim,
        generators=generators,
        facets=facets,
        pointed=not lin,
        generating=mat_rank(generators) == dim if generators else dim == 0,
    )


def _validated(dim: int, vectors, what: str) -> list[Vec]:
    if dim < 1:
        raise DimensionMismatch("ambient dimension must be >= 1")
    out = []
    for v in vectors:
        w = as_vec(v)
        if len(w) != dim:
            raise DimensionMismatch(f"{what} has length {len(w)}, expected {dim}")
        out.append(w)
    return out


def cone_from_generators(dim: int, gens) -> PolyhedralCone:
    """Cone spanned by the given vectors.

    Zero generators are dropped; an all-zero list yields the trivial cone
    {0}.  Redundant (non-extreme) generators are eliminated, so the stored
    generator list of a pointed cone is exactly its extreme rays.
    """
    gens = [g for g in _validated(dim, gens, "generator") if not is_zero_vec(g)]
    if not gens:
        facets = tuple(sorted([unit_vec(dim, i) for i in range(dim)]
                              + [vec_neg(unit_vec(dim, i)) for i in range(dim)]))
        return PolyhedralCone(dim=dim, generators=(), facets=facets,
                              pointed=True, generating=False)
    seen = sorted({normalize_ray(g) for g in gens})
    facets = _dual_facets(dim, seen)
    cone = _build(dim, facets)
    return cone


def cone_from_facets(dim: int, facets) -> PolyhedralCone:
    """Cone {x : <h, x> >= 0 for all given inner normals h}.

    Zero normals impose no constraint and are dropped; an empty list gives
    the whole space (flagged non-pointed).
    """
    fs = [f for f in _validated(dim, facets, "facet normal") if not is_zero_vec(f)]
    system = sorted({normalize_ray(f) for f in fs})
    return _build(dim, system)


def orthant(dim: int) -> PolyhedralCone:
    """The nonnegative orthant, the workhorse simplicial example."""
    return cone_from_generators(dim, identity_matrix(dim))


def square_cone() -> PolyhedralCone:
    """Cone over the square: {(a, b, t) : max(|a|, |b|) <= t}.

    Finite-dimensional model of the order unit space whose four extreme
    rays are all engaged.
    """
    return cone_from_generators(3, [(1, 1, 1), (-1, 1, 1), (1, -1, 1), (-1, -1, 1)])


def interval_cone() -> PolyhedralCone:
    """{(a, t) : |a| <= t}, the 2-dimensional cone with two disengaged rays."""
    return cone_from_generators(2, [(1, 1), (-1, 1)])
