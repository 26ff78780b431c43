"""Order-theoretic computations on a cone.

Finite suprema and infima are decided exactly by enumerating the vertices of
the upper (or lower) bound polyhedron: for a pointed cone the bound set
U(S) = intersection of translates p + C is a polyhedron whose recession cone
is C, so S has a least upper bound exactly when U(S) has a single vertex.
On top of that sit order intervals, inf-sup expression evaluation, the
engaged/disengaged classification of extreme rays, the Cartesian splitting
along a disengaged ray, the order-unit norm, and the hypothesis test for the
linearity theorem specialized to polyhedral cones.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cones import PolyhedralCone, cone_from_generators, double_description
from .errors import (
    DimensionMismatch,
    InternalInconsistency,
    NotComparable,
    NotGenerating,
    NotInCone,
    NotOrderUnit,
    NotPointed,
    RayIsEngaged,
    UndefinedLattice,
)
from .linalg import (
    Matrix,
    Vec,
    ZERO,
    as_vec,
    independent_subset,
    invert_matrix,
    is_zero_vec,
    kernel_basis,
    mat_vec,
    normalize_ray,
    solve,
    transpose,
    unit_vec,
    vec_add,
    vec_dot,
    vec_neg,
    vec_scale,
    vec_sub,
)
from .sampling import rng_for

EXISTS = "exists"
NO_UPPER_BOUND = "no_upper_bound"
NO_LEAST_UPPER_BOUND = "no_least_upper_bound"


@dataclass(frozen=True)
class SupResult:
    """Outcome of a finite supremum (or, read dually, infimum) computation.

    For infima the outcome labels keep their names but mean the dual thing:
    ``no_upper_bound`` signals an empty lower-bound set.
    """

    outcome: str
    value: Vec | None = None
    witnesses: tuple[Vec, Vec] | None = None

    @property
    def exists(self) -> bool:
        return self.outcome == EXISTS


def _bound_vertices(cone: PolyhedralCone, points, upper: bool) -> list[Vec]:
    """Sorted vertices of the set of upper (lower) bounds of the points.

    Works in the homogenization R^(d+1); rays with positive last coordinate
    are vertices, rays with zero last coordinate are recession directions.
    """
    d = cone.dim
    cons = []
    for h in cone.facets:
        vals = [vec_dot(h, p) for p in points]
        if upper:
            cons.append(tuple(h) + (-max(vals),))
        else:
            cons.append(tuple(-c for c in h) + (min(vals),))
    cons.append(unit_vec(d + 1, d))
    lin, rays = double_description(d + 1, cons)
    if lin:
        raise InternalInconsistency("bound polyhedron of a pointed cone has lineality")
    verts = []
    for r in rays:
        t = r[d]
        if t > 0:
            verts.append(tuple(c / t for c in r[:d]))
    return sorted(verts)


def supremum(cone: PolyhedralCone, points) -> SupResult:
    """Least upper bound of finitely many points, with certificates.

    Exists(z) comes with the guarantee that the upper bound set equals
    z + C; otherwise the two lexicographically smallest vertices of the
    upper bound set witness the failure, or the set is empty.
    """
    pts = [cone._check_dim(as_vec(p)) for p in points]
    if not pts:
        raise ValueError("supremum needs at least one point")
    if not cone.pointed:
        raise NotPointed("suprema are computed for pointed cones only")
    verts = _bound_vertices(cone, pts, upper=True)
    if not verts:
        return SupResult(NO_UPPER_BOUND)
    if len(verts) == 1:
        return SupResult(EXISTS, value=verts[0])
    return SupResult(NO_LEAST_UPPER_BOUND, witnesses=(verts[0], verts[1]))


def infimum(cone: PolyhedralCone, points) -> SupResult:
    """Greatest lower bound; the exact dual of supremum via the order of -C."""
    pts = [cone._check_dim(as_vec(p)) for p in points]
    if not pts:
        raise ValueError("infimum needs at least one point")
    if not cone.pointed:
        raise NotPointed("infima are computed for pointed cones only")
    verts = _bound_vertices(cone, pts, upper=False)
    if not verts:
        return SupResult(NO_UPPER_BOUND)
    if len(verts) == 1:
        return SupResult(EXISTS, value=verts[0])
    return SupResult(NO_LEAST_UPPER_BOUND, witnesses=(verts[0], verts[1]))


def interval_sample(cone: PolyhedralCone, x, y, n: int, seed: int = 0) -> list[Vec]:
    """n deterministic points of the order interval [x, y].

    Rejection sampling runs inside the affine hull of the interval, so
    degenerate intervals (for example [0, r] on an extreme ray, which is
    just a segment) are sampled correctly instead of never being hit.
    """
    x, y = cone._check_dim(as_vec(x)), cone._check_dim(as_vec(y))
    if not cone.leq(x, y):
        raise NotComparable("interval [x, y] needs x <= y")
    if n <= 0:
        return []
    d = cone.dim
    cons = []
    for h in cone.facets:
        cons.append(tuple(h) + (-vec_dot(h, x),))
        cons.append(tuple(vec_neg(h)) + (vec_dot(h, y),))
    cons.append(unit_vec(d + 1, d))
    lin, rays = double_description(d + 1, cons)
    verts = []
    for r in rays:
        if r[d] == 0:
            raise InternalInconsistency("order interval with unbounded recession")
        verts.append(tuple(c / r[d] for c in r[:d]))
    verts.sort()
    free_dirs = [l[:d] for l in lin]

    v0 = verts[0]
    diffs = [vec_sub(v, v0) for v in verts[1:]]
    chosen = independent_subset(diffs + free_dirs)
    basis = [(diffs + free_dirs)[i] for i in chosen]
    n_diff = sum(1 for i in chosen if i < len(diffs))
    if not basis:
        return [v0] * n

    a_rows = transpose(basis)
    coords = []
    for dv in diffs:
        t = solve(a_rows, dv)
        coords.append(t)
    ranges = []
    for j in range(len(basis)):
        if j < n_diff:
            vals = [ZERO] + [t[j] for t in coords]
            ranges.append((min(vals), max(vals)))
        else:
            ranges.append((Fraction(-3), Fraction(3)))

    rng = rng_for(seed, "interval")
    den = 1 << 10
    out: list[Vec] = []
    attempts = 0
    limit = 2000 * n + 4000
    while len(out) < n:
        attempts += 1
        if attempts > limit:
            raise InternalInconsistency("interval rejection sampling stalled")
        z = list(v0)
        for (lo, hi), b in zip(ranges, basis):
            t = lo + (hi - lo) * Fraction(rng.randrange(den + 1), den)
            if t:
                for i, bi in enumerate(b):
                    z[i] += t * bi
        zt = tuple(z)
        if cone.leq(x, zt) and cone.leq(zt, y):
            out.append(zt)
    return out


def is_totally_ordered(cone: PolyhedralCone, points) -> bool:
    """True iff every pair of the given points is comparable."""
    pts = [as_vec(p) for p in points]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if not cone.leq(pts[i], pts[j]) and not cone.leq(pts[j], pts[i]):
                return False
    return True


# ---------------------------------------------------------------------------
# Inf-sup expressions


@dataclass(frozen=True)
class InfSupExpr:
    """Finite expression tree of suprema and infima over vector leaves."""

    kind: str  # "leaf" | "sup" | "inf"
    vec: Vec | None = None
    children: tuple["InfSupExpr", ...] = ()

    def __post_init__(self):
        if self.kind == "leaf":
            if self.vec is None or self.children:
                raise ValueError("leaf nodes carry exactly one vector")
        elif self.kind in ("sup", "inf"):
            if not self.children or self.vec is not None:
                raise ValueError(f"{self.kind} nodes need at least one child")
        else:
            raise ValueError(f"unknown node kind {self.kind!r}")


def leaf(v) -> InfSupExpr:
    return InfSupExpr("leaf", vec=as_vec(v))


def sup_expr(*children: InfSupExpr) -> InfSupExpr:
    return InfSupExpr("sup", children=tuple(children))


def inf_expr(*children: InfSupExpr) -> InfSupExpr:
    return InfSupExpr("inf", children=tuple(children))


def eval_infsup(cone: PolyhedralCone, expr: InfSupExpr, _path=()) -> Vec:
    """Bottom-up evaluation; raises UndefinedLattice naming the failing node."""
    if expr.kind == "leaf":
        return cone._check_dim(expr.vec)
    vals = [eval_infsup(cone, c, _path + (i,)) for i, c in enumerate(expr.children)]
    res = supremum(cone, vals) if expr.kind == "sup" else infimum(cone, vals)
    if not res.exists:
        raise UndefinedLattice(_path, detail=res.outcome, witnesses=res.witnesses)
    return res.value


def _scaled_expr(lam: Fraction, e: InfSupExpr) -> InfSupExpr:
    if e.kind == "leaf":
        return leaf(vec_scale(lam, e.vec))
    return InfSupExpr(e.kind, children=tuple(_scaled_expr(lam, c) for c in e.children))


def _sum_expr(e1: InfSupExpr, e2: InfSupExpr) -> InfSupExpr:
    # Distributes one quantifier at a time; valid because sup and inf commute
    # with translation, which is how the product representation of a positive
    # combination of two inf-sup elements is built.
    if e1.kind == "leaf" and e2.kind == "leaf":
        return leaf(vec_add(e1.vec, e2.vec))
    if e1.kind != "leaf":
        return InfSupExpr(e1.kind, children=tuple(_sum_expr(c, e2) for c in e1.children))
    return InfSupExpr(e2.kind, children=tuple(_sum_expr(e1, c) for c in e2.children))


def combine_infsup(expr_x: InfSupExpr, expr_y: InfSupExpr, lam, mu) -> InfSupExpr:
    """The inf-sup expression representing lam*x + mu*y built leafwise."""
    lam, mu = Fraction(lam), Fraction(mu)
    if lam < 0 or mu < 0:
        raise ValueError("combination coefficients must be nonnegative")
    return _sum_expr(_scaled_expr(lam, expr_x), _scaled_expr(mu, expr_y))


def infsup_linearity_check(cone: PolyhedralCone, expr_x: InfSupExpr,
                           expr_y: InfSupExpr, lam, mu) -> bool:
    """Exact check that evaluating the combined expression equals the
    combination of the evaluations."""
    lam, mu = Fraction(lam), Fraction(mu)
    lhs = eval_infsup(cone, combine_infsup(expr_x, expr_y, lam, mu))
    vx = eval_infsup(cone, expr_x)
    vy = eval_infsup(cone, expr_y)
    rhs = vec_add(vec_scale(lam, vx), vec_scale(mu, vy))
    return lhs == rhs


# ---------------------------------------------------------------------------
# Engaged / disengaged classification


@dataclass(frozen=True)
class CombinationCertificate:
    """Exact coefficients writing the ray generator in the span of the others."""

    coefficients: tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class SeparatingFunctional:
    """Functional vanishing on all other extreme generators, nonzero on this one."""

    functional: Vec


@dataclass(frozen=True)
class ExtremeRayReport:
    ray_index: int
    generator: Vec
    engaged: bool
    certificate: CombinationCertificate | SeparatingFunctional


def classify_engaged(cone: PolyhedralCone) -> list[ExtremeRayReport]:
    """Engaged/disengaged verdict with a verifying certificate per extreme ray.

    A ray is engaged when its generator lies in the linear span of the other
    extreme rays' generators.  Certificates are checked exactly before being
    returned.
    """
    if not cone.pointed:
        raise NotPointed("engagement is defined for pointed cones")
    gens = cone.generators
    reports = []
    for i, g in enumerate(gens):
        others = [gens[j] for j in range(len(gens)) if j != i]
        other_idx = [j for j in range(len(gens)) if j != i]
        coeffs = solve(transpose(others), g) if others else None
        if coeffs is not None:
            recon = [ZERO] * cone.dim
            pairs = []
            for j, c in zip(other_idx, coeffs):
                if c != 0:
                    pairs.append((j, c))
                    for k_i, comp in enumerate(gens[j]):
                        recon[k_i] += c * comp
            if tuple(recon) != g:
                raise InternalInconsistency("combination certificate failed to verify")
            reports.append(ExtremeRayReport(i, g, True, CombinationCertificate(tuple(pairs))))
        else:
            phi = None
            for cand in kernel_basis(others, cone.dim):
                if vec_dot(cand, g) != 0:
                    phi = normalize_ray(cand)
                    break
            if phi is None or any(vec_dot(phi, o) != 0 for o in others):
                raise InternalInconsistency("separating functional failed to verify")
            reports.append(ExtremeRayReport(i, g, False, SeparatingFunctional(phi)))
    return reports


@dataclass(frozen=True)
class DisengagedSplit:
    """Cartesian factorization of (X, C) along a disengaged extreme ray.

    ``projection`` maps ambient coordinates to split coordinates: the first
    coordinate is the multiple of the ray, the rest are coordinates in the
    basis of W = span of the other extreme generators, where ``subcone``
    lives.  ``basis`` lists the inverse images (ray first, then the basis of
    W) as columns of projection^{-1}.
    """

    ray: Vec
    subcone: PolyhedralCone
    projection: Matrix
    basis: tuple[Vec, ...]

    def split(self, x) -> tuple[Fraction, Vec]:
        c = mat_vec(self.projection, x)
        return c[0], c[1:]

    def unsplit(self, t, w) -> Vec:
        out = list(vec_scale(t, self.basis[0])) if t else [ZERO] * len(self.basis[0])
        for coeff, b in zip(w, self.basis[1:]):
            if coeff:
                for i, bi in enumerate(b):
                    if bi:
                        out[i] += coeff * bi
        return tuple(out)


def disengaged_split(cone: PolyhedralCone, ray_index: int) -> DisengagedSplit:
    """Split (X, C) as (R + W, R_+ x subcone) along a disengaged extreme ray.

    Requires the cone to be generating so the ray and W together span the
    ambient space; verified by mapping all generators through the
    coordinate change.
    """
    if not cone.pointed:
        raise NotPointed("splitting needs a pointed cone")
    if not cone.generating:
        raise NotGenerating("splitting needs a generating cone")
    gens = cone.generators
    if not 0 <= ray_index < len(gens):
        raise ValueError(f"ray index {ray_index} out of range")
    report = classify_engaged(cone)[ray_index]
    if report.engaged:
        raise RayIsEngaged(f"ray {ray_index} lies in the span of the others")
    r = gens[ray_index]
    others = [gens[j] for j in range(len(gens)) if j != ray_index]
    w_basis = [others[j] for j in independent_subset(others)]
    cols = [r] + w_basis
    if len(cols) != cone.dim:
        raise InternalInconsistency("split basis does not span the ambient space")
    proj = invert_matrix(transpose(cols))
    if proj is None:
        raise InternalInconsistency("split basis is singular")
    sub_gens = []
    for g in others:
        c = mat_vec(proj, g)
        if c[0] != 0:
            raise InternalInconsistency("generator outside W after split")
        sub_gens.append(c[1:])
    subcone = cone_from_generators(cone.dim - 1, sub_gens)
    if mat_vec(proj, r) != unit_vec(cone.dim, 0):
        raise InternalInconsistency("ray does not map to the first split axis")
    return DisengagedSplit(ray=r, subcone=subcone, projection=proj, basis=tuple(cols))


@dataclass(frozen=True)
class HypothesisVerdict:
    """Whether the linearity theorem's hypothesis holds for this cone.

    For a pointed generating finitely generated cone the inf-sup hull
    condition reduces to every extreme ray being engaged: the positive span
    of all extreme rays is already the whole cone, and a disengaged ray's
    coordinate is identically zero on the engaged span and on every finite
    sup/inf built from it, so the hull stays a proper subset.  ``holds``
    false means "not covered by the theorem", never "a nonlinear
    order-isomorphism exists".
    """

    directed: bool
    pointed: bool
    all_extreme_rays_engaged: bool
    holds: bool
    disengaged_witness: int | None = None


def hypothesis_check(cone: PolyhedralCone) -> HypothesisVerdict:
    directed = cone.generating
    pointed = cone.pointed
    witness = None
    all_engaged = True
    if pointed and cone.generators:
        for rep in classify_engaged(cone):
            if not rep.engaged:
                witness = rep.ray_index
                all_engaged = False
                break
    return HypothesisVerdict(
        directed=directed,
        pointed=pointed,
        all_extreme_rays_engaged=all_engaged,
        holds=directed and pointed and all_engaged,
        disengaged_witness=witness,
    )


def order_unit_norm(cone: PolyhedralCone, u, x) -> Fraction:
    """The order-unit norm |x|_u: least lam >= 0 with -lam*u <= x <= lam*u.

    u must satisfy every facet inequality strictly.  Facet description makes
    this a one-variable linear program whose optimum is the largest ratio
    |<h, x>| / <h, u> over the facets; that closed form is returned exactly.
    """
    u = cone._check_dim(as_vec(u))
    x = cone._check_dim(as_vec(x))
    best = ZERO
    for h in cone.facets:
        hu = vec_dot(h, u)
        if hu <= 0:
            raise NotOrderUnit("u must satisfy all facet inequalities strictly")
        ratio = abs(vec_dot(h, x)) / hu
        if ratio > best:
            best = ratio
    return best


def extreme_halfline_check(cone: PolyhedralCone, apex, direction,
                           n: int = 8, seed: int = 0) -> bool:
    """Exact extremality test cross-checked against the order-theoretic battery.

    The battery checks the half-line characterization on samples: pairwise
    comparability along apex + t*direction, total order of the interval
    [apex, apex + direction], at least two distinct points, and, when the
    direction decomposes over two or more distinct extreme rays, the
    resulting pair of interval points that can never be comparable.  Any
    disagreement with the exact tight-facet rank test is a bug and raises
    InternalInconsistency.
    """
    apex = cone._check_dim(as_vec(apex))
    direction = cone._check_dim(as_vec(direction))
    if is_zero_vec(direction) or not cone.contains(direction):
        raise NotInCone("direction must be a nonzero cone element")
    if n < 2:
        raise ValueError("battery needs at least two sample points")
    exact = cone.is_extreme_vector(direction)

    battery = True
    decomp = cone.caratheodory_decompose(direction)
    if len(decomp) >= 2:
        (c1, g1), (c2, g2) = decomp[0], decomp[1]
        p1 = vec_add(apex, vec_scale(c1, g1))
        p2 = vec_add(apex, vec_scale(c2, g2))
        if not cone.leq(p1, p2) and not cone.leq(p2, p1):
            battery = False

    if battery:
        rng = rng_for(seed, "halfline")
        lambdas = {Fraction(0), Fraction(1)}
        while len(lambdas) < n:
            lambdas.add(Fraction(rng.randrange(0, 3 * 1024), 1024))
        pts = [vec_add(apex, vec_scale(t, direction)) for t in sorted(lambdas)]
        if not is_totally_ordered(cone, pts):
            battery = False
    if battery:
        top = vec_add(apex, direction)
        samples = interval_sample(cone, apex, top, min(n, 8), seed)
        if not is_totally_ordered(cone, samples):
            battery = False

    if battery != exact:
        raise InternalInconsistency(
            f"sampled battery ({battery}) disagrees with exact extremality ({exact})"
        )
    return exact
