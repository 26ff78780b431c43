from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coneorder.cones import cone_from_generators, interval_cone, orthant, square_cone
from coneorder.errors import (
    NotColinear,
    NotConeMap,
    NotExtreme,
    NotSimplicial,
    MapCountMismatch,
    OutOfDomain,
    RayIsEngaged,
    SameRay,
)
from coneorder.iso import (
    AffineMap,
    DiagonalIso,
    IDENTITY_MAP,
    LinearIso,
    OddPowerMap,
    PiecewiseLinearMap,
    check_additivity,
    check_affine_on,
    check_order_iso_sampled,
    check_parallelogram,
    check_positively_homogeneous,
    compose_isos,
    eval_iso,
    extract_g_r,
    halfline_image_check,
    identity_iso,
    invert_iso,
    make_affine_iso,
    make_diagonal_iso,
    make_linear_iso,
    make_product_lift,
)
from coneorder.linalg import as_vec, vec_add, vec_scale
from coneorder.sampling import cone_point, rng_for


def V(*xs):
    return as_vec(xs)


def cube_iso():
    # orthant(2).generators is sorted: ((0,1),(1,0)); cube the (1,0) coordinate
    return make_diagonal_iso(orthant(2), [V(0, 1), V(1, 0)],
                             [IDENTITY_MAP, OddPowerMap(3)])


def cube_iso_3d():
    o3 = orthant(3)
    return make_diagonal_iso(o3, list(o3.generators), [OddPowerMap(3)] * 3)


class TestMonotoneBijections:
    def test_affine_map(self):
        m = AffineMap(Fraction(2), Fraction(1))
        assert m(Fraction(3)) == 7
        assert m.invert(Fraction(7)) == 3
        assert m.exact
        with pytest.raises(ValueError):
            AffineMap(Fraction(0))

    def test_piecewise_linear_evaluation_and_extension(self):
        m = PiecewiseLinearMap(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))))
        assert m(Fraction(1, 2)) == 1
        assert m(Fraction(2)) == 3      # slope 1 beyond the last breakpoint
        assert m(Fraction(-1)) == -1    # slope 1 before the first breakpoint
        assert m.invert(Fraction(3)) == 2
        assert m.invert(Fraction(1)) == Fraction(1, 2)
        assert m.fixes_zero()
        # strictly increasing everywhere sampled
        grid = [Fraction(k, 4) for k in range(-8, 12)]
        vals = [m(t) for t in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_piecewise_validation(self):
        with pytest.raises(ValueError):
            PiecewiseLinearMap(((Fraction(0), Fraction(0)),))
        with pytest.raises(ValueError):
            PiecewiseLinearMap(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))))

    def test_odd_power(self):
        m = OddPowerMap(3)
        assert m(Fraction(-2)) == -8
        assert m.invert(Fraction(27)) == 3          # exact at perfect cubes
        assert m.invert(Fraction(-8, 27)) == Fraction(-2, 3)
        approx = m.invert(Fraction(2))
        assert abs(float(approx) ** 3 - 2) < 1e-9   # flagged approximate
        assert not m.exact
        assert OddPowerMap(1).exact
        with pytest.raises(ValueError):
            OddPowerMap(2)
        with pytest.raises(ValueError):
            OddPowerMap(-3)


scalars = st.fractions(min_value=-20, max_value=20, max_denominator=12)


class TestBijectionProperties:
    @given(scalars, scalars)
    def test_affine_map_roundtrip_and_monotone(self, a, b):
        m = AffineMap(Fraction(5, 3), Fraction(-2, 7))
        assert m.invert(m(a)) == a
        if a < b:
            assert m(a) < m(b)

    @given(scalars, scalars)
    def test_piecewise_roundtrip_and_monotone(self, a, b):
        m = PiecewiseLinearMap(((Fraction(-1), Fraction(-3)), (Fraction(0), Fraction(0)),
                                (Fraction(2), Fraction(1))))
        assert m.invert(m(a)) == a
        if a < b:
            assert m(a) < m(b)

    @given(scalars)
    def test_odd_power_forward_exact_and_inverse_at_powers(self, a):
        m = OddPowerMap(3)
        assert m(a) == a ** 3
        assert m.invert(a ** 3) == a


class TestLinearIso:
    def test_identity_and_swap(self):
        o2 = orthant(2)
        assert eval_iso(identity_iso(o2), V(2, 5)) == V(2, 5)
        swap = make_linear_iso([[0, 1], [1, 0]], o2, o2)
        assert eval_iso(swap, V(2, 5)) == V(5, 2)
        assert invert_iso(swap, V(5, 2)) == V(2, 5)

    def test_shear_rejected_by_inverse_generator_test(self):
        with pytest.raises(NotConeMap):
            make_linear_iso([[1, 1], [0, 1]], orthant(2), orthant(2))

    def test_singular_rejected(self):
        with pytest.raises(NotConeMap):
            make_linear_iso([[1, 1], [1, 1]], orthant(2), orthant(2))

    def test_cross_cone_map(self):
        src = orthant(2)
        m = [[1, 1], [-1, 1]]
        tgt = cone_from_generators(2, [V(1, -1), V(1, 1)])
        spec = make_linear_iso(m, src, tgt)
        assert spec.target_cone == tgt
        assert eval_iso(spec, V(1, 0)) == V(1, -1)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            eval_iso(identity_iso(orthant(2)), V(-1, 0))


class TestDiagonalIso:
    def test_identity_frame(self):
        o2 = orthant(2)
        spec = make_diagonal_iso(o2, list(o2.generators), [IDENTITY_MAP, IDENTITY_MAP])
        assert eval_iso(spec, V(3, 4)) == V(3, 4)

    def test_cube_map_values(self):
        spec = cube_iso()
        assert eval_iso(spec, V(2, 1)) == V(8, 1)
        assert invert_iso(spec, V(8, 1)) == V(2, 1)

    def test_square_cone_not_simplicial(self):
        with pytest.raises(NotSimplicial):
            make_diagonal_iso(square_cone(), list(square_cone().generators),
                              [IDENTITY_MAP] * 4)

    def test_map_count_mismatch(self):
        with pytest.raises(MapCountMismatch):
            make_diagonal_iso(orthant(2), [V(1, 0), V(0, 1)], [IDENTITY_MAP])

    def test_maps_must_fix_zero(self):
        with pytest.raises(ValueError):
            make_diagonal_iso(orthant(2), [V(1, 0), V(0, 1)],
                              [AffineMap(Fraction(1), Fraction(1)), IDENTITY_MAP])

    def test_dependent_frame_rejected(self):
        with pytest.raises(NotSimplicial):
            make_diagonal_iso(orthant(2), [V(1, 1), V(2, 2)], [IDENTITY_MAP] * 2)


class TestProductLift:
    def test_orthant_lift_nonlinear(self):
        spec = make_product_lift(orthant(3), 0, OddPowerMap(3), identity_iso(orthant(2)))
        report = check_order_iso_sampled(spec, 400, seed=0)
        assert report.verdict == "PassedSampling"
        pts = [vec_add(cone_point(orthant(3), rng_for(1, "plaff", t)), V(0, 0, 0))
               for t in range(20)]
        fit = check_affine_on(spec, pts, tolerance=Fraction(1, 10**9))
        assert not fit.affine

    def test_interval_cone_piecewise_lift_exact(self):
        ic = interval_cone()
        pwl = PiecewiseLinearMap(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))))
        spec = make_product_lift(ic, 1, pwl, identity_iso(orthant(1)))
        assert spec.exact
        report = check_order_iso_sampled(spec, 500, seed=0)
        assert report.verdict == "PassedSampling"
        # in split coordinates the ray coordinate doubles below the breakpoint
        t2 = vec_scale(Fraction(1, 2), V(1, 1))
        image = eval_iso(spec, t2)
        assert image == V(1, 1)

    def test_engaged_ray_refused(self):
        with pytest.raises(RayIsEngaged):
            make_product_lift(square_cone(), 0, OddPowerMap(3), identity_iso(orthant(2)))

    def test_sub_iso_domain_mismatch(self):
        with pytest.raises(NotConeMap):
            make_product_lift(orthant(3), 0, OddPowerMap(3), identity_iso(orthant(1)))


class TestComposeAndAffine:
    def test_compose_roundtrip(self):
        o2 = orthant(2)
        swap = make_linear_iso([[0, 1], [1, 0]], o2, o2)
        chain = compose_isos(swap, cube_iso())
        x = V(2, 3)
        assert eval_iso(chain, x) == eval_iso(cube_iso(), eval_iso(swap, x))

    def test_compose_mismatch(self):
        with pytest.raises(NotConeMap):
            compose_isos(identity_iso(orthant(2)), identity_iso(orthant(3)))

    def test_affine_translate(self):
        o2 = orthant(2)
        spec = make_affine_iso(identity_iso(o2), V(1, 1), V(-2, 0))
        assert eval_iso(spec, V(2, 3)) == V(-1, 2)
        assert invert_iso(spec, V(-1, 2)) == V(2, 3)
        with pytest.raises(OutOfDomain):
            eval_iso(spec, V(0, 0))

    def test_nested_product_lift(self):
        # lift over e1 of orthant(3) with a sub iso that is itself a lift
        inner = make_product_lift(orthant(2), 0, OddPowerMap(3), identity_iso(orthant(1)))
        outer = make_product_lift(orthant(3), 0,
                                  PiecewiseLinearMap(((Fraction(0), Fraction(0)),
                                                      (Fraction(1), Fraction(2)))),
                                  inner)
        rep = check_order_iso_sampled(outer, 300, seed=0)
        assert rep.verdict == "PassedSampling"

    def test_affine_translate_passes_battery(self):
        spec = make_affine_iso(cube_iso(), V(1, 2), V(-3, 0))
        rep = check_order_iso_sampled(spec, 300, seed=0)
        assert rep.verdict == "PassedSampling"

    def test_diagonal_on_non_generating_simplicial_cone(self):
        plane = cone_from_generators(3, [(1, 0, 0), (0, 1, 1)])
        spec = make_diagonal_iso(plane, list(plane.generators),
                                 [OddPowerMap(3), IDENTITY_MAP])
        assert check_order_iso_sampled(spec, 200, seed=0).verdict == "PassedSampling"

    def test_roundtrip_identity_on_samples(self):
        rng = rng_for(2, "roundtrip")
        ic = interval_cone()
        pwl = PiecewiseLinearMap(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))))
        specs = [identity_iso(orthant(3)), cube_iso(),
                 make_product_lift(ic, 1, pwl, identity_iso(orthant(1)))]
        for spec in specs:
            for _ in range(50):
                x = cone_point(spec.source_cone, rng)
                y = eval_iso(spec, x)
                back = invert_iso(spec, y)
                if spec.exact:
                    assert back == x
                else:
                    assert max(abs(float(a - b)) for a, b in zip(back, x)) < 1e-9


class TestSampledBattery:
    def test_valid_specs_pass(self):
        for spec in (identity_iso(orthant(2)), cube_iso(), cube_iso_3d()):
            assert check_order_iso_sampled(spec, 300, seed=0).verdict == "PassedSampling"

    def test_corrupted_matrix_detected_with_witness(self):
        forged = LinearIso([[1, 1], [0, 1]], orthant(2), orthant(2))
        report = check_order_iso_sampled(forged, 500, seed=0)
        assert report.verdict == "Violation"
        assert report.order_preserving_violations or report.inverse_violations
        # witnesses re-verify exactly
        o2 = orthant(2)
        for y1, y2 in report.inverse_violations[:3]:
            r1, r2 = forged.invert(y1), forged.invert(y2)
            assert o2.leq(y1, y2) and not o2.leq(r1, r2)

    def test_workers_do_not_change_the_report(self):
        spec = cube_iso()
        a = check_order_iso_sampled(spec, 200, seed=3, workers=1)
        b = check_order_iso_sampled(spec, 200, seed=3, workers=4)
        assert a == b


class TestLemmaIdentities:
    def test_parallelogram_identity_and_examples(self):
        ident = identity_iso(orthant(2))
        assert check_parallelogram(ident, V(1, 2), V(1, 0), V(0, 1))
        # cube maps: f(2,2)-f(1,2) = (7,0) = f(2,1)-f(1,1)
        spec = cube_iso()
        assert eval_iso(spec, V(2, 2)) == V(8, 2)
        assert eval_iso(spec, V(1, 2)) == V(1, 2)
        assert eval_iso(spec, V(2, 1)) == V(8, 1)
        assert eval_iso(spec, V(1, 1)) == V(1, 1)
        assert check_parallelogram(spec, V(1, 1), V(1, 0), V(0, 1))

    def test_parallelogram_product_lift(self):
        ic = interval_cone()
        pwl = PiecewiseLinearMap(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))))
        spec = make_product_lift(ic, 1, pwl, identity_iso(orthant(1)))
        assert check_parallelogram(spec, V(0, 2), V(1, 1), V(-1, 1))

    def test_parallelogram_errors(self):
        spec = identity_iso(orthant(2))
        with pytest.raises(NotExtreme):
            check_parallelogram(spec, V(0, 0), V(1, 1), V(0, 1))
        with pytest.raises(SameRay):
            check_parallelogram(spec, V(0, 0), V(1, 0), V(2, 0))
        with pytest.raises(OutOfDomain):
            check_parallelogram(spec, V(-5, -5), V(1, 0), V(0, 1))

    def test_parallelogram_with_negative_extremes(self):
        spec = cube_iso()
        assert check_parallelogram(spec, V(3, 3), V(-1, 0), V(0, -1))

    def test_additivity_examples(self):
        assert check_additivity(identity_iso(orthant(3)), V(0, 0, 0),
                                [V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)])
        assert check_additivity(cube_iso_3d(), V(0, 0, 0),
                                [V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)])
        # square cone with a valid linear iso, mixed extreme directions
        sq = square_cone()
        rot = make_linear_iso([[0, -1, 0], [1, 0, 0], [0, 0, 1]], sq, sq)
        assert check_additivity(rot, V(0, 0, 3), [V(1, 1, 1), V(-1, 1, 1)])

    def test_additivity_over_1000_random_configurations(self):
        rng = rng_for(19, "addmany")
        sq = square_cone()
        rot = make_linear_iso([[0, -1, 0], [1, 0, 0], [0, 0, 1]], sq, sq)
        gens = sq.generators
        for trial in range(250):
            x = vec_add(cone_point(sq, rng), V(0, 0, rng.randint(0, 2)))
            idx = rng.sample(range(4), rng.randint(2, 4))
            ss = [vec_scale(rng.randint(1, 3), gens[i]) for i in idx]
            assert check_additivity(rot, x, ss)
            assert check_parallelogram(rot, x, ss[0], ss[1])


class TestGrExtraction:
    def test_linear_gives_identity(self):
        rows = extract_g_r(identity_iso(orthant(2)), V(1, 0),
                           [V(0, 0), V(1, 3)], [Fraction(0), Fraction(1, 2), Fraction(2)])
        assert all(r.value == r.lam for r in rows)
        # negative scalars stay in the domain from a big enough basepoint
        rows = extract_g_r(identity_iso(orthant(2)), V(1, 0), [V(3, 3)], [Fraction(-2)])
        assert rows[0].value == -2

    def test_cube_map_gives_power(self):
        rows = extract_g_r(cube_iso(), V(1, 0), [V(0, 0)], [Fraction(2)])
        assert rows[0].value == 8

    def test_engaged_ray_basepoint_independence(self):
        sq = square_cone()
        rot = make_linear_iso([[0, -1, 0], [1, 0, 0], [0, 0, 1]], sq, sq)
        rng = rng_for(4, "gr")
        basepoints = [cone_point(sq, rng) for _ in range(4)]
        lams = [Fraction(1, 2), Fraction(2), Fraction(3)]
        rows = extract_g_r(rot, V(1, 1, 1), basepoints, lams)
        by_lam = {}
        for row in rows:
            by_lam.setdefault(row.lam, set()).add(row.value)
        assert all(len(vals) == 1 for vals in by_lam.values())
        assert all(next(iter(vals)) == lam for lam, vals in by_lam.items())

    def test_g_additivity_on_engaged_rays(self):
        sq = square_cone()
        rot = make_linear_iso([[0, -1, 0], [1, 0, 0], [0, 0, 1]], sq, sq)
        base = [V(0, 0, 4)]
        lams = [Fraction(1, 3), Fraction(1, 2), Fraction(5, 6)]
        rows = {r.lam: r.value for r in extract_g_r(rot, V(-1, 1, 1), base, lams)}
        assert rows[Fraction(1, 3)] + rows[Fraction(1, 2)] == rows[Fraction(5, 6)]

    def test_not_colinear_flags_non_isomorphism(self):
        forged = LinearIso([[1, 1], [0, 1]], orthant(2), orthant(2))
        # forged map is linear, so colinearity still holds; corrupt harder:
        bad = DiagonalIso(square_cone(), square_cone().generators[:3],
                          (OddPowerMap(3), IDENTITY_MAP, IDENTITY_MAP),
                          square_cone().generators[:3], square_cone())
        with pytest.raises(NotColinear):
            extract_g_r(bad, V(1, 1, 1), [V(0, 0, 2), V(1, 1, 3)],
                        [Fraction(1, 2), Fraction(2)])


class TestAffineAndHomogeneity:
    def test_linear_is_affine_with_zero_residual(self):
        rng = rng_for(6, "aff")
        o3 = orthant(3)
        spec = make_linear_iso([[1, 1, 0], [0, 1, 0], [0, 0, 2]], o3,
                               cone_from_generators(3, [(1, 0, 0), (1, 1, 0), (0, 0, 2)]))
        pts = [cone_point(o3, rng) for _ in range(20)]
        fit = check_affine_on(spec, pts)
        assert fit.affine and fit.max_residual == 0

    def test_cube_points_on_an_axis_are_not_affine(self):
        spec = cube_iso()
        fit = check_affine_on(spec, [V(1, 0), V(2, 0), V(3, 0), V(1, 1), V(2, 1)])
        assert not fit.affine
        assert fit.max_residual > 0
        assert fit.witness is not None

    def test_degenerate_span(self):
        from coneorder.errors import DegenerateSpan

        # two distinct points span affine dimension 1 and leave nothing to
        # cross-validate: need at least k + 2 points
        with pytest.raises(DegenerateSpan):
            check_affine_on(identity_iso(orthant(2)), [V(1, 0), V(2, 0)])
        with pytest.raises(DegenerateSpan):
            check_affine_on(identity_iso(orthant(2)), [V(1, 0)])

    def test_low_dimensional_point_sets_are_fit_in_their_hull(self):
        # all points on one ray: affine dimension 1, three points suffice
        spec = identity_iso(orthant(3))
        fit = check_affine_on(spec, [V(1, 1, 0), V(2, 2, 0), V(3, 3, 0)])
        assert fit.affine

    def test_homogeneity(self):
        assert check_positively_homogeneous(identity_iso(orthant(2)),
                                            [V(1, 0), V(2, 3)], [Fraction(2), Fraction(1, 2)])
        assert not check_positively_homogeneous(cube_iso(), [V(1, 0)], [Fraction(2)])
        scaled = make_diagonal_iso(orthant(2), [V(0, 1), V(1, 0)],
                                   [AffineMap(Fraction(2)), AffineMap(Fraction(3))])
        assert check_positively_homogeneous(scaled, [V(1, 1), V(2, 5)],
                                            [Fraction(3), Fraction(1, 7)])

    def test_homogeneous_passing_specs_are_linear_through_origin(self):
        # positively homogeneous specs that pass the sampled battery fit an
        # affine map with zero intercept on cone samples including the apex
        sq = square_cone()
        rot = make_linear_iso([[0, -1, 0], [1, 0, 0], [0, 0, 1]], sq, sq)
        scaled = make_diagonal_iso(orthant(2), [V(0, 1), V(1, 0)],
                                   [AffineMap(Fraction(2)), AffineMap(Fraction(5, 3))])
        for spec in (rot, scaled, identity_iso(orthant(3))):
            rng = rng_for(8, "thm53", spec.source_cone.dim)
            samples = [cone_point(spec.source_cone, rng) for _ in range(6)]
            scalars = [Fraction(2), Fraction(1, 2), Fraction(7, 5)]
            assert check_order_iso_sampled(spec, 300, seed=0).verdict == "PassedSampling"
            assert check_positively_homogeneous(spec, samples, scalars)
            zero = V(*([0] * spec.source_cone.dim))
            pts = [zero] + [cone_point(spec.source_cone, rng) for _ in range(15)]
            fit = check_affine_on(spec, pts)
            assert fit.affine and fit.max_residual == 0
            assert fit.predict(zero) == V(*([0] * spec.target_cone.dim))


class TestHalflineImages:
    def test_examples(self):
        lams = [Fraction(0), Fraction(1), Fraction(2), Fraction(5)]
        assert halfline_image_check(identity_iso(orthant(2)), V(0, 0), V(1, 0), lams)
        assert halfline_image_check(cube_iso(), V(0, 0), V(0, 1), lams)
        assert halfline_image_check(cube_iso(), V(0, 0), V(1, 0), lams)

    def test_corrupted_map_fails(self):
        forged = LinearIso([[1, 1], [0, 1]], orthant(2), orthant(2))
        # images of the e2 half-line from a generic apex stay a half-line for
        # a linear map, so corrupt with a genuinely non-affine forged spec
        bad = DiagonalIso(square_cone(), square_cone().generators[:3],
                          (OddPowerMap(3), IDENTITY_MAP, IDENTITY_MAP),
                          square_cone().generators[:3], square_cone())
        lams = [Fraction(0), Fraction(1), Fraction(2)]
        assert not halfline_image_check(bad, V(0, 0, 2), V(1, 1, 1), lams)

    def test_not_extreme_error(self):
        with pytest.raises(NotExtreme):
            halfline_image_check(identity_iso(orthant(2)), V(0, 0), V(1, 1), [Fraction(1)])
