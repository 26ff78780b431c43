from fractions import Fraction

import pytest

from coneorder.cones import (
    cone_from_facets,
    cone_from_generators,
    interval_cone,
    orthant,
    square_cone,
)
from coneorder.errors import DimensionMismatch, NotInCone, NotPointed
from coneorder.linalg import as_vec, mat_rank, vec_add, vec_scale
from coneorder.sampling import cone_point, random_pointed_cone, rng_for

from oracles import (
    facets_from_rays_bruteforce,
    is_extreme_among,
    minimal_generators,
    rays_from_facets_bruteforce,
)


def V(*xs):
    return as_vec(xs)


class TestConeFromGenerators:
    def test_redundant_generator_dropped(self):
        c = cone_from_generators(2, [(1, 0), (0, 1), (1, 1)])
        assert c.generators == (V(0, 1), V(1, 0))
        assert c.facets == (V(0, 1), V(1, 0))

    def test_square_cone_against_lp_oracle(self):
        gens = [V(1, 1, 1), V(-1, 1, 1), V(1, -1, 1), V(-1, -1, 1)]
        assert minimal_generators(gens) == sorted(gens)
        c = cone_from_generators(3, gens)
        assert set(c.generators) == set(gens)
        # facet set pinned by the dual brute-force oracle
        assert list(c.facets) == facets_from_rays_bruteforce(3, gens)
        assert set(c.facets) == {V(1, 0, 1), V(-1, 0, 1), V(0, 1, 1), V(0, -1, 1)}

    def test_interval_cone_against_oracle(self):
        gens = [V(1, 1), V(-1, 1)]
        assert minimal_generators(gens) == sorted(gens)
        c = cone_from_generators(2, gens)
        assert set(c.generators) == set(gens)
        assert set(c.facets) == {V(1, 1), V(-1, 1)}

    def test_all_zero_generators_give_trivial_cone(self):
        c = cone_from_generators(2, [(0, 0), (0, 0)])
        assert c.generators == ()
        assert c.pointed and not c.generating
        assert c.contains(V(0, 0)) and not c.contains(V(1, 0))
        assert c.extreme_rays() == ()

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cone_from_generators(2, [(1, 0, 0)])

    def test_non_pointed_flagged_not_error(self):
        c = cone_from_generators(2, [(1, 0), (-1, 0), (0, 1)])
        assert not c.pointed
        assert c.contains(V(-5, 0)) and c.contains(V(3, 2)) and not c.contains(V(0, -1))
        with pytest.raises(NotPointed):
            c.extreme_rays()

    def test_scaling_invariance_of_canonical_form(self):
        a = cone_from_generators(2, [(2, 0), (0, 3)])
        b = cone_from_generators(2, [(Fraction(1, 5), 0), (0, Fraction(7, 2))])
        assert a == b == orthant(2)


class TestConeFromFacets:
    def test_orthant_self_dual(self):
        c = cone_from_facets(2, [(1, 0), (0, 1)])
        assert c.generators == (V(0, 1), V(1, 0))

    def test_square_from_facets_against_vertex_oracle(self):
        facets = [V(1, 0, 1), V(-1, 0, 1), V(0, 1, 1), V(0, -1, 1)]
        expected = rays_from_facets_bruteforce(3, facets)
        c = cone_from_facets(3, facets)
        assert list(c.generators) == expected
        assert set(c.generators) == {V(1, 1, 1), V(-1, 1, 1), V(1, -1, 1), V(-1, -1, 1)}

    def test_empty_facets_whole_space(self):
        c = cone_from_facets(2, [])
        assert not c.pointed
        assert c.facets == ()
        assert c.contains(V(-7, 13))

    def test_redundant_facet_removed(self):
        c = cone_from_facets(2, [(1, 0), (0, 1), (1, 1)])
        assert c.facets == (V(0, 1), V(1, 0))

    def test_lower_dimensional_cone(self):
        # single ray in R^3 via equality pairs
        c = cone_from_generators(3, [(1, 0, 0)])
        assert c.generators == (V(1, 0, 0),)
        assert not c.generating and c.pointed
        assert c.contains(V(2, 0, 0)) and not c.contains(V(1, 1, 0))
        assert c.is_extreme_vector(V(3, 0, 0))
        rt = cone_from_facets(3, c.facets)
        assert rt.generators == c.generators


class TestMembershipAndOrder:
    def test_contains_examples(self):
        assert orthant(2).contains(V(1, 1))
        sq = square_cone()
        assert sq.contains(V(1, 1, 1))
        assert not sq.contains(V(2, 0, 1))
        assert orthant(2).contains(V(0, 0))

    def test_leq_examples(self):
        o2 = orthant(2)
        assert o2.leq(V(0, 0), V(1, 1))
        assert square_cone().leq(V(1, 1, 1), V(0, 0, 2))
        assert not o2.leq(V(1, 0), V(0, 1))

    def test_order_axioms_on_random_triples(self):
        rng = rng_for(7, "axioms")
        for trial in range(30):
            cone = random_pointed_cone(rng, rng.randint(2, 4), rng.randint(2, 5))
            x, y, z = (cone_point(cone, rng) for _ in range(3))
            assert cone.leq(x, x)
            if cone.leq(x, y) and cone.leq(y, z):
                assert cone.leq(x, z)
            if cone.leq(x, y) and cone.leq(y, x):
                assert x == y

    def test_archimedean_surrogate(self):
        # Integer data keeps the finite check sound: facet values are integers,
        # so <h, x> > 0 means >= 1 and the premise dies before n = 1000.
        rng = rng_for(11, "arch")
        checked = 0
        for trial in range(200):
            cone = random_pointed_cone(rng, rng.randint(2, 3), rng.randint(2, 4))
            x = as_vec([rng.randint(-3, 3) for _ in range(cone.dim)])
            y = cone_point(cone, rng)
            if all(cone.leq(vec_scale(n, x), y) for n in range(1, 1001)):
                checked += 1
                assert cone.leq(x, V(*([0] * cone.dim)))
        assert checked > 0


class TestExtremeVectors:
    def test_examples(self):
        o3 = orthant(3)
        assert o3.is_extreme_vector(V(1, 0, 0))
        assert not o3.is_extreme_vector(V(1, 1, 0))
        assert square_cone().is_extreme_vector(V(1, 1, 1))

    def test_not_in_cone_and_zero(self):
        with pytest.raises(NotInCone):
            orthant(2).is_extreme_vector(V(-1, 0))
        with pytest.raises(NotInCone):
            orthant(2).is_extreme_vector(V(0, 0))

    def test_rank_test_agrees_with_lp_oracle_on_random_cones(self):
        rng = rng_for(3, "extreme")
        for trial in range(25):
            cone = random_pointed_cone(rng, rng.randint(2, 4), rng.randint(3, 6))
            gens = cone.generators
            for i, g in enumerate(gens):
                assert cone.is_extreme_vector(g), "stored generators are extreme"
                assert is_extreme_among(gens, i)
            if len(gens) >= 2:
                mix = vec_add(gens[0], gens[1])
                assert cone.is_extreme_vector(mix) == is_extreme_among(
                    list(gens) + [mix], len(gens)
                )

    def test_scaled_generator_is_still_extreme(self):
        sq = square_cone()
        assert sq.is_extreme_vector(vec_scale(Fraction(7, 3), V(1, 1, 1)))

    def test_lemma_2_1_three_distinct_rays_are_independent(self):
        rng = rng_for(5, "lemma21")
        for trial in range(20):
            cone = random_pointed_cone(rng, rng.randint(3, 5), rng.randint(3, 7))
            gens = cone.generators
            if len(gens) < 3:
                continue
            idx = rng.sample(range(len(gens)), 3)
            assert mat_rank([gens[i] for i in idx]) == 3

    def test_lemma_2_2_multiples_on_extreme_ray(self):
        rng = rng_for(9, "lemma22")
        sq = square_cone()
        r = V(1, 1, 1)
        for trial in range(20):
            m1 = Fraction(rng.randrange(0, 100), 100)
            m2 = m1 + Fraction(rng.randrange(1, 50), 100)
            assert sq.leq(vec_scale(m1, r), vec_scale(m2, r))
        # anything between 0 and r comparable to all multiples is itself a multiple
        for lam_num in range(0, 11):
            y = vec_scale(Fraction(lam_num, 10), r)
            assert mat_rank([y, r]) <= 1


class TestCaratheodory:
    def test_examples(self):
        o2 = orthant(2)
        decomp = o2.caratheodory_decompose(V(2, 3))
        assert sorted(decomp, key=lambda t: t[1]) == [
            (Fraction(3), V(0, 1)),
            (Fraction(2), V(1, 0)),
        ]
        assert o2.caratheodory_decompose(V(0, 0)) == []
        # opposite corners of the square cone sum to twice the apex direction
        sq = square_cone()
        assert vec_add(V(1, 1, 1), V(-1, -1, 1)) == V(0, 0, 2)
        pieces = sq.caratheodory_decompose(V(0, 0, 2))
        total = V(0, 0, 0)
        for c, g in pieces:
            total = vec_add(total, vec_scale(c, g))
        assert total == V(0, 0, 2)
        assert len(pieces) == 2

    def test_resummation_and_term_bound_on_random_cones(self):
        rng = rng_for(13, "cara")
        for trial in range(25):
            cone = random_pointed_cone(rng, rng.randint(2, 4), rng.randint(2, 6))
            x = cone_point(cone, rng)
            pieces = cone.caratheodory_decompose(x)
            assert len(pieces) <= cone.dim
            total = V(*([0] * cone.dim))
            for c, g in pieces:
                assert c > 0
                assert g in cone.generators
                total = vec_add(total, vec_scale(c, g))
            assert total == x

    def test_errors(self):
        with pytest.raises(NotInCone):
            orthant(2).caratheodory_decompose(V(-1, 0))
        half = cone_from_generators(2, [(1, 0), (-1, 0), (0, 1)])
        with pytest.raises(NotPointed):
            half.caratheodory_decompose(V(0, 1))


class TestRoundTrip:
    def test_fixed_cases(self):
        for cone in (orthant(2), orthant(4), square_cone(), interval_cone()):
            again = cone_from_facets(cone.dim, cone.facets)
            assert again == cone

    def test_random_cones(self):
        rng = rng_for(17, "roundtrip")
        for trial in range(40):
            dim = rng.randint(2, 5)
            cone = random_pointed_cone(rng, dim, rng.randint(2, 8))
            again = cone_from_facets(dim, cone.facets)
            assert again.generators == cone.generators
            assert again.facets == cone.facets
            back = cone_from_generators(dim, cone.generators)
            assert back == cone

    def test_double_description_matches_subset_enumeration(self):
        # the incremental engine against exhaustive facet-subset solving
        rng = rng_for(19, "ddoracle")
        for trial in range(30):
            dim = rng.randint(2, 4)
            cone = random_pointed_cone(rng, dim, rng.randint(2, 6),
                                       require_generating=True)
            assert list(cone.generators) == rays_from_facets_bruteforce(dim, cone.facets)
            assert list(cone.facets) == facets_from_rays_bruteforce(dim, cone.generators)
