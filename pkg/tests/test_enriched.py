from functools import reduce

import pytest

from conftest import groupoid_scat, two_category
from services.cat_core import cyclic_group, find_isomorphism, free_isomorphism, ordinal, poset
from services.enriched import (
    coface_facets,
    diag_resolution,
    discrete_scat,
    hom_components,
    homotopic_in_hom,
    interchange_square,
    is_locally_kan,
    pi0_category,
    resolution_augmentation,
    s_ordinal,
    s_resolution,
    underlying_category,
)
from services.simplicial_core import SimplexRef, is_isomorphic, product, standard_simplex
from utils.errors import InvalidInput, PreconditionFailed


def test_cube_homs_of_s2():
    s = s_ordinal(2, 2)
    h = s.hom("0", "2")
    assert h.nondegenerate(0) == ("(01)(12)", "(02)")
    assert h.nondegenerate(1) == ("(02)<(01)(12)",)
    assert is_isomorphic(h, standard_simplex(1, 2)) is not None
    assert s.hom("2", "0").is_empty()
    assert s.ids["1"] == "1_1"


def test_cube_hom_of_s3_is_a_square():
    h = s_ordinal(3, 2).hom("0", "3")
    assert set(h.nondegenerate(0)) == {"(03)", "(02)(23)", "(01)(13)", "(01)(12)(23)"}
    assert len(h.nondegenerate(1)) == 5
    assert len(h.nondegenerate(2)) == 2


def test_composition_adds_the_middle_vertex():
    s = s_ordinal(2, 1)
    out = s.compose_simplices("0", "1", "2", SimplexRef("(01)"), SimplexRef("(12)"))
    assert out == SimplexRef("(01)(12)")


def test_instances_satisfy_the_axioms(scat_corpus):
    for b in scat_corpus:
        assert b.check() is b


def test_two_category_whiskering():
    b = two_category(2)
    out = b.compose_simplices("x", "y", "z", SimplexRef("a"), SimplexRef("g", (0,)))
    assert out == SimplexRef("c")
    assert b.compose_simplices("x", "y", "z", SimplexRef("f"), SimplexRef("g")) == SimplexRef("gf")


def test_missing_horizontal_composite_is_rejected():
    with pytest.raises(InvalidInput):
        groupoid_scat(2).compose_simplices("y", "x", "y", SimplexRef("e_y"), SimplexRef("f"))


def test_homotopy_in_a_hom():
    s = s_ordinal(2, 1)
    assert homotopic_in_hom(s, "0", "2", "(02)", "(01)(12)")
    assert not homotopic_in_hom(s, "0", "2", "(01)(12)", "(02)")
    with pytest.raises(InvalidInput):
        homotopic_in_hom(s, "0", "2", "(02)", "(12)")


def test_local_kan():
    verdict = is_locally_kan(s_ordinal(3, 2), 2)
    assert not verdict.holds
    assert verdict.hom == ("0", "2")
    assert is_locally_kan(discrete_scat(ordinal(2), 2), 2).holds
    assert is_locally_kan(groupoid_scat(2), 2).holds
    with pytest.raises(PreconditionFailed):
        is_locally_kan(s_ordinal(2, 1), 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_resolution_of_an_ordinal_is_the_cube_model(n):
    res, s = s_resolution(ordinal(n), 2), s_ordinal(n, 2)
    assert res.hom_pairs() == s.hom_pairs()
    for x, y in s.hom_pairs():
        assert is_isomorphic(res.hom(x, y), s.hom(x, y)) is not None


def cube(d: int, max_dim: int):
    """Δ[1]^d as an iterated product."""

    return reduce(product, [standard_simplex(1, max_dim)] * d, standard_simplex(0, max_dim))


@pytest.mark.parametrize("n", [0, 1, 2, 3, pytest.param(4, marks=pytest.mark.slow), pytest.param(5, marks=pytest.mark.slow)])
def test_resolution_homs_are_cubes(n):
    top = 3 if n <= 3 else 2
    res = s_resolution(ordinal(n), top)
    for i in range(n + 1):
        assert is_isomorphic(res.hom(str(i), str(i)), standard_simplex(0, top)) is not None
        for j in range(i + 1, n + 1):
            assert is_isomorphic(res.hom(str(i), str(j)), cube(j - i - 1, top)) is not None, (i, j)


def test_components_of_the_resolution_recover_the_category(category):
    try:
        res = s_resolution(category, 1)
    except PreconditionFailed:
        pytest.skip("only loop-free categories have a resolution")
    assert find_isomorphism(pi0_category(res), category) is not None


def test_resolution_needs_a_loop_free_category():
    with pytest.raises(PreconditionFailed):
        s_resolution(cyclic_group(2), 2)
    with pytest.raises(PreconditionFailed):
        s_resolution(free_isomorphism(), 2)


def test_resolution_augmentation():
    a = poset(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    res = s_resolution(a, 2)
    eps = resolution_augmentation(a, res, discrete_scat(a, 2))
    assert eps.homs[("a", "d")].check()
    assert find_isomorphism(pi0_category(res), a) is not None


def test_diagonal_resolution_of_a_discrete_category():
    d = diag_resolution(discrete_scat(ordinal(2), 1), 1)
    assert is_isomorphic(d.hom("0", "2"), s_ordinal(2, 1).hom("0", "2")) is not None
    with pytest.raises(PreconditionFailed):
        diag_resolution(discrete_scat(cyclic_group(2), 1), 1)


def test_components_and_pi0():
    assert hom_components(s_ordinal(3, 1).hom("0", "3")) == {
        "(03)": "(01)(12)(23)",
        "(02)(23)": "(01)(12)(23)",
        "(01)(13)": "(01)(12)(23)",
        "(01)(12)(23)": "(01)(12)(23)",
    }
    assert find_isomorphism(pi0_category(s_ordinal(3, 1)), ordinal(3)) is not None
    p = pi0_category(two_category(1))
    assert len(p.hom("x", "y")) == 1
    assert len(p.hom("x", "z")) == 1


def test_underlying_category_of_a_discrete_scat():
    c = free_isomorphism()
    assert find_isomorphism(underlying_category(discrete_scat(c, 1)), c) is not None


def test_coface_facets():
    assert coface_facets(3) == {0: (1, 1), 1: (1, 0), 2: (2, 0), 3: (2, 1)}
    with pytest.raises(InvalidInput):
        coface_facets(1)


def test_interchange_square():
    sq = interchange_square(4)
    assert sq.remaining == ((2, 1),)
    assert sq.corners == ("(02)(24)", "(01)(12)(24)", "(02)(23)(34)", "(01)(12)(23)(34)")
    assert len(sq.edges) == 4
    assert sq.face == "(012)(234)"
