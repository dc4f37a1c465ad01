import pytest

from conftest import parallel_pair
from services.cat_core import cyclic_group, find_isomorphism, free_isomorphism, is_groupoid, nerve, ordinal
from services.quasi import (
    endpoints,
    find_filler,
    find_fillers,
    ho_category,
    homotopic_edges,
    horn_instance,
    horn_instances,
    is_commuting_sphere,
    is_equivalence_edge,
    is_kan,
    is_quasicategory,
    outer_horn_obstruction,
    special_outer_horn_filler,
    sphere,
)
from services.simplicial_core import SimplexRef, boundary, horn, standard_simplex
from utils.errors import PreconditionFailed

R = SimplexRef


def test_outer_horn_in_the_arrow_has_no_filler():
    x = nerve(ordinal(1), 2)
    h = horn_instance(x, 2, 0, {"0": R("0"), "1": R("1"), "2": R("0"), "01": R("01"), "02": R("0", (0,))})
    assert find_filler(h) is None


def test_inner_horn_is_filled_by_the_composite():
    x = nerve(ordinal(2), 2)
    h = horn_instance(x, 2, 1, {"0": R("0"), "1": R("1"), "2": R("2"), "01": R("01"), "12": R("12")})
    filler = find_filler(h)
    assert filler == R("01|12")
    assert x.face(filler, 1) == R("02")


def test_nerves_are_quasicategories(category):
    assert is_quasicategory(nerve(category, 3), 3).holds


def test_nerve_of_the_square_in_dimension_four():
    assert is_quasicategory(nerve(ordinal(2), 4), 4).holds


def test_nerve_is_kan_exactly_for_groupoids(category):
    assert is_kan(nerve(category, 3), 3).holds == is_groupoid(category)


@pytest.mark.parametrize("x", [horn(2, 1, 2), boundary(2, 2)], ids=["horn", "boundary"])
def test_missing_composite_is_reported(x):
    verdict = is_quasicategory(x, 2)
    assert not verdict.holds
    assert (verdict.witness.n, verdict.witness.i) == (2, 1)
    assert set(verdict.witness.to_json()) == {"n", "i", "image"}


def test_simplices_are_quasicategories_but_not_kan():
    x = standard_simplex(2, 3)
    assert is_quasicategory(x, 3).holds
    verdict = is_kan(x, 2)
    assert not verdict.holds
    assert verdict.witness.i in (0, verdict.witness.n)


def test_horn_check_needs_the_dimension():
    with pytest.raises(PreconditionFailed):
        is_kan(nerve(ordinal(1), 2), 3)


def test_special_outer_horn_in_a_groupoid():
    c = free_isomorphism()
    x = nerve(c, 2)
    h = horn_instance(x, 2, 0, {"0": R("a"), "1": R("b"), "2": R("a"), "01": R("u"), "02": R("a", (0,))})
    assert special_outer_horn_filler(h, c) == R("u|v")
    with pytest.raises(PreconditionFailed):
        special_outer_horn_filler(h, ordinal(1))


def test_outer_horn_obstruction():
    c = ordinal(1)
    assert outer_horn_obstruction(c, nerve(c, 2), "01", 2) is not None
    g = free_isomorphism()
    assert outer_horn_obstruction(g, nerve(g, 3), "u", 3) is None


def test_commuting_sphere():
    x = nerve(ordinal(2), 2)
    s = sphere(x, R("12"), R("02"), R("01"))
    assert is_commuting_sphere(x, s) == R("01|12")


def test_parallel_arrows_are_not_homotopic():
    x = nerve(parallel_pair(), 3)
    assert not homotopic_edges(x, R("f"), R("g"))
    assert homotopic_edges(x, R("f"), R("f"))


def test_homotopy_needs_a_quasicategory():
    x = nerve(parallel_pair(), 2)
    with pytest.raises(PreconditionFailed):
        homotopic_edges(x, R("f"), R("g"))
    assert not homotopic_edges(x, R("f"), R("g"), assume_quasi=True)


@pytest.mark.parametrize("c", [ordinal(2), cyclic_group(3), parallel_pair(), free_isomorphism()], ids=lambda c: c.name)
def test_homotopy_category_of_a_nerve(c):
    assert find_isomorphism(ho_category(nerve(c, 3)), c) is not None


def test_homotopy_category_of_a_group():
    assert is_groupoid(ho_category(nerve(cyclic_group(2), 3)))


def test_equivalence_edges():
    assert is_equivalence_edge(nerve(free_isomorphism(), 3), R("u"))
    assert not is_equivalence_edge(nerve(ordinal(1), 3), R("01"))


def test_homotopy_is_an_equivalence_relation(category):
    x = nerve(category, 3)
    parallel = {}
    for e in x.simplices(1):
        parallel.setdefault(endpoints(x, e), []).append(e)
    for edges in parallel.values():
        rel = {(f, g): homotopic_edges(x, f, g) for f in edges for g in edges}
        for f in edges:
            assert rel[(f, f)]
            for g in edges:
                assert rel[(f, g)] == rel[(g, f)] == (f == g)
                for h in edges:
                    assert not (rel[(f, g)] and rel[(g, h)]) or rel[(f, h)]


def test_composites_do_not_depend_on_the_filler(category):
    x = nerve(category, 3)
    for h in horn_instances(x, 2, 1):
        fillers = find_fillers(h)
        assert fillers
        first = x.face(fillers[0], 1)
        assert all(homotopic_edges(x, x.face(t, 1), first) for t in fillers)
