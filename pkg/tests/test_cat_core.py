import pytest

from conftest import parallel_pair
from services.cat_core import (
    CatFunctor,
    category_from_segal,
    cyclic_group,
    discrete_category,
    find_isomorphism,
    free_isomorphism,
    inverse,
    is_groupoid,
    is_strict_segal,
    make_category,
    nerve,
    nerve_map,
    ordinal,
    poset,
    segal_map,
)
from services.simplicial_core import SimplexRef, boundary, horn, is_isomorphic, standard_simplex
from utils.errors import InvalidInput, PreconditionFailed


def test_ordinal_tables():
    c = ordinal(2)
    assert c.objects == ("0", "1", "2")
    assert c.compose("12", "01") == "02"
    assert c.hom("1", "0") == ()


def test_missing_composite_is_named():
    arrows = {"00": ("0", "0"), "01": ("0", "1"), "11": ("1", "1")}
    comp = {("00", "00"): "00", ("01", "00"): "01", ("11", "11"): "11"}
    with pytest.raises(InvalidInput, match="11∘01"):
        make_category(["0", "1"], arrows, {"0": "00", "1": "11"}, comp)


def test_poset_rejects_cycles():
    with pytest.raises(InvalidInput, match="antisymmetric"):
        poset(["a", "b"], [("a", "b"), ("b", "a")])


def test_groupoids():
    assert is_groupoid(free_isomorphism())
    assert is_groupoid(cyclic_group(3))
    assert not is_groupoid(ordinal(1))
    assert not is_groupoid(ordinal(2))
    assert inverse(free_isomorphism(), "u") == "v"


def test_nerve_of_the_arrow_is_the_interval():
    assert is_isomorphic(nerve(ordinal(1), 3), standard_simplex(1, 3)) is not None


def test_nerve_of_two_element_group_counts():
    x = nerve(cyclic_group(2), 4)
    assert [x.count(n) for n in range(5)] == [1, 2, 4, 8, 16]


def test_nerve_labels():
    x = nerve(ordinal(2), 2)
    assert x.nondegenerate(1) == ("01", "02", "12")
    assert x.nondegenerate(2) == ("01|12",)
    assert x.face(SimplexRef("01|12"), 1) == SimplexRef("02")


def test_nerves_are_strict_segal(category):
    x = nerve(category, 3)
    assert is_strict_segal(x, 3) == (True, None)
    assert segal_map(x, 2).is_bijective()


@pytest.mark.parametrize("x", [horn(2, 1, 2), boundary(2, 2)], ids=["horn", "boundary"])
def test_segal_fails_without_composites(x):
    ok, witness = is_strict_segal(x, 2)
    assert not ok
    assert witness.kind == "not_surjective"
    assert witness.spine == (SimplexRef("01"), SimplexRef("12"))
    assert witness.to_json()["spine"] == [{"base": "01", "degens": []}, {"base": "12", "degens": []}]


def test_segal_round_trip(category):
    back = category_from_segal(nerve(category, 3))
    assert find_isomorphism(back, category) is not None


def test_category_from_the_point():
    c = category_from_segal(standard_simplex(0, 3))
    assert c.objects == ("0",)
    assert list(c.arrows) == ["s0(0)"]


def test_category_from_segal_needs_dimension_three():
    with pytest.raises(PreconditionFailed):
        category_from_segal(nerve(ordinal(1), 2))


def test_isomorphism_search():
    assert find_isomorphism(ordinal(1), free_isomorphism()) is None
    assert find_isomorphism(discrete_category(["a", "b"]), discrete_category(["p", "q"])) is not None
    iso = find_isomorphism(parallel_pair(), parallel_pair())
    assert set(iso.arrows.values()) == {"1a", "1b", "f", "g"}


def test_nerve_of_a_functor():
    f = CatFunctor(
        ordinal(1),
        free_isomorphism(),
        {"0": "a", "1": "b"},
        {"00": "1a", "01": "u", "11": "1b"},
    ).check()
    m = nerve_map(f, nerve(f.source, 2), nerve(f.target, 2))
    assert m.check().image["01"] == SimplexRef("u")


def _collapse():
    """[2] → [1] sending 2 to 1."""

    objects = {"0": "0", "1": "1", "2": "1"}
    return CatFunctor(ordinal(2), ordinal(1), objects, {f"{i}{j}": objects[str(i)] + objects[str(j)] for i in range(3) for j in range(i, 3)})


@pytest.mark.parametrize(
    "functor",
    [
        _collapse(),
        CatFunctor(ordinal(1), free_isomorphism(), {"0": "a", "1": "b"}, {"00": "1a", "01": "u", "11": "1b"}),
        CatFunctor(ordinal(1), parallel_pair(), {"0": "a", "1": "b"}, {"00": "1a", "01": "g", "11": "1b"}),
    ],
    ids=["collapse", "iso", "parallel"],
)
def test_segal_map_is_natural(functor):
    source, target = nerve(functor.source, 3), nerve(functor.target, 3)
    m = nerve_map(functor.check(), source, target).check()
    for p in (2, 3):
        there = segal_map(target, p).table
        for x, edges in segal_map(source, p).table.items():
            assert there[m.apply(x)] == tuple(m.apply(e) for e in edges)
