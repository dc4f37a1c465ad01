import pytest

from conftest import groupoid_scat
from services.cat_core import free_isomorphism, nerve, ordinal
from services.enriched import discrete_scat, s_ordinal
from services.hc_nerve import (
    expand_coherence_data,
    hc_face,
    hc_nerve,
    hc_nerve_is_quasi,
    hc_nerve_simplices,
    standard,
    unit_cube,
)
from services.simplicial_core import is_isomorphic
from utils.errors import PreconditionFailed


def test_standard_truncation():
    assert standard(3).max_dim == 2
    assert standard(0).max_dim == 0


@pytest.mark.parametrize("n,expected", [(0, 3), (1, 6), (2, 10)])
def test_functors_into_a_discrete_scat_are_chains(n, expected):
    b = discrete_scat(ordinal(2), 2)
    assert len(hc_nerve_simplices(b, n)) == expected == nerve(ordinal(2), 2).count(n)


@pytest.mark.parametrize("c", [ordinal(1), ordinal(2), free_isomorphism()], ids=lambda c: c.name)
def test_coherent_nerve_of_a_discrete_scat_is_the_nerve(c):
    x = hc_nerve(discrete_scat(c, 2), 2)
    assert is_isomorphic(x, nerve(c, 2)) is not None


def test_truncation_is_checked():
    with pytest.raises(PreconditionFailed):
        hc_nerve_simplices(s_ordinal(3, 1), 3)


def test_identity_of_s2_is_a_simplex():
    b = s_ordinal(2, 1)
    simplices = hc_nerve_simplices(b, 2)
    assert any(h.objects == ("0", "1", "2") for h in simplices)
    h = next(h for h in simplices if h.objects == ("0", "1", "2"))
    assert hc_face(b, h, 1).objects == ("0", "2")


def test_locally_kan_scat_has_a_quasicategory_nerve():
    verdict = hc_nerve_is_quasi(groupoid_scat(2), 2)
    assert verdict.locally_kan
    assert verdict.holds
    assert verdict.witness is None


def test_unit_cube():
    cube = unit_cube(2)
    assert [len(ids) for ids in cube.nd] == [4, 5, 2]


def test_coherence_data_of_a_two_simplex():
    b = s_ordinal(2, 1)
    h = next(h for h in hc_nerve_simplices(b, 2) if h.objects == ("0", "1", "2"))
    data = expand_coherence_data(b, h)
    assert len(data.cubes) == 16
    assert all(m.check() for m in data.cubes.values())
    assert sum(data.checks.values()) > 0
