import numpy as np
import pytest

from conftest import FIXTURES
from services.cat_core import make_category, ordinal
from services.hammock import (
    Hammock,
    LocPair,
    check_hammock,
    check_left_fractions,
    compose_hammocks,
    enumerate_hammocks,
    hammock_degeneracy,
    hammock_face,
    identity_hammock,
    is_left_biased,
    left_bias,
    left_bias_step,
    make_locpair,
    normal_forms,
    reduce_hammock,
    rewrite_steps,
)
from utils.documents import load, load_hammock
from utils.errors import InvalidInput, PreconditionFailed


@pytest.fixture
def span():
    return load(str(FIXTURES / "span.locpair"), expect="locpair")


@pytest.fixture
def zigzag(span):
    return load_hammock(str(FIXTURES / "zigzag.hammock"), span)


def vee():
    """C with w: C → X and c: C → Y, nothing else."""

    arrows = {"1_C": ("C", "C"), "1_X": ("X", "X"), "1_Y": ("Y", "Y"), "w": ("C", "X"), "c": ("C", "Y")}
    comp = {(f"1_{o}", f"1_{o}"): f"1_{o}" for o in "CXY"}
    comp.update({("w", "1_C"): "w", ("1_X", "w"): "w", ("c", "1_C"): "c", ("1_Y", "c"): "c"})
    c = make_category(["C", "X", "Y"], arrows, {o: f"1_{o}" for o in "CXY"}, comp, "vee")
    return make_locpair(c, ["w"])


def test_weak_equivalences_are_closed():
    p = make_locpair(ordinal(2), ["01", "12"])
    assert "02" in p.w
    assert {"00", "11", "22"} <= p.w
    with pytest.raises(InvalidInput, match="identity"):
        LocPair(ordinal(1), frozenset({"01"})).check()


def test_backward_arrows_must_be_weak_equivalences(span):
    h = Hammock("X", "Y", ("f", "b"), (("P",),), (("x", "v"),), ())
    assert check_hammock(h, span) is h
    with pytest.raises(InvalidInput, match="not in W"):
        check_hammock(h, make_locpair(span.c, []))


def test_reduction_composes_and_drops_identities():
    p = make_locpair(ordinal(2), [])
    h = Hammock("0", "2", ("f", "f"), (("1",),), (("01", "12"),), ())
    assert [kind for kind, _, _ in rewrite_steps(h, p)] == ["compose"]
    assert reduce_hammock(h, p) == Hammock("0", "2", ("f",), ((),), (("02",),), ())
    h = Hammock("0", "1", ("f", "b"), (("1",),), (("01", "11"),), ())
    assert reduce_hammock(check_hammock(h, p), p) == Hammock("0", "1", ("f",), ((),), (("01",),), ())
    assert normal_forms(h, p) == frozenset({Hammock("0", "1", ("f",), ((),), (("01",),), ())})


def test_composition_concatenates():
    p = make_locpair(ordinal(2), [])
    h1 = Hammock("0", "1", ("f",), ((),), (("01",),), ())
    h2 = Hammock("1", "2", ("f",), ((),), (("12",),), ())
    assert compose_hammocks(h1, h2, p) == Hammock("0", "2", ("f",), ((),), (("02",),), ())
    assert compose_hammocks(identity_hammock("0"), h1, p) == h1
    with pytest.raises(InvalidInput):
        compose_hammocks(h2, h1, p)


def hammocks_by_source(p: LocPair, max_len: int) -> dict:
    return {x: [h for y in p.c.objects for h in enumerate_hammocks(p, x, y, 0, max_len)] for x in p.c.objects}


@pytest.mark.parametrize("seed", range(12))
def test_composition_is_associative(span, seed):
    rng = np.random.default_rng(seed)
    for p in (span, make_locpair(ordinal(2), ["01"])):
        by_source = hammocks_by_source(p, 3)
        objects = sorted(by_source)
        for _ in range(5):
            starts = by_source[objects[rng.integers(len(objects))]]
            h1 = starts[rng.integers(len(starts))]
            h2 = by_source[h1.target][rng.integers(len(by_source[h1.target]))]
            h3 = by_source[h2.target][rng.integers(len(by_source[h2.target]))]
            left = compose_hammocks(compose_hammocks(h1, h2, p), h3, p)
            right = compose_hammocks(h1, compose_hammocks(h2, h3, p), p)
            assert left == right, (h1, h2, h3)


def test_face_undoes_degeneracy(span, zigzag):
    up = hammock_degeneracy(zigzag, 0, span)
    assert up.width == 1
    assert check_hammock(up, span) is up
    assert hammock_face(up, 0, span) == zigzag
    assert hammock_face(up, 1, span) == zigzag
    with pytest.raises(InvalidInput):
        hammock_face(zigzag, 0, span)


def test_enumeration_over_the_span(span):
    found = enumerate_hammocks(span, "X", "Y", 0, 2)
    assert len(found) == 2
    assert {h.directions for h in found} == {("f", "b"), ("b", "f")}


def test_without_weak_equivalences_hammocks_are_arrows():
    c = ordinal(2)
    p = make_locpair(c, [])
    for x in c.objects:
        for y in c.objects:
            assert len(enumerate_hammocks(p, x, y, 0, 3)) == len(c.hom(x, y))


def test_left_fractions(span):
    assert check_left_fractions(span).holds
    verdict = check_left_fractions(vee())
    assert not verdict.holds
    assert verdict.condition == "i"
    assert verdict.witness == {"u": "w", "f": "c"}


def test_left_bias(span, zigzag):
    assert not is_left_biased(zigzag)
    result = left_bias(zigzag, span)
    assert result.zigzag == Hammock("X", "Y", ("f", "b"), (("P",),), (("x", "v"),), ())
    assert len(result.steps) == 1
    assert result.steps[0].width == 1
    assert left_bias_step(result.zigzag, span) is None


def test_left_bias_needs_fractions():
    p = vee()
    h = Hammock("X", "Y", ("b", "f"), (("C",),), (("w", "c"),), ())
    with pytest.raises(PreconditionFailed):
        left_bias(check_hammock(h, p), p)


def test_left_bias_checks_fractions_before_moving():
    p = vee()
    already_biased = Hammock("C", "Y", ("f",), ((),), (("c",),), ())
    assert is_left_biased(already_biased)
    with pytest.raises(PreconditionFailed, match="condition i"):
        left_bias(check_hammock(already_biased, p), p)
