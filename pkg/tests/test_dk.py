from dataclasses import replace

import numpy as np
import pytest

from services.cat_core import nerve, ordinal
from services.dk import (
    GrpdWord,
    _bar,
    dk_groupoid,
    generators,
    verify_simplicial_groupoid,
    word_compose,
    word_inverse,
    word_reduce,
)
from services.simplicial_core import SimplexRef, boundary, horn, standard_simplex
from utils.errors import InvalidInput, PreconditionFailed

GRAPH = {"f": ("a", "b"), "g": ("b", "c")}


def random_word(rng, length: int) -> GrpdWord:
    """A random walk through GRAPH from a, each letter taken forwards or backwards."""

    at, letters = "a", []
    for _ in range(length):
        steps = [(g, 1) for g, (dom, _) in GRAPH.items() if dom == at]
        steps += [(g, -1) for g, (_, cod) in GRAPH.items() if cod == at]
        g, e = steps[rng.integers(len(steps))]
        letters.append((g, e))
        at = GRAPH[g][1] if e == 1 else GRAPH[g][0]
    return GrpdWord("a", at, tuple(letters))


def cancellation_results(letters) -> set:
    """Irreducible words over every order of cancelling adjacent inverse pairs."""

    seen, terminal, stack = set(), set(), [tuple(letters)]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        nxt = [cur[:k] + cur[k + 2 :] for k in range(len(cur) - 1) if cur[k + 1] == (cur[k][0], -cur[k][1])]
        if not nxt:
            terminal.add(cur)
        stack.extend(nxt)
    return terminal


def test_words_reduce_freely():
    w = GrpdWord("a", "a", (("f", 1), ("g", 1), ("g", -1), ("f", -1)))
    assert word_reduce(w, GRAPH).key() == "1_a"
    fg = word_compose(GrpdWord("a", "b", (("f", 1),)), GrpdWord("b", "c", (("g", 1),)), GRAPH)
    assert fg.key() == "f.g"
    assert word_inverse(fg).key() == "g^-1.f^-1"
    assert word_compose(fg, word_inverse(fg), GRAPH).is_identity


@pytest.mark.parametrize("seed", range(20))
def test_reduction_is_idempotent_and_confluent(seed):
    rng = np.random.default_rng(seed)
    w = random_word(rng, int(rng.integers(0, 11)))
    reduced = word_reduce(w, GRAPH)
    assert word_reduce(reduced, GRAPH) == reduced
    assert (reduced.dom, reduced.cod) == (w.dom, w.cod)
    assert cancellation_results(w.letters) == {reduced.letters}


def test_broken_words_are_rejected():
    with pytest.raises(InvalidInput, match="breaks"):
        word_reduce(GrpdWord("a", "c", (("g", 1),)), GRAPH)
    with pytest.raises(InvalidInput, match="unknown generator"):
        word_reduce(GrpdWord("a", "b", (("h", 1),)), GRAPH)
    with pytest.raises(InvalidInput):
        word_compose(GrpdWord("a", "b", (("f", 1),)), GrpdWord("a", "b", (("f", 1),)), GRAPH)


def test_generators_of_the_two_simplex():
    g = dk_groupoid(standard_simplex(2, 2), 1)
    assert g.objects == ("0", "1", "2")
    assert set(g.generators[0]) == {"01", "02", "12"}
    assert set(g.generators[1]) == {"012", "s1(01)", "s1(02)", "s1(12)"}
    assert g.generators[1]["012"] == ("0", "1")
    assert g.faces[(1, "012", 0)].key() == "02.12^-1"
    assert g.faces[(1, "012", 1)].key() == "01"


def test_generator_rows():
    rows = generators(dk_groupoid(standard_simplex(2, 2), 1), 1)
    row = next(r for r in rows if r["generator"] == "012")
    assert row == {"generator": "012", "dom": "0", "cod": "1", "d0": "02.12^-1", "d1": "01"}


def test_dimension_is_checked():
    with pytest.raises(PreconditionFailed):
        dk_groupoid(standard_simplex(2, 2), 2)


@pytest.mark.parametrize(
    "k,top",
    [(standard_simplex(2, 2), 1), (standard_simplex(1, 3), 2), (horn(2, 0, 3), 2), (nerve(ordinal(2), 3), 2)],
    ids=["simplex2", "simplex1", "horn", "nerve"],
)
def test_construction_is_a_simplicial_groupoid(k, top):
    report = verify_simplicial_groupoid(dk_groupoid(k, top), top)
    assert report.ok, report.failures
    assert report.checked["endpoints"] > 0


def test_broken_face_is_caught():
    k = standard_simplex(2, 3)
    g = dk_groupoid(k, 2)
    faces = dict(g.faces)
    # d0 of the generator made the untwisted face of d1
    faces[(1, "012", 0)] = _bar(k, k.face(SimplexRef("012"), 1))
    report = verify_simplicial_groupoid(replace(g, faces=faces), 2)
    assert not report.ok
    assert report.failures[0]["identity"] == "endpoints"
    assert report.failures[0]["generator"] == "012"
    assert report.failures[0]["maps"] == ["d0"]
    dd = [f for f in report.failures if f["identity"] == "dd"]
    assert [(f["generator"], f["i"], f["j"]) for f in dd] == [("s2(012)", 0, 1), ("s2(012)", 0, 2)]
    assert {(f["lhs"], f["rhs"]) for f in dd} == {("02", "02.12^-1")}


@pytest.mark.parametrize(
    "k",
    [standard_simplex(n, 4) for n in range(4)] + [boundary(2, 4), horn(2, 1, 4)],
    ids=["simplex0", "simplex1", "simplex2", "simplex3", "boundary2", "horn21"],
)
def test_identities_hold_up_to_dimension_three(k):
    report = verify_simplicial_groupoid(dk_groupoid(k, 3), 3)
    assert report.max_dim == 3
    assert report.ok, report.failures
