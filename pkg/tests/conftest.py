from pathlib import Path

import pytest

from services.cat_core import (
    codiscrete,
    cyclic_group,
    discrete_category,
    free_isomorphism,
    make_category,
    monoid,
    ordinal,
    poset,
)
from services.enriched import SCat, discrete_scat, s_ordinal

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def idempotent_monoid():
    table = {("1", "1"): "1", ("1", "e"): "e", ("e", "1"): "e", ("e", "e"): "e"}
    return monoid(["1", "e"], "1", table)


def left_zero_monoid():
    els = ["1", "x", "y"]
    return monoid(els, "1", {(g, f): (g if g != "1" else f) for g in els for f in els})


def parallel_pair():
    arrows = {"1a": ("a", "a"), "1b": ("b", "b"), "f": ("a", "b"), "g": ("a", "b")}
    comp = {
        ("1a", "1a"): "1a", ("1b", "1b"): "1b",
        ("f", "1a"): "f", ("g", "1a"): "g", ("1b", "f"): "f", ("1b", "g"): "g",
    }
    return make_category(["a", "b"], arrows, {"a": "1a", "b": "1b"}, comp, "parallel")


def corpus():
    """Finite categories with at most 5 objects and 20 arrows."""

    return [
        ordinal(0),
        ordinal(1),
        ordinal(2),
        ordinal(3),
        discrete_category(["a"]),
        discrete_category(["a", "b", "c"]),
        cyclic_group(1),
        cyclic_group(2),
        cyclic_group(3),
        cyclic_group(4),
        free_isomorphism(),
        codiscrete(["a", "b"]),
        codiscrete(["a", "b", "c"]),
        poset(["a", "b", "c"], [("a", "b"), ("a", "c")]),
        poset(["a", "b", "c"], [("a", "c"), ("b", "c")]),
        poset(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]),
        poset(["a", "b", "c", "d", "e"], [("a", "b"), ("b", "c"), ("d", "e")]),
        idempotent_monoid(),
        left_zero_monoid(),
        parallel_pair(),
    ]


def corpus_ids():
    return [c.name + str(i) for i, c in enumerate(corpus())]


@pytest.fixture(params=range(len(corpus())), ids=corpus_ids())
def category(request):
    return corpus()[request.param]


# ---------- Enriched instances ----------


def terminal(name: str):
    return make_category([name], {f"1_{name}": (name, name)}, {name: f"1_{name}"}, {(f"1_{name}", f"1_{name}"): f"1_{name}"})


def iso_category(a: str, b: str, u: str, v: str):
    """Objects a, b with an isomorphism u: a → b and its inverse v."""

    arrows = {f"1_{a}": (a, a), f"1_{b}": (b, b), u: (a, b), v: (b, a)}
    comp = {
        (f"1_{a}", f"1_{a}"): f"1_{a}", (f"1_{b}", f"1_{b}"): f"1_{b}",
        (u, f"1_{a}"): u, (f"1_{b}", u): u, (v, f"1_{b}"): v, (f"1_{a}", v): v,
        (v, u): f"1_{a}", (u, v): f"1_{b}",
    }
    return make_category([a, b], arrows, {a: f"1_{a}", b: f"1_{b}"}, comp)


def _unit_tables(homs, objects):
    """Composition tables for every triple through an endo-hom e_x."""

    tables = {}
    for x in objects:
        e = homs[(x, x)]
        (ex,) = e.objects
        for (u, v), h in homs.items():
            if u == x:
                t = {(ex, o): o for o in h.objects}
                t.update({(e.identity(ex), f): f for f in h.arrows})
                tables[(x, x, v)] = t
            if v == x:
                t = {(o, ex): o for o in h.objects}
                t.update({(f, e.identity(ex)): f for f in h.arrows})
                tables[(u, x, x)] = t
    return tables


def two_category(max_dim: int) -> SCat:
    """A strict 2-category: a: f ⇒ f' invertible in hom(x,y), whiskered by g to c: gf ⇒ gf'."""

    objects = ["x", "y", "z"]
    homs = {
        ("x", "x"): terminal("e_x"),
        ("y", "y"): terminal("e_y"),
        ("z", "z"): terminal("e_z"),
        ("x", "y"): iso_category("f", "f'", "a", "ai"),
        ("y", "z"): terminal("g"),
        ("x", "z"): iso_category("gf", "gf'", "c", "ci"),
    }
    compose = _unit_tables(homs, objects)
    compose[("x", "y", "z")] = {("f", "g"): "gf", ("f'", "g"): "gf'", ("a", "1_g"): "c", ("ai", "1_g"): "ci"}
    ids = {o: f"e_{o}" for o in objects}
    return SCat.from_categories(objects, homs, compose, ids, max_dim, name="2cat")


def _involution(obj: str, t: str):
    one = f"1_{obj}"
    return monoid([one, t], one, {(one, one): one, (t, one): t, (one, t): t, (t, t): one}, obj=obj)


def automorphism_category(max_dim: int) -> SCat:
    """f: x → y carries an involution t, whiskered by g: y → z to s on gf."""

    objects = ["x", "y", "z"]
    homs = {
        ("x", "x"): terminal("e_x"),
        ("y", "y"): terminal("e_y"),
        ("z", "z"): terminal("e_z"),
        ("x", "y"): _involution("f", "t"),
        ("y", "z"): terminal("g"),
        ("x", "z"): _involution("gf", "s"),
    }
    compose = _unit_tables(homs, objects)
    compose[("x", "y", "z")] = {("f", "g"): "gf", ("t", "1_g"): "s"}
    ids = {o: f"e_{o}" for o in objects}
    return SCat.from_categories(objects, homs, compose, ids, max_dim, name="aut")


def groupoid_scat(max_dim: int) -> SCat:
    """Two objects; hom(x,y) is a free isomorphism, the endo-homs are points."""

    objects = ["x", "y"]
    homs = {
        ("x", "x"): terminal("e_x"),
        ("y", "y"): terminal("e_y"),
        ("x", "y"): iso_category("f", "f'", "a", "ai"),
    }
    return SCat.from_categories(objects, homs, _unit_tables(homs, objects), {"x": "e_x", "y": "e_y"}, max_dim, "grpd")


@pytest.fixture
def scat_corpus():
    return [
        s_ordinal(2, 2),
        s_ordinal(3, 2),
        discrete_scat(ordinal(2), 2),
        discrete_scat(free_isomorphism(), 2),
        groupoid_scat(2),
        two_category(2),
    ]
