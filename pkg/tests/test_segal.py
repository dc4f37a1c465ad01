from itertools import combinations_with_replacement

import pytest

from conftest import automorphism_category, groupoid_scat, two_category
from services.cat_core import category_from_segal, find_isomorphism, free_isomorphism, nerve, ordinal
from services.enriched import pi0_category, s_ordinal
from services.segal import (
    BiSSet,
    HomotopyCertificate,
    NSSet,
    NSSetMap,
    as_segal_precat,
    bisimplicial_segal_check,
    delta_to_gamma,
    gamma_compose,
    gamma_identity,
    gamma_map,
    ho_of_segal,
    horizontal_compose_2cells,
    iso_classes,
    is_segal_precat,
    n_equivalence_check,
    scat_nerve,
    truncate,
    vertically_constant,
)
from services.simplicial_core import SMap, SimplexRef, discrete, enumerate_maps, standard_simplex
from utils.errors import CertificateRejected, InvalidInput, PreconditionFailed


def thick_point():
    """Rows *, *, Δ[1]: δ[2] collapses an interval, so it is an equivalence but not a bijection."""

    rows = (discrete(["*"], 2), discrete(["*"], 2), standard_simplex(1, 2))
    to_point = {"0": SimplexRef("*"), "1": SimplexRef("*"), "01": SimplexRef("*", (0,))}
    faces = {(1, 0): SMap(rows[1], rows[0], {"*": SimplexRef("*")}), (1, 1): SMap(rows[1], rows[0], {"*": SimplexRef("*")})}
    faces.update({(2, i): SMap(rows[2], rows[1], to_point) for i in range(3)})
    degens = {(0, 0): SMap(rows[0], rows[1], {"*": SimplexRef("*")})}
    degens.update({(1, i): SMap(rows[1], rows[2], {"*": SimplexRef("0")}) for i in range(2)})
    return BiSSet(rows, faces, degens, name="thick").check()


def certificate(a, start):
    row, edges = a.rows[2], a.rows[1]
    inverse = {
        q: {(e.key, e.key): row.locate((start,) * (q + 1), q).key for e in edges.simplices(q)}
        for q in range(a.max_q + 1)
    }
    homotopy = {
        (q, j): {x.key: row.locate((0,) * (j + 1) + row.realize(x)[j:], q + 1).key for x in row.simplices(q)}
        for q in range(a.max_q)
        for j in range(q + 1)
    }
    return HomotopyCertificate(2, inverse, homotopy)


def test_row_zero_must_be_constant():
    assert is_segal_precat(BiSSet((standard_simplex(1, 1),), {}, {})) == (False, SimplexRef("01"))
    with pytest.raises(PreconditionFailed):
        as_segal_precat(BiSSet((standard_simplex(1, 1),), {}, {}))


def test_nerves_of_scats_are_strictly_segal():
    for b in (s_ordinal(2, 2), groupoid_scat(2), two_category(2)):
        a = scat_nerve(b, 3, 2)
        assert a.objects == b.objects
        assert [v.status for v in bisimplicial_segal_check(a.bisset.check(), 3)] == ["strict", "strict"]


def test_unknown_segal_map_reports_a_witness():
    (verdict,) = bisimplicial_segal_check(thick_point(), 2)
    assert verdict.status == "unknown"
    assert verdict.witness["q"] == 0
    assert verdict.witness["kind"] == "not_injective"
    assert set(verdict.to_json()) == {"p", "status", "max_q", "witness"}


def test_certificate_promotes_the_verdict():
    a = thick_point()
    (verdict,) = bisimplicial_segal_check(a, 2, {2: certificate(a, 0)})
    assert verdict.status == "certified-equivalent"
    assert verdict.witness is None


def test_bad_certificate_is_rejected():
    a = thick_point()
    with pytest.raises(CertificateRejected):
        bisimplicial_segal_check(a, 2, {2: certificate(a, 1)})


def test_segal_check_needs_the_rows():
    with pytest.raises(PreconditionFailed):
        bisimplicial_segal_check(thick_point(), 3)


@pytest.mark.parametrize("b", [s_ordinal(2, 2), s_ordinal(3, 2), groupoid_scat(2), two_category(2)], ids=lambda b: b.name)
def test_homotopy_category_is_pi0(b):
    assert find_isomorphism(ho_of_segal(scat_nerve(b, 2, 1)), pi0_category(b)) is not None


@pytest.mark.parametrize("c", [ordinal(2), free_isomorphism()], ids=lambda c: c.name)
def test_homotopy_category_of_a_constant_bisset(c):
    a = as_segal_precat(vertically_constant(nerve(c, 3), 3, 1))
    assert find_isomorphism(ho_of_segal(a), c) is not None


# ---------- Γ-maps ----------


def test_gamma_composition():
    t1 = gamma_map(["a", "b"], ["x", "y", "z"], {"a": ["x", "y"], "b": ["z"]})
    t2 = gamma_map(["x", "y", "z"], ["1", "2"], {"x": ["1"], "z": ["2"]})
    out = gamma_compose(t1, t2)
    assert out.to_json() == {"source": ["a", "b"], "target": ["1", "2"], "theta": {"a": ["1"], "b": ["2"]}}
    assert gamma_compose(gamma_identity(["a", "b"]), t1) == t1


def test_gamma_images_must_be_disjoint():
    with pytest.raises(InvalidInput, match="earlier image"):
        gamma_map(["a", "b"], ["x"], {"a": ["x"], "b": ["x"]})
    with pytest.raises(InvalidInput):
        delta_to_gamma([2, 1], 3)


def test_gamma_of_monotone_maps_is_functorial():
    for f in combinations_with_replacement(range(3), 2):
        for g in combinations_with_replacement(range(4), 3):
            gf = [g[v] for v in f]
            assert gamma_compose(delta_to_gamma(f, 2), delta_to_gamma(g, 3)) == delta_to_gamma(gf, 3)


def test_gamma_of_a_coface():
    assert delta_to_gamma([0, 2], 2).to_json()["theta"] == {"1": ["1", "2"]}


# ---------- n-precategories ----------


@pytest.fixture(scope="module")
def two_cat_nsset():
    return NSSet.from_bisset(scat_nerve(two_category(3), 3, 3).bisset).check()


def test_truncation_of_a_two_category(two_cat_nsset):
    t = truncate(two_cat_nsset).result
    assert len(t.cells[(0,)]) == 3
    assert len(t.cells[(1,)]) == 6
    assert len(t.cells[(2,)]) == 10
    assert len(truncate(t).result.cells[()]) == 3


def test_truncation_needs_enough_levels():
    with pytest.raises(PreconditionFailed):
        truncate(NSSet.from_sset(nerve(ordinal(1), 2)))


def test_zero_equivalences_are_bijections():
    a = NSSet.discrete(["a", "b"], 0, ())
    iso = NSSetMap(a, NSSet.discrete(["p", "q"], 0, ()), {(): {"a": "p", "b": "q"}})
    squash = NSSetMap(a, NSSet.discrete(["p"], 0, ()), {(): {"a": "p", "b": "p"}})
    assert n_equivalence_check(iso, 0)
    assert not n_equivalence_check(squash, 0)


def test_one_equivalences():
    x = nerve(free_isomorphism(), 3)
    pt = standard_simplex(0, 3)
    src, tgt = NSSet.from_sset(x), NSSet.from_sset(pt)
    (to_point,) = enumerate_maps(x, pt)
    assert n_equivalence_check(NSSetMap.from_smap(to_point, src, tgt), 1)

    disc = NSSet.discrete(["a", "b"], 1, (3,))
    tables = {(q,): {o: (f"{''.join(f's{i}' for i in reversed(range(q)))}({o})" if q else o) for o in "ab"} for q in range(4)}
    inclusion = NSSetMap(disc, src, tables).check()
    assert not n_equivalence_check(inclusion, 1)


@pytest.mark.slow
def test_identity_of_a_two_category_is_a_two_equivalence(two_cat_nsset):
    assert n_equivalence_check(NSSetMap.identity(two_cat_nsset), 2)


def test_horizontal_composition(two_cat_nsset):
    gamma2 = {("x,y|f", "y,z|g"): "x,y,z|f|g", ("x,y|f'", "y,z|g"): "x,y,z|f'|g"}
    alpha2 = {
        ("x,y|f", "y,z|g"): ("s0(x,y|f)", "s0(y,z|g)"),
        ("x,y|f'", "y,z|g"): ("s0(x,y|f')", "s0(y,z|g)"),
    }
    out = horizontal_compose_2cells(two_cat_nsset, gamma2, alpha2, ("x,y|a", "s0(y,z|g)"))
    assert out == ("x,z|gf", "x,z|c")


def test_horizontal_composition_with_a_twisted_choice(two_cat_nsset):
    gamma2 = {("x,y|f", "y,z|g"): "x,y,z|f'|g", ("x,y|f'", "y,z|g"): "x,y,z|f'|g"}
    alpha2 = {
        ("x,y|f", "y,z|g"): ("x,y|ai", "s0(y,z|g)"),
        ("x,y|f'", "y,z|g"): ("s0(x,y|f')", "s0(y,z|g)"),
    }
    out = horizontal_compose_2cells(two_cat_nsset, gamma2, alpha2, ("x,y|a", "s0(y,z|g)"))
    assert out == ("x,z|gf'", "s0(x,z|gf')")


def test_horizontal_composition_needs_gamma(two_cat_nsset):
    with pytest.raises(CertificateRejected):
        horizontal_compose_2cells(two_cat_nsset, {}, {}, ("x,y|a", "s0(y,z|g)"))


def test_composites_agree_up_to_isomorphism_across_certificates(two_cat_nsset):
    cell = ("x,y|a", "s0(y,z|g)")
    strict = horizontal_compose_2cells(
        two_cat_nsset,
        {("x,y|f", "y,z|g"): "x,y,z|f|g", ("x,y|f'", "y,z|g"): "x,y,z|f'|g"},
        {("x,y|f", "y,z|g"): ("s0(x,y|f)", "s0(y,z|g)"), ("x,y|f'", "y,z|g"): ("s0(x,y|f')", "s0(y,z|g)")},
        cell,
    )
    twisted = horizontal_compose_2cells(
        two_cat_nsset,
        {("x,y|f", "y,z|g"): "x,y,z|f'|g", ("x,y|f'", "y,z|g"): "x,y,z|f'|g"},
        {("x,y|f", "y,z|g"): ("x,y|ai", "s0(y,z|g)"), ("x,y|f'", "y,z|g"): ("s0(x,y|f')", "s0(y,z|g)")},
        cell,
    )
    assert strict[0] != twisted[0]
    classes = iso_classes(category_from_segal(two_cat_nsset.slice_at((1,))))
    assert classes[strict[0]] == classes[twisted[0]]


# ---------- α2 naturality ----------

FG = ("x,y|f", "y,z|g")
T_CELL = ("x,y|t", "s0(y,z|g)")


@pytest.fixture(scope="module")
def aut_nsset():
    return NSSet.from_bisset(scat_nerve(automorphism_category(3), 3, 3).bisset).check()


@pytest.mark.parametrize("alpha", [("s0(x,y|f)", "s0(y,z|g)"), ("x,y|t", "s0(y,z|g)")], ids=["identity", "involution"])
def test_lift_along_an_automorphism(aut_nsset, alpha):
    out = horizontal_compose_2cells(aut_nsset, {FG: "x,y,z|f|g"}, {FG: alpha}, T_CELL)
    assert out == ("x,z|gf", "x,z|s")


def test_natural_gamma_on_arrows_is_accepted(aut_nsset):
    alpha = {FG: ("x,y|t", "s0(y,z|g)")}
    arrows = {T_CELL: "x,y,z|t|s0(g)", ("s0(x,y|f)", "s0(y,z|g)"): "s0(x,y,z|f|g)"}
    out = horizontal_compose_2cells(aut_nsset, {FG: "x,y,z|f|g"}, alpha, T_CELL, arrows)
    assert out == ("x,z|gf", "x,z|s")


def test_non_natural_alpha_is_rejected(aut_nsset):
    alpha = {FG: ("s0(x,y|f)", "s0(y,z|g)")}
    with pytest.raises(CertificateRejected, match="naturality"):
        horizontal_compose_2cells(aut_nsset, {FG: "x,y,z|f|g"}, alpha, T_CELL, {T_CELL: "s0(x,y,z|f|g)"})
    alpha = {FG: ("x,y|t", "s0(y,z|g)")}
    with pytest.raises(CertificateRejected, match="naturality"):
        horizontal_compose_2cells(aut_nsset, {FG: "x,y,z|f|g"}, alpha, T_CELL, {T_CELL: "s0(x,y,z|f|g)"})


def test_gamma_on_arrows_needs_certified_ends(aut_nsset):
    alpha = {FG: ("s0(x,y|f)", "s0(y,z|g)")}
    with pytest.raises(CertificateRejected, match="uncertified"):
        horizontal_compose_2cells(
            aut_nsset, {FG: "x,y,z|f|g"}, alpha, T_CELL, {("s0(x,x|e_x)", "s0(x,y|f)"): "s0(x,x,y|e_x|f)"}
        )
