"""Finite categories, functors, nerves and Segal maps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from services.simplicial_core import SMap, SSet, ConcreteModel, SimplexRef, build_sset
from utils.budget import SearchBudget, ensure_budget
from utils.errors import InvalidInput, PreconditionFailed

logger = logging.getLogger("cat_core")


@dataclass(frozen=True, eq=False)
class FinCat:
    objects: Tuple[str, ...]
    arrows: Mapping[str, Tuple[str, str]]
    identities: Mapping[str, str]
    comp: Mapping[Tuple[str, str], str]
    name: str = ""
    _homs: Dict[Tuple[str, str], Tuple[str, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for x in self.objects:
            if x in self.arrows:
                raise InvalidInput(f"id {x!r} is used for an object and an arrow")
        for f, (d, c) in sorted(self.arrows.items()):
            if d not in self.objects or c not in self.objects:
                raise InvalidInput(f"arrow {f!r} has an unknown endpoint")
            self._homs.setdefault((d, c), ())
            self._homs[(d, c)] += (f,)

    def dom(self, f: str) -> str:
        return self.arrows[f][0]

    def cod(self, f: str) -> str:
        return self.arrows[f][1]

    def hom(self, x: str, y: str) -> Tuple[str, ...]:
        return self._homs.get((x, y), ())

    def identity(self, x: str) -> str:
        return self.identities[x]

    def is_identity(self, f: str) -> bool:
        return self.identities.get(self.dom(f)) == f

    def compose(self, g: str, f: str) -> str:
        """g∘f."""

        try:
            return self.comp[(g, f)]
        except KeyError:
            raise InvalidInput(f"composite {g}∘{f} is not defined") from None

    def composable_pairs(self) -> Iterator[Tuple[str, str]]:
        """(g, f) with cod f = dom g, ordered by (f, g)."""

        for f in sorted(self.arrows):
            for g in self.out_arrows(self.cod(f)):
                yield g, f

    def out_arrows(self, x: str) -> List[str]:
        return [f for y in self.objects for f in self.hom(x, y)]

    def non_identity(self) -> List[str]:
        return [f for f in sorted(self.arrows) if not self.is_identity(f)]

    def check(self) -> "FinCat":
        """Validate closure, unit laws and associativity."""

        for x in self.objects:
            i = self.identities.get(x)
            if i is None or self.arrows.get(i) != (x, x):
                raise InvalidInput(f"object {x!r} has no identity arrow")
        for g, f in self.composable_pairs():
            if (g, f) not in self.comp:
                raise InvalidInput(f"missing composite for the pair {g}∘{f}")
            h = self.comp[(g, f)]
            if self.arrows.get(h) != (self.dom(f), self.cod(g)):
                raise InvalidInput(f"composite {g}∘{f} = {h!r} has the wrong endpoints")
        for (g, f) in self.comp:
            if g not in self.arrows or f not in self.arrows or self.cod(f) != self.dom(g):
                raise InvalidInput(f"composite entry {g}∘{f} is not a composable pair")
        for f in self.arrows:
            if self.compose(f, self.identity(self.dom(f))) != f or self.compose(self.identity(self.cod(f)), f) != f:
                raise InvalidInput(f"unit law fails for {f!r}")
        for g, f in self.composable_pairs():
            for h in self.out_arrows(self.cod(g)):
                if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                    raise InvalidInput(f"associativity fails on ({h}, {g}, {f})")
        return self

    def __repr__(self) -> str:
        return f"FinCat({self.name or '?'}, {len(self.objects)} objects, {len(self.arrows)} arrows)"


def make_category(
    objects: Sequence[str],
    arrows: Mapping[str, Tuple[str, str]],
    identities: Mapping[str, str],
    comp: Mapping[Tuple[str, str], str],
    name: str = "",
) -> FinCat:
    return FinCat(tuple(sorted(objects)), dict(arrows), dict(identities), dict(comp), name).check()


@dataclass(frozen=True)
class CatFunctor:
    source: FinCat
    target: FinCat
    objects: Mapping[str, str]
    arrows: Mapping[str, str]

    def check(self) -> "CatFunctor":
        s, t = self.source, self.target
        for f, (d, c) in s.arrows.items():
            if t.arrows.get(self.arrows.get(f)) != (self.objects.get(d), self.objects.get(c)):
                raise InvalidInput(f"functor does not preserve the endpoints of {f!r}")
        for x in s.objects:
            if self.arrows[s.identity(x)] != t.identity(self.objects[x]):
                raise InvalidInput(f"functor does not preserve the identity of {x!r}")
        for g, f in s.composable_pairs():
            if self.arrows[s.compose(g, f)] != t.compose(self.arrows[g], self.arrows[f]):
                raise InvalidInput(f"functor does not preserve {g}∘{f}")
        return self


# ---------- Corpus builders ----------


def _ordinal_arrow(n: int, i: int, j: int) -> str:
    return f"{i}{j}" if n < 10 else f"{i}-{j}"


def ordinal(n: int) -> FinCat:
    """The ordinal [n] = {0 < ... < n} as a category."""

    objs = [str(i) for i in range(n + 1)]
    arrows = {_ordinal_arrow(n, i, j): (str(i), str(j)) for i in range(n + 1) for j in range(i, n + 1)}
    ids = {str(i): _ordinal_arrow(n, i, i) for i in range(n + 1)}
    comp = {
        (_ordinal_arrow(n, j, k), _ordinal_arrow(n, i, j)): _ordinal_arrow(n, i, k)
        for i in range(n + 1)
        for j in range(i, n + 1)
        for k in range(j, n + 1)
    }
    return make_category(objs, arrows, ids, comp, name=f"[{n}]")


def discrete_category(objects: Iterable[str]) -> FinCat:
    objs = list(objects)
    ids = {x: f"1_{x}" for x in objs}
    return make_category(objs, {ids[x]: (x, x) for x in objs}, ids, {(ids[x], ids[x]): ids[x] for x in objs}, "discrete")


def monoid(elements: Sequence[str], unit: str, table: Mapping[Tuple[str, str], str], obj: str = "*") -> FinCat:
    """One-object category; ``table[(g, f)]`` is g∘f."""

    return make_category([obj], {e: (obj, obj) for e in elements}, {obj: unit}, table, name="monoid")


def cyclic_group(n: int) -> FinCat:
    """ℤ/n as a one-object groupoid with arrows g0 (the unit) ... g{n-1}."""

    els = [f"g{i}" for i in range(n)]
    table = {(f"g{a}", f"g{b}"): f"g{(a + b) % n}" for a in range(n) for b in range(n)}
    c = monoid(els, "g0", table)
    return FinCat(c.objects, c.arrows, c.identities, c.comp, f"Z/{n}")


def codiscrete(objects: Iterable[str]) -> FinCat:
    """Exactly one arrow between any two objects."""

    objs = list(objects)
    arrows = {f"{x}>{y}": (x, y) for x in objs for y in objs}
    comp = {(f"{y}>{z}", f"{x}>{y}"): f"{x}>{z}" for x in objs for y in objs for z in objs}
    return make_category(objs, arrows, {x: f"{x}>{x}" for x in objs}, comp, "codiscrete")


def free_isomorphism() -> FinCat:
    """Two objects and an isomorphism u: a → b with inverse v."""

    arrows = {"1a": ("a", "a"), "1b": ("b", "b"), "u": ("a", "b"), "v": ("b", "a")}
    comp = {
        ("1a", "1a"): "1a", ("1b", "1b"): "1b",
        ("u", "1a"): "u", ("1b", "u"): "u", ("v", "1b"): "v", ("1a", "v"): "v",
        ("v", "u"): "1a", ("u", "v"): "1b",
    }
    return make_category(["a", "b"], arrows, {"a": "1a", "b": "1b"}, comp, "iso")


def poset(objects: Sequence[str], relations: Iterable[Tuple[str, str]]) -> FinCat:
    """The poset generated by the given relations x ≤ y (reflexive-transitive closure)."""

    objs = list(objects)
    le = {(x, x) for x in objs} | set(relations)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(le):
            for (c, d) in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
    for (a, b) in le:
        if a != b and (b, a) in le:
            raise InvalidInput(f"relations are not antisymmetric at {a!r}, {b!r}")
    arrows = {f"{a}<{b}" if a != b else f"1_{a}": (a, b) for (a, b) in le}
    name = {v: k for k, v in arrows.items()}
    comp = {
        (name[(b, c)], name[(a, b)]): name[(a, c)]
        for (a, b) in le
        for (b2, c) in le
        if b == b2
    }
    return make_category(objs, arrows, {x: f"1_{x}" for x in objs}, comp, "poset")


# ---------- Nerve ----------


class NerveModel(ConcreteModel):
    """Concrete simplices of a nerve: (objects, arrows) of a composable chain."""

    def __init__(self, c: FinCat):
        super().__init__(self._face, self._degeneracy, self._label)
        self.category = c

    def _face(self, s, i):
        objs, arrs = s
        k = len(arrs)
        new_objs = objs[:i] + objs[i + 1:]
        if i == 0:
            return new_objs, arrs[1:]
        if i == k:
            return new_objs, arrs[:-1]
        return new_objs, arrs[: i - 1] + (self.category.compose(arrs[i], arrs[i - 1]),) + arrs[i + 1:]

    def _degeneracy(self, s, i):
        objs, arrs = s
        return objs[: i + 1] + objs[i:], arrs[:i] + (self.category.identity(objs[i]),) + arrs[i:]

    @staticmethod
    def _label(s):
        objs, arrs = s
        if not arrs:
            return objs[0]
        return "|".join(arrs)


def chains(c: FinCat, k: int, non_identity: bool = True) -> Iterator[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    """Composable k-chains as (objects, arrows)."""

    if k == 0:
        for x in c.objects:
            yield (x,), ()
        return
    pool = c.non_identity() if non_identity else sorted(c.arrows)

    def extend(objs, arrs):
        if len(arrs) == k:
            yield objs, arrs
            return
        for f in pool:
            if c.dom(f) == objs[-1]:
                yield from extend(objs + (c.cod(f),), arrs + (f,))

    for f in pool:
        yield from extend((c.dom(f), c.cod(f)), (f,))


def nerve(c: FinCat, max_dim: int) -> SSet:
    """Ner(c): k-simplices are composable k-chains."""

    return build_sset(max_dim, lambda k: chains(c, k), NerveModel(c), name=f"Ner({c.name or '?'})")


def arrow_of_edge(a: SSet, edge: SimplexRef) -> str:
    """The arrow of the category behind a nerve edge."""

    if not isinstance(a.model, NerveModel):
        raise InvalidInput("expected the nerve of a category")
    return a.realize(edge)[1][0]


def edge_of_arrow(a: SSet, f: str) -> SimplexRef:
    c = a.model.category
    return a.locate((c.arrows[f], (f,)), 1)


def nerve_map(functor: CatFunctor, source: SSet, target: SSet) -> SMap:
    """The SMap Ner(F) between given nerves of the source and target categories."""

    image = {}
    for k, x in source.nd_items():
        objs, arrs = source.model.payload[x]
        image[x] = target.locate(
            (tuple(functor.objects[o] for o in objs), tuple(functor.arrows[f] for f in arrs)), k
        )
    return SMap(source, target, image)


# ---------- Segal maps ----------


@dataclass(frozen=True)
class SegalMap:
    p: int
    table: Mapping[SimplexRef, Tuple[SimplexRef, ...]]
    codomain: frozenset

    def preimages(self) -> Dict[Tuple[SimplexRef, ...], List[SimplexRef]]:
        out: Dict[Tuple[SimplexRef, ...], List[SimplexRef]] = {t: [] for t in self.codomain}
        for x, t in self.table.items():
            out[t].append(x)
        return out

    def is_bijective(self) -> bool:
        return all(len(v) == 1 for v in self.preimages().values())


@dataclass(frozen=True)
class SegalWitness:
    p: int
    kind: str  # "not_surjective" | "not_injective"
    spine: Tuple[SimplexRef, ...]
    simplices: Tuple[SimplexRef, ...] = ()

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "kind": self.kind,
            "spine": [r.to_json() for r in self.spine],
            "simplices": [r.to_json() for r in self.simplices],
        }


def spine(a: SSet, ref: SimplexRef) -> Tuple[SimplexRef, ...]:
    p = a.dim(ref)
    return tuple(a.restrict(ref, (i, i + 1)) for i in range(p))


def spine_tuples(a: SSet, p: int) -> List[Tuple[SimplexRef, ...]]:
    """The iterated fiber product A_1 ×_{A_0} ... ×_{A_0} A_1 (p factors)."""

    by_source: Dict[SimplexRef, List[SimplexRef]] = {}
    for e in a.simplices(1):
        by_source.setdefault(a.face(e, 1), []).append(e)
    out: List[Tuple[SimplexRef, ...]] = []

    def extend(t):
        if len(t) == p:
            out.append(t)
            return
        for e in by_source.get(a.face(t[-1], 0), []):
            extend(t + (e,))

    for e in a.simplices(1):
        extend((e,))
    return out


def segal_map(a: SSet, p: int) -> SegalMap:
    if p < 2 or p > a.max_dim:
        raise InvalidInput(f"Segal map degree {p} outside 2..{a.max_dim}")
    table = {x: spine(a, x) for x in a.simplices(p)}
    return SegalMap(p, table, frozenset(spine_tuples(a, p)))


def is_strict_segal(a: SSet, max_p: int) -> Tuple[bool, Optional[SegalWitness]]:
    for p in range(2, min(max_p, a.max_dim) + 1):
        for t, xs in sorted(segal_map(a, p).preimages().items()):
            if not xs:
                return False, SegalWitness(p, "not_surjective", t)
            if len(xs) > 1:
                return False, SegalWitness(p, "not_injective", t, tuple(sorted(xs)))
    return True, None


def category_from_segal(a: SSet) -> FinCat:
    """Objects A_0, arrows A_1, composition A_1 ×_{A_0} A_1 ≅ A_2 → A_1 by d_1."""

    if a.max_dim < 3:
        raise PreconditionFailed("category reconstruction needs max_dim >= 3")
    ok, witness = is_strict_segal(a, 3)
    if not ok:
        raise PreconditionFailed(f"not strict Segal: {witness.kind} at p={witness.p} over {[r.key for r in witness.spine]}")
    objects = list(a.nondegenerate(0))
    arrows = {e.key: (a.face(e, 1).base, a.face(e, 0).base) for e in a.simplices(1)}
    ids = {x: a.degeneracy(SimplexRef(x), 0).key for x in objects}
    comp = {}
    for t, xs in segal_map(a, 2).preimages().items():
        f, g = t
        comp[(g.key, f.key)] = a.face(xs[0], 1).key
    return make_category(objects, arrows, ids, comp, name=f"cat({a.name or '?'})")


def is_groupoid(c: FinCat) -> bool:
    return all(inverse(c, f) is not None for f in c.arrows)


def inverse(c: FinCat, f: str) -> Optional[str]:
    for g in c.hom(c.cod(f), c.dom(f)):
        if c.compose(g, f) == c.identity(c.dom(f)) and c.compose(f, g) == c.identity(c.cod(f)):
            return g
    return None


def invertible(c: FinCat, f: str) -> bool:
    return inverse(c, f) is not None


# ---------- Isomorphism search ----------


def find_isomorphism(c: FinCat, d: FinCat, budget: Optional[SearchBudget] = None) -> Optional[CatFunctor]:
    """An isomorphism of categories c → d, or None."""

    budget = ensure_budget(budget)
    if len(c.objects) != len(d.objects) or len(c.arrows) != len(d.arrows):
        return None

    def profile(cat: FinCat, x: str) -> tuple:
        return (
            sorted(len(cat.hom(x, y)) for y in cat.objects),
            sorted(len(cat.hom(y, x)) for y in cat.objects),
            len(cat.hom(x, x)),
        )

    pc = {x: profile(c, x) for x in c.objects}
    pd = {y: profile(d, y) for y in d.objects}
    objs = list(c.objects)
    pairs = [(x, y) for x in objs for y in objs if c.hom(x, y)]

    def arrow_search(omap: Dict[str, str]) -> Optional[Dict[str, str]]:
        amap: Dict[str, str] = {}
        order = [f for (x, y) in pairs for f in c.hom(x, y)]

        def consistent(f: str) -> bool:
            for g, h in c.composable_pairs():
                if f not in (g, h) and f != c.compose(g, h):
                    continue
                gh = c.compose(g, h)
                if g in amap and h in amap and gh in amap:
                    if d.compose(amap[g], amap[h]) != amap[gh]:
                        return False
            return True

        def step(pos: int) -> bool:
            if pos == len(order):
                return True
            f = order[pos]
            x, y = c.arrows[f]
            used = set(amap.values())
            if c.is_identity(f):
                options = [d.identity(omap[x])]
            else:
                options = [g for g in d.hom(omap[x], omap[y]) if not d.is_identity(g)]
            for g in options:
                if g in used:
                    continue
                budget.tick()
                amap[f] = g
                if consistent(f) and step(pos + 1):
                    return True
                del amap[f]
            return False

        return dict(amap) if step(0) else None

    for perm in permutations(d.objects):
        omap = dict(zip(objs, perm))
        budget.tick()
        if any(pc[x] != pd[omap[x]] for x in objs):
            continue
        if any(len(c.hom(x, y)) != len(d.hom(omap[x], omap[y])) for x in objs for y in objs):
            continue
        amap = arrow_search(omap)
        if amap is not None:
            return CatFunctor(c, d, omap, amap).check()
    return None
