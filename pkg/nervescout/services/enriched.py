"""Simplicially enriched categories and the comonadic resolution.

Two constructions of the standard S-categories are kept side by side:

* ``s_ordinal`` builds S[n] from cubes. A vertex of hom(i,j) is the set of
  interior vertices a path visits; a k-simplex is a chain of such sets under
  inclusion, and composition is union together with the middle vertex.
* ``s_resolution`` builds S(A) from bracketed strings of arrows. A depth-n
  simplex of hom(x,y) is an element of T^{n+1}A(x,y), stored as nested tuples
  whose innermost tuples hold arrow ids. Faces follow d_i = T^{n-i} ε T^i and
  degeneracies wrap each child of level n-i into a singleton.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from config import Config
from services.cat_core import FinCat, make_category, nerve
from services.quasi import HornInstance, is_kan
from services.simplicial_core import (
    ConcreteModel,
    SMap,
    SSet,
    SimplexRef,
    build_sset,
    discrete,
    pair_simplex,
    product,
    total_degeneracy,
)
from utils.budget import SearchBudget, ensure_budget
from utils.errors import InvalidInput, PreconditionFailed

logger = logging.getLogger("enriched")


@dataclass(frozen=True, eq=False)
class SCat:
    objects: Tuple[str, ...]
    homs: Mapping[Tuple[str, str], SSet]
    comp: Mapping[Tuple[str, str, str], SMap]
    ids: Mapping[str, str]
    max_dim: int
    name: str = ""
    _empty: Dict[int, SSet] = field(default_factory=dict, repr=False)

    def hom(self, x: str, y: str) -> SSet:
        h = self.homs.get((x, y))
        if h is not None:
            return h
        if 0 not in self._empty:
            self._empty[0] = SSet.build(self.max_dim, {}, {}, name="∅")
        return self._empty[0]

    def hom_pairs(self) -> List[Tuple[str, str]]:
        return sorted(self.homs)

    def identity_simplex(self, x: str, q: int) -> SimplexRef:
        return total_degeneracy(self.ids[x], q)

    def compose_simplices(self, x: str, y: str, z: str, first: SimplexRef, second: SimplexRef) -> SimplexRef:
        """Composite of first ∈ hom(x,y) and second ∈ hom(y,z)."""

        m = self.comp.get((x, y, z))
        if m is None:
            raise InvalidInput(f"no composition map for {x}→{y}→{z}")
        return m.apply(pair_simplex(m.source, first, second))

    def check(self, check_dim: Optional[int] = None) -> "SCat":
        """Validate composition maps, strict unit laws and associativity."""

        d = min(self.max_dim, 2 if check_dim is None else check_dim)
        for x in self.objects:
            if not self.hom(x, x).contains(self.ids.get(x, "")):
                raise InvalidInput(f"identity of {x!r} is not a vertex of hom({x},{x})")
        for (x, y, z), m in self.comp.items():
            if m.target is not self.hom(x, z):
                raise InvalidInput(f"composition {x}→{y}→{z} lands outside hom({x},{z})")
            m.check()
        for (x, y) in self.hom_pairs():
            h = self.hom(x, y)
            for q in range(d + 1):
                for r in h.simplices(q):
                    if self.compose_simplices(x, x, y, self.identity_simplex(x, q), r) != r:
                        raise InvalidInput(f"left unit law fails on {r.key} in hom({x},{y})")
                    if self.compose_simplices(x, y, y, r, self.identity_simplex(y, q)) != r:
                        raise InvalidInput(f"right unit law fails on {r.key} in hom({x},{y})")
        for (x, y, z) in sorted(self.comp):
            for w in self.objects:
                if (z, w) not in self.homs:
                    continue
                for q in range(d + 1):
                    for ra in self.hom(x, y).simplices(q):
                        for rb in self.hom(y, z).simplices(q):
                            ab = self.compose_simplices(x, y, z, ra, rb)
                            for rc in self.hom(z, w).simplices(q):
                                left = self.compose_simplices(x, z, w, ab, rc)
                                right = self.compose_simplices(x, y, w, ra, self.compose_simplices(y, z, w, rb, rc))
                                if left != right:
                                    raise InvalidInput(f"associativity fails on {ra.key}, {rb.key}, {rc.key}")
        return self

    def __repr__(self) -> str:
        return f"SCat({self.name or '?'}, {len(self.objects)} objects, max_dim={self.max_dim})"

    @classmethod
    def from_categories(
        cls,
        objects: Sequence[str],
        homs: Mapping[Tuple[str, str], FinCat],
        compose: Mapping[Tuple[str, str, str], Mapping[Tuple[str, str], str]],
        identities: Mapping[str, str],
        max_dim: int,
        name: str = "",
    ) -> "SCat":
        """Cat-enriched category: hom complexes are nerves of hom categories.

        ``compose[(x, y, z)][(a, b)]`` is the composite of a in hom(x,y) with
        b in hom(y,z), given on objects and on arrows of the hom categories.
        Pairs of identity arrows may be omitted.
        """

        nerves = {k: nerve(c, max_dim) for k, c in homs.items()}
        comp = {}
        for (x, y, z), table in compose.items():
            h1, h2, h3 = nerves[(x, y)], nerves[(y, z)], nerves[(x, z)]
            c1, c2, c3 = homs[(x, y)], homs[(y, z)], homs[(x, z)]

            def lookup(p, q, c1=c1, c2=c2, c3=c3, table=table):
                if (p, q) in table:
                    return table[(p, q)]
                if c1.is_identity(p) and c2.is_identity(q):
                    return c3.identity(table[(c1.dom(p), c2.dom(q))])
                raise InvalidInput(f"horizontal composite of {p!r} and {q!r} is missing")

            def apply(ra, rb, h1=h1, h2=h2, h3=h3, table=table, lookup=lookup):
                (oa, fa), (ob, fb) = h1.realize(ra), h2.realize(rb)
                objs = tuple(table[(p, q)] for p, q in zip(oa, ob))
                arrs = tuple(lookup(p, q) for p, q in zip(fa, fb))
                return h3.locate((objs, arrs), len(arrs))

            comp[(x, y, z)] = _composition_map(h1, h2, h3, apply)
        return cls(tuple(sorted(objects)), nerves, comp, dict(identities), max_dim, name).check()


def _composition_map(h1: SSet, h2: SSet, h3: SSet, apply: Callable[[SimplexRef, SimplexRef], SimplexRef]) -> SMap:
    p = product(h1, h2)
    return SMap(p, h3, {x: apply(*p.model.payload[x]) for _, x in p.nd_items()})


@dataclass(frozen=True)
class SFunctor:
    source: SCat
    target: SCat
    objects: Mapping[str, str]
    homs: Mapping[Tuple[str, str], SMap]

    def apply(self, x: str, y: str, ref: SimplexRef) -> SimplexRef:
        return self.homs[(x, y)].apply(ref)

    def check(self, check_dim: Optional[int] = None) -> "SFunctor":
        s, t = self.source, self.target
        d = min(s.max_dim, 2 if check_dim is None else check_dim)
        for (x, y) in s.hom_pairs():
            m = self.homs.get((x, y))
            if m is None or m.target is not t.hom(self.objects[x], self.objects[y]):
                raise InvalidInput(f"S-functor has no map on hom({x},{y})")
            m.check()
        for x in s.objects:
            if self.apply(x, x, SimplexRef(s.ids[x])) != SimplexRef(t.ids[self.objects[x]]):
                raise InvalidInput(f"S-functor does not preserve the identity of {x!r}")
        for (x, y, z) in sorted(s.comp):
            fx, fy, fz = (self.objects[o] for o in (x, y, z))
            for q in range(d + 1):
                for ra in s.hom(x, y).simplices(q):
                    for rb in s.hom(y, z).simplices(q):
                        lhs = self.apply(x, z, s.compose_simplices(x, y, z, ra, rb))
                        rhs = t.compose_simplices(fx, fy, fz, self.apply(x, y, ra), self.apply(y, z, rb))
                        if lhs != rhs:
                            raise InvalidInput(f"S-functor does not preserve {ra.key} then {rb.key}")
        return self


# ---------- Discrete and underlying categories ----------


def discrete_scat(c: FinCat, max_dim: int) -> SCat:
    """A category viewed as an S-category with discrete hom complexes."""

    homs = {(x, y): discrete(c.hom(x, y), max_dim, name=f"{x}→{y}") for x in c.objects for y in c.objects if c.hom(x, y)}
    comp = {}
    for (x, y) in homs:
        for z in c.objects:
            if (y, z) not in homs:
                continue
            comp[(x, y, z)] = _composition_map(
                homs[(x, y)], homs[(y, z)], homs[(x, z)],
                lambda ra, rb: SimplexRef(c.compose(rb.base, ra.base)),
            )
    return SCat(c.objects, homs, comp, dict(c.identities), max_dim, name=f"disc({c.name or '?'})")


def underlying_category(b: SCat) -> FinCat:
    """Vertices of the hom complexes with vertex composition."""

    def aid(x, y, v):
        return f"{x}>{y}:{v}"

    arrows = {aid(x, y, v): (x, y) for (x, y) in b.hom_pairs() for v in b.hom(x, y).nondegenerate(0)}
    comp = {}
    for (x, y, z) in b.comp:
        for u in b.hom(x, y).nondegenerate(0):
            for v in b.hom(y, z).nondegenerate(0):
                w = b.compose_simplices(x, y, z, SimplexRef(u), SimplexRef(v)).base
                comp[(aid(y, z, v), aid(x, y, u))] = aid(x, z, w)
    ids = {x: aid(x, x, b.ids[x]) for x in b.objects}
    return make_category(b.objects, arrows, ids, comp, name=f"U({b.name or '?'})")


# ---------- S[n] from cubes ----------


def path_label(i: int, j: int, interior: Iterable[int], n: int) -> str:
    """Bracket-free path label such as (01)(12)."""

    if i == j:
        return f"1_{i}"
    pts = [i] + sorted(interior) + [j]
    sep = "" if n < 10 else "-"
    return "".join(f"({a}{sep}{b})" for a, b in zip(pts, pts[1:]))


def _chain_model(i: int, j: int, n: int) -> ConcreteModel:
    return ConcreteModel(
        face=lambda c, t: c[:t] + c[t + 1:],
        degeneracy=lambda c, t: c[: t + 1] + c[t:],
        label=lambda c: "<".join(path_label(i, j, u, n) for u in c),
    )


def _strict_chains(coords: Sequence[int], k: int):
    """Chains U_0 ⊊ ... ⊊ U_k of subsets of coords."""

    subsets = [tuple(s) for r in range(len(coords) + 1) for s in combinations(coords, r)]

    def extend(chain):
        if len(chain) == k + 1:
            yield chain
            return
        last = set(chain[-1])
        for s in subsets:
            if last < set(s):
                yield from extend(chain + (s,))

    for s in subsets:
        yield from extend((s,))


def cube_hom(i: int, j: int, n: int, max_dim: int) -> SSet:
    """hom(i,j) of S[n]: the nerve of the poset of subsets of the open interval (i,j)."""

    coords = list(range(i + 1, j)) if i < j else []
    return build_sset(max_dim, lambda k: _strict_chains(coords, k), _chain_model(i, j, n), name=f"S[{n}]({i},{j})")


def s_ordinal(n: int, max_dim: int) -> SCat:
    """S[n] with cube hom complexes; composition is the coordinate-1 inclusion."""

    objs = [str(i) for i in range(n + 1)]
    homs = {(str(i), str(j)): cube_hom(i, j, n, max_dim) for i in range(n + 1) for j in range(i, n + 1)}
    comp = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            for k in range(j, n + 1):
                h1, h2, h3 = homs[(str(i), str(j))], homs[(str(j), str(k))], homs[(str(i), str(k))]
                middle = (j,) if i < j < k else ()

                def apply(ra, rb, h1=h1, h2=h2, h3=h3, middle=middle):
                    ca, cb = h1.realize(ra), h2.realize(rb)
                    chain = tuple(tuple(sorted(set(u) | set(v) | set(middle))) for u, v in zip(ca, cb))
                    return h3.locate(chain, len(chain) - 1)

                comp[(str(i), str(j), str(k))] = _composition_map(h1, h2, h3, apply)
    ids = {str(i): path_label(i, i, (), n) for i in range(n + 1)}
    out = SCat(tuple(objs), homs, comp, ids, max_dim, name=f"S[{n}]")
    logger.info(f"[s_ordinal] built {out!r}")
    return out


def cube_vertex(b: SCat, i: int, j: int, interior: Iterable[int]) -> SimplexRef:
    """The vertex of S[n](i,j) visiting the given interior vertices."""

    return b.hom(str(i), str(j)).locate((tuple(sorted(interior)),), 0)


# ---------- Resolution S(A) ----------


class _FinCatLevel:
    """Leaves are the non-identity arrows of a loop-free category."""

    def __init__(self, c: FinCat):
        self.c = c
        self.objects = c.objects

    def arrows(self, u: str, v: str) -> List[Any]:
        return [f for f in self.c.hom(u, v) if not self.c.is_identity(f)]

    def ends(self, leaf: Any) -> Tuple[str, str]:
        return self.c.arrows[leaf]

    def compose(self, leaves: Sequence[Any]) -> Optional[Any]:
        out = None
        for f in leaves:
            out = f if out is None else self.c.compose(f, out)
        if out is None or self.c.is_identity(out):
            return None
        return out

    def label(self, leaf: Any) -> str:
        return str(leaf)


def _apply_at(t: tuple, depth: int, fn: Callable[[Any], Any]) -> Any:
    if depth == 0:
        return fn(t)
    out = []
    for child in t:
        r = _apply_at(child, depth - 1, fn)
        if r is None or r == ():
            continue
        out.append(r)
    return tuple(out)


def _counit(level: Any, y: tuple, m: int) -> Any:
    """ε on T(T^m A): compose leaves for m = 0, otherwise concatenate."""

    if m == 0:
        return level.compose(y)
    return tuple(c for child in y for c in child)


def _wrap(y: tuple) -> tuple:
    return tuple((c,) for c in y)


def res_face(level: Any, s: Tuple[int, tuple], i: int) -> Tuple[int, tuple]:
    n, t = s
    return n - 1, _apply_at(t, n - i, lambda y: _counit(level, y, i))


def res_degeneracy(s: Tuple[int, tuple], i: int) -> Tuple[int, tuple]:
    n, t = s
    return n + 1, _apply_at(t, n - i, _wrap)


def tree_label(level: Any, t: tuple, n: int) -> str:
    if n == 0:
        return "".join(f"({level.label(leaf)})" for leaf in t)
    return "".join(f"({tree_label(level, c, n - 1)})" for c in t)


class _Strings:
    """Elements of T^L(x,y): strings of nonempty elements of T^{L-1}."""

    def __init__(self, level: Any):
        self.level = level
        self._memo: Dict[Tuple[int, str, str], List[tuple]] = {}

    def get(self, depth: int, x: str, y: str) -> List[tuple]:
        key = (depth, x, y)
        if key in self._memo:
            return self._memo[key]
        out: List[tuple] = []

        def pieces(u: str) -> List[Tuple[str, Any]]:
            found = []
            for v in self.level.objects:
                if depth == 1:
                    found.extend((v, f) for f in self.level.arrows(u, v))
                else:
                    found.extend((v, e) for e in self.get(depth - 1, u, v) if e != ())
            return found

        def extend(u: str, acc: tuple):
            if u == y:
                out.append(acc)
            for v, piece in pieces(u):
                extend(v, acc + (piece,))

        extend(x, ())
        self._memo[key] = out
        return out


def _check_loop_free(objects: Sequence[str], has_edge: Callable[[str, str], bool], what: str) -> None:
    g = nx.DiGraph()
    g.add_nodes_from(objects)
    g.add_edges_from((u, v) for u in objects for v in objects if has_edge(u, v))
    if not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        raise PreconditionFailed(f"{what} has a cycle of non-identity arrows through {cycle[0][0]!r}; the resolution would be infinite")


def _resolution_scat(level: Any, objects: Sequence[str], max_dim: int, name: str) -> SCat:
    strings = _Strings(level)
    homs: Dict[Tuple[str, str], SSet] = {}
    for x in objects:
        for y in objects:
            if not strings.get(1, x, y):
                continue

            def label(s, x=x):
                n, t = s
                return f"1_{x}" if t == () else tree_label(level, t, n)

            model = ConcreteModel(lambda s, i: res_face(level, s, i), res_degeneracy, label)

            def nondegenerate(k, x=x, y=y, model=model):
                return [(k, t) for t in strings.get(k + 1, x, y) if model.is_nondegenerate((k, t), k)]

            homs[(x, y)] = build_sset(max_dim, nondegenerate, model, name=f"{name}({x},{y})")
    comp = {}
    for (x, y), h1 in homs.items():
        for z in objects:
            if (y, z) not in homs:
                continue
            h2, h3 = homs[(y, z)], homs[(x, z)]

            def apply(ra, rb, h1=h1, h2=h2, h3=h3):
                (n, ta), (_, tb) = h1.realize(ra), h2.realize(rb)
                return h3.locate((n, ta + tb), n)

            comp[(x, y, z)] = _composition_map(h1, h2, h3, apply)
    ids = {x: f"1_{x}" for x in objects}
    return SCat(tuple(objects), homs, comp, ids, max_dim, name=name)


def s_resolution(a: FinCat, max_dim: int) -> SCat:
    """The comonadic resolution S(A) of a loop-free finite category."""

    level = _FinCatLevel(a)
    _check_loop_free(a.objects, lambda u, v: bool(level.arrows(u, v)), repr(a))
    out = _resolution_scat(level, a.objects, max_dim, name=f"S({a.name or '?'})")
    logger.info(f"[s_resolution] built {out!r}")
    return out


def resolution_tree(b: SCat, x: str, y: str, ref: SimplexRef) -> tuple:
    """The bracketed string behind a simplex of a resolution hom complex."""

    return b.hom(x, y).realize(ref)[1]


def resolution_augmentation(a: FinCat, res: SCat, disc: SCat) -> SFunctor:
    """ε: S(A) → A, sending a bracketed string to the composite of its leaves."""

    level = _FinCatLevel(a)
    homs = {}
    for (x, y) in res.hom_pairs():
        h = res.hom(x, y)
        image = {}
        for k, s in h.nd_items():
            n, t = h.model.payload[s]
            leaves = _flatten(t, n)
            f = level.compose(leaves)
            image[s] = total_degeneracy(f if f is not None else a.identity(x), n)
        homs[(x, y)] = SMap(h, disc.hom(x, y), image)
    return SFunctor(res, disc, {x: x for x in a.objects}, homs).check()


def _flatten(t: tuple, n: int) -> List[Any]:
    if n == 0:
        return list(t)
    return [leaf for child in t for leaf in _flatten(child, n - 1)]


class _DiagLevel:
    """Leaves are non-identity n-simplices (x, y, ref) of the hom complexes of b."""

    def __init__(self, b: SCat, n: int):
        self.b = b
        self.n = n
        self.objects = b.objects

    def is_identity(self, leaf) -> bool:
        u, v, ref = leaf
        return u == v and ref == self.b.identity_simplex(u, self.n)

    def arrows(self, u: str, v: str) -> List[Any]:
        return [(u, v, r) for r in self.b.hom(u, v).simplices(self.n) if not self.is_identity((u, v, r))]

    def compose(self, leaves: Sequence[Any]) -> Optional[Any]:
        out = None
        for leaf in leaves:
            if out is None:
                out = leaf
            else:
                (u, _, r1), (_, w, r2) = out, leaf
                out = (u, w, self.b.compose_simplices(u, out[1], w, r1, r2))
        if out is None or self.is_identity(out):
            return None
        return out

    def label(self, leaf: Any) -> str:
        u, v, ref = leaf
        return f"{ref.key}:{u}>{v}"


def diag_resolution(b: SCat, max_dim: int) -> SCat:
    """Diagonal of the levelwise resolution of a simplicial category."""

    if max_dim > b.max_dim:
        raise PreconditionFailed(f"max_dim {max_dim} exceeds the hom truncation {b.max_dim}")
    for u in b.objects:
        h = b.hom(u, u)
        if list(h.nondegenerate(0)) != [b.ids[u]] or any(h.nondegenerate(k) for k in range(1, h.max_dim + 1)):
            raise PreconditionFailed(f"hom({u},{u}) is not a point; the diagonal resolution would be infinite")
    _check_loop_free(b.objects, lambda u, v: u != v and not b.hom(u, v).is_empty(), repr(b))
    levels = {n: _DiagLevel(b, n) for n in range(max_dim + 2)}

    def leafwise(t: tuple, n: int, fn):
        def on_string(y):
            return tuple(z for z in (fn(leaf) for leaf in y) if z is not None)

        return _apply_at(t, n, on_string)

    def face(s, i):
        n, t = s
        lower = levels[n - 1]

        def leaf_face(leaf):
            u, v, ref = leaf
            out = (u, v, b.hom(u, v).face(ref, i))
            return None if lower.is_identity(out) else out

        return res_face(lower, (n, leafwise(t, n, leaf_face)), i)

    def degeneracy(s, i):
        n, t = s

        def leaf_degeneracy(leaf):
            u, v, ref = leaf
            return (u, v, b.hom(u, v).degeneracy(ref, i))

        return res_degeneracy((n, leafwise(t, n, leaf_degeneracy)), i)

    homs: Dict[Tuple[str, str], SSet] = {}
    strings = {n: _Strings(levels[n]) for n in levels}
    for x in b.objects:
        for y in b.objects:
            if b.hom(x, y).is_empty():
                continue

            def label(s, x=x):
                n, t = s
                return f"1_{x}" if t == () else tree_label(levels[n], t, n)

            model = ConcreteModel(face, degeneracy, label)

            def nondegenerate(k, x=x, y=y, model=model):
                return [(k, t) for t in strings[k].get(k + 1, x, y) if model.is_nondegenerate((k, t), k)]

            homs[(x, y)] = build_sset(max_dim, nondegenerate, model, name=f"diagS({x},{y})")
    comp = {}
    for (x, y), h1 in homs.items():
        for z in b.objects:
            if (y, z) not in homs:
                continue
            h2, h3 = homs[(y, z)], homs[(x, z)]

            def apply(ra, rb, h1=h1, h2=h2, h3=h3):
                (n, ta), (_, tb) = h1.realize(ra), h2.realize(rb)
                return h3.locate((n, ta + tb), n)

            comp[(x, y, z)] = _composition_map(h1, h2, h3, apply)
    return SCat(b.objects, homs, comp, {x: f"1_{x}" for x in b.objects}, max_dim, name=f"diagS({b.name or '?'})")


# ---------- Interchange ----------


@dataclass(frozen=True)
class InterchangeSquare:
    corners: Tuple[str, ...]
    edges: Tuple[Tuple[str, str, str], ...]
    face: str
    facets: Mapping[int, Tuple[int, int]]
    remaining: Tuple[Tuple[int, int], ...]


def sub_label(lo: int, hi: int, small: Sequence[int], big: Sequence[int], n: int) -> str:
    """Label of the cube simplex between two vertices, e.g. (012)(24)."""

    pts = [lo] + sorted(small) + [hi]
    sep = "" if n < 10 else "-"
    segs = []
    for a, b in zip(pts, pts[1:]):
        inner = [v for v in sorted(big) if a < v < b]
        segs.append("(" + sep.join(str(v) for v in [a] + inner + [b]) + ")")
    return "".join(segs)


def coface_facets(n: int) -> Dict[int, Tuple[int, int]]:
    """For each coface ∂_i of Δ[n], the facet (coordinate, value) of the cube S[n](0,n) it covers."""

    if n < 2:
        raise InvalidInput("cube facets need n >= 2")
    s = s_ordinal(n, 0)
    top = s.hom("0", str(n))
    coords = list(range(1, n))
    vertex_sets = {x: set(top.realize(SimplexRef(x))[0]) for x in top.nondegenerate(0)}
    facets = {(c, v): {x for x, u in vertex_sets.items() if (c in u) == bool(v)} for c in coords for v in (0, 1)}
    out: Dict[int, Tuple[int, int]] = {}
    for i in range(n + 1):
        image = set()
        for u in (set(c) for r in range(n - 1) for c in combinations(range(1, n - 1), r)):
            if i == 0:
                inner = cube_vertex(s, 1, n, {v + 1 for v in u})
                image.add(s.compose_simplices("0", "1", str(n), cube_vertex(s, 0, 1, ()), inner).base)
            elif i == n:
                inner = cube_vertex(s, 0, n - 1, u)
                image.add(s.compose_simplices("0", str(n - 1), str(n), inner, cube_vertex(s, n - 1, n, ())).base)
            else:
                image.add(cube_vertex(s, 0, n, {v if v < i else v + 1 for v in u}).base)
        match = [f for f, members in facets.items() if members == image]
        if len(match) != 1:
            raise PreconditionFailed(f"coface {i} does not cover a single facet")
        out[i] = match[0]
    return out


def interchange_square(n: int = 4) -> InterchangeSquare:
    """The facet of S[4](0,4) that is not the image of a coface."""

    facets = coface_facets(n)
    used = set(facets.values())
    remaining = tuple(sorted((c, v) for c in range(1, n) for v in (0, 1) if (c, v) not in used))
    if n != 4:
        return InterchangeSquare((), (), "", facets, remaining)
    (coord, value), = remaining
    others = [c for c in range(1, n) if c != coord]
    fixed = {coord} if value else set()
    corners = []
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            corners.append(tuple(sorted(fixed | set(extra))))
    corners.sort(key=lambda u: (len(u), u))
    edges = []
    for a in corners:
        for b in corners:
            if set(a) < set(b) and len(b) == len(a) + 1:
                edges.append((path_label(0, n, a, n), path_label(0, n, b, n), sub_label(0, n, a, b, n)))
    return InterchangeSquare(
        corners=tuple(path_label(0, n, u, n) for u in corners),
        edges=tuple(edges),
        face=sub_label(0, n, corners[0], corners[-1], n),
        facets=facets,
        remaining=remaining,
    )


# ---------- π0 and homotopy in homs ----------


def hom_components(h: SSet) -> Dict[str, str]:
    """Each vertex mapped to the smallest vertex of its connected component."""

    g = nx.Graph()
    g.add_nodes_from(h.nondegenerate(0))
    for e in h.nondegenerate(1):
        g.add_edge(h.faces[e][0].base, h.faces[e][1].base)
    out = {}
    for comp in nx.connected_components(g):
        rep = min(comp)
        for v in comp:
            out[v] = rep
    return out


def pi0_category(b: SCat) -> FinCat:
    """Objects of b with hom-sets π0 of the hom complexes."""

    def aid(x, y, rep):
        return f"{x}>{y}:[{rep}]"

    reps = {k: hom_components(b.hom(*k)) for k in b.hom_pairs()}
    arrows = {aid(x, y, r): (x, y) for (x, y), m in reps.items() for r in set(m.values())}
    comp: Dict[Tuple[str, str], str] = {}
    for (x, y, z) in sorted(b.comp):
        for u in b.hom(x, y).nondegenerate(0):
            for v in b.hom(y, z).nondegenerate(0):
                w = b.compose_simplices(x, y, z, SimplexRef(u), SimplexRef(v)).base
                pair = (aid(y, z, reps[(y, z)][v]), aid(x, y, reps[(x, y)][u]))
                result = aid(x, z, reps[(x, z)][w])
                if comp.setdefault(pair, result) != result:
                    raise PreconditionFailed(f"composition is not well defined on components at {pair}")
    ids = {x: aid(x, x, reps[(x, x)][b.ids[x]]) for x in b.objects}
    return make_category(b.objects, arrows, ids, comp, name=f"π0({b.name or '?'})")


def homotopic_in_hom(b: SCat, x: str, y: str, f: str, g: str) -> bool:
    """A 1-simplex H of hom(x,y) with d1 H = f and d0 H = g."""

    h = b.hom(x, y)
    for v in (f, g):
        if v not in h.nondegenerate(0):
            raise InvalidInput(f"{v!r} is not a vertex of hom({x},{y})")
    return bool(h.index_by_faces(1).get((SimplexRef(g), SimplexRef(f))))


@dataclass(frozen=True)
class LocalKanVerdict:
    holds: bool
    max_n: int
    hom: Optional[Tuple[str, str]] = None
    witness: Optional[HornInstance] = None


def is_locally_kan(b: SCat, max_n: int, budget: Optional[SearchBudget] = None) -> LocalKanVerdict:
    """is_kan on every hom complex; the first failing hom in sorted order is reported."""

    budget = ensure_budget(budget)
    if max_n > b.max_dim:
        raise PreconditionFailed(f"max_n {max_n} exceeds the hom truncation {b.max_dim}")
    pairs = b.hom_pairs()
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
        verdicts = list(pool.map(lambda k: is_kan(b.hom(*k), max_n, budget), pairs))
    for k, v in zip(pairs, verdicts):
        if not v.holds:
            logger.info(f"[local-kan] hom{k} fails")
            return LocalKanVerdict(False, max_n, k, v.witness)
    return LocalKanVerdict(True, max_n)
