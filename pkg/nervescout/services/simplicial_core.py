"""Finite simplicial sets in Eilenberg-Zilber normal form.

Only nondegenerate simplices are stored. Every simplex is a ``SimplexRef``: a
nondegenerate base together with a strictly decreasing degeneracy word
``(i_1, ..., i_r)`` standing for ``s_{i_1} ... s_{i_r}(base)``. Faces of
degenerate simplices are evaluated by rewriting ``d_j s_i`` words.

Constructions that come with a concrete presentation (vertex tuples for
standard simplices, pairs for products, arrow chains for nerves, ...) are
built through ``ConcreteModel``, which decides nondegeneracy with the test
``s_i d_i x == x`` and keeps the concrete value of each stored simplex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from utils.budget import SearchBudget, ensure_budget
from utils.errors import InternalCheckFailed, InvalidInput

logger = logging.getLogger("simplicial_core")


def push_degeneracy(word: Tuple[int, ...], j: int) -> Tuple[int, ...]:
    """Normal form of ``s_j`` applied on the left of a degeneracy word."""

    if not word or j > word[0]:
        return (j,) + word
    # s_j s_i = s_{i+1} s_j for j <= i
    return (word[0] + 1,) + push_degeneracy(word[1:], j)


@dataclass(frozen=True, order=True)
class SimplexRef:
    base: str
    degens: Tuple[int, ...] = ()

    def __post_init__(self):
        d = self.degens
        if any(i < 0 for i in d) or any(d[k] <= d[k + 1] for k in range(len(d) - 1)):
            raise InvalidInput(f"degeneracy word {d!r} is not strictly decreasing")

    @property
    def key(self) -> str:
        if not self.degens:
            return self.base
        return "".join(f"s{i}" for i in self.degens) + f"({self.base})"

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degens)

    def to_json(self) -> Dict[str, Any]:
        return {"base": self.base, "degens": list(self.degens)}


def total_degeneracy(base: str, k: int) -> SimplexRef:
    """``s_{k-1} ... s_0`` applied to a vertex: the constant k-simplex."""

    return SimplexRef(base, tuple(range(k - 1, -1, -1)))


class ConcreteModel:
    """Face, degeneracy and labelling operations on concrete simplices."""

    def __init__(
        self,
        face: Callable[[Any, int], Any],
        degeneracy: Callable[[Any, int], Any],
        label: Callable[[Any], str],
    ):
        self.face = face
        self.degeneracy = degeneracy
        self.label = label
        self.payload: Dict[str, Any] = {}
        self._located: Dict[Tuple[Any, int], SimplexRef] = {}

    def is_nondegenerate(self, x: Any, k: int) -> bool:
        return all(self.degeneracy(self.face(x, i), i) != x for i in range(k))

    def locate(self, x: Any, k: int) -> SimplexRef:
        """Decompose a concrete k-simplex into its normal form reference."""

        hit = self._located.get((x, k))
        if hit is not None:
            return hit
        ref = None
        for i in range(k):
            y = self.face(x, i)
            if self.degeneracy(y, i) == x:
                inner = self.locate(y, k - 1)
                ref = SimplexRef(inner.base, push_degeneracy(inner.degens, i))
                break
        if ref is None:
            lab = self.label(x)
            if lab not in self.payload:
                raise InternalCheckFailed(f"simplex {lab!r} missing from the nondegenerate enumeration")
            ref = SimplexRef(lab)
        self._located[(x, k)] = ref
        return ref

    def realize(self, ref: SimplexRef) -> Any:
        x = self.payload[ref.base]
        for j in reversed(ref.degens):
            x = self.degeneracy(x, j)
        return x


@dataclass(frozen=True, eq=False)
class SSet:
    max_dim: int
    nd: Tuple[Tuple[str, ...], ...]
    faces: Mapping[str, Tuple[SimplexRef, ...]]
    name: str = ""
    model: Optional[ConcreteModel] = field(default=None, repr=False)
    _dims: Dict[str, int] = field(default_factory=dict, repr=False)
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        max_dim: int,
        nd: Mapping[int, Iterable[str]],
        faces: Mapping[str, Sequence[SimplexRef]],
        name: str = "",
        model: Optional[ConcreteModel] = None,
    ) -> "SSet":
        """Validate raw tables and return an SSet (ids sorted per dimension)."""

        if max_dim < 0:
            raise InvalidInput("max_dim must be a natural number")
        extra = [k for k in nd if k > max_dim and list(nd[k])]
        if extra:
            raise InvalidInput(f"nondegenerate simplices above max_dim {max_dim} in dimension {extra[0]}")
        levels = tuple(tuple(sorted(nd.get(k, ()))) for k in range(max_dim + 1))
        dims: Dict[str, int] = {}
        for k, ids in enumerate(levels):
            for x in ids:
                if x in dims:
                    raise InvalidInput(f"duplicate simplex id {x!r}")
                dims[x] = k
        table: Dict[str, Tuple[SimplexRef, ...]] = {}
        for k, ids in enumerate(levels):
            for x in ids:
                fs = tuple(faces.get(x, ()))
                if k == 0:
                    if fs:
                        raise InvalidInput(f"vertex {x!r} cannot have faces")
                    continue
                if len(fs) != k + 1:
                    raise InvalidInput(f"simplex {x!r} of dimension {k} needs {k + 1} faces, got {len(fs)}")
                for i, r in enumerate(fs):
                    if r.base not in dims:
                        raise InvalidInput(f"face d{i} of {x!r} refers to unknown simplex {r.base!r}")
                    if dims[r.base] + len(r.degens) != k - 1:
                        raise InvalidInput(f"face d{i} of {x!r} has the wrong dimension")
                    if r.degens and r.degens[0] > dims[r.base] + len(r.degens) - 1:
                        raise InvalidInput(f"face d{i} of {x!r} uses an out of range degeneracy")
                table[x] = fs
        return cls(max_dim, levels, table, name, model, dims)

    # ---------- Basic access ----------

    def dim(self, ref: SimplexRef) -> int:
        try:
            return self._dims[ref.base] + len(ref.degens)
        except KeyError:
            raise InvalidInput(f"unknown simplex {ref.base!r} in {self.name or 'simplicial set'}") from None

    def nondegenerate(self, k: int) -> Tuple[str, ...]:
        return self.nd[k] if 0 <= k <= self.max_dim else ()

    def nd_items(self) -> Iterator[Tuple[int, str]]:
        for k, ids in enumerate(self.nd):
            for x in ids:
                yield k, x

    def contains(self, x: str) -> bool:
        return x in self._dims

    def is_empty(self) -> bool:
        return not self.nd or not self.nd[0]

    def face(self, ref: SimplexRef, j: int) -> SimplexRef:
        k = self.dim(ref)
        if not 0 <= j <= k or k == 0:
            raise InvalidInput(f"face d{j} undefined on a {k}-simplex")
        if not ref.degens:
            return self.faces[ref.base][j]
        i, rest = ref.degens[0], ref.degens[1:]
        inner = SimplexRef(ref.base, rest)
        if j < i:
            return self.degeneracy(self.face(inner, j), i - 1)
        if j in (i, i + 1):
            return inner
        return self.degeneracy(self.face(inner, j - 1), i)

    def degeneracy(self, ref: SimplexRef, j: int) -> SimplexRef:
        k = self.dim(ref)
        if not 0 <= j <= k:
            raise InvalidInput(f"degeneracy s{j} undefined on a {k}-simplex")
        return SimplexRef(ref.base, push_degeneracy(ref.degens, j))

    def face_tuple(self, ref: SimplexRef) -> Tuple[SimplexRef, ...]:
        return tuple(self.face(ref, i) for i in range(self.dim(ref) + 1))

    def simplices(self, k: int) -> Tuple[SimplexRef, ...]:
        """All k-simplices, degenerate ones included, in a fixed order."""

        key = ("simplices", k)
        if key not in self._cache:
            out: List[SimplexRef] = []
            if 0 <= k:
                for m in range(min(k, self.max_dim) + 1):
                    words = [tuple(sorted(c, reverse=True)) for c in combinations(range(k), k - m)]
                    for base in self.nondegenerate(m):
                        out.extend(SimplexRef(base, w) for w in words)
            self._cache[key] = tuple(out)
        return self._cache[key]

    def count(self, k: int) -> int:
        return len(self.simplices(k))

    def index_by_faces(self, k: int) -> Dict[Tuple[SimplexRef, ...], List[SimplexRef]]:
        """k-simplices grouped by their tuple of faces."""

        key = ("by_faces", k)
        if key not in self._cache:
            index: Dict[Tuple[SimplexRef, ...], List[SimplexRef]] = {}
            for r in self.simplices(k):
                index.setdefault(self.face_tuple(r) if k else (), []).append(r)
            self._cache[key] = index
        return self._cache[key]

    def vertices(self, ref: SimplexRef) -> Tuple[str, ...]:
        k = self.dim(ref)
        out = []
        for p in range(k + 1):
            r = ref
            for t in range(k, p, -1):
                r = self.face(r, t)
            for _ in range(p):
                r = self.face(r, 0)
            out.append(r.base)
        return tuple(out)

    def restrict(self, ref: SimplexRef, positions: Iterable[int]) -> SimplexRef:
        """The face of ``ref`` spanned by the given vertex positions."""

        keep = set(positions)
        r = ref
        for t in range(self.dim(ref), -1, -1):
            if t not in keep:
                r = self.face(r, t)
        return r

    # ---------- Concrete presentations ----------

    def locate(self, x: Any, k: int) -> SimplexRef:
        if self.model is None:
            raise InvalidInput(f"{self.name or 'simplicial set'} has no concrete presentation")
        return self.model.locate(x, k)

    def realize(self, ref: SimplexRef) -> Any:
        if self.model is None:
            raise InvalidInput(f"{self.name or 'simplicial set'} has no concrete presentation")
        return self.model.realize(ref)

    def __repr__(self) -> str:
        counts = ",".join(str(len(ids)) for ids in self.nd)
        return f"SSet({self.name or '?'}, max_dim={self.max_dim}, nd=[{counts}])"


def build_sset(
    max_dim: int,
    nondegenerate: Callable[[int], Iterable[Any]],
    model: ConcreteModel,
    name: str = "",
) -> SSet:
    """Build an SSet from a concrete model and an enumeration of its nondegenerate simplices."""

    nd: Dict[int, List[str]] = {}
    for k in range(max_dim + 1):
        ids = []
        for x in nondegenerate(k):
            lab = model.label(x)
            if lab in model.payload:
                raise InvalidInput(f"duplicate simplex id {lab!r}")
            model.payload[lab] = x
            model._located[(x, k)] = SimplexRef(lab)
            ids.append(lab)
        nd[k] = ids
    faces: Dict[str, Tuple[SimplexRef, ...]] = {}
    for k in range(1, max_dim + 1):
        for lab in nd[k]:
            x = model.payload[lab]
            faces[lab] = tuple(model.locate(model.face(x, i), k - 1) for i in range(k + 1))
    out = SSet.build(max_dim, nd, faces, name=name, model=model)
    logger.debug(f"[build] {out!r}")
    return out


# ---------- Simplicial maps ----------


class SMap:
    """A simplicial map given on nondegenerate simplices."""

    __slots__ = ("source", "target", "image")

    def __init__(self, source: SSet, target: SSet, image: Mapping[str, SimplexRef]):
        self.source = source
        self.target = target
        self.image = dict(image)

    def apply(self, ref: SimplexRef) -> SimplexRef:
        try:
            out = self.image[ref.base]
        except KeyError:
            raise InvalidInput(f"map is undefined on {ref.base!r}") from None
        for j in reversed(ref.degens):
            out = self.target.degeneracy(out, j)
        return out

    def failures(self) -> List[Tuple[str, int]]:
        """(simplex, face index) pairs where the map does not commute with faces."""

        bad = []
        for k, x in self.source.nd_items():
            if x not in self.image:
                bad.append((x, -1))
                continue
            img = self.image[x]
            if not self.target.contains(img.base) or self.target.dim(img) != k:
                bad.append((x, -1))
                continue
            for i in range(k + 1 if k else 0):
                if self.target.face(img, i) != self.apply(self.source.faces[x][i]):
                    bad.append((x, i))
        return bad

    def check(self) -> "SMap":
        bad = self.failures()
        if bad:
            x, i = bad[0]
            what = "is unmapped or has the wrong dimension" if i < 0 else f"breaks face d{i}"
            raise InvalidInput(f"not a simplicial map: {x!r} {what}")
        return self

    def compose(self, first: "SMap") -> "SMap":
        """``self ∘ first``."""

        return SMap(first.source, self.target, {x: self.apply(first.image[x]) for x in first.image})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SMap):
            return NotImplemented
        return self.source is other.source and self.target is other.target and self.image == other.image

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.image.items())))

    def __repr__(self) -> str:
        return f"SMap({self.source.name or '?'} -> {self.target.name or '?'}, {len(self.image)} simplices)"


def identity(x: SSet) -> SMap:
    return SMap(x, x, {b: SimplexRef(b) for _, b in x.nd_items()})


def inclusion(sub: SSet, ambient: SSet) -> SMap:
    """Inclusion of a sub-simplicial set sharing its simplex ids with the ambient one."""

    return SMap(sub, ambient, {b: SimplexRef(b) for _, b in sub.nd_items()}).check()


# ---------- Generators ----------


def _vertex_label(n: int) -> Callable[[Tuple[int, ...]], str]:
    if n < 10:
        return lambda t: "".join(str(v) for v in t)
    return lambda t: "-".join(str(v) for v in t)


def _tuple_model(n: int) -> ConcreteModel:
    return ConcreteModel(
        face=lambda t, i: t[:i] + t[i + 1:],
        degeneracy=lambda t, i: t[: i + 1] + t[i:],
        label=_vertex_label(n),
    )


def standard_simplex(n: int, max_dim: int) -> SSet:
    """Δ[n]: simplices are monotone vertex sequences."""

    return build_sset(
        max_dim,
        lambda k: combinations(range(n + 1), k + 1),
        _tuple_model(n),
        name=f"Δ[{n}]",
    )


def horn(n: int, i: int, max_dim: int) -> SSet:
    """Λ^i[n]: Δ[n] without its top simplex and its i-th face."""

    if n < 1:
        raise InvalidInput("horns need n >= 1")
    if not 0 <= i <= n:
        raise InvalidInput(f"horn index {i} out of range 0..{n}")
    missing_face = tuple(v for v in range(n + 1) if v != i)

    def nondegenerate(k: int):
        for t in combinations(range(n + 1), k + 1):
            if len(t) < n or (len(t) == n and t != missing_face):
                yield t

    return build_sset(max_dim, nondegenerate, _tuple_model(n), name=f"Λ^{i}[{n}]")


def boundary(n: int, max_dim: int) -> SSet:
    """∂Δ[n]: Δ[n] without its top simplex."""

    if n < 1:
        raise InvalidInput("boundaries need n >= 1")
    return build_sset(
        max_dim,
        lambda k: (t for t in combinations(range(n + 1), k + 1) if k < n),
        _tuple_model(n),
        name=f"∂Δ[{n}]",
    )


def discrete(vertices: Iterable[str], max_dim: int, name: str = "") -> SSet:
    return SSet.build(max_dim, {0: list(vertices)}, {}, name=name or "discrete")


def top_simplex(n: int) -> SimplexRef:
    return SimplexRef(_vertex_label(n)(tuple(range(n + 1))))


def face_label(n: int, j: int) -> str:
    """Id of the j-th face of the top simplex of Δ[n] (and of horns)."""

    return _vertex_label(n)(tuple(v for v in range(n + 1) if v != j))


# ---------- Products ----------


class ProductModel(ConcreteModel):
    def __init__(self, left: SSet, right: SSet):
        super().__init__(
            face=lambda p, i: (left.face(p[0], i), right.face(p[1], i)),
            degeneracy=lambda p, i: (left.degeneracy(p[0], i), right.degeneracy(p[1], i)),
            label=lambda p: f"({p[0].key},{p[1].key})",
        )
        self.left = left
        self.right = right


def product(a: SSet, b: SSet) -> SSet:
    """Levelwise product; nondegenerate simplices are pairs with no common degeneracy."""

    max_dim = min(a.max_dim, b.max_dim)
    model = ProductModel(a, b)

    def nondegenerate(k: int):
        for ra in a.simplices(k):
            for rb in b.simplices(k):
                if model.is_nondegenerate((ra, rb), k):
                    yield (ra, rb)

    return build_sset(max_dim, nondegenerate, model, name=f"{a.name or '?'}×{b.name or '?'}")


def _factors(p: SSet) -> Tuple[SSet, SSet]:
    if not isinstance(p.model, ProductModel):
        raise InvalidInput(f"{p.name or 'simplicial set'} is not a product")
    return p.model.left, p.model.right


def projections(p: SSet) -> Tuple[SMap, SMap]:
    a, b = _factors(p)
    first = {x: p.model.payload[x][0] for _, x in p.nd_items()}
    second = {x: p.model.payload[x][1] for _, x in p.nd_items()}
    return SMap(p, a, first), SMap(p, b, second)


def pair_simplex(p: SSet, ra: SimplexRef, rb: SimplexRef) -> SimplexRef:
    """The simplex of a product with the given components."""

    a, b = _factors(p)
    k = a.dim(ra)
    if b.dim(rb) != k:
        raise InvalidInput("components of a product simplex must have equal dimension")
    return p.locate((ra, rb), k)


def product_map(p: SSet, q: SSet, f: SMap, g: SMap) -> SMap:
    """f × g from the product p = A×B to q = C×D."""

    return SMap(p, q, {x: pair_simplex(q, f.apply(pa), g.apply(pb)) for x, (pa, pb) in p.model.payload.items()})


# ---------- Map search ----------


def iter_maps(
    a: SSet,
    b: SSet,
    constraints: Optional[Mapping[str, SimplexRef]] = None,
    budget: Optional[SearchBudget] = None,
) -> Iterator[SMap]:
    """Backtrack over the nondegenerate simplices of ``a`` in dimension order."""

    budget = ensure_budget(budget)
    constraints = dict(constraints or {})
    order = list(a.nd_items())
    image: Dict[str, SimplexRef] = {}

    def mapped(r: SimplexRef) -> SimplexRef:
        out = image[r.base]
        for j in reversed(r.degens):
            out = b.degeneracy(out, j)
        return out

    def candidates(k: int, x: str) -> List[SimplexRef]:
        if k == 0:
            pool = [SimplexRef(v) for v in b.nondegenerate(0)]
        else:
            pool = b.index_by_faces(k).get(tuple(mapped(r) for r in a.faces[x]), [])
        if x in constraints:
            want = constraints[x]
            return [want] if want in pool else []
        return pool

    def step(pos: int) -> Iterator[SMap]:
        if pos == len(order):
            yield SMap(a, b, image)
            return
        k, x = order[pos]
        for c in candidates(k, x):
            budget.tick()
            image[x] = c
            yield from step(pos + 1)
        image.pop(x, None)

    yield from step(0)


def enumerate_maps(
    a: SSet,
    b: SSet,
    constraints: Optional[Mapping[str, SimplexRef]] = None,
    budget: Optional[SearchBudget] = None,
) -> List[SMap]:
    """All simplicial maps a → b extending the constraints."""

    out = list(iter_maps(a, b, constraints, budget))
    logger.debug(f"[maps] {a!r} -> {b!r}: {len(out)} maps")
    return out


def _profile(x: SSet) -> Dict[str, tuple]:
    """Degree profile of each nondegenerate simplex, invariant under isomorphism."""

    cofaces: Dict[str, List[tuple]] = {b: [] for _, b in x.nd_items()}
    for k, y in x.nd_items():
        if k == 0:
            continue
        for i, r in enumerate(x.faces[y]):
            cofaces[r.base].append((k, i, r.degens))
    out = {}
    for k, y in x.nd_items():
        own = tuple((i, r.degens) for i, r in enumerate(x.faces.get(y, ())))
        out[y] = (k, own, tuple(sorted(cofaces[y])))
    return out


def is_isomorphic(a: SSet, b: SSet, budget: Optional[SearchBudget] = None) -> Optional[SMap]:
    """An isomorphism a → b, or None."""

    budget = ensure_budget(budget)
    if a.max_dim != b.max_dim or [len(ids) for ids in a.nd] != [len(ids) for ids in b.nd]:
        return None
    pa, pb = _profile(a), _profile(b)
    if sorted(pa.values()) != sorted(pb.values()):
        return None
    by_profile: Dict[tuple, List[str]] = {}
    for _, y in b.nd_items():
        by_profile.setdefault(pb[y], []).append(y)
    order = list(a.nd_items())
    image: Dict[str, str] = {}
    used: set = set()

    def fits(k: int, x: str, y: str) -> bool:
        if k == 0:
            return True
        return all(
            SimplexRef(image[r.base], r.degens) == b.faces[y][i] for i, r in enumerate(a.faces[x])
        )

    def step(pos: int) -> bool:
        if pos == len(order):
            return True
        k, x = order[pos]
        for y in by_profile.get(pa[x], []):
            if y in used or not fits(k, x, y):
                continue
            budget.tick()
            image[x] = y
            used.add(y)
            if step(pos + 1):
                return True
            used.discard(y)
            del image[x]
        return False

    if not step(0):
        return None
    return SMap(a, b, {x: SimplexRef(y) for x, y in image.items()})


# ---------- Checks ----------


def check_simplicial_identities(x: SSet, all_simplices: bool = False) -> List[Tuple[str, int, int]]:
    """Failures (simplex key, i, j) of d_i d_j = d_{j-1} d_i for i < j."""

    bad = []
    for k in range(2, x.max_dim + 1):
        pool = x.simplices(k) if all_simplices else [SimplexRef(b) for b in x.nondegenerate(k)]
        for r in pool:
            for j in range(k + 1):
                for i in range(j):
                    if x.face(x.face(r, j), i) != x.face(x.face(r, i), j - 1):
                        bad.append((r.key, i, j))
    return bad


def is_simplicial_homotopy(h: SMap, f: SMap, g: SMap) -> bool:
    """Whether h: X×Δ[1] → Y restricts to f on X×{0} and to g on X×{1}."""

    x, interval = _factors(h.source)
    ends = interval.nondegenerate(0)
    if len(ends) != 2 or len(interval.nondegenerate(1)) != 1:
        raise InvalidInput("homotopies are maps out of X×Δ[1]")
    v0, v1 = ends
    for k, b in x.nd_items():
        r = SimplexRef(b)
        if h.apply(pair_simplex(h.source, r, total_degeneracy(v0, k))) != f.apply(r):
            return False
        if h.apply(pair_simplex(h.source, r, total_degeneracy(v1, k))) != g.apply(r):
            return False
    return True
