"""Bisimplicial sets, Segal precategories, Γ-maps and truncation of n-precategories.

A bisimplicial set is stored row by row: row p is the simplicial set A_{p/}
in the vertical direction q, and the horizontal structure is given by SMaps
between consecutive rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from services.cat_core import FinCat, category_from_segal, inverse, invertible, make_category
from services.enriched import SCat, hom_components
from services.simplicial_core import (
    ConcreteModel,
    SMap,
    SSet,
    SimplexRef,
    build_sset,
    check_simplicial_identities,
    discrete,
)
from utils.budget import SearchBudget, ensure_budget
from utils.errors import CertificateRejected, InternalCheckFailed, InvalidInput, PreconditionFailed

logger = logging.getLogger("segal")


# ---------- Bisimplicial sets ----------


@dataclass(frozen=True, eq=False)
class BiSSet:
    rows: Tuple[SSet, ...]
    faces: Mapping[Tuple[int, int], SMap]
    degeneracies: Mapping[Tuple[int, int], SMap]
    name: str = ""

    @property
    def max_p(self) -> int:
        return len(self.rows) - 1

    @property
    def max_q(self) -> int:
        return min(r.max_dim for r in self.rows)

    def face(self, p: int, i: int, ref: SimplexRef) -> SimplexRef:
        """Horizontal face d_i: A_{p/} → A_{p-1/}."""

        return self.faces[(p, i)].apply(ref)

    def degeneracy(self, p: int, i: int, ref: SimplexRef) -> SimplexRef:
        return self.degeneracies[(p, i)].apply(ref)

    def check(self) -> "BiSSet":
        """Row maps are simplicial and satisfy the simplicial identities."""

        for p, row in enumerate(self.rows):
            bad = check_simplicial_identities(row)
            if bad:
                raise InvalidInput(f"row {p} breaks a vertical simplicial identity at {bad[0]}")
        for p in range(1, self.max_p + 1):
            for i in range(p + 1):
                m = self.faces.get((p, i))
                if m is None or m.source is not self.rows[p] or m.target is not self.rows[p - 1]:
                    raise InvalidInput(f"horizontal face d{i} of row {p} is missing")
                m.check()
        for p in range(self.max_p):
            for i in range(p + 1):
                m = self.degeneracies.get((p, i))
                if m is None or m.source is not self.rows[p] or m.target is not self.rows[p + 1]:
                    raise InvalidInput(f"horizontal degeneracy s{i} of row {p} is missing")
                m.check()
        for p, row in enumerate(self.rows):
            for _, x in row.nd_items():
                self._check_horizontal(p, SimplexRef(x))
        return self

    def _check_horizontal(self, p: int, r: SimplexRef) -> None:
        d, s = self.face, self.degeneracy

        def expect(ok: bool, what: str) -> None:
            if not ok:
                raise InvalidInput(f"horizontal identity {what} fails on {r.key} in row {p}")

        if p >= 2:
            for j in range(p + 1):
                for i in range(j):
                    expect(d(p - 1, i, d(p, j, r)) == d(p - 1, j - 1, d(p, i, r)), f"d{i}d{j}")
        if p < self.max_p:
            for j in range(p + 1):
                up = s(p, j, r)
                for i in range(p + 2):
                    lhs = d(p + 1, i, up)
                    if i < j:
                        expect(lhs == s(p - 1, j - 1, d(p, i, r)), f"d{i}s{j}")
                    elif i in (j, j + 1):
                        expect(lhs == r, f"d{i}s{j}")
                    else:
                        expect(lhs == s(p - 1, j, d(p, i - 1, r)), f"d{i}s{j}")
        if p + 1 < self.max_p:
            for j in range(p + 1):
                for i in range(j + 1):
                    expect(s(p + 1, i, s(p, j, r)) == s(p + 1, j + 1, s(p, i, r)), f"s{i}s{j}")

    def __repr__(self) -> str:
        return f"BiSSet({self.name or '?'}, max_p={self.max_p}, max_q={self.max_q})"


@dataclass(frozen=True)
class SegalPrecat:
    bisset: BiSSet
    objects: Tuple[str, ...]


def is_segal_precat(a: BiSSet) -> Tuple[bool, Optional[SimplexRef]]:
    """Row 0 must be a constant simplicial set."""

    row0 = a.rows[0]
    for k in range(1, row0.max_dim + 1):
        if row0.nondegenerate(k):
            return False, SimplexRef(row0.nondegenerate(k)[0])
    return True, None


def as_segal_precat(a: BiSSet) -> SegalPrecat:
    ok, witness = is_segal_precat(a)
    if not ok:
        raise PreconditionFailed(f"row 0 of {a!r} is not constant: {witness.key} is nondegenerate")
    return SegalPrecat(a, tuple(a.rows[0].nondegenerate(0)))


def _row_maps(
    rows: Sequence[SSet],
    face: Callable[[int, Any, int, int], Any],
    degeneracy: Callable[[int, Any, int, int], Any],
) -> Tuple[Dict[Tuple[int, int], SMap], Dict[Tuple[int, int], SMap]]:
    """SMaps between concrete rows from concrete horizontal operators face(p, s, i, q)."""

    faces, degens = {}, {}
    for p, row in enumerate(rows):
        for i in range(p + 1):
            if p >= 1:
                faces[(p, i)] = SMap(row, rows[p - 1], {
                    x: rows[p - 1].locate(face(p, row.model.payload[x], i, q), q) for q, x in row.nd_items()
                })
            if p + 1 < len(rows):
                degens[(p, i)] = SMap(row, rows[p + 1], {
                    x: rows[p + 1].locate(degeneracy(p, row.model.payload[x], i, q), q) for q, x in row.nd_items()
                })
    return faces, degens


def scat_nerve(b: SCat, max_p: int, max_q: int) -> SegalPrecat:
    """A_{p/} = ⊔ over object chains of hom(x0,x1) × ... × hom(x_{p-1},x_p)."""

    if max_q > b.max_dim:
        raise PreconditionFailed(f"max_q {max_q} exceeds the hom truncation {b.max_dim}")

    def pairs(objs):
        return list(zip(objs, objs[1:]))

    def label(s) -> str:
        objs, refs = s
        if not refs:
            return objs[0]
        return ",".join(objs) + "|" + "|".join(r.key for r in refs)

    def chains(p: int) -> List[Tuple[str, ...]]:
        out = [(x,) for x in b.objects]
        for _ in range(p):
            out = [c + (y,) for c in out for y in b.objects if not b.hom(c[-1], y).is_empty()]
        return out

    rows = []
    for p in range(max_p + 1):
        model = ConcreteModel(
            face=lambda s, i: (s[0], tuple(b.hom(x, y).face(r, i) for (x, y), r in zip(pairs(s[0]), s[1]))),
            degeneracy=lambda s, i: (s[0], tuple(b.hom(x, y).degeneracy(r, i) for (x, y), r in zip(pairs(s[0]), s[1]))),
            label=label,
        )

        def nondegenerate(q, p=p, model=model):
            for objs in chains(p):
                for refs in cartesian(*(b.hom(x, y).simplices(q) for x, y in pairs(objs))):
                    if model.is_nondegenerate((objs, refs), q):
                        yield objs, tuple(refs)

        rows.append(build_sset(max_q, nondegenerate, model, name=f"N({b.name or '?'})_{p}"))

    def hface(p, s, i, q):
        objs, refs = s
        if i == 0:
            return objs[1:], refs[1:]
        if i == p:
            return objs[:-1], refs[:-1]
        mid = b.compose_simplices(objs[i - 1], objs[i], objs[i + 1], refs[i - 1], refs[i])
        return objs[:i] + objs[i + 1:], refs[: i - 1] + (mid,) + refs[i + 1:]

    def hdegeneracy(p, s, i, q):
        objs, refs = s
        return objs[: i + 1] + objs[i:], refs[:i] + (b.identity_simplex(objs[i], q),) + refs[i:]

    faces, degens = _row_maps(rows, hface, hdegeneracy)
    out = BiSSet(tuple(rows), faces, degens, name=f"N({b.name or '?'})")
    logger.info(f"[scat_nerve] built {out!r}")
    return as_segal_precat(out)


def vertically_constant(x: SSet, max_p: int, max_q: int) -> BiSSet:
    """A simplicial set as a bisimplicial set constant in q."""

    rows = tuple(discrete([r.key for r in x.simplices(p)], max_q, name=f"{x.name or '?'}_{p}") for p in range(max_p + 1))
    faces, degens = {}, {}
    for p in range(max_p + 1):
        for i in range(p + 1):
            if p >= 1:
                faces[(p, i)] = SMap(rows[p], rows[p - 1], {r.key: SimplexRef(x.face(r, i).key) for r in x.simplices(p)})
            if p < max_p:
                degens[(p, i)] = SMap(rows[p], rows[p + 1], {r.key: SimplexRef(x.degeneracy(r, i).key) for r in x.simplices(p)})
    return BiSSet(rows, faces, degens, name=f"const({x.name or '?'})")


# ---------- Segal maps ----------


def _restrict(a: BiSSet, p: int, r: SimplexRef, k: int) -> SimplexRef:
    """The k-th spine edge of r ∈ A_{p/}, in A_{1/}."""

    cur = p
    for t in range(p, k + 1, -1):
        r = a.face(cur, t, r)
        cur -= 1
    for _ in range(k):
        r = a.face(cur, 0, r)
        cur -= 1
    return r


def bisimplicial_spine(a: BiSSet, p: int, r: SimplexRef) -> Tuple[SimplexRef, ...]:
    return tuple(_restrict(a, p, r, k) for k in range(p))


def fiber_tuples(a: BiSSet, p: int, q: int) -> List[Tuple[SimplexRef, ...]]:
    """A_{1/} ×_{A_0} ... ×_{A_0} A_{1/} in vertical degree q."""

    edges = a.rows[1].simplices(q)
    by_source: Dict[SimplexRef, List[SimplexRef]] = {}
    for e in edges:
        by_source.setdefault(a.face(1, 1, e), []).append(e)
    out: List[Tuple[SimplexRef, ...]] = []

    def extend(t):
        if len(t) == p:
            out.append(t)
            return
        for e in by_source.get(a.face(1, 0, t[-1]), []):
            extend(t + (e,))

    for e in edges:
        extend((e,))
    return out


def segal_preimages(a: BiSSet, p: int, q: int) -> Dict[Tuple[SimplexRef, ...], List[SimplexRef]]:
    out: Dict[Tuple[SimplexRef, ...], List[SimplexRef]] = {t: [] for t in fiber_tuples(a, p, q)}
    for r in a.rows[p].simplices(q):
        out.setdefault(bisimplicial_spine(a, p, r), []).append(r)
    return out


@dataclass(frozen=True)
class HomotopyCertificate:
    """A section γ of δ[p] with a combinatorial homotopy γδ ≃ id on A_{p/}.

    ``inverse[q]`` maps a spine (tuple of simplex keys of A_{1/}) to a simplex
    key of A_{p/}; ``homotopy[(q, j)]`` maps every q-simplex key of A_{p/} to
    the (q+1)-simplex h_j of it.
    """

    p: int
    inverse: Mapping[int, Mapping[Tuple[str, ...], str]]
    homotopy: Mapping[Tuple[int, int], Mapping[str, str]]


def verify_certificate(a: BiSSet, cert: HomotopyCertificate, max_q: Optional[int] = None) -> None:
    """Raise CertificateRejected naming the first identity that fails."""

    p = cert.p
    top = a.max_q if max_q is None else max_q
    row, edges = a.rows[p], a.rows[1]
    by_key = {q: {r.key: r for r in row.simplices(q)} for q in range(top + 1)}

    def reject(msg: str):
        raise CertificateRejected(f"certificate for p={p}: {msg}")

    def g(q: int, t: Tuple[SimplexRef, ...]) -> SimplexRef:
        key = cert.inverse.get(q, {}).get(tuple(e.key for e in t))
        if key not in by_key[q]:
            reject(f"γ is undefined on {[e.key for e in t]} in degree {q}")
        return by_key[q][key]

    def h(q: int, j: int, x: SimplexRef) -> SimplexRef:
        key = cert.homotopy.get((q, j), {}).get(x.key)
        if key not in by_key.get(q + 1, {}):
            reject(f"h{j} is undefined on {x.key} in degree {q}")
        return by_key[q + 1][key]

    for q in range(top + 1):
        for t in fiber_tuples(a, p, q):
            if bisimplicial_spine(a, p, g(q, t)) != t:
                reject(f"δγ is not the identity on {[e.key for e in t]}")
            for i in range(q + 1 if q else 0):
                below = tuple(edges.face(e, i) for e in t)
                if row.face(g(q, t), i) != g(q - 1, below):
                    reject(f"γ does not commute with d{i} on {[e.key for e in t]}")
    for q in range(top):
        for x in row.simplices(q):
            if row.face(h(q, 0, x), 0) != x:
                reject(f"d0 h0 != id on {x.key}")
            if row.face(h(q, q, x), q + 1) != g(q, bisimplicial_spine(a, p, x)):
                reject(f"d{q + 1} h{q} != γδ on {x.key}")
            for j in range(q + 1):
                hj = h(q, j, x)
                for i in range(q + 2):
                    lhs = row.face(hj, i)
                    if i < j:
                        ok = lhs == h(q - 1, j - 1, row.face(x, i))
                    elif i == j + 1 and j < q:
                        ok = lhs == row.face(h(q, j + 1, x), i)
                    elif i > j + 1:
                        ok = lhs == h(q - 1, j, row.face(x, i - 1))
                    else:
                        continue
                    if not ok:
                        reject(f"face identity d{i} h{j} fails on {x.key}")
                if q + 1 < top:
                    for i in range(q + 2):
                        lhs = row.degeneracy(hj, i)
                        if i <= j:
                            ok = lhs == h(q + 1, j + 1, row.degeneracy(x, i))
                        else:
                            ok = lhs == h(q + 1, j, row.degeneracy(x, i - 1))
                        if not ok:
                            reject(f"degeneracy identity s{i} h{j} fails on {x.key}")


@dataclass(frozen=True)
class SegalVerdict:
    p: int
    status: str  # "strict" | "certified-equivalent" | "unknown"
    max_q: int
    witness: Optional[Dict[str, Any]] = None

    def to_json(self) -> dict:
        out = {"p": self.p, "status": self.status, "max_q": self.max_q}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def bisimplicial_segal_check(
    a: BiSSet,
    max_p: int,
    certificates: Optional[Mapping[int, HomotopyCertificate]] = None,
    budget: Optional[SearchBudget] = None,
) -> List[SegalVerdict]:
    """Levelwise Segal maps δ[p] for 2 <= p <= max_p."""

    budget = ensure_budget(budget)
    certificates = certificates or {}
    if max_p > a.max_p:
        raise PreconditionFailed(f"max_p {max_p} exceeds the stored rows ({a.max_p})")
    out = []
    for p in range(2, max_p + 1):
        witness = None
        for q in range(a.max_q + 1):
            budget.tick()
            for t, xs in sorted(segal_preimages(a, p, q).items()):
                if len(xs) != 1:
                    witness = {
                        "q": q,
                        "kind": "not_surjective" if not xs else "not_injective",
                        "spine": [e.to_json() for e in t],
                        "simplices": [x.to_json() for x in sorted(xs)],
                    }
                    break
            if witness:
                break
        if witness is None:
            out.append(SegalVerdict(p, "strict", a.max_q))
        elif p in certificates:
            verify_certificate(a, certificates[p])
            out.append(SegalVerdict(p, "certified-equivalent", a.max_q))
        else:
            logger.info(f"[segal] δ[{p}] of {a!r} is not a bijection in degree {witness['q']}")
            out.append(SegalVerdict(p, "unknown", a.max_q, witness))
    return out


def ho_of_segal(a: SegalPrecat, certificates: Optional[Mapping[int, HomotopyCertificate]] = None) -> FinCat:
    """Objects A_0, morphisms π0(A_{1/}), composition through the 0-simplices of A_{2/}."""

    x = a.bisset
    if x.max_p < 2:
        raise PreconditionFailed("the homotopy category needs rows up to p = 2")
    verdicts = bisimplicial_segal_check(x, min(3, x.max_p), certificates)
    bad = [v for v in verdicts if v.status == "unknown"]
    if bad:
        raise PreconditionFailed(f"Segal map δ[{bad[0].p}] is neither strict nor certified")
    comp_of = hom_components(x.rows[1])

    def cls(r: SimplexRef) -> str:
        return f"[{comp_of[r.base]}]"

    arrows = {}
    for v in x.rows[1].nondegenerate(0):
        r = SimplexRef(v)
        arrows[cls(r)] = (x.face(1, 1, r).base, x.face(1, 0, r).base)
    ids = {o: cls(x.degeneracy(0, 0, SimplexRef(o))) for o in a.objects}
    comp: Dict[Tuple[str, str], str] = {}
    for s in x.rows[2].nondegenerate(0):
        r = SimplexRef(s)
        pair = (cls(x.face(2, 0, r)), cls(x.face(2, 2, r)))
        result = cls(x.face(2, 1, r))
        if comp.setdefault(pair, result) != result:
            raise PreconditionFailed(f"composite of {pair[1]} then {pair[0]} depends on the chosen 2-simplex")
    out = make_category(list(a.objects), arrows, ids, comp, name=f"ho({x.name or '?'})")
    logger.info(f"[ho] {out!r}")
    return out


# ---------- Γ-maps ----------


@dataclass(frozen=True)
class GammaMap:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    theta: Mapping[str, FrozenSet[str]]

    def check(self) -> "GammaMap":
        seen: set = set()
        for a in self.source:
            image = self.theta.get(a, frozenset())
            if not image <= set(self.target):
                raise InvalidInput(f"θ({a}) leaves the target set")
            if image & seen:
                raise InvalidInput(f"θ({a}) meets an earlier image")
            seen |= image
        return self

    def to_json(self) -> dict:
        return {
            "source": list(self.source),
            "target": list(self.target),
            "theta": {a: sorted(self.theta.get(a, ())) for a in self.source},
        }


def gamma_map(source: Iterable[str], target: Iterable[str], theta: Mapping[str, Iterable[str]]) -> GammaMap:
    src = tuple(source)
    return GammaMap(src, tuple(target), {a: frozenset(theta.get(a, ())) for a in src}).check()


def gamma_identity(s: Iterable[str]) -> GammaMap:
    elems = tuple(s)
    return gamma_map(elems, elems, {a: [a] for a in elems})


def gamma_compose(t1: GammaMap, t2: GammaMap) -> GammaMap:
    """ψ(a) = ⋃ θ2(b) over b ∈ θ1(a)."""

    if set(t1.target) != set(t2.source):
        raise InvalidInput("Γ-maps do not share the middle set")
    psi = {a: frozenset().union(*(t2.theta[b] for b in t1.theta[a])) for a in t1.source}
    return GammaMap(t1.source, t2.target, psi).check()


def delta_to_gamma(images: Sequence[int], n: int) -> GammaMap:
    """θ(i) = {j | f(i-1) < j <= f(i)} for monotone f: [m] → [n] given by its images."""

    if any(v < 0 or v > n for v in images) or any(a > b for a, b in zip(images, images[1:])):
        raise InvalidInput(f"{list(images)} is not a monotone map into [{n}]")
    m = len(images) - 1
    theta = {str(i): [str(j) for j in range(images[i - 1] + 1, images[i] + 1)] for i in range(1, m + 1)}
    return gamma_map([str(i) for i in range(1, m + 1)], [str(j) for j in range(1, n + 1)], theta)


# ---------- n-precategories ----------

Index = Tuple[int, ...]


def _levels_sset(levels: Sequence[Sequence[str]], face, degeneracy, name: str) -> SSet:
    """A simplicial set from element levels with face(q, e, i) and degeneracy(q, e, i)."""

    model = ConcreteModel(
        face=lambda s, i: (s[0] - 1, face(s[0], s[1], i)),
        degeneracy=lambda s, i: (s[0] + 1, degeneracy(s[0], s[1], i)),
        label=lambda s: s[1],
    )
    return build_sset(
        len(levels) - 1,
        lambda q: [(q, e) for e in levels[q] if model.is_nondegenerate((q, e), q)],
        model,
        name=name,
    )


def _shift(index: Index, d: int, by: int) -> Index:
    return index[:d] + (index[d] + by,) + index[d + 1:]


@dataclass(frozen=True, eq=False)
class NSSet:
    arity: int
    bounds: Tuple[int, ...]
    cells: Mapping[Index, Tuple[str, ...]]
    faces: Mapping[Tuple[Index, int, int], Mapping[str, str]]
    degeneracies: Mapping[Tuple[Index, int, int], Mapping[str, str]]
    name: str = ""
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False)

    def indices(self) -> List[Index]:
        return [tuple(i) for i in cartesian(*(range(b + 1) for b in self.bounds))]

    def face(self, index: Index, d: int, i: int, e: str) -> str:
        return self.faces[(index, d, i)][e]

    def degeneracy(self, index: Index, d: int, i: int, e: str) -> str:
        return self.degeneracies[(index, d, i)][e]

    def objects(self) -> Tuple[str, ...]:
        return self.cells[(0,) * self.arity]

    def check(self) -> "NSSet":
        for index in self.indices():
            if index not in self.cells:
                raise InvalidInput(f"cell {index} is missing")
            elems = set(self.cells[index])
            for d in range(self.arity):
                for i in range(index[d] + 1):
                    if index[d] >= 1:
                        table = self.faces.get((index, d, i))
                        below = set(self.cells.get(_shift(index, d, -1), ()))
                        if table is None or set(table) != elems or not set(table.values()) <= below:
                            raise InvalidInput(f"face d{i} in direction {d} at {index} is not a map of cells")
                    if index[d] < self.bounds[d]:
                        table = self.degeneracies.get((index, d, i))
                        above = set(self.cells.get(_shift(index, d, 1), ()))
                        if table is None or set(table) != elems or not set(table.values()) <= above:
                            raise InvalidInput(f"degeneracy s{i} in direction {d} at {index} is not a map of cells")
            zero = next((d for d in range(self.arity) if index[d] == 0), None)
            if zero is not None:
                base = index[:zero] + (0,) * (self.arity - zero)
                if elems != set(self.cells[base]):
                    raise InvalidInput(f"cell {index} differs from {base}; the precategory is not constant there")
        return self

    # ---------- Slices ----------

    def slice_at(self, m: Index) -> SSet:
        """The simplicial set A_{m,*} in the last direction."""

        if len(m) != self.arity - 1:
            raise InvalidInput(f"slice index {m} needs {self.arity - 1} coordinates")
        key = ("slice", m)
        if key not in self._cache:
            d = self.arity - 1
            levels = [self.cells[m + (q,)] for q in range(self.bounds[-1] + 1)]
            self._cache[key] = _levels_sset(
                levels,
                lambda q, e, i: self.face(m + (q,), d, i, e),
                lambda q, e, i: self.degeneracy(m + (q,), d, i, e),
                name=f"{self.name or '?'}{list(m)}",
            )
        return self._cache[key]

    def slice_ref(self, m: Index, q: int, e: str) -> SimplexRef:
        return self.slice_at(m).locate((q, e), q)

    def slice_elem(self, m: Index, ref: SimplexRef) -> str:
        return self.slice_at(m).realize(ref)[1]

    def endpoints(self, m: Index, e: str) -> Tuple[str, str]:
        """Source and target objects of e ∈ A_{(1,)+m}."""

        index = (1,) + m
        return self.face(index, 0, 1, e), self.face(index, 0, 0, e)

    def hom_slice(self, x: str, y: str) -> "NSSet":
        """A(x,y): the fiber of A_{1,*} over (x, y), one arity lower."""

        if self.arity < 1 or self.bounds[0] < 1:
            raise PreconditionFailed("hom slices need the first direction to reach 1")
        rest = self.bounds[1:]
        cells, faces, degens = {}, {}, {}
        for m in (tuple(i) for i in cartesian(*(range(b + 1) for b in rest))):
            cells[m] = tuple(e for e in self.cells[(1,) + m] if self.endpoints(m, e) == (x, y))
        for m, elems in cells.items():
            for d in range(len(rest)):
                for i in range(m[d] + 1):
                    if m[d] >= 1:
                        faces[(m, d, i)] = {e: self.face((1,) + m, d + 1, i, e) for e in elems}
                    if m[d] < rest[d]:
                        degens[(m, d, i)] = {e: self.degeneracy((1,) + m, d + 1, i, e) for e in elems}
        return NSSet(len(rest), rest, cells, faces, degens, name=f"{self.name or '?'}({x},{y})")

    # ---------- Constructors ----------

    @classmethod
    def discrete(cls, elements: Iterable[str], arity: int, bounds: Sequence[int]) -> "NSSet":
        elems = tuple(sorted(elements))
        bounds = tuple(bounds)
        cells, faces, degens = {}, {}, {}
        ident = {e: e for e in elems}
        for index in (tuple(i) for i in cartesian(*(range(b + 1) for b in bounds))):
            cells[index] = elems
            for d in range(arity):
                for i in range(index[d] + 1):
                    if index[d] >= 1:
                        faces[(index, d, i)] = dict(ident)
                    if index[d] < bounds[d]:
                        degens[(index, d, i)] = dict(ident)
        return cls(arity, bounds, cells, faces, degens, name="discrete")

    @classmethod
    def from_sset(cls, x: SSet, bound: Optional[int] = None) -> "NSSet":
        top = x.max_dim if bound is None else bound
        cells, faces, degens = {}, {}, {}
        for q in range(top + 1):
            refs = x.simplices(q)
            cells[(q,)] = tuple(r.key for r in refs)
            for i in range(q + 1):
                if q >= 1:
                    faces[((q,), 0, i)] = {r.key: x.face(r, i).key for r in refs}
                if q < top:
                    degens[((q,), 0, i)] = {r.key: x.degeneracy(r, i).key for r in refs}
        return cls(1, (top,), cells, faces, degens, name=x.name)

    @classmethod
    def from_bisset(cls, a: BiSSet) -> "NSSet":
        """Arity 2, with A_{0,q} identified with the object set."""

        def key(p: int, r: SimplexRef) -> str:
            return r.base if p == 0 else r.key

        bounds = (a.max_p, a.max_q)
        cells, faces, degens = {}, {}, {}
        for p, row in enumerate(a.rows):
            for q in range(a.max_q + 1):
                refs = row.simplices(q)
                index = (p, q)
                cells[index] = tuple(dict.fromkeys(key(p, r) for r in refs))
                for i in range(p + 1):
                    if p >= 1:
                        faces[(index, 0, i)] = {key(p, r): key(p - 1, a.face(p, i, r)) for r in refs}
                    if p < a.max_p:
                        degens[(index, 0, i)] = {key(p, r): key(p + 1, a.degeneracy(p, i, r)) for r in refs}
                for i in range(q + 1):
                    if q >= 1:
                        faces[(index, 1, i)] = {key(p, r): key(p, row.face(r, i)) for r in refs}
                    if q < a.max_q:
                        degens[(index, 1, i)] = {key(p, r): key(p, row.degeneracy(r, i)) for r in refs}
        return cls(2, bounds, cells, faces, degens, name=a.name)

    def __repr__(self) -> str:
        return f"NSSet({self.name or '?'}, arity={self.arity}, bounds={list(self.bounds)})"


@dataclass(frozen=True)
class NSSetMap:
    source: NSSet
    target: NSSet
    tables: Mapping[Index, Mapping[str, str]]

    def check(self) -> "NSSetMap":
        s, t = self.source, self.target
        for index in s.indices():
            table = self.tables.get(index, {})
            if set(table) != set(s.cells[index]) or not set(table.values()) <= set(t.cells.get(index, ())):
                raise InvalidInput(f"map is not defined cellwise at {index}")
        for (index, d, i), fs in s.faces.items():
            below = self.tables[_shift(index, d, -1)]
            for e, e2 in fs.items():
                if below[e2] != t.face(index, d, i, self.tables[index][e]):
                    raise InvalidInput(f"map does not commute with d{i} in direction {d} at {index}")
        for (index, d, i), ss in s.degeneracies.items():
            above = self.tables[_shift(index, d, 1)]
            for e, e2 in ss.items():
                if above[e2] != t.degeneracy(index, d, i, self.tables[index][e]):
                    raise InvalidInput(f"map does not commute with s{i} in direction {d} at {index}")
        return self

    def compose(self, first: "NSSetMap") -> "NSSetMap":
        """self ∘ first."""

        return NSSetMap(first.source, self.target, {
            index: {e: self.tables[index][v] for e, v in table.items()} for index, table in first.tables.items()
        })

    @classmethod
    def from_smap(cls, f: SMap, source: NSSet, target: NSSet) -> "NSSetMap":
        tables = {}
        for (q,) in source.indices():
            tables[(q,)] = {r.key: f.apply(r).key for r in f.source.simplices(q)}
        return cls(source, target, tables).check()

    @classmethod
    def identity(cls, a: NSSet) -> "NSSetMap":
        return cls(a, a, {index: {e: e for e in a.cells[index]} for index in a.indices()})


# ---------- Truncation ----------


@dataclass(frozen=True)
class Truncation:
    source: NSSet
    result: NSSet
    tau: Mapping[Index, Mapping[str, str]]


def iso_classes(c: FinCat) -> Dict[str, str]:
    """Each object mapped to the smallest object isomorphic to it."""

    g = nx.Graph()
    g.add_nodes_from(c.objects)
    g.add_edges_from(c.arrows[f] for f in c.arrows if not c.is_identity(f) and invertible(c, f))
    out = {}
    for comp in nx.connected_components(g):
        rep = min(comp)
        for x in comp:
            out[x] = rep
    return out


def truncate(a: NSSet) -> Truncation:
    """T(A)_M = isomorphism classes of the category A_{M,*}."""

    if a.arity < 1:
        raise PreconditionFailed("a set cannot be truncated further")
    if a.bounds[-1] < 3:
        raise PreconditionFailed("truncation needs the last direction up to 3")
    outer = a.bounds[:-1]
    ms = [tuple(i) for i in cartesian(*(range(b + 1) for b in outer))]
    tau: Dict[Index, Dict[str, str]] = {}
    for m in ms:
        try:
            c = category_from_segal(a.slice_at(m))
        except PreconditionFailed as exc:
            raise PreconditionFailed(f"slice {list(m)} is not a strict nerve: {exc}") from None
        tau[m] = iso_classes(c)
    cells = {m: tuple(sorted(set(tau[m].values()))) for m in ms}
    faces, degens = {}, {}
    for m in ms:
        for d in range(len(outer)):
            for i in range(m[d] + 1):
                if m[d] >= 1:
                    low = _shift(m, d, -1)
                    faces[(m, d, i)] = _induced(a, tau, m, low, lambda e: a.face(m + (0,), d, i, e))
                if m[d] < outer[d]:
                    high = _shift(m, d, 1)
                    degens[(m, d, i)] = _induced(a, tau, m, high, lambda e: a.degeneracy(m + (0,), d, i, e))
    result = NSSet(len(outer), outer, cells, faces, degens, name=f"T({a.name or '?'})")
    logger.info(f"[truncate] {a!r} -> {result!r}")
    return Truncation(a, result, tau)


def _induced(a: NSSet, tau, m: Index, m2: Index, op: Callable[[str], str]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for e, rep in tau[m].items():
        image = tau[m2][op(e)]
        if out.setdefault(rep, image) != image:
            raise InternalCheckFailed(f"structure map at {list(m)} does not respect isomorphism classes")
    return out


def truncate_iter(a: NSSet, h: int) -> Tuple[NSSet, Dict[Index, Dict[str, str]]]:
    """T^h(A) with the composite τ^h: A_{(M, 0, ..., 0)} → T^h(A)_M."""

    steps: List[Truncation] = []
    cur = a
    for _ in range(h):
        t = truncate(cur)
        steps.append(t)
        cur = t.result
    composite: Dict[Index, Dict[str, str]] = {}
    for m in cur.indices():
        table = {}
        for e in a.cells[m + (0,) * h]:
            v = e
            for k, t in enumerate(steps):
                v = t.tau[m + (0,) * (h - k - 1)][v]
            table[e] = v
        composite[m] = table
    return cur, composite


def truncate_map(f: NSSetMap, ta: Truncation, tb: Truncation) -> NSSetMap:
    """T(f): T(A) → T(B) on representatives."""

    tables = {}
    for m, reps in ta.result.cells.items():
        tables[m] = {r: tb.tau[m][f.tables[m + (0,)][r]] for r in reps}
    return NSSetMap(ta.result, tb.result, tables)


def n_equivalence_check(f: NSSetMap, n: int) -> bool:
    """Hom slices are (n-1)-equivalences and T^n(f) is surjective."""

    a, b = f.source, f.target
    if a.arity != n or b.arity != n:
        raise PreconditionFailed(f"an {n}-equivalence needs maps of arity {n}")
    if n == 0:
        table = f.tables[()]
        return len(set(table.values())) == len(table) and set(table.values()) == set(b.cells[()])
    if n > 2:
        raise PreconditionFailed("equivalence checks stop at n = 2")
    zero = (0,) * n
    for x in a.objects():
        for y in a.objects():
            fx, fy = f.tables[zero][x], f.tables[zero][y]
            src, dst = a.hom_slice(x, y), b.hom_slice(fx, fy)
            sub = NSSetMap(src, dst, {m: {e: f.tables[(1,) + m][e] for e in src.cells[m]} for m in src.indices()})
            if not n_equivalence_check(sub, n - 1):
                logger.info(f"[nequiv] hom slice ({x},{y}) is not an {n - 1}-equivalence")
                return False
    cur = f
    for _ in range(n):
        cur = truncate_map(cur, truncate(cur.source), truncate(cur.target))
    surjective = set(cur.tables[()].values()) == set(cur.target.cells[()])
    if not surjective:
        logger.info(f"[nequiv] T^{n}(f) misses {sorted(set(cur.target.cells[()]) - set(cur.tables[()].values()))}")
    return surjective


# ---------- Horizontal composition ----------


def horizontal_compose_2cells(
    a: NSSet,
    gamma2: Mapping[Tuple[str, str], str],
    alpha2: Mapping[Tuple[str, str], Tuple[str, str]],
    cells: Tuple[str, str],
    gamma2_arrows: Optional[Mapping[Tuple[str, str], str]] = None,
) -> Tuple[str, str]:
    """f#g = d1 σ and a#b = d1 ε for 2-cells a: f ⇒ f' and b: g ⇒ g'.

    ``gamma2[(f, g)]`` is a 0-simplex σ of A_{2,*}; ``alpha2[(f, g)]`` holds
    isomorphisms δσ → (f, g) in the category A_{1,*}, given as elements of
    A_{1,1}. ``gamma2_arrows[(u, v)]`` optionally gives γ[2] on an arrow
    (u, v) of A_{1,*} × A_{1,*} as an element of A_{2,1}; every given square
    must commute. Without it, γ[2] on arrows is the unique lift of the
    α2-conjugate, which must exist for every arrow between certified pairs.
    """

    if a.arity != 2 or a.bounds[0] < 2 or a.bounds[1] < 3:
        raise PreconditionFailed("horizontal composition needs a 2-precategory with bounds of at least (2, 3)")
    c1 = category_from_segal(a.slice_at((1,)))
    c2 = category_from_segal(a.slice_at((2,)))

    def arrow1(e: str) -> str:
        return a.slice_ref((1,), 1, e).key

    def elem2(arrow: str) -> str:
        s2 = a.slice_at((2,))
        ref = next(r for r in s2.simplices(1) if r.key == arrow)
        return a.slice_elem((2,), ref)

    def delta(e: str) -> Tuple[str, str]:
        return arrow1(a.face((2, 1), 0, 2, e)), arrow1(a.face((2, 1), 0, 0, e))

    def ends(cell: str) -> Tuple[str, str]:
        return a.face((1, 1), 1, 1, cell), a.face((1, 1), 1, 0, cell)

    cell_a, cell_b = cells
    for e in cells:
        if e not in a.cells[(1, 1)]:
            raise InvalidInput(f"{e!r} is not a 2-cell")
    (f, fp), (g, gp) = ends(cell_a), ends(cell_b)
    if a.endpoints((0,), f)[1] != a.endpoints((0,), g)[0]:
        raise InvalidInput(f"1-cells {f} and {g} are not composable")

    certs: Dict[Tuple[str, str], Tuple[str, str, str]] = {}

    def certified(pair: Tuple[str, str]) -> Tuple[str, str, str]:
        if pair in certs:
            return certs[pair]
        sigma = gamma2.get(pair)
        if sigma not in a.cells[(2, 0)]:
            raise CertificateRejected(f"γ[2] is undefined on {pair}")
        first, second = a.face((2, 0), 0, 2, sigma), a.face((2, 0), 0, 0, sigma)
        comps = alpha2.get(pair)
        if comps is None:
            raise CertificateRejected(f"α2 is undefined on {pair}")
        arrows = []
        for edge, target, comp in zip((first, second), pair, comps):
            arr = arrow1(comp)
            if c1.arrows.get(arr) != (arrow1_obj(a, edge), arrow1_obj(a, target)):
                raise CertificateRejected(f"α2{pair} component {comp} does not run {edge} → {target}")
            if not invertible(c1, arr):
                raise CertificateRejected(f"α2{pair} component {comp} is not an isomorphism")
            arrows.append(arr)
        certs[pair] = (sigma, arrows[0], arrows[1])
        return certs[pair]

    def conjugate(src: Tuple[str, str], dst: Tuple[str, str], u: str, v: str) -> Tuple[str, str]:
        _, al_f, al_g = certs[src]
        _, alp_f, alp_g = certs[dst]
        return (
            c1.compose(inverse(c1, alp_f), c1.compose(u, al_f)),
            c1.compose(inverse(c1, alp_g), c1.compose(v, al_g)),
        )

    def lifts(src: Tuple[str, str], dst: Tuple[str, str], want: Tuple[str, str]) -> List[str]:
        found = []
        for eps in c2.hom(arrow2_obj(a, certs[src][0]), arrow2_obj(a, certs[dst][0])):
            e = elem2(eps)
            if delta(e) == want:
                found.append(e)
        return found

    certified((f, g))
    certified((fp, gp))
    for pair in gamma2:
        certified(pair)

    # γ[2] extends to arrows: one lift per arrow between certified pairs.
    for src in certs:
        for dst in certs:
            for u in c1.hom(arrow1_obj(a, src[0]), arrow1_obj(a, dst[0])):
                for v in c1.hom(arrow1_obj(a, src[1]), arrow1_obj(a, dst[1])):
                    n = len(lifts(src, dst, conjugate(src, dst, u, v)))
                    if n != 1:
                        raise CertificateRejected(f"α2 is not natural: ({u}, {v}): {src} → {dst} has {n} lifts")

    for (u, v), eps in (gamma2_arrows or {}).items():
        src, dst = tuple(zip(ends(u), ends(v)))
        if src not in certs or dst not in certs:
            raise CertificateRejected(f"γ[2]({u}, {v}) runs between uncertified pairs {src} → {dst}")
        if eps not in a.cells[(2, 1)]:
            raise CertificateRejected(f"γ[2]({u}, {v}) = {eps!r} is not an element of A_(2,1)")
        ends2 = (arrow2_obj(a, certs[src][0]), arrow2_obj(a, certs[dst][0]))
        if c2.arrows.get(a.slice_ref((2,), 1, eps).key) != ends2:
            raise CertificateRejected(f"γ[2]({u}, {v}) = {eps} does not run γ[2]{src} → γ[2]{dst}")
        for side, (w, al, alp) in enumerate(zip((u, v), certs[src][1:], certs[dst][1:])):
            if c1.compose(arrow1(w), al) != c1.compose(alp, delta(eps)[side]):
                raise CertificateRejected(f"naturality square of α2 at ({u}, {v}) does not commute")

    want = conjugate((f, g), (fp, gp), arrow1(cell_a), arrow1(cell_b))
    (lift,) = lifts((f, g), (fp, gp), want)
    composite = a.face((2, 0), 0, 1, certs[(f, g)][0])
    cell = a.face((2, 1), 0, 1, lift)
    logger.info(f"[hcomp] {f}#{g} = {composite}, {cell_a}#{cell_b} = {cell}")
    return composite, cell


def arrow1_obj(a: NSSet, e: str) -> str:
    """Object id of the category A_{1,*} for a 1-cell e ∈ A_{1,0}."""

    return a.slice_ref((1,), 0, e).base


def arrow2_obj(a: NSSet, e: str) -> str:
    return a.slice_ref((2,), 0, e).base
