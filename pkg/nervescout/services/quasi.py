"""Horn fillers, Kan and quasi-category checks, and the homotopy category ho A."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from services.cat_core import FinCat, NerveModel, arrow_of_edge, edge_of_arrow, invertible, make_category
from services.simplicial_core import (
    SMap,
    SSet,
    SimplexRef,
    boundary,
    face_label,
    horn,
    iter_maps,
)
from utils.budget import SearchBudget, ensure_budget
from utils.errors import InternalCheckFailed, InvalidInput, PreconditionFailed

logger = logging.getLogger("quasi")


@dataclass(frozen=True)
class HornInstance:
    n: int
    i: int
    horn_map: SMap

    def face(self, j: int) -> SimplexRef:
        """Image of the j-th face of the missing top simplex (j != i)."""

        return self.horn_map.image[face_label(self.n, j)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "i": self.i,
            "image": {x: r.to_json() for x, r in sorted(self.horn_map.image.items())},
        }


@dataclass(frozen=True)
class HornVerdict:
    holds: bool
    max_n: int
    witness: Optional[HornInstance] = None


@lru_cache(maxsize=None)
def horn_complex(n: int, i: int) -> SSet:
    return horn(n, i, n)


@lru_cache(maxsize=None)
def sphere_complex() -> SSet:
    return boundary(2, 2)


def horn_instance(x: SSet, n: int, i: int, image: Dict[str, SimplexRef]) -> HornInstance:
    """Build and validate a horn instance from an explicit image table."""

    return HornInstance(n, i, SMap(horn_complex(n, i), x, image).check())


def horn_instances(x: SSet, n: int, i: int, budget: Optional[SearchBudget] = None) -> Iterator[HornInstance]:
    for m in iter_maps(horn_complex(n, i), x, budget=budget):
        yield HornInstance(n, i, m)


def _filler_index(x: SSet, n: int, i: int) -> Dict[Tuple[SimplexRef, ...], List[SimplexRef]]:
    key = ("fillers", n, i)
    if key not in x._cache:
        index: Dict[Tuple[SimplexRef, ...], List[SimplexRef]] = {}
        for y in x.simplices(n):
            faces = x.face_tuple(y)
            index.setdefault(faces[:i] + faces[i + 1:], []).append(y)
        x._cache[key] = index
    return x._cache[key]


def find_fillers(h: HornInstance) -> List[SimplexRef]:
    """Every n-simplex restricting to the horn."""

    x = h.horn_map.target
    if x.max_dim < h.n:
        raise PreconditionFailed(f"target is truncated below dimension {h.n}")
    want = tuple(h.face(j) for j in range(h.n + 1) if j != h.i)
    return list(_filler_index(x, h.n, h.i).get(want, []))


def find_filler(h: HornInstance) -> Optional[SimplexRef]:
    fillers = find_fillers(h)
    return fillers[0] if fillers else None


def _horn_check(x: SSet, max_n: int, inner: bool, budget: Optional[SearchBudget]) -> HornVerdict:
    budget = ensure_budget(budget)
    if max_n > x.max_dim:
        raise PreconditionFailed(f"max_n {max_n} exceeds max_dim {x.max_dim}")
    for n in range(1, max_n + 1):
        indices = range(1, n) if inner else range(n + 1)
        for i in indices:
            checked = 0
            for h in horn_instances(x, n, i, budget):
                checked += 1
                if find_filler(h) is None:
                    logger.info(f"[{'quasi' if inner else 'kan'}] unfillable ({n},{i})-horn in {x!r}")
                    return HornVerdict(False, max_n, h)
            logger.debug(f"[{'quasi' if inner else 'kan'}] ({n},{i}): {checked} horns filled")
    return HornVerdict(True, max_n)


def is_kan(x: SSet, max_n: int, budget: Optional[SearchBudget] = None) -> HornVerdict:
    return _horn_check(x, max_n, inner=False, budget=budget)


def is_quasicategory(x: SSet, max_n: int, budget: Optional[SearchBudget] = None) -> HornVerdict:
    return _horn_check(x, max_n, inner=True, budget=budget)


# ---------- Outer horns in nerves ----------


def _outer_edge(h: HornInstance) -> SimplexRef:
    x = h.horn_map.target
    if h.i == 0:
        return x.restrict(h.face(h.n), (0, 1)) if h.n > 1 else h.face(1)
    return x.restrict(h.face(0), (h.n - 2, h.n - 1))


def special_outer_horn_filler(h: HornInstance, c: FinCat) -> Optional[SimplexRef]:
    """Filler of an outer horn of Ner(c); guaranteed when the outer edge is invertible."""

    x = h.horn_map.target
    if not isinstance(x.model, NerveModel) or x.model.category is not c:
        raise PreconditionFailed("horn target must be the nerve of the given category")
    if h.i not in (0, h.n) or h.n < 2:
        raise PreconditionFailed("special outer horns have i in {0, n} and n >= 2")
    f = arrow_of_edge(x, _outer_edge(h))
    filler = find_filler(h)
    if invertible(c, f) and filler is None:
        raise InternalCheckFailed(f"outer horn with invertible edge {f!r} has no filler")
    return filler


def outer_horn_obstruction(
    c: FinCat, x: SSet, f: str, max_n: int, budget: Optional[SearchBudget] = None
) -> Optional[HornInstance]:
    """An unfillable (n,0)-horn of Ner(c) with f on the edge (0,1), n <= max_n."""

    budget = ensure_budget(budget)
    edge = edge_of_arrow(x, f)
    for n in range(2, min(max_n, x.max_dim) + 1):
        # the edge 01 is the last face of the face d_n
        for h in horn_instances(x, n, 0, budget):
            if _outer_edge(h) != edge:
                continue
            if find_filler(h) is None:
                return h
    return None


# ---------- Spheres and homotopy ----------


def sphere_filler(a: SSet, d0: SimplexRef, d1: SimplexRef, d2: SimplexRef) -> Optional[SimplexRef]:
    if a.max_dim < 2:
        raise PreconditionFailed("commuting spheres need max_dim >= 2")
    hits = a.index_by_faces(2).get((d0, d1, d2), [])
    return hits[0] if hits else None


def is_commuting_sphere(a: SSet, sphere: SMap) -> Optional[SimplexRef]:
    """A 2-simplex with the sphere's faces (d0, d1, d2) = images of 12, 02, 01."""

    if sphere.target is not a:
        raise InvalidInput("sphere does not land in the given simplicial set")
    sphere.check()
    return sphere_filler(a, sphere.image["12"], sphere.image["02"], sphere.image["01"])


def sphere(a: SSet, d0: SimplexRef, d1: SimplexRef, d2: SimplexRef) -> SMap:
    """The map ∂Δ[2] → a with the given faces."""

    s = sphere_complex()
    image = {
        "0": SimplexRef(a.face(d2, 1).base),
        "1": SimplexRef(a.face(d2, 0).base),
        "2": SimplexRef(a.face(d0, 0).base),
        "01": d2,
        "02": d1,
        "12": d0,
    }
    return SMap(s, a, image).check()


def _require_quasi(a: SSet, assume_quasi: bool, budget: Optional[SearchBudget]) -> None:
    if assume_quasi:
        return
    key = ("quasi3",)
    if key not in a._cache:
        a._cache[key] = is_quasicategory(a, min(3, a.max_dim), budget).holds
    if a.max_dim < 3 or not a._cache[key]:
        raise PreconditionFailed(f"{a!r} is not a quasi-category up to dimension 3")


def endpoints(a: SSet, e: SimplexRef) -> Tuple[str, str]:
    return a.face(e, 1).base, a.face(e, 0).base


def homotopic_edges(
    a: SSet,
    f: SimplexRef,
    g: SimplexRef,
    assume_quasi: bool = False,
    budget: Optional[SearchBudget] = None,
) -> bool:
    """f ≃ g for parallel edges of a quasi-category."""

    if endpoints(a, f) != endpoints(a, g):
        raise InvalidInput(f"edges {f.key} and {g.key} are not parallel")
    _require_quasi(a, assume_quasi, budget)
    x, y = endpoints(a, f)
    one_x = a.degeneracy(SimplexRef(x), 0)
    one_y = a.degeneracy(SimplexRef(y), 0)
    relations = [
        sphere_filler(a, f, g, one_x) is not None,
        sphere_filler(a, g, f, one_x) is not None,
        sphere_filler(a, one_y, g, f) is not None,
        sphere_filler(a, one_y, f, g) is not None,
    ]
    if len(set(relations)) != 1:
        raise InternalCheckFailed(f"homotopy relations disagree for {f.key}, {g.key}: {relations}")
    return relations[0]


def _classes(a: SSet, budget: Optional[SearchBudget]) -> Dict[SimplexRef, SimplexRef]:
    """Each edge mapped to the smallest edge homotopic to it."""

    key = ("ho_classes",)
    if key in a._cache:
        return a._cache[key]
    by_ends: Dict[Tuple[str, str], List[SimplexRef]] = {}
    for e in a.simplices(1):
        by_ends.setdefault(endpoints(a, e), []).append(e)
    rep: Dict[SimplexRef, SimplexRef] = {}
    for edges in by_ends.values():
        edges = sorted(edges, key=lambda r: r.key)
        for e in edges:
            if e in rep:
                continue
            for other in edges:
                if other not in rep and homotopic_edges(a, e, other, assume_quasi=True, budget=budget):
                    rep[other] = e
    a._cache[key] = rep
    return rep


def ho_category(a: SSet, assume_quasi: bool = False, budget: Optional[SearchBudget] = None) -> FinCat:
    """Objects A_0, arrows A_1 modulo ≃, composition through inner 2-horn fillers."""

    _require_quasi(a, assume_quasi, budget)
    rep = _classes(a, budget)
    arrows = {rep[e].key: endpoints(a, rep[e]) for e in a.simplices(1)}
    ids = {x: rep[a.degeneracy(SimplexRef(x), 0)].key for x in a.nondegenerate(0)}
    comp: Dict[Tuple[str, str], str] = {}
    for t in a.simplices(2):
        d0, d1, d2 = a.face_tuple(t)
        pair = (rep[d0].key, rep[d2].key)
        result = rep[d1].key
        if comp.setdefault(pair, result) != result:
            raise InternalCheckFailed(f"composite of {pair[1]} then {pair[0]} depends on the filler")
    out = make_category(list(a.nondegenerate(0)), arrows, ids, comp, name=f"ho({a.name or '?'})")
    logger.info(f"[ho] {out!r}")
    return out


def is_equivalence_edge(a: SSet, f: SimplexRef, assume_quasi: bool = False) -> bool:
    """Whether the class of f is invertible in ho A."""

    ho = ho_category(a, assume_quasi)
    return invertible(ho, _classes(a, None)[f].key)
