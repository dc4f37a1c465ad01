"""The homotopy coherent nerve of a simplicial category."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product as cartesian
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from services.enriched import SCat, SFunctor, is_locally_kan, s_ordinal
from services.quasi import HornInstance, is_quasicategory
from services.simplicial_core import ConcreteModel, SMap, SSet, SimplexRef, build_sset, iter_maps
from utils.budget import SearchBudget, ensure_budget
from utils.errors import InternalCheckFailed, PreconditionFailed

logger = logging.getLogger("hc_nerve")

Pair = Tuple[int, int]


@lru_cache(maxsize=None)
def standard(n: int) -> SCat:
    """S[n] truncated where its cubes end."""

    return s_ordinal(n, max(n - 1, 0))


@dataclass(frozen=True)
class HcSimplex:
    n: int
    objects: Tuple[str, ...]
    maps: Tuple[Tuple[Pair, Tuple[Tuple[str, SimplexRef], ...]], ...]

    def image(self, i: int, j: int) -> Dict[str, SimplexRef]:
        for pair, table in self.maps:
            if pair == (i, j):
                return dict(table)
        raise KeyError((i, j))

    def hom_map(self, b: SCat, i: int, j: int) -> SMap:
        return SMap(standard(self.n).hom(str(i), str(j)), b.hom(self.objects[i], self.objects[j]), self.image(i, j))

    def functor(self, b: SCat) -> SFunctor:
        """The S-functor S[n] → b."""

        s = standard(self.n)
        homs = {}
        for i in range(self.n + 1):
            homs[(str(i), str(i))] = SMap(s.hom(str(i), str(i)), b.hom(self.objects[i], self.objects[i]), {s.ids[str(i)]: SimplexRef(b.ids[self.objects[i]])})
            for j in range(i + 1, self.n + 1):
                homs[(str(i), str(j))] = self.hom_map(b, i, j)
        return SFunctor(s, b, {str(i): x for i, x in enumerate(self.objects)}, homs)

    def evaluate(self, b: SCat, i: int, j: int, chain: Sequence[Sequence[int]]) -> SimplexRef:
        """F on a (possibly degenerate) chain of interior vertex sets of S[n](i,j)."""

        k = len(chain) - 1
        if i == j:
            return b.identity_simplex(self.objects[i], k)
        cube = standard(self.n).hom(str(i), str(j))
        ref = cube.locate(tuple(tuple(sorted(u)) for u in chain), k)
        m = self.image(i, j)[ref.base]
        for t in reversed(ref.degens):
            m = b.hom(self.objects[i], self.objects[j]).degeneracy(m, t)
        return m


def _pairs(n: int) -> List[Pair]:
    return [(i, i + gap) for gap in range(1, n + 1) for i in range(n + 1 - gap)]


def _composition_constraints(
    b: SCat, n: int, objs: Sequence[str], i: int, j: int, chosen: Mapping[Pair, SMap]
) -> Optional[Dict[str, SimplexRef]]:
    """Values on the coordinate-1 faces of S[n](i,j) forced by composition, or None on a clash."""

    cube = standard(n).hom(str(i), str(j))
    out: Dict[str, SimplexRef] = {}
    for k, c in cube.nd_items():
        chain = cube.model.payload[c]
        for mid in chain[0]:
            left = tuple(tuple(v for v in u if v < mid) for u in chain)
            right = tuple(tuple(v for v in u if v > mid) for u in chain)
            fl = chosen[(i, mid)].apply(standard(n).hom(str(i), str(mid)).locate(left, k))
            fr = chosen[(mid, j)].apply(standard(n).hom(str(mid), str(j)).locate(right, k))
            value = b.compose_simplices(objs[i], objs[mid], objs[j], fl, fr)
            if out.setdefault(c, value) != value:
                return None
    return out


def hc_nerve_simplices(b: SCat, n: int, budget: Optional[SearchBudget] = None) -> List[HcSimplex]:
    """All S-functors S[n] → b."""

    budget = ensure_budget(budget)
    if n > 0 and b.max_dim < n - 1:
        raise PreconditionFailed(f"hom complexes truncated at {b.max_dim} cannot hold S[{n}]")
    s = standard(n)
    pairs = _pairs(n)
    out: List[HcSimplex] = []

    def assign(objs: Tuple[str, ...], pos: int, chosen: Dict[Pair, SMap]) -> Iterator[HcSimplex]:
        if pos == len(pairs):
            maps = tuple((p, tuple(sorted(chosen[p].image.items()))) for p in pairs)
            yield HcSimplex(n, objs, maps)
            return
        i, j = pairs[pos]
        constraints = _composition_constraints(b, n, objs, i, j, chosen)
        if constraints is None:
            return
        target = b.hom(objs[i], objs[j])
        for m in iter_maps(s.hom(str(i), str(j)), target, constraints, budget):
            chosen[(i, j)] = m
            yield from assign(objs, pos + 1, chosen)
        chosen.pop((i, j), None)

    for objs in cartesian(b.objects, repeat=n + 1):
        budget.tick()
        if any(b.hom(objs[i], objs[j]).is_empty() for i, j in pairs):
            continue
        out.extend(assign(tuple(objs), 0, {}))
    logger.debug(f"[hc] {len(out)} {n}-simplices in {b!r}")
    return out


def reindex(b: SCat, h: HcSimplex, f: Sequence[int]) -> HcSimplex:
    """Precompose with S[f] for a monotone f: [m] → [n] given by its images."""

    m = len(f) - 1
    objs = tuple(h.objects[f[i]] for i in range(m + 1))
    sm = standard(m)
    maps = []
    for i, j in _pairs(m):
        cube = sm.hom(str(i), str(j))
        image = {}
        for k, c in cube.nd_items():
            chain = cube.model.payload[c]
            relabeled = [sorted({f[v] for v in u} - {f[i], f[j]}) for u in chain]
            image[c] = h.evaluate(b, f[i], f[j], relabeled)
        maps.append(((i, j), tuple(sorted(image.items()))))
    return HcSimplex(m, objs, tuple(maps))


def hc_face(b: SCat, h: HcSimplex, i: int) -> HcSimplex:
    return reindex(b, h, [v for v in range(h.n + 1) if v != i])


def hc_degeneracy(b: SCat, h: HcSimplex, i: int) -> HcSimplex:
    return reindex(b, h, [v if v <= i else v - 1 for v in range(h.n + 2)])


def hc_label(h: HcSimplex) -> str:
    if h.n == 0:
        return h.objects[0]
    if h.n == 1:
        return f"{h.objects[0]}>{h.objects[1]}:{h.image(0, 1)[standard(1).hom('0', '1').nondegenerate(0)[0]].key}"
    digest = hashlib.sha1(repr((h.objects, h.maps)).encode("utf-8")).hexdigest()[:10]
    return f"hc{h.n}:{digest}"


def hc_nerve(b: SCat, max_n: int, budget: Optional[SearchBudget] = None) -> SSet:
    """The homotopy coherent nerve as a simplicial set up to max_n."""

    budget = ensure_budget(budget)
    model = ConcreteModel(
        face=lambda h, i: hc_face(b, h, i),
        degeneracy=lambda h, i: hc_degeneracy(b, h, i),
        label=hc_label,
    )

    def nondegenerate(k: int):
        return [h for h in hc_nerve_simplices(b, k, budget) if model.is_nondegenerate(h, k)]

    out = build_sset(max_n, nondegenerate, model, name=f"Ner_hc({b.name or '?'})")
    logger.info(f"[hc] materialized {out!r}")
    return out


@dataclass(frozen=True)
class HcQuasiVerdict:
    holds: bool
    max_n: int
    locally_kan: bool
    witness: Optional[HornInstance] = None


def hc_nerve_is_quasi(b: SCat, max_n: int, budget: Optional[SearchBudget] = None) -> HcQuasiVerdict:
    budget = ensure_budget(budget)
    local = is_locally_kan(b, min(max_n, b.max_dim), budget)
    if not local.holds:
        logger.warning(f"[hc] {b!r} is not locally Kan at hom{local.hom}; the quasi-category verdict is unsupported")
    verdict = is_quasicategory(hc_nerve(b, max_n, budget), max_n, budget)
    return HcQuasiVerdict(verdict.holds, max_n, local.holds, verdict.witness)


# ---------- Coherence data ----------


def _cube_model(d: int) -> Tuple[ConcreteModel, List[Tuple[int, ...]]]:
    points = [tuple(int(v) for v in p) for p in cartesian((0, 1), repeat=d)]
    model = ConcreteModel(
        face=lambda c, t: c[:t] + c[t + 1:],
        degeneracy=lambda c, t: c[: t + 1] + c[t:],
        label=lambda c: "<".join("".join(map(str, p)) or "*" for p in c),
    )
    return model, points


def _strictly_below(u: Tuple[int, ...], v: Tuple[int, ...]) -> bool:
    a, b = np.array(u, dtype=int), np.array(v, dtype=int)
    return bool(np.all(a <= b) and np.any(a < b))


@lru_cache(maxsize=None)
def unit_cube(d: int) -> SSet:
    """Δ[1]^d as the nerve of the poset {0,1}^d."""

    model, points = _cube_model(d)

    def chains(k: int):
        def extend(c):
            if len(c) == k + 1:
                yield c
                return
            for p in points:
                if _strictly_below(c[-1], p):
                    yield from extend(c + (p,))

        for p in points:
            yield from extend((p,))

    return build_sset(d, chains, model, name=f"Δ[1]^{d}")


@dataclass(frozen=True)
class CoherenceData:
    cubes: Mapping[Tuple[int, ...], SMap]
    checks: Mapping[str, int]


def _drop(chain, t):
    return tuple(tuple(np.delete(np.array(p, dtype=int), t).tolist()) for p in chain)


def _merge_max(chain, t):
    out = []
    for p in chain:
        a = np.array(p, dtype=int)
        merged = np.concatenate([a[:t], [np.maximum(a[t], a[t + 1])], a[t + 2:]])
        out.append(tuple(int(v) for v in merged))
    return tuple(out)


def expand_coherence_data(b: SCat, h: HcSimplex) -> CoherenceData:
    """Cube maps F(σ) for every string σ in [n], with the coherence conditions checked."""

    n = h.n

    def value(sigma: Tuple[int, ...], chain) -> SimplexRef:
        i0, im = sigma[0], sigma[-1]
        subsets = [{sigma[t + 1] for t, e in enumerate(p) if e} - {i0, im} for p in chain]
        return h.evaluate(b, i0, im, subsets)

    checks = {"iv": 0, "v": 0, "i": 0, "ii": 0, "iii": 0}

    def expect(name: str, lhs: SimplexRef, rhs: SimplexRef, sigma) -> None:
        if lhs != rhs:
            raise InternalCheckFailed(f"coherence condition ({name}) fails for σ={sigma}: {lhs.key} != {rhs.key}")
        checks[name] += 1

    cubes: Dict[Tuple[int, ...], SMap] = {}
    for m in range(1, n + 1):
        cube = unit_cube(m - 1)
        for sigma in combinations_with_replacement(range(n + 1), m + 1):
            image = {}
            for k, c in cube.nd_items():
                chain = cube.model.payload[c]
                image[c] = value(sigma, chain)
                for t in range(1, m):
                    col = [p[t - 1] for p in chain]
                    if not any(col):
                        expect("iv", image[c], value(sigma[:t] + sigma[t + 1:], _drop(chain, t - 1)), sigma)
                    if all(col):
                        first = value(sigma[: t + 1], tuple(p[: t - 1] for p in chain))
                        second = value(sigma[t:], tuple(p[t:] for p in chain))
                        composite = b.compose_simplices(h.objects[sigma[0]], h.objects[sigma[t]], h.objects[sigma[-1]], first, second)
                        expect("v", image[c], composite, sigma)
                if m >= 2 and sigma[0] == sigma[1]:
                    expect("i", image[c], value(sigma[1:], _drop(chain, 0)), sigma)
                if m >= 2 and sigma[-2] == sigma[-1]:
                    expect("iii", image[c], value(sigma[:-1], _drop(chain, m - 2)), sigma)
                for t in range(1, m - 1):
                    if sigma[t] == sigma[t + 1]:
                        expect("ii", image[c], value(sigma[:t] + sigma[t + 1:], _merge_max(chain, t - 1)), sigma)
            cubes[sigma] = SMap(cube, b.hom(h.objects[sigma[0]], h.objects[sigma[-1]]), image)
    logger.info(f"[coherence] n={n} checks={checks}")
    return CoherenceData(cubes, checks)
