"""The free simplicial groupoid G(K) of a simplicial set.

G(K)_n is the free groupoid on the (n+1)-simplices of K, with the generators
s_0 y sent to identities. A generator x̄ runs from vertex 0 to vertex 1 of x.
Words are read as paths from left to right.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from services.simplicial_core import SSet, SimplexRef
from utils.errors import InvalidInput, PreconditionFailed

logger = logging.getLogger("dk")

Letter = Tuple[str, int]
Graph = Mapping[str, Tuple[str, str]]


@dataclass(frozen=True)
class GrpdWord:
    dom: str
    cod: str
    letters: Tuple[Letter, ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def key(self) -> str:
        if not self.letters:
            return f"1_{self.dom}"
        return ".".join(g if e == 1 else f"{g}^-1" for g, e in self.letters)


def _letter_ends(letter: Letter, graph: Graph) -> Tuple[str, str]:
    g, e = letter
    if g not in graph:
        raise InvalidInput(f"unknown generator {g!r}")
    if e not in (1, -1):
        raise InvalidInput(f"exponent of {g!r} must be 1 or -1")
    dom, cod = graph[g]
    return (dom, cod) if e == 1 else (cod, dom)


def word_reduce(word: GrpdWord, graph: Graph) -> GrpdWord:
    """Cancel adjacent g.g^-1 pairs; the endpoint chain must be consistent."""

    at = word.dom
    stack: List[Letter] = []
    for letter in word.letters:
        start, end = _letter_ends(letter, graph)
        if start != at:
            raise InvalidInput(f"word {word.key()} breaks at {letter[0]!r}: expected a path from {at!r}")
        at = end
        if stack and stack[-1] == (letter[0], -letter[1]):
            stack.pop()
        else:
            stack.append(letter)
    if at != word.cod:
        raise InvalidInput(f"word {word.key()} ends at {at!r}, not {word.cod!r}")
    return GrpdWord(word.dom, word.cod, tuple(stack))


def word_compose(first: GrpdWord, second: GrpdWord, graph: Graph) -> GrpdWord:
    """first then second."""

    if first.cod != second.dom:
        raise InvalidInput(f"cannot compose {first.key()} with {second.key()}")
    return word_reduce(GrpdWord(first.dom, second.cod, first.letters + second.letters), graph)


def word_inverse(word: GrpdWord) -> GrpdWord:
    return GrpdWord(word.cod, word.dom, tuple((g, -e) for g, e in reversed(word.letters)))


# ---------- Simplicial groupoids ----------


@dataclass(frozen=True)
class SimpGrpd:
    objects: Tuple[str, ...]
    max_dim: int
    generators: Mapping[int, Mapping[str, Tuple[str, str]]]
    faces: Mapping[Tuple[int, str, int], GrpdWord]
    degeneracies: Mapping[Tuple[int, str, int], GrpdWord]
    name: str = ""

    def generator_word(self, n: int, g: str) -> GrpdWord:
        dom, cod = self.generators[n][g]
        return GrpdWord(dom, cod, ((g, 1),))

    def _extend(self, n: int, target: int, word: GrpdWord, table, i: int, strict: bool = True) -> GrpdWord:
        if not strict:
            return _free_image(word, table, n, i)
        out = GrpdWord(word.dom, word.dom)
        for g, e in word.letters:
            image = table[(n, g, i)]
            out = word_compose(out, image if e == 1 else word_inverse(image), self.generators[target])
        if out.cod != word.cod:
            raise InvalidInput(f"image of {word.key()} ends at {out.cod!r}, not {word.cod!r}")
        return out

    def face(self, n: int, word: GrpdWord, i: int, strict: bool = True) -> GrpdWord:
        """δ_i extended homomorphically from generators.

        With strict=False the image keeps the endpoints of word and its letters
        are only freely cancelled, so broken tables still give comparable words.
        """

        if not 1 <= n <= self.max_dim or not 0 <= i <= n:
            raise InvalidInput(f"face δ{i} undefined in dimension {n}")
        return self._extend(n, n - 1, word, self.faces, i, strict)

    def degeneracy(self, n: int, word: GrpdWord, i: int, strict: bool = True) -> GrpdWord:
        if not 0 <= n < self.max_dim or not 0 <= i <= n:
            raise InvalidInput(f"degeneracy σ{i} undefined in dimension {n}")
        return self._extend(n, n + 1, word, self.degeneracies, i, strict)


def _free_image(word: GrpdWord, table, n: int, i: int) -> GrpdWord:
    letters: List[Letter] = []
    for g, e in word.letters:
        image = table.get((n, g, i))
        if image is None:
            raise InvalidInput(f"no image for {g!r} in dimension {n} at index {i}")
        for letter in image.letters if e == 1 else word_inverse(image).letters:
            if letters and letters[-1] == (letter[0], -letter[1]):
                letters.pop()
            else:
                letters.append(letter)
    return GrpdWord(word.dom, word.cod, tuple(letters))


def _bar(k: SSet, r: SimplexRef) -> GrpdWord:
    v = k.vertices(r)
    if 0 in r.degens:
        return GrpdWord(v[0], v[0])
    return GrpdWord(v[0], v[1], ((r.key, 1),))


def dk_groupoid(k: SSet, max_dim: int) -> SimpGrpd:
    """G(K) in dimensions 0..max_dim; needs K up to max_dim + 1."""

    if max_dim + 1 > k.max_dim:
        raise PreconditionFailed(f"G(K) up to dimension {max_dim} needs K up to {max_dim + 1}, got {k.max_dim}")
    refs: Dict[int, List[SimplexRef]] = {}
    generators: Dict[int, Dict[str, Tuple[str, str]]] = {}
    for n in range(max_dim + 1):
        refs[n] = [r for r in k.simplices(n + 1) if 0 not in r.degens]
        generators[n] = {}
        for r in refs[n]:
            v = k.vertices(r)
            generators[n][r.key] = (v[0], v[1])
    faces: Dict[Tuple[int, str, int], GrpdWord] = {}
    degeneracies: Dict[Tuple[int, str, int], GrpdWord] = {}
    for n in range(max_dim + 1):
        for x in refs[n]:
            if n >= 1:
                first, second = _bar(k, k.face(x, 1)), _bar(k, k.face(x, 0))
                faces[(n, x.key, 0)] = word_compose(first, word_inverse(second), generators[n - 1])
                for i in range(1, n + 1):
                    faces[(n, x.key, i)] = _bar(k, k.face(x, i + 1))
            if n < max_dim:
                for i in range(n + 1):
                    degeneracies[(n, x.key, i)] = _bar(k, k.degeneracy(x, i + 1))
    out = SimpGrpd(tuple(k.nondegenerate(0)), max_dim, generators, faces, degeneracies, name=f"G({k.name or '?'})")
    logger.info(f"[dk] {out.name}: generators per dimension {[len(generators[n]) for n in range(max_dim + 1)]}")
    return out


def generators(g: SimpGrpd, n: int) -> List[Dict[str, str]]:
    """One row per generator of G_n: endpoints and face words."""

    rows = []
    for x in sorted(g.generators.get(n, {})):
        dom, cod = g.generators[n][x]
        row = {"generator": x, "dom": dom, "cod": cod}
        if n >= 1:
            for i in range(n + 1):
                row[f"d{i}"] = g.faces[(n, x, i)].key()
        rows.append(row)
    return rows


# ---------- Verification ----------


@dataclass
class GroupoidReport:
    max_dim: int
    checked: Dict[str, int] = field(default_factory=dict)
    failures: List[Dict[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, family: str, n: int, x: str, lhs: GrpdWord, rhs: GrpdWord, **idx) -> None:
        self.checked[family] = self.checked.get(family, 0) + 1
        if lhs != rhs:
            self.failures.append({"identity": family, "dim": n, "generator": x, "lhs": lhs.key(), "rhs": rhs.key(), **idx})


def verify_simplicial_groupoid(g: SimpGrpd, max_dim: int) -> GroupoidReport:
    """Simplicial identities, endpoint preservation and object constancy on every generator."""

    top = min(max_dim, g.max_dim)
    report = GroupoidReport(top)
    constant = set(g.objects)
    for n in range(top + 1):
        for x in sorted(g.generators.get(n, {})):
            ends = g.generators[n][x]
            if not set(ends) <= constant:
                report.failures.append({"identity": "objects", "dim": n, "generator": x})
            table = [("d", i, g.faces.get((n, x, i))) for i in range(n + 1) if n >= 1]
            table += [("s", i, g.degeneracies.get((n, x, i))) for i in range(n + 1) if n < top]
            bad_ends = [f"{kind}{i}" for kind, i, w in table if w is None or (w.dom, w.cod) != ends]
            report.checked["endpoints"] = report.checked.get("endpoints", 0) + len(table)
            if bad_ends:
                report.failures.append({"identity": "endpoints", "dim": n, "generator": x, "maps": bad_ends})
    # after a failure above, words are compared after free cancellation only
    strict = not report.failures
    for n in range(top + 1):
        for x in sorted(g.generators.get(n, {})):
            try:
                _check_identities(g, n, x, g.generator_word(n, x), top, report, strict)
            except InvalidInput as exc:
                report.failures.append({"identity": "groupoid map", "dim": n, "generator": x, "error": str(exc)})
    logger.info(f"[dk] verified {g.name} up to {top}: {report.checked}, {len(report.failures)} failures")
    return report


def _check_identities(g: SimpGrpd, n: int, x: str, xw: GrpdWord, top: int, report: GroupoidReport, strict: bool) -> None:
    def d(m: int, w: GrpdWord, i: int) -> GrpdWord:
        return g.face(m, w, i, strict)

    def s(m: int, w: GrpdWord, i: int) -> GrpdWord:
        return g.degeneracy(m, w, i, strict)

    # d_i d_j = d_{j-1} d_i for i < j
    if n >= 2:
        for j in range(n + 1):
            for i in range(j):
                report.record("dd", n, x, d(n - 1, d(n, xw, j), i), d(n - 1, d(n, xw, i), j - 1), i=i, j=j)
    if n + 1 <= top:
        for j in range(n + 1):
            up = s(n, xw, j)
            for i in range(n + 2):
                lhs = d(n + 1, up, i)
                if i < j:
                    report.record("ds<", n, x, lhs, s(n - 1, d(n, xw, i), j - 1), i=i, j=j)
                elif i in (j, j + 1):
                    report.record("ds=", n, x, lhs, xw, i=i, j=j)
                else:
                    report.record("ds>", n, x, lhs, s(n - 1, d(n, xw, i - 1), j), i=i, j=j)
    # s_i s_j = s_{j+1} s_i for i <= j
    if n + 2 <= top:
        for j in range(n + 1):
            for i in range(j + 1):
                report.record("ss", n, x, s(n + 1, s(n, xw, j), i), s(n + 1, s(n, xw, i), j + 1), i=i, j=j)
