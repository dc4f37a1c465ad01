"""Hammock localization: reduced hammocks between two objects of a category with weak equivalences.

A hammock of width k and length n is a grid of k+1 zigzags from X to Y with
n columns. Column j joins node j-1 to node j; a forward column points right,
a backward column points left and lies in W. Vertical arrows go from row i to
row i+1, are in W, and are identities at X and Y.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from config import Config
from services.cat_core import FinCat
from utils.budget import SearchBudget, ensure_budget
from utils.errors import InternalCheckFailed, InvalidInput, PreconditionFailed

logger = logging.getLogger("hammock")

FORWARD = "f"
BACKWARD = "b"


@dataclass(frozen=True)
class LocPair:
    c: FinCat
    w: FrozenSet[str]

    def contains(self, f: str) -> bool:
        return f in self.w

    def check(self) -> "LocPair":
        c = self.c
        for f in sorted(self.w):
            if f not in c.arrows:
                raise InvalidInput(f"weak equivalence {f!r} is not an arrow")
        for x in c.objects:
            if c.identity(x) not in self.w:
                raise InvalidInput(f"identity of {x!r} is missing from W")
        for g, f in c.composable_pairs():
            if f in self.w and g in self.w and c.compose(g, f) not in self.w:
                raise InvalidInput(f"W is not closed under composition: {g}∘{f}")
        return self


def make_locpair(c: FinCat, weq: Iterable[str]) -> LocPair:
    """W generated by the given arrows together with all identities."""

    w = set(weq) | set(c.identities.values())
    changed = True
    while changed:
        changed = False
        for g, f in c.composable_pairs():
            if f in w and g in w and c.compose(g, f) not in w:
                w.add(c.compose(g, f))
                changed = True
    return LocPair(c, frozenset(w)).check()


@dataclass(frozen=True)
class Hammock:
    source: str
    target: str
    directions: Tuple[str, ...]
    objects: Tuple[Tuple[str, ...], ...]
    horizontal: Tuple[Tuple[str, ...], ...]
    vertical: Tuple[Tuple[str, ...], ...]

    @property
    def width(self) -> int:
        return len(self.horizontal) - 1

    @property
    def length(self) -> int:
        return len(self.directions)

    def node(self, i: int, j: int) -> str:
        if j == 0:
            return self.source
        if j == self.length or self.length == 0:
            return self.target
        return self.objects[i][j - 1]

    def row(self, i: int) -> "Hammock":
        return Hammock(self.source, self.target, self.directions, (self.objects[i],), (self.horizontal[i],), ())

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "directions": list(self.directions),
            "objects": [list(r) for r in self.objects],
            "horizontal": [list(r) for r in self.horizontal],
            "vertical": [list(r) for r in self.vertical],
        }

    def __repr__(self) -> str:
        rows = " / ".join(
            " ".join(f"{'→' if d == FORWARD else '←'}{f}" for d, f in zip(self.directions, r)) or "id"
            for r in self.horizontal
        )
        return f"Hammock({self.source}⇝{self.target}, k={self.width}, n={self.length}: {rows})"


def identity_hammock(x: str, width: int = 0) -> Hammock:
    """The length-0 hammock, the identity of L^H C(x,x)."""

    return Hammock(x, x, (), ((),) * (width + 1), ((),) * (width + 1), ((),) * width)


# ---------- Grid form ----------


@dataclass
class _Grid:
    """Mutable copy with endpoint nodes and identity end verticals made explicit."""

    source: str
    target: str
    dirs: List[str]
    nodes: List[List[str]]
    horiz: List[List[str]]
    verts: List[List[str]]

    @classmethod
    def of(cls, h: Hammock, c: FinCat) -> "_Grid":
        n = h.length
        nodes = [[h.node(i, j) for j in range(n + 1)] for i in range(h.width + 1)]
        verts = []
        for i in range(h.width):
            row = [c.identity(h.source)] + list(h.vertical[i]) + ([c.identity(h.target)] if n else [])
            verts.append(row)
        return cls(h.source, h.target, list(h.directions), nodes, [list(r) for r in h.horizontal], verts)

    def freeze(self) -> Hammock:
        n = len(self.dirs)
        if n == 0:
            if self.source != self.target:
                raise InternalCheckFailed("a length-0 hammock must have equal endpoints")
            return identity_hammock(self.source, len(self.nodes) - 1)
        return Hammock(
            self.source,
            self.target,
            tuple(self.dirs),
            tuple(tuple(r[1:n]) for r in self.nodes),
            tuple(tuple(r) for r in self.horiz),
            tuple(tuple(r[1:n]) for r in self.verts),
        )


def check_hammock(h: Hammock, p: LocPair) -> Hammock:
    """Validate shape, W membership and commutativity of every square."""

    c = p.c
    n, k = h.length, h.width
    if n == 0 and h.source != h.target:
        raise InvalidInput("a length-0 hammock must start and end at the same object")
    if any(d not in (FORWARD, BACKWARD) for d in h.directions):
        raise InvalidInput("column directions must be 'f' or 'b'")
    if len(h.objects) != k + 1 or any(len(r) != max(n - 1, 0) for r in h.objects):
        raise InvalidInput("hammock object grid has the wrong shape")
    if any(len(r) != n for r in h.horizontal) or len(h.vertical) != k or any(len(r) != max(n - 1, 0) for r in h.vertical):
        raise InvalidInput("hammock arrow grid has the wrong shape")
    for i in range(k + 1):
        for j in range(1, n + 1):
            f = h.horizontal[i][j - 1]
            if f not in c.arrows:
                raise InvalidInput(f"unknown arrow {f!r} in row {i}, column {j}")
            a, b = h.node(i, j - 1), h.node(i, j)
            want = (a, b) if h.directions[j - 1] == FORWARD else (b, a)
            if c.arrows[f] != want:
                raise InvalidInput(f"arrow {f!r} in row {i}, column {j} does not run {want[0]}→{want[1]}")
            if h.directions[j - 1] == BACKWARD and not p.contains(f):
                raise InvalidInput(f"backward arrow {f!r} in row {i}, column {j} is not in W")
    g = _Grid.of(h, c)
    for i in range(k):
        for j in range(1, n):
            v = g.verts[i][j]
            if v not in c.arrows or c.arrows[v] != (g.nodes[i][j], g.nodes[i + 1][j]):
                raise InvalidInput(f"vertical arrow {v!r} at row {i}, node {j} has the wrong endpoints")
            if not p.contains(v):
                raise InvalidInput(f"vertical arrow {v!r} is not in W")
        for j in range(1, n + 1):
            up, low = g.horiz[i][j - 1], g.horiz[i + 1][j - 1]
            left, right = g.verts[i][j - 1], g.verts[i][j]
            if g.dirs[j - 1] == FORWARD:
                ok = c.compose(right, up) == c.compose(low, left)
            else:
                ok = c.compose(left, up) == c.compose(low, right)
            if not ok:
                raise InvalidInput(f"square between rows {i} and {i + 1} in column {j} does not commute")
    return h


# ---------- Reduction ----------


def _remove_column(g: _Grid, j: int, c: FinCat) -> Hammock:
    n = len(g.dirs)
    node = j if j < n else j - 1
    del g.dirs[j - 1]
    for r in g.horiz:
        del r[j - 1]
    for r in g.nodes:
        del r[node]
    for r in g.verts:
        del r[node]
    return g.freeze()


def _compose_columns(g: _Grid, j: int, p: LocPair) -> Hammock:
    """Merge columns j and j+1 (same direction) and drop node j."""

    c = p.c
    for r in g.horiz:
        first, second = r[j - 1], r[j]
        if g.dirs[j - 1] == FORWARD:
            r[j - 1] = c.compose(second, first)
        else:
            r[j - 1] = c.compose(first, second)
            if not p.contains(r[j - 1]):
                raise InternalCheckFailed(f"composite of backward arrows {first}, {second} left W")
        del r[j]
    del g.dirs[j]
    for r in g.nodes:
        del r[j]
    for r in g.verts:
        del r[j]
    return g.freeze()


def rewrite_steps(h: Hammock, p: LocPair) -> List[Tuple[str, int, Hammock]]:
    """Every one-step rewrite, leftmost first: ("identity", j, ...) or ("compose", j, ...)."""

    c = p.c
    n = h.length
    out = []
    for j in range(1, n + 1):
        if all(c.is_identity(r[j - 1]) for r in h.horizontal):
            out.append(("identity", j, _remove_column(_Grid.of(h, c), j, c)))
        if j < n and h.directions[j - 1] == h.directions[j]:
            out.append(("compose", j, _compose_columns(_Grid.of(h, c), j, p)))
    return out


def is_reduced(h: Hammock, p: LocPair) -> bool:
    return not rewrite_steps(h, p)


def reduce_hammock(h: Hammock, p: LocPair) -> Hammock:
    """Apply the leftmost rewrite until none applies."""

    while True:
        steps = rewrite_steps(h, p)
        if not steps:
            return h
        _, _, nxt = steps[0]
        if nxt.length >= h.length:
            raise InternalCheckFailed(f"rewrite did not shorten {h!r}")
        h = nxt


def normal_forms(h: Hammock, p: LocPair) -> FrozenSet[Hammock]:
    """Terminal hammocks over every maximal rewrite sequence."""

    seen: set = set()
    terminal: set = set()
    stack = [h]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        steps = rewrite_steps(cur, p)
        if not steps:
            terminal.add(cur)
        stack.extend(nxt for _, _, nxt in steps)
    return frozenset(terminal)


# ---------- Composition and simplicial structure ----------


def compose_hammocks(h1: Hammock, h2: Hammock, p: LocPair) -> Hammock:
    """h1 then h2, by concatenation and reduction."""

    if h1.target != h2.source:
        raise InvalidInput(f"cannot compose a hammock ending at {h1.target!r} with one starting at {h2.source!r}")
    if h1.width != h2.width:
        raise InvalidInput(f"hammock widths differ: {h1.width} and {h2.width}")
    c = p.c
    g1, g2 = _Grid.of(h1, c), _Grid.of(h2, c)
    joined = _Grid(
        h1.source,
        h2.target,
        g1.dirs + g2.dirs,
        [a + b[1:] for a, b in zip(g1.nodes, g2.nodes)],
        [a + b for a, b in zip(g1.horiz, g2.horiz)],
        # the middle node becomes a column of identities at h1.target
        [a + b[1:] for a, b in zip(g1.verts, g2.verts)],
    )
    return reduce_hammock(joined.freeze(), p)


def hammock_face(h: Hammock, i: int, p: LocPair) -> Hammock:
    """Delete row i, composing the verticals across it, then reduce."""

    k = h.width
    if k == 0 or not 0 <= i <= k:
        raise InvalidInput(f"face {i} undefined on a hammock of width {k}")
    c = p.c
    g = _Grid.of(h, c)
    del g.nodes[i]
    del g.horiz[i]
    if i == 0:
        del g.verts[0]
    elif i == k:
        del g.verts[k - 1]
    else:
        upper, lower = g.verts[i - 1], g.verts[i]
        g.verts[i - 1 : i + 1] = [[c.compose(b, a) for a, b in zip(upper, lower)]]
    return reduce_hammock(g.freeze(), p)


def hammock_degeneracy(h: Hammock, i: int, p: LocPair) -> Hammock:
    """Duplicate row i with identity verticals."""

    k = h.width
    if not 0 <= i <= k:
        raise InvalidInput(f"degeneracy {i} undefined on a hammock of width {k}")
    c = p.c
    g = _Grid.of(h, c)
    g.nodes.insert(i, list(g.nodes[i]))
    g.horiz.insert(i, list(g.horiz[i]))
    g.verts.insert(i, [c.identity(x) for x in g.nodes[i]])
    return g.freeze()


# ---------- Enumeration ----------


def _column_choices(
    p: LocPair,
    prev_nodes: List[str],
    prev_verts: List[str],
    direction: str,
    end: Optional[str],
    budget: SearchBudget,
) -> Iterator[Tuple[List[str], List[str], List[str]]]:
    """(new nodes, horizontals, verticals at the new node) for one column."""

    c = p.c
    rows = len(prev_nodes)

    def options(a: str) -> List[Tuple[str, str]]:
        if direction == FORWARD:
            found = [(f, c.cod(f)) for f in c.out_arrows(a)]
        else:
            found = [(f, c.dom(f)) for f in sorted(p.w) if c.cod(f) == a]
        return [(f, b) for f, b in found if end is None or b == end]

    def step(i: int, nodes: List[str], hs: List[str], vs: List[str]):
        if i == rows:
            if not all(c.is_identity(f) for f in hs):
                yield list(nodes), list(hs), list(vs)
            return
        for f, b in options(prev_nodes[i]):
            budget.tick()
            if i == 0:
                yield from step(1, [b], [f], [])
                continue
            up, left = hs[-1], prev_verts[i - 1]
            if end is not None:
                verticals = [c.identity(end)]
            else:
                verticals = [v for v in c.hom(nodes[-1], b) if p.contains(v)]
            for v in verticals:
                if direction == FORWARD:
                    ok = c.compose(v, up) == c.compose(f, left)
                else:
                    ok = c.compose(left, up) == c.compose(f, v)
                if ok:
                    yield from step(i + 1, nodes + [b], hs + [f], vs + [v])

    yield from step(0, [], [], [])


def enumerate_hammocks(
    p: LocPair,
    x: str,
    y: str,
    width: int,
    max_len: int,
    budget: Optional[SearchBudget] = None,
) -> List[Hammock]:
    """Reduced hammocks x ⇝ y of the given width and length at most max_len."""

    budget = ensure_budget(budget)
    c = p.c
    for o in (x, y):
        if o not in c.objects:
            raise InvalidInput(f"unknown object {o!r}")
    rows = width + 1

    def extend(g: _Grid, direction: str, last: bool) -> Iterator[_Grid]:
        nodes = [r[-1] for r in g.nodes]
        verts = [r[-1] for r in g.verts]
        for new_nodes, hs, vs in _column_choices(p, nodes, verts, direction, y if last else None, budget):
            yield _Grid(
                x, y, g.dirs + [direction],
                [r + [b] for r, b in zip(g.nodes, new_nodes)],
                [r + [f] for r, f in zip(g.horiz, hs)],
                [r + [v] for r, v in zip(g.verts, vs)],
            )

    def grow(g: _Grid) -> List[Hammock]:
        """All completions of a partial hammock whose last node is interior."""

        out: List[Hammock] = []
        n = len(g.dirs)
        direction = BACKWARD if g.dirs[-1] == FORWARD else FORWARD
        out.extend(h.freeze() for h in extend(g, direction, last=True))
        if n + 1 < max_len:
            for h in extend(g, direction, last=False):
                out.extend(grow(h))
        return out

    start = _Grid(x, y, [], [[x] for _ in range(rows)], [[] for _ in range(rows)], [[c.identity(x)] for _ in range(width)])
    found: List[Hammock] = [identity_hammock(x, width)] if x == y else []
    if max_len >= 1:
        for direction in (FORWARD, BACKWARD):
            found.extend(h.freeze() for h in extend(start, direction, last=True))
    if max_len >= 2:
        firsts = [h for direction in (FORWARD, BACKWARD) for h in extend(start, direction, last=False)]
        with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
            for chunk in pool.map(grow, firsts):
                found.extend(chunk)
    out = sorted(set(found), key=repr)
    logger.info(f"[enumerate] {x}⇝{y} width={width} max_len={max_len}: {len(out)} hammocks")
    return out


# ---------- Left fractions ----------


@dataclass(frozen=True)
class LeftFractionVerdict:
    holds: bool
    condition: Optional[str] = None
    witness: Optional[Dict[str, str]] = None


def _complete_square(p: LocPair, u: str, f: str) -> Optional[Tuple[str, str]]:
    """(f', v) with v in W and v∘f = f'∘u, for u: X → X' in W and f: X → Y."""

    c = p.c
    xp, y = c.cod(u), c.cod(f)
    for yp in c.objects:
        for v in c.hom(y, yp):
            if not p.contains(v):
                continue
            for fp in c.hom(xp, yp):
                if c.compose(v, f) == c.compose(fp, u):
                    return fp, v
    return None


def check_left_fractions(p: LocPair, budget: Optional[SearchBudget] = None) -> LeftFractionVerdict:
    """Exhaustive check of the two left-fraction conditions."""

    budget = ensure_budget(budget)
    c = p.c
    for u in sorted(p.w):
        for f in c.out_arrows(c.dom(u)):
            budget.tick()
            if _complete_square(p, u, f) is None:
                logger.info(f"[leftfrac] no square completes u={u}, f={f}")
                return LeftFractionVerdict(False, "i", {"u": u, "f": f})
    for u in sorted(p.w):
        x = c.cod(u)
        for y in c.objects:
            arrows = c.hom(x, y)
            for f in arrows:
                for g in arrows:
                    if f >= g or c.compose(f, u) != c.compose(g, u):
                        continue
                    budget.tick()
                    if not any(
                        p.contains(v) and c.compose(v, f) == c.compose(v, g)
                        for v in c.out_arrows(y)
                    ):
                        logger.info(f"[leftfrac] no v equalizes f={f}, g={g}")
                        return LeftFractionVerdict(False, "ii", {"u": u, "f": f, "g": g})
    return LeftFractionVerdict(True)


# ---------- Left-biased zigzags ----------


def is_left_biased(h: Hammock) -> bool:
    """A zigzag of the form X → C' ← Y (either column may be missing)."""

    return h.width == 0 and h.directions in ((), (FORWARD,), (BACKWARD,), (FORWARD, BACKWARD))


def left_bias_step(h: Hammock, p: LocPair) -> Optional[Hammock]:
    """A 1-simplex from h towards a left-biased zigzag, or None if h is already left biased.

    The leftmost backward column w followed by a forward column f is replaced,
    in the new row, by an identity and f' where v∘f = f'∘w; the next backward
    column b becomes v∘b.
    """

    if h.width != 0:
        raise InvalidInput("left biasing acts on zigzags of width 0")
    h = reduce_hammock(h, p)
    if is_left_biased(h):
        return None
    c = p.c
    g = _Grid.of(h, c)
    n = len(g.dirs)
    j = next(j for j in range(1, n) if g.dirs[j - 1] == BACKWARD and g.dirs[j] == FORWARD)
    w, f = g.horiz[0][j - 1], g.horiz[0][j]
    found = _complete_square(p, w, f)
    if found is None:
        raise PreconditionFailed(f"no square completes {w} and {f}; W does not admit left fractions here")
    fp, v = found
    if j + 1 == n or g.dirs[j + 1] != BACKWARD:
        d = g.nodes[0][j + 1]
        g.dirs.insert(j + 1, BACKWARD)
        g.horiz[0].insert(j + 1, c.identity(d))
        g.nodes[0].insert(j + 1, d)
    top = g.nodes[0]
    a = top[j - 1]
    lower_nodes = top[:j] + [a, c.cod(v)] + top[j + 2:]
    lower_horiz = list(g.horiz[0])
    lower_horiz[j - 1] = c.identity(a)
    lower_horiz[j] = fp
    lower_horiz[j + 1] = c.compose(v, g.horiz[0][j + 1])
    verts = [c.identity(x) for x in top]
    verts[j], verts[j + 1] = w, v
    step = _Grid(h.source, h.target, g.dirs, [top, lower_nodes], [g.horiz[0], lower_horiz], [verts])
    out = reduce_hammock(check_hammock(step.freeze(), p), p)
    logger.debug(f"[leftbias] {h!r} -> {out!r}")
    return out


@dataclass(frozen=True)
class LeftBiasResult:
    zigzag: Hammock
    steps: Tuple[Hammock, ...]


def left_bias(h: Hammock, p: LocPair, max_steps: int = 32) -> LeftBiasResult:
    """Iterate left_bias_step until the zigzag is left biased; W must admit left fractions."""

    verdict = check_left_fractions(p)
    if not verdict.holds:
        raise PreconditionFailed(f"W does not admit left fractions: condition {verdict.condition} fails at {verdict.witness}")
    steps: List[Hammock] = []
    cur = reduce_hammock(h, p)
    while not is_left_biased(cur):
        if len(steps) >= max_steps:
            raise PreconditionFailed(f"no left-biased zigzag within {max_steps} steps")
        s = left_bias_step(cur, p)
        steps.append(s)
        cur = hammock_face(s, 0, p)
    return LeftBiasResult(cur, tuple(steps))
