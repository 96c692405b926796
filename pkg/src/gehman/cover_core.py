"""Graph-cover presentations of Cantor systems.

A presentation is a finite tower of level graphs ``G_0 <- G_1 <- ... <- G_D``
joined by bonding homomorphisms.  Level 0 is the one-point graph with a loop.
Cells of level ``i + 1`` are sub-cells of the cell they are mapped to.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import (
    AmbiguityError,
    CompatibilityError,
    NotCantorError,
    StructuralError,
)

ROOT_CELL = "C"
DEFAULT_EXTENSION_BOUND = 8


@dataclass(frozen=True)
class LevelGraph:
    index: int
    cells: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def successors(self, cell: str) -> list[str]:
        return self._adjacency()[0].get(cell, [])

    def predecessors(self, cell: str) -> list[str]:
        return self._adjacency()[1].get(cell, [])

    def _adjacency(self):
        cached = self.__dict__.get("_adj")
        if cached is None:
            order = {c: k for k, c in enumerate(self.cells)}
            succ: dict[str, list[str]] = defaultdict(list)
            pred: dict[str, list[str]] = defaultdict(list)
            for u, v in sorted(self.edges, key=lambda e: (order.get(e[0], -1), order.get(e[1], -1))):
                succ[u].append(v)
                pred[v].append(u)
            cached = (dict(succ), dict(pred))
            object.__setattr__(self, "_adj", cached)
        return cached


@dataclass(frozen=True)
class CoverHom:
    """Bonding map from level ``from_level`` onto level ``from_level - 1``."""

    from_level: int
    mapping: dict[str, str]

    def __call__(self, cell: str) -> str:
        return self.mapping[cell]


@dataclass
class CoverSequence:
    levels: list[LevelGraph]
    homs: list[CoverHom]
    depth_proxy: list[Fraction]
    cell_words: bool = False
    cylinder_lengths: list[int] | None = None
    _children: dict[tuple[int, str], list[str]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        check_structure(self)
        for hom in self.homs:
            upper = self.levels[hom.from_level - 1]
            buckets: dict[str, list[str]] = {c: [] for c in upper.cells}
            for cell in self.levels[hom.from_level].cells:
                buckets[hom(cell)].append(cell)
            for parent, kids in buckets.items():
                self._children[(hom.from_level - 1, parent)] = kids

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def cells(self, level: int) -> tuple[str, ...]:
        return self.levels[level].cells

    def children(self, level: int, cell: str) -> list[str]:
        """Sub-cells at ``level + 1`` of ``cell``, in input order."""
        return self._children.get((level, cell), [])

    def parent(self, level: int, cell: str) -> str:
        return self.homs[level - 1](cell)

    def successors(self, level: int, cell: str) -> list[str]:
        return self.levels[level].successors(cell)

    def thread_of(self, level: int, cell: str) -> tuple[str, ...]:
        """The thread ``(x_0, ..., x_level)`` ending in ``cell``."""
        entries = [cell]
        for i in range(level, 0, -1):
            entries.append(self.parent(i, entries[-1]))
        return tuple(reversed(entries))

    def threads(self, depth: int) -> Iterator[tuple[str, ...]]:
        for cell in self.cells(depth):
            yield self.thread_of(depth, cell)


def check_structure(seq: CoverSequence) -> None:
    """Raise :class:`StructuralError` on index-level inconsistencies."""
    if not seq.levels:
        raise StructuralError("presentation has no levels")
    if len(seq.homs) != len(seq.levels) - 1:
        raise StructuralError(
            f"expected {len(seq.levels) - 1} bonding maps, got {len(seq.homs)}")
    if len(seq.depth_proxy) != len(seq.levels):
        raise StructuralError("depth_proxy must have one entry per level")
    for i, g in enumerate(seq.levels):
        if g.index != i:
            raise StructuralError(f"level at position {i} has index {g.index}")
        if len(set(g.cells)) != len(g.cells):
            raise StructuralError(f"level {i}: duplicate cell identifiers")
        known = set(g.cells)
        for u, v in g.edges:
            if u not in known or v not in known:
                raise StructuralError(f"level {i}: edge ({u}, {v}) names an unknown cell")
    for k, hom in enumerate(seq.homs):
        if hom.from_level != k + 1:
            raise StructuralError(f"bonding map {k} has from_level {hom.from_level}")
        lower, upper = seq.levels[k + 1], seq.levels[k]
        missing = [c for c in lower.cells if c not in hom.mapping]
        if missing:
            raise StructuralError(f"hom_{k}: no image for cell {missing[0]}")
        upper_cells, lower_cells = set(upper.cells), set(lower.cells)
        for c, p in hom.mapping.items():
            if c not in lower_cells:
                raise StructuralError(f"hom_{k}: maps unknown cell {c}")
            if p not in upper_cells:
                raise StructuralError(f"hom_{k}: image {p} of {c} is not a level-{k} cell")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class CheckResult:
    level: int
    prop: str
    passed: bool
    witness: str = ""

    def as_dict(self) -> dict:
        return {"level": self.level, "property": self.prop,
                "passed": self.passed, "witness": self.witness}


@dataclass
class ValidationReport:
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "results": [r.as_dict() for r in self.results]}

    def __str__(self) -> str:
        lines = []
        for r in self.results:
            mark = "ok  " if r.passed else "FAIL"
            tail = f"  witness: {r.witness}" if r.witness else ""
            lines.append(f"{mark} level {r.level}: {r.prop}{tail}")
        return "\n".join(lines)


def _first(items: Iterable) -> str:
    for x in items:
        return str(x)
    return ""


def validate_presentation(seq: CoverSequence) -> ValidationReport:
    """Check every cover axiom level by level.

    Structural problems raise; property failures are collected with a witness.
    """
    check_structure(seq)
    out: list[CheckResult] = []
    g0 = seq.levels[0]
    ok0 = len(g0.cells) == 1 and g0.edges == frozenset({(g0.cells[0], g0.cells[0])})
    out.append(CheckResult(0, "singleton base graph with loop", ok0,
                           "" if ok0 else f"cells={list(g0.cells)}"))

    for g in seq.levels:
        no_out = [c for c in g.cells if not g.successors(c)]
        no_in = [c for c in g.cells if not g.predecessors(c)]
        bad = no_out + no_in
        out.append(CheckResult(g.index, "relation surjective (every cell has in- and out-edges)",
                               not bad, _first(bad)))

    for hom in seq.homs:
        i = hom.from_level
        lower, upper = seq.levels[i], seq.levels[i - 1]

        broken = [(u, v) for u, v in sorted(lower.edges) if (hom(u), hom(v)) not in upper.edges]
        out.append(CheckResult(i, f"hom_{i - 1} is a graph homomorphism", not broken,
                               _first(broken)))

        image = {(hom(u), hom(v)) for u, v in lower.edges}
        uncovered = sorted(upper.edges - image)
        out.append(CheckResult(i, f"hom_{i - 1} is edge-surjective", not uncovered,
                               _first(uncovered)))

        clash = []
        for u in lower.cells:
            targets = {hom(v) for v in lower.successors(u)}
            if len(targets) > 1:
                clash.append(f"{u} -> {sorted(targets)}")
        out.append(CheckResult(i, f"hom_{i - 1} is + directional", not clash, _first(clash)))
        # same predicate, stated as the refinement property used by branch images
        out.append(CheckResult(i, f"level {i} refines the pull-back of level {i - 1}",
                               not clash, _first(clash)))

        if i - 1 >= 1:
            thin = [f"{p} has {len(seq.children(i - 1, p))} children" for p in upper.cells
                    if len(seq.children(i - 1, p)) < 4]
            out.append(CheckResult(i - 1, "every cell splits into >= 4 children", not thin,
                                   _first(thin)))
        else:
            empty = [p for p in upper.cells if not seq.children(0, p)]
            out.append(CheckResult(0, "root has children", not empty, _first(empty)))

    mono = [k for k in range(1, len(seq.depth_proxy))
            if not seq.depth_proxy[k] < seq.depth_proxy[k - 1]]
    out.append(CheckResult(0, "mesh proxy strictly decreasing", not mono,
                           f"level {mono[0]}" if mono else ""))
    return ValidationReport(out)


# ---------------------------------------------------------------------------
# threads


def check_thread(t: Sequence[str], seq: CoverSequence) -> None:
    if not t:
        raise CompatibilityError("empty thread")
    if len(t) - 1 > seq.depth:
        raise CompatibilityError(f"thread of depth {len(t) - 1} exceeds built depth {seq.depth}")
    for i, x in enumerate(t):
        if x not in seq.levels[i].cells:
            raise CompatibilityError(f"entry {x!r} is not a level-{i} cell")
    for i in range(len(t) - 1):
        if seq.parent(i + 1, t[i + 1]) != t[i]:
            raise CompatibilityError(
                f"x_{i} = {t[i]} but hom_{i}(x_{i + 1}) = {seq.parent(i + 1, t[i + 1])}")


def thread_successor(t: Sequence[str], seq: CoverSequence) -> tuple[str, ...]:
    """Image of a thread under the inverse-limit map, one level shorter.

    ``s_i`` is read off as the common image of all successors of ``t_{i+1}``;
    + directionality makes it unique.
    """
    check_thread(t, seq)
    d = len(t) - 1
    if d == 0:
        return (t[0],)
    s = [seq.cells(0)[0]]
    for i in range(1, d):
        succ = seq.successors(i + 1, t[i + 1])
        images = {seq.parent(i + 1, w) for w in succ}
        if len(images) != 1:
            raise AmbiguityError(
                f"level {i + 1}: successors of {t[i + 1]} map to {sorted(images)}")
        s.append(images.pop())
    s_t = tuple(s)
    for i in range(len(s_t)):
        if (t[i], s_t[i]) not in seq.levels[i].edges:
            raise CompatibilityError(f"level {i}: ({t[i]}, {s_t[i]}) is not an edge")
    check_thread(s_t, seq)
    return s_t


# ---------------------------------------------------------------------------
# subshift presentations


@dataclass(frozen=True)
class Subshift:
    """One-sided subshift of finite type over ``alphabet``.

    The surjective core is used: words are taken in the essential part of the
    block graph, so the shift map is onto.
    """

    alphabet: tuple[str, ...]
    forbidden: tuple[str, ...] = ()

    @classmethod
    def full(cls, k: int) -> "Subshift":
        return cls(tuple(_symbols(k)))

    @classmethod
    def sft(cls, alphabet, forbidden: Iterable[str]) -> "Subshift":
        symbols = tuple(_symbols(alphabet)) if isinstance(alphabet, int) else tuple(alphabet)
        return cls(symbols, tuple(forbidden))


def _symbols(k: int) -> list[str]:
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    if not 2 <= k <= len(digits):
        raise StructuralError(f"alphabet size must lie in [2, {len(digits)}], got {k}")
    return list(digits[:k])


class _Language:
    """Admissible words of the essential core of an SFT."""

    def __init__(self, shift: Subshift):
        if len(shift.alphabet) < 2:
            raise NotCantorError("not a Cantor system: alphabet has fewer than 2 symbols")
        for w in shift.forbidden:
            if not w or any(ch not in shift.alphabet for ch in w):
                raise StructuralError(f"forbidden word {w!r} is not a word over the alphabet")
        self.alphabet = shift.alphabet
        self.forbidden = shift.forbidden
        self.m = max([len(w) - 1 for w in self.forbidden] + [1])
        states = {"".join(p) for p in itertools.product(self.alphabet, repeat=self.m)
                  if self._clean("".join(p))}
        succ = {s: {s[1:] + a for a in self.alphabet
                    if s[1:] + a in states and self._clean(s + a)} for s in states}
        while True:
            has_pred = {v for s in states for v in succ[s]}
            keep = {s for s in states if succ[s] & states and s in has_pred}
            if keep == states:
                break
            states = keep
            succ = {s: succ[s] & states for s in states}
        if not states:
            raise NotCantorError("not a Cantor system: the subshift is empty")
        self.states = states
        self.succ = succ
        self._check_perfect()

    def _clean(self, w: str) -> bool:
        return not any(f in w for f in self.forbidden)

    def _check_perfect(self) -> None:
        # a point is isolated iff from some state every forward path is forced
        for s in sorted(self.states):
            seen, stack, branching = {s}, [s], False
            while stack:
                u = stack.pop()
                if len(self.succ[u]) >= 2:
                    branching = True
                    break
                for v in self.succ[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            if not branching:
                raise NotCantorError(
                    f"not a Cantor system: block {s!r} continues in a unique way "
                    "(finite subshift or isolated point)")

    def words(self, length: int) -> list[str]:
        """All admissible words of ``length``, in lexicographic symbol order."""
        if length == 0:
            return [""]
        order = {a: k for k, a in enumerate(self.alphabet)}
        key = lambda w: [order[ch] for ch in w]  # noqa: E731
        if length <= self.m:
            return sorted({s[:length] for s in self.states}, key=key)
        out = []
        for s in sorted(self.states, key=key):
            out.extend(self._extend(s, length - self.m))
        return sorted(out, key=key)

    def _extend(self, w: str, extra: int) -> list[str]:
        if extra == 0:
            return [w]
        out = []
        for nxt in sorted(self.succ[w[-self.m:]]):
            out.extend(self._extend(w + nxt[-1], extra - 1))
        return out

    def extensions(self, w: str, extra: int) -> list[str]:
        if len(w) >= self.m:
            return self._extend(w, extra)
        return [x for x in self.words(len(w) + extra) if x.startswith(w)]

    def admissible(self, w: str) -> bool:
        if len(w) <= self.m:
            return any(s.startswith(w) for s in self.states)
        for k in range(len(w) - self.m + 1):
            if w[k:k + self.m] not in self.states:
                return False
            if k and w[k:k + self.m] not in self.succ[w[k - 1:k - 1 + self.m]]:
                return False
        return True


def build_subshift_presentation(shift: Subshift, depth: int,
                                extension_bound: int = DEFAULT_EXTENSION_BOUND) -> CoverSequence:
    """Cylinder presentation of ``shift`` with levels ``0..depth``.

    Level ``i`` cells are the admissible cylinder words of length ``L_i``,
    where ``L_i = L_{i-1} + 1 + m_i`` and ``m_i >= 1`` is the least number of
    extra symbols giving every word of length ``L_{i-1} + 1`` at least four
    admissible extensions.
    """
    if depth < 0:
        raise StructuralError("depth must be non-negative")
    lang = _Language(shift)
    levels = [LevelGraph(0, (ROOT_CELL,), frozenset({(ROOT_CELL, ROOT_CELL)}))]
    homs: list[CoverHom] = []
    lengths = [0]
    for i in range(1, depth + 1):
        base = lengths[-1] + 1
        w_cells = lang.words(base)
        for extra in range(1, extension_bound + 1):
            if all(len(lang.extensions(w, extra)) >= 4 for w in w_cells):
                break
        else:
            thin = min(w_cells, key=lambda w: len(lang.extensions(w, extension_bound)))
            raise NotCantorError(
                f"level {i}: cylinder [{thin}] does not reach 4 sub-cylinders within "
                f"{extension_bound} extra symbols")
        length = base + extra
        cells = lang.words(length)
        by_prefix: dict[str, list[str]] = defaultdict(list)
        for v in cells:
            by_prefix[v[:-1]].append(v)
        edges = {(u, v) for u in cells for v in by_prefix.get(u[1:], [])
                 if lang.admissible(u + v[-1])}
        prev = lengths[-1]
        if i == 1:
            mapping = {c: ROOT_CELL for c in cells}
        else:
            mapping = {c: c[:prev] for c in cells}
        levels.append(LevelGraph(i, tuple(cells), frozenset(edges)))
        homs.append(CoverHom(i, mapping))
        lengths.append(length)
    proxy = [Fraction(1, 2 ** L) for L in lengths]
    return CoverSequence(levels, homs, proxy, cell_words=True, cylinder_lengths=lengths)


def explicit_presentation(levels: Sequence[dict], homs: Sequence[dict]) -> CoverSequence:
    """Presentation given verbatim as cells, edges and bonding maps.

    ``levels[i]`` is ``{"cells": [...], "edges": [[u, v], ...]}`` and
    ``homs[i]`` maps each level-``i + 1`` cell to its level-``i`` parent.
    """
    graphs = []
    for i, lv in enumerate(levels):
        try:
            cells = tuple(str(c) for c in lv["cells"])
            edges = frozenset((str(u), str(v)) for u, v in lv["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"level {i}: malformed level record ({exc})") from None
        graphs.append(LevelGraph(i, cells, edges))
    maps = [CoverHom(i + 1, {str(k): str(v) for k, v in h.items()}) for i, h in enumerate(homs)]
    proxy = [Fraction(1, 2 ** i) for i in range(len(graphs))]
    return CoverSequence(graphs, maps, proxy)
