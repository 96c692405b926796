"""Stage maps F_n on the two root arcs, their limit f, and F_mod.

Stage 0 sends the whole arc to S.  Stage ``n + 1`` cuts every interval that
stage ``n`` sends onto a subdendrite ``X_w`` into eighths, in the pattern

    edge / X_{w0} X_{w0} / edge reversed / edge / X_{w1} X_{w1} / edge reversed

where the edges run from ``c_w`` to ``c_{w0}`` and ``c_{w1}``.  A node with a
single child ``wa`` in S uses ``wa`` for both halves.
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .dendrite import (
    ArcPoint,
    CodeTable,
    DendritePoint,
    Node,
    arc_len,
    on_arc,
    subtree_diameter,
)
from .dynamics_f import PRESERVE, REVERSE, FMap
from .errors import ConstructionError, DepthRangeError

LINEAR, DENDRITE = "linear", "dendrite"
ROOT_ARCS = ("0", "1")
ROOT_ARC_LEN = Fraction(1, 4)


@dataclass(frozen=True)
class StagePiece:
    kind: str
    sub: tuple[Fraction, Fraction]
    code: str  # subtree root for dendrite pieces, target edge for linear ones
    orientation: str = ""

    @property
    def lam(self) -> Fraction | None:
        if self.kind != LINEAR:
            return None
        return arc_len(self.code) / ((self.sub[1] - self.sub[0]) * ROOT_ARC_LEN)

    def value(self, t: Fraction):
        """``F_n(t)`` on this piece: a point, or the subtree root code."""
        if self.kind == DENDRITE:
            return ("tree", self.code)
        a, b = self.sub
        s = (t - a) / (b - a)
        if self.orientation == REVERSE:
            s = 1 - s
        return ("point", on_arc(self.code, s))


@dataclass(frozen=True)
class StageTable:
    """Pieces of ``F_n`` on one root arc; both root arcs carry the same table."""

    stage: int
    pieces: tuple[StagePiece, ...]

    def locate(self, t: Fraction) -> list[StagePiece]:
        starts = self.__dict__.get("_starts")
        if starts is None:
            starts = [p.sub[0] for p in self.pieces]
            object.__setattr__(self, "_starts", starts)
        k = max(bisect.bisect_right(starts, t) - 1, 0)
        hits = [self.pieces[k]]
        if k > 0 and t == starts[k]:
            hits.insert(0, self.pieces[k - 1])
        return hits

    def cutpoints(self) -> list[Fraction]:
        return sorted({p.sub[0] for p in self.pieces} | {Fraction(1)})


@dataclass(frozen=True)
class Nested:
    """The argument stays in subdendrite pieces through ``depth`` stages."""

    code: str
    depth: int

    def __str__(self) -> str:
        return f"nested={self.code},depth={self.depth}"


LimitValue = Union[Node, ArcPoint, Nested]


def split(sub: tuple[Fraction, Fraction], root: str, codes: CodeTable) -> list[StagePiece]:
    """Eight-fold refinement of a subdendrite piece."""
    kids = codes.s_children(root)
    if not kids:
        raise ConstructionError(f"node {root!r} has no children in S")
    left, right = (kids[0], kids[0]) if len(kids) == 1 else kids
    a, b = sub
    step = (b - a) / 8
    c = [a + step * k for k in range(9)]
    return [
        StagePiece(LINEAR, (c[0], c[1]), left, PRESERVE),
        StagePiece(DENDRITE, (c[1], c[3]), left),
        StagePiece(LINEAR, (c[3], c[4]), left, REVERSE),
        StagePiece(LINEAR, (c[4], c[5]), right, PRESERVE),
        StagePiece(DENDRITE, (c[5], c[7]), right),
        StagePiece(LINEAR, (c[7], c[8]), right, REVERSE),
    ]


def combined_value(pieces: list[StagePiece], t: Fraction):
    """Value of ``F_n`` at ``t`` as a closed set: the union over the pieces containing it."""
    values = [p.value(t) for p in pieces]
    trees = {v[1] for v in values if v[0] == "tree"}
    points = {v[1] for v in values if v[0] == "point"}
    if len(trees) > 1:
        raise ConstructionError(f"two subtrees meet at {t}: {sorted(trees)}")
    if trees:
        root = trees.pop()
        if any(p != Node(root) for p in points):
            raise ConstructionError(f"linear piece misses subtree root {root!r} at {t}")
        return ("tree", root)
    if len(points) != 1:
        raise ConstructionError(f"linear pieces disagree at {t}: {points}")
    return ("point", points.pop())


class ExactMap:
    """F_mod: the limit map on the root arcs glued to F elsewhere."""

    def __init__(self, fmap: FMap):
        self.fmap = fmap
        self.codes = fmap.codes
        self._stages: dict[int, StageTable] = {
            0: StageTable(0, (StagePiece(DENDRITE, (Fraction(0), Fraction(1)), ""),))}

    def build_stage(self, n: int) -> StageTable:
        if n < 0:
            raise ValueError("stage index must be non-negative")
        if n > self.codes.max_depth:
            raise DepthRangeError(f"stage {n} needs tree depth {n} > n_D = {self.codes.max_depth}")
        if n not in self._stages:
            prev = self.build_stage(n - 1)
            pieces: list[StagePiece] = []
            for p in prev.pieces:
                if p.kind == LINEAR:
                    pieces.append(p)
                else:
                    pieces.extend(split(p.sub, p.code, self.codes))
            self._stages.setdefault(n, StageTable(n, tuple(pieces)))
        return self._stages[n]

    def value(self, n: int, t: Fraction):
        table = self.build_stage(n)
        return combined_value(table.locate(t), t)

    def eval_limit_f(self, t, resolve_depth: int | None = None) -> LimitValue:
        """``f(t)`` for position ``t`` along a root arc, resolved locally stage by stage."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"position {t} outside [0, 1]")
        if resolve_depth is None:
            resolve_depth = self.codes.max_depth
        resolve_depth = min(resolve_depth, self.codes.max_depth)
        sub, root = (Fraction(0), Fraction(1)), ""
        for n in range(1, resolve_depth + 1):
            pieces = [p for p in split(sub, root, self.codes) if p.sub[0] <= t <= p.sub[1]]
            kind, val = combined_value(pieces, t)
            if kind == "point":
                return val
            sub, root = next(p.sub for p in pieces if p.kind == DENDRITE), val
        return Nested(root, resolve_depth)

    def eval(self, p: DendritePoint, resolve_depth: int | None = None):
        if isinstance(p, ArcPoint) and p.arc in ROOT_ARCS:
            return self.eval_limit_f(p.t, resolve_depth)
        return self.fmap.eval(p)

    def root_arc_cover(self, level_cut: int, stage: int | None = None) -> frozenset[str]:
        """Arcs up to ``level_cut`` covered by ``F_mod`` of one root arc.

        Linear targets of the stage table plus every S-arc inside its
        subdendrite pieces, exact as a set.
        """
        if stage is None:
            stage = min(level_cut, 6)
        table = self.build_stage(stage)
        arcs = {p.code for p in table.pieces if p.kind == LINEAR and len(p.code) <= level_cut}
        for root in {p.code for p in table.pieces if p.kind == DENDRITE}:
            for node in _s_nodes_below(root, level_cut, self.codes):
                if len(node) > len(root):
                    arcs.add(node)
        return frozenset(arcs)

    def diameter(self, value) -> Fraction:
        kind, v = value
        return subtree_diameter(v, self.codes) if kind == "tree" else Fraction(0)


def _s_nodes_below(root: str, depth_cut: int, codes: CodeTable):
    stack = [root]
    while stack:
        u = stack.pop()
        yield u
        if len(u) < depth_cut:
            stack.extend(codes.s_children(u))


def contains(outer, inner) -> bool:
    """Set inclusion between stage values (points and subtrees)."""
    ko, vo = outer
    ki, vi = inner
    if ko == "point":
        return ki == "point" and vo == vi
    if ki == "tree":
        return vi.startswith(vo)
    if isinstance(vi, Node):
        return vi.code.startswith(vo)
    return vi.arc.startswith(vo) and len(vi.arc) > len(vo)


@dataclass
class StageReport:
    stage: int
    samples: int
    nesting_failures: list[str] = field(default_factory=list)
    diameter_failures: list[str] = field(default_factory=list)
    chain_failures: list[str] = field(default_factory=list)
    boundary_failures: list[str] = field(default_factory=list)
    surjectivity_failures: list[str] = field(default_factory=list)
    points_checked: int = 0

    @property
    def passed(self) -> bool:
        return not (self.nesting_failures or self.diameter_failures or self.chain_failures
                    or self.boundary_failures or self.surjectivity_failures)

    def as_dict(self) -> dict:
        return {
            "stage": self.stage, "samples": self.samples, "passed": self.passed,
            "points_checked": self.points_checked,
            "nesting_failures": self.nesting_failures[:10],
            "diameter_failures": self.diameter_failures[:10],
            "chain_failures": self.chain_failures[:10],
            "boundary_failures": self.boundary_failures[:10],
            "surjectivity_failures": self.surjectivity_failures[:10],
        }


def sample_positions(count: int, seed: int = 0, max_den: int = 10 ** 6) -> list[Fraction]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        q = rng.randint(1, max_den)
        out.append(Fraction(rng.randint(0, q), q))
    return out


def stage_check(emap: ExactMap, n: int, samples: int = 1000, seed: int = 0) -> StageReport:
    """Check the stage sequence ``F_0 .. F_n`` against the limit-map conditions.

    Nesting, the absolute bound ``diam F_k(x) <= 4**-k`` and the chain
    ``diam F_{k+1}(x) <= diam F_k(x) / 4`` are checked at every cutpoint of
    every stage plus ``samples`` random positions.  Surjectivity is an exact
    arc-set inclusion.  Boundary agreement is enforced when values are read.
    """
    report = StageReport(n, samples)
    codes = emap.codes
    points = set(sample_positions(samples, seed))
    for k in range(n + 1):
        points.update(emap.build_stage(k).cutpoints())
    points = sorted(points)
    report.points_checked = len(points)
    for t in points:
        prev = None
        for k in range(n + 1):
            try:
                cur = emap.value(k, t)
            except ConstructionError as exc:
                report.boundary_failures.append(f"stage {k}, t={t}: {exc}")
                break
            diam = emap.diameter(cur)
            if diam > Fraction(1, 4 ** k):
                report.diameter_failures.append(f"stage {k}, t={t}: diam {diam}")
            if prev is not None:
                if not contains(prev, cur):
                    report.nesting_failures.append(f"stage {k}, t={t}: {cur} not in {prev}")
                if 4 * diam > emap.diameter(prev):
                    report.chain_failures.append(
                        f"stage {k}, t={t}: diam {diam} > diam {emap.diameter(prev)} / 4")
            prev = cur
    for k in range(n + 1):
        table = emap.build_stage(k)
        linear = {p.code for p in table.pieces if p.kind == LINEAR}
        roots = {p.code for p in table.pieces if p.kind == DENDRITE}
        level = _s_nodes_below("", k, codes)
        for node in level:
            if node and node not in linear:
                report.surjectivity_failures.append(f"stage {k}: arc {node} not covered")
            if len(node) == k and node not in roots:
                report.surjectivity_failures.append(f"stage {k}: subtree {node!r} not covered")
    return report
