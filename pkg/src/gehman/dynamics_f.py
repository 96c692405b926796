"""The pure-mixing map F on S as exact per-arc linearity tables.

Every S-arc at tree depth ``d`` with ``n_{i-1} < d <= n_i`` lies on a path
from a level-``(i-1)`` point to a level-``i`` point.  Its table depends on
its class:

* ``A``: the arc does not end at a level point.  The arc is cut into ``2k``
  equal pieces folded over the paths from ``F(upper point)`` down to every
  level-``i`` point below it.
* ``B``: terminal arc into a level-1 point ``U``.  ``2k`` pieces folded over
  ``[c, phi(W)] + e_W`` for ``W`` related to ``U``.
* ``C``: terminal arc into a level-``i`` point, ``i >= 2``.  One orientation
  preserving piece over ``[F(b), F(phi(U))]`` followed by ``2k`` folded pieces
  over ``[F(phi(U)), phi(W)] + e_W``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .cover_core import CoverSequence, thread_successor
from .dendrite import (
    ArcPoint,
    CodeTable,
    DendritePoint,
    Endpoint,
    Node,
    TreePath,
    arc_len,
    build_skeleton,
)
from .errors import AmbiguityError, ConstructionError, DepthRangeError

PRESERVE, REVERSE = "preserve", "reverse"
CASE_A, CASE_B, CASE_C = "A", "B", "C"


@dataclass(frozen=True)
class StretchPiece:
    sub: tuple[Fraction, Fraction]
    target: TreePath
    orientation: str
    lam: Fraction

    def image(self, t: Fraction) -> Union[Node, ArcPoint]:
        a, b = self.sub
        s = (t - a) / (b - a)
        if self.orientation == REVERSE:
            s = 1 - s
        if s == 0:
            return Node(self.target.start)
        if s == 1:
            return Node(self.target.end)
        return self.target.locate(s * self.target.total_len)

    @property
    def start(self):
        return self.image(self.sub[0])

    @property
    def end(self):
        return self.image(self.sub[1])


@dataclass(frozen=True)
class LinearityTable:
    arc: str
    pieces: tuple[StretchPiece, ...]
    case_tag: str

    def locate(self, t: Fraction) -> list[StretchPiece]:
        """Pieces whose closed subinterval contains ``t`` (two at a cutpoint)."""
        n = len(self.pieces)
        k = min(int(t * n), n - 1)
        hits = [self.pieces[k]]
        if t == self.pieces[k].sub[0] and k > 0:
            hits.insert(0, self.pieces[k - 1])
        return hits

    def cutpoints(self) -> list[Fraction]:
        return [p.sub[0] for p in self.pieces] + [Fraction(1)]


@dataclass(frozen=True)
class FamilySets:
    level: int
    cell: str
    w_ad: tuple[str, ...]
    w_rel: tuple[str, ...]
    e_choice: dict[str, str]


def equal_cuts(n: int) -> list[tuple[Fraction, Fraction]]:
    return [(Fraction(j, n), Fraction(j + 1, n)) for j in range(n)]


class FMap:
    """F for a validated presentation and its code table."""

    def __init__(self, seq: CoverSequence, codes: CodeTable):
        self.seq = seq
        self.codes = codes
        self._tables: dict[str, LinearityTable] = {}
        self._class_targets: dict[tuple, tuple] = {}
        self._covers: dict[tuple, frozenset[str]] = {}

    # -- points -----------------------------------------------------------

    def branch_image(self, code: str) -> str:
        """Code of ``F(c_phi(U))`` for a level point ``code``."""
        if not code:
            return ""
        if code not in self.codes.cell_at:
            raise ConstructionError(f"{code!r} is not a level point")
        level, cell = self.codes.cell_at[code]
        if level == 1:
            return ""
        succ = self.seq.successors(level, cell)
        images = {self.seq.parent(level, w) for w in succ}
        if len(images) != 1:
            raise AmbiguityError(
                f"successors {succ} of {cell} (level {level}) lie in {sorted(images)}")
        return self.codes.code(level - 1, images.pop())

    def node_image(self, code: str) -> str:
        if len(code) > self.codes.max_depth:
            raise DepthRangeError(f"node at depth {len(code)} beyond n_D")
        if not code or code in self.codes.cell_at:
            return self.branch_image(code)
        if not self.codes.in_s(code):
            raise ConstructionError(f"node {code!r} is not in S")
        i = self.codes.level_of_depth(len(code))
        return self.branch_image(code[:self.codes.n[i - 1]])

    # -- families ---------------------------------------------------------

    def e_choice(self, level: int, cell: str) -> str:
        """Descending arc below ``phi(cell)`` towards its least child code."""
        if level + 1 > self.seq.depth:
            raise DepthRangeError(f"e_W for a level-{level} cell needs level {level + 1}")
        return self.codes.s_children(self.codes.code(level, cell))[0]

    def w_ad(self, level: int, prefix: str) -> tuple[str, ...]:
        return tuple(w for w in self.seq.cells(level)
                     if self.codes.code(level, w).startswith(prefix))

    def family_sets(self, level: int, cell: str) -> FamilySets:
        if level + 1 > self.seq.depth:
            raise DepthRangeError(f"family sets of a level-{level} cell need level {level + 1}")
        image = self.branch_image(self.codes.code(level, cell))
        ad = self.w_ad(level, image)
        rel = tuple(self.seq.successors(level, cell))
        return FamilySets(level, cell, ad, rel, {w: self.e_choice(level, w) for w in ad + rel})

    # -- tables -----------------------------------------------------------

    def classify(self, arc: str) -> tuple[str, tuple]:
        """Case tag and class key of an S-arc; arcs with equal keys share targets."""
        if not arc:
            raise ConstructionError("the root is not an arc")
        d = len(arc)
        if d > self.codes.max_depth:
            raise DepthRangeError(f"arc at depth {d} beyond n_D = {self.codes.max_depth}")
        if not self.codes.in_s(arc):
            raise ConstructionError(f"arc {arc!r} is not in S")
        i = self.codes.level_of_depth(d)
        upper = arc[:self.codes.n[i - 1]]
        if d < self.codes.n[i]:
            return CASE_A, ("A", upper)
        if i + 1 > self.seq.depth:
            raise DepthRangeError(
                f"terminal arc into level {i} needs level {i + 1} for e_W; built depth {self.seq.depth}")
        return (CASE_B if i == 1 else CASE_C), ("T", arc)

    def class_targets(self, key: tuple) -> tuple[TreePath, ...]:
        """Target paths of a class, in table order (the ``I_0`` path first for case C)."""
        if key in self._class_targets:
            return self._class_targets[key]
        kind, code = key
        if kind == "A":
            top = self.node_image(code)
            i = self.codes.cell_at[code][0] + 1
            targets = tuple(TreePath(top, self.codes.code(i, w)) for w in self.w_ad(i, top))
        else:
            level, cell = self.codes.cell_at[code]
            image = self.branch_image(code)
            rel = self.seq.successors(level, cell)
            legs = tuple(TreePath(image, self.e_choice(level, w)) for w in rel)
            if level == 1:
                targets = legs
            else:
                targets = (TreePath(self.node_image(code[:-1]), image),) + legs
        if not targets:
            raise ConstructionError(f"class {key} has no targets")
        self._class_targets.setdefault(key, targets)
        return self._class_targets[key]

    def edge_table(self, arc: str) -> LinearityTable:
        if arc in self._tables:
            return self._tables[arc]
        case, key = self.classify(arc)
        targets = self.class_targets(key)
        src = arc_len(arc)
        pieces = []
        if case == CASE_C:
            folded = targets[1:]
            cuts = equal_cuts(2 * len(folded) + 1)
            p0 = targets[0]
            pieces.append(StretchPiece(cuts[0], p0, PRESERVE, _lam(p0, cuts[0], src)))
            cuts = cuts[1:]
        else:
            folded = targets
            cuts = equal_cuts(2 * len(folded))
        for j, path in enumerate(folded):
            for sub, orient in ((cuts[2 * j], PRESERVE), (cuts[2 * j + 1], REVERSE)):
                pieces.append(StretchPiece(sub, path, orient, _lam(path, sub, src)))
        table = LinearityTable(arc, tuple(pieces), case)
        _check_table(table, self.node_image(arc[:-1]), self.node_image(arc))
        return self._tables.setdefault(arc, table)

    # -- evaluation -------------------------------------------------------

    def eval(self, p: DendritePoint) -> DendritePoint:
        if isinstance(p, Endpoint):
            return Endpoint(thread_successor(p.thread, self.seq))
        if isinstance(p, Node):
            return Node(self.node_image(p.code))
        table = self.edge_table(p.arc)
        values = {piece.image(p.t) for piece in table.locate(p.t)}
        if len(values) != 1:
            raise ConstructionError(f"pieces disagree at {p}: {values}")
        return values.pop()

    # -- combinatorics ----------------------------------------------------

    def class_cover(self, key: tuple) -> frozenset[str]:
        if key not in self._covers:
            arcs = set()
            for path in self.class_targets(key):
                arcs.update(path.arcs)
            self._covers.setdefault(key, frozenset(arcs))
        return self._covers[key]

    def arc_cover_set(self, arc: str) -> frozenset[str]:
        """Every arc contained in the union of the table's target paths."""
        return self.class_cover(self.classify(arc)[1])

    def stretch_stats(self, depth_cut: int) -> "StretchReport":
        skel = build_skeleton(self.codes, min(depth_cut, self.codes.max_depth))
        per_case: dict[str, list[Fraction]] = {}
        low = []
        count = 0
        for arc in skel.arcs_to(depth_cut):
            table = self.edge_table(arc)
            lams = [p.lam for p in table.pieces]
            count += len(lams)
            bucket = per_case.setdefault(table.case_tag, [])
            bucket.append(min(lams))
            bucket.append(max(lams))
            low.extend((arc, lam) for lam in lams if lam <= Fraction(5, 4))
        non_top = [self.edge_table(a) for a in skel.arcs_to(depth_cut) if len(a) > 1]
        deep_min = min((p.lam for t in non_top for p in t.pieces), default=None)
        return StretchReport(
            depth_cut=depth_cut,
            pieces=count,
            by_case={c: (min(v), max(v)) for c, v in sorted(per_case.items())},
            overall=(min(x for v in per_case.values() for x in v),
                     max(x for v in per_case.values() for x in v)),
            min_below_level_one=deep_min,
            flagged=low,
        )


@dataclass
class StretchReport:
    depth_cut: int
    pieces: int
    by_case: dict[str, tuple[Fraction, Fraction]]
    overall: tuple[Fraction, Fraction]
    min_below_level_one: Fraction | None
    flagged: list[tuple[str, Fraction]]

    @property
    def passed(self) -> bool:
        deep_ok = self.min_below_level_one is None or self.min_below_level_one > 4
        return not self.flagged and deep_ok


def _lam(path: TreePath, sub: tuple[Fraction, Fraction], src: Fraction) -> Fraction:
    return path.total_len / ((sub[1] - sub[0]) * src)


def _check_table(table: LinearityTable, top: str, bottom: str) -> None:
    pieces = table.pieces
    if pieces[0].sub[0] != 0 or pieces[-1].sub[1] != 1:
        raise ConstructionError(f"{table.arc}: pieces do not cover [0, 1]")
    for left, right in zip(pieces, pieces[1:]):
        if left.sub[1] != right.sub[0]:
            raise ConstructionError(f"{table.arc}: gap at {left.sub[1]}")
        if left.end != right.start:
            raise ConstructionError(f"{table.arc}: discontinuity at {left.sub[1]}")
    if pieces[0].start != Node(top) or pieces[-1].end != Node(bottom):
        raise ConstructionError(f"{table.arc}: endpoints do not match node images")
