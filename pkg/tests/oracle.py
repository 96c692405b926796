"""Brute-force reference evaluator for F and F_mod.

Rebuilds codes, S, targets, cutpoints and path positions from the raw level
graphs and bonding maps.  Paths are walked arc by arc with running length
sums instead of closed forms.  Only the presentation object is shared with
the package.
"""
from __future__ import annotations

import math
from fractions import Fraction


class Oracle:
    def __init__(self, seq):
        self.levels = [list(g.cells) for g in seq.levels]
        self.edges = [set(g.edges) for g in seq.levels]
        self.up = [None] + [dict(h.mapping) for h in seq.homs]
        self.D = len(self.levels) - 1
        self.code = {(0, self.levels[0][0]): ""}
        self.n = [0]
        for i in range(1, self.D + 1):
            width = len(self.levels[i])
            self.n.append(self.n[-1] + width)
            for parent in self.levels[i - 1]:
                kids = [c for c in self.levels[i] if self.up[i][c] == parent]
                bits = math.ceil(math.log2(len(kids))) if len(kids) > 1 else 0
                for j, kid in enumerate(kids):
                    word = (format(j, "b").zfill(bits) if bits else "").ljust(width, "0")
                    self.code[(i, kid)] = self.code[(i - 1, parent)] + word
        self.cell = {c: key for key, c in self.code.items()}
        self.S = {c[:k] for (i, _), c in self.code.items() if i == self.D
                  for k in range(len(c) + 1)}

    # --- basic pieces ---------------------------------------------------

    def level(self, d: int) -> int:
        return next(i for i in range(1, self.D + 1) if d <= self.n[i])

    def succ(self, i: int, cell: str) -> list[str]:
        return [v for v in self.levels[i] if (cell, v) in self.edges[i]]

    def image_of_point(self, code: str) -> str:
        i, cell = self.cell[code]
        if i <= 1:
            return ""
        return self.code[(i - 1, self.up[i][self.succ(i, cell)[0]])]

    def image_of_node(self, code: str) -> str:
        if code in self.cell:
            return self.image_of_point(code)
        return self.image_of_point(code[:self.n[self.level(len(code)) - 1]])

    def e_arc(self, i: int, cell: str) -> str:
        c = self.code[(i, cell)]
        return c + "0" if c + "0" in self.S else c + "1"

    def targets(self, arc: str) -> tuple[list[tuple[str, str]], bool]:
        d = len(arc)
        i = self.level(d)
        upper = arc[:self.n[i - 1]]
        if d < self.n[i]:
            top = self.image_of_node(upper)
            return [(top, self.code[(i, w)]) for w in self.levels[i]
                    if self.code[(i, w)].startswith(top)], False
        _, cell = self.cell[arc]
        im = self.image_of_point(arc)
        legs = [(im, self.e_arc(i, w)) for w in self.succ(i, cell)]
        if i == 1:
            return legs, False
        return [(self.image_of_node(arc[:-1]), im)] + legs, True

    # --- walking paths --------------------------------------------------

    @staticmethod
    def walk(start: str, end: str) -> list[tuple[str, bool]]:
        """Arcs of the geodesic in order, with a flag for downward travel."""
        k = 0
        while k < min(len(start), len(end)) and start[k] == end[k]:
            k += 1
        up = [(start[:j], False) for j in range(len(start), k, -1)]
        down = [(end[:j], True) for j in range(k + 1, len(end) + 1)]
        return up + down

    def point_on(self, start: str, end: str, s: Fraction):
        """Point at fraction ``s`` of the path length, as a normalized tuple."""
        arcs = self.walk(start, end)
        lengths = [Fraction(1, 4 ** len(a)) for a, _ in arcs]
        goal = s * sum(lengths, Fraction(0))
        run = Fraction(0)
        for (a, down), ln in zip(arcs, lengths):
            if goal <= run + ln:
                u = (goal - run) / ln
                return normal(a, u if down else 1 - u)
            run += ln
        return ("node", end)

    # --- F -----------------------------------------------------------------

    def F(self, arc: str, t: Fraction):
        paths, lead = self.targets(arc)
        pieces = []
        if lead:
            pieces.append((paths[0], False))
            paths = paths[1:]
        for p in paths:
            pieces += [(p, False), (p, True)]
        N = len(pieces)
        j = min(int(t * N), N - 1)
        s = t * N - j
        (a, b), rev = pieces[j]
        return self.point_on(a, b, 1 - s if rev else s)

    # --- the limit map on a root arc ------------------------------------

    def f(self, t: Fraction):
        lo, hi, root = Fraction(0), Fraction(1), ""
        while len(root) < self.n[-1]:
            kids = [root + b for b in "01" if root + b in self.S]
            if len(kids) == 1:
                kids = kids * 2
            step = (hi - lo) / 8
            marks = [lo + step * k for k in range(9)]
            parts = []
            for kid, base in zip(kids, (0, 4)):
                parts += [("up", kid, marks[base], marks[base + 1]),
                          ("tree", kid, marks[base + 1], marks[base + 3]),
                          ("down", kid, marks[base + 3], marks[base + 4])]
            linear = [p for p in parts if p[0] != "tree" and p[2] <= t <= p[3]]
            if linear:
                kind, kid, a, b = linear[0]
                s = (t - a) / (b - a)
                return normal(kid, s if kind == "up" else 1 - s)
            _, root, lo, hi = next(p for p in parts if p[2] <= t <= p[3])
        return ("nested", root)


def normal(arc: str, u: Fraction):
    if u == 0:
        return ("node", arc[:-1])
    if u == 1:
        return ("node", arc)
    return ("arc", arc, u)


def as_tuple(p):
    """Package point objects in the oracle's tuple form."""
    from gehman.dendrite import ArcPoint, Node
    from gehman.exact_mod import Nested

    if isinstance(p, Node):
        return ("node", p.code)
    if isinstance(p, ArcPoint):
        return ("arc", p.arc, p.t)
    if isinstance(p, Nested):
        return ("nested", p.code)
    raise TypeError(p)
