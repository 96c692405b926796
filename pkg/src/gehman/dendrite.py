"""Coded Gehman subdendrite: codes, skeleton, points, paths and metric.

Arcs are named by binary strings.  Arc ``w`` joins node ``w[:-1]`` to node
``w`` and has length ``4 ** -len(w)``.  The root is the empty string.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .cover_core import CoverSequence
from .errors import ConstructionError, DepthRangeError


def arc_len(code: str) -> Fraction:
    return _quarter_power(len(code))


@lru_cache(maxsize=None)
def _quarter_power(k: int) -> Fraction:
    return Fraction(1, 4 ** k)


@lru_cache(maxsize=None)
def height(depth: int) -> Fraction:
    """Distance from the root to a node at ``depth``."""
    return (1 - Fraction(1, 4 ** depth)) / 3


def tail(depth: int) -> Fraction:
    """Length of one infinite descending ray below a node at ``depth``."""
    return Fraction(1, 3 * 4 ** depth)


def common_prefix(a: str, b: str) -> str:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return a[:n]


# ---------------------------------------------------------------------------
# code assignment


@dataclass
class CodeTable:
    phi: dict[tuple[int, str], str]
    n: list[int]
    child_codes: dict[tuple[int, str], str]
    cell_at: dict[str, tuple[int, str]] = field(default_factory=dict)
    suffixes: dict[tuple[int, str], list[str]] = field(default_factory=dict)
    head_bits: dict[tuple[int, str], int] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.n) - 1

    @property
    def max_depth(self) -> int:
        return self.n[-1]

    def code(self, level: int, cell: str) -> str:
        return self.phi[(level, cell)]

    def level_of_depth(self, d: int) -> int:
        """Partition level ``i`` with ``n_{i-1} < d <= n_i`` (0 for the root)."""
        if d == 0:
            return 0
        for i in range(1, len(self.n)):
            if d <= self.n[i]:
                return i
        raise DepthRangeError(f"tree depth {d} exceeds built depth n_D = {self.n[-1]}")

    def is_level_point(self, code: str) -> bool:
        return code in self.cell_at

    def in_s(self, code: str) -> bool:
        """Whether the node (equivalently the arc) ``code`` lies in S."""
        if not code:
            return True
        i = self.level_of_depth(len(code))
        parent = code[:self.n[i - 1]]
        if parent not in self.cell_at:
            return False
        rest = code[self.n[i - 1]:]
        return any(s.startswith(rest) for s in self.suffixes[self.cell_at[parent]])

    def s_children(self, code: str) -> list[str]:
        """Children of node ``code`` inside S, in the order 0, 1."""
        if len(code) >= self.n[-1]:
            raise DepthRangeError(f"children of depth-{len(code)} nodes need level {self.depth + 1}")
        return [code + b for b in "01" if self.in_s(code + b)]


def assign_codes(seq: CoverSequence, policy: str = "balanced") -> CodeTable:
    """Binary codes for every cell, concatenated level by level.

    The ``j``-th child of a parent with ``m`` children gets the ``ceil(log2 m)``
    bit binary form of ``j`` followed by zeros up to ``|U_{i+1}|`` bits.
    """
    if policy != "balanced":
        raise ConstructionError(f"unknown code policy {policy!r}")
    root = seq.cells(0)[0]
    phi = {(0, root): ""}
    n = [0]
    child_codes: dict[tuple[int, str], str] = {}
    suffixes: dict[tuple[int, str], list[str]] = {}
    head_bits: dict[tuple[int, str], int] = {}
    for i in range(seq.depth):
        width = len(seq.cells(i + 1))
        n.append(n[-1] + width)
        for parent in seq.cells(i):
            kids = seq.children(i, parent)
            bits = math.ceil(math.log2(len(kids))) if len(kids) > 1 else 0
            if len(kids) > 2 ** width:
                raise ConstructionError(f"{parent}: {len(kids)} children do not fit {width} bits")
            made = []
            for j, kid in enumerate(kids):
                head = format(j, f"0{bits}b") if bits else ""
                omega = head + "0" * (width - bits)
                child_codes[(i + 1, kid)] = omega
                phi[(i + 1, kid)] = phi[(i, parent)] + omega
                made.append(omega)
            suffixes[(i, parent)] = made
            head_bits[(i, parent)] = bits
    cell_at = {}
    for key, code in phi.items():
        if code in cell_at:
            raise ConstructionError(f"duplicate code {code!r} for {cell_at[code]} and {key}")
        cell_at[code] = key
    return CodeTable(phi, n, child_codes, cell_at, suffixes, head_bits)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Node:
    code: str

    def __str__(self) -> str:
        return f"node={self.code}" if self.code else "root"


@dataclass(frozen=True)
class ArcPoint:
    """Point strictly inside arc ``arc`` at relative position ``t`` from its top."""

    arc: str
    t: Fraction

    def __str__(self) -> str:
        return f"arc={self.arc},t={self.t.numerator}/{self.t.denominator}"


@dataclass(frozen=True)
class Endpoint:
    thread: tuple[str, ...]

    def __str__(self) -> str:
        return "end=" + "/".join(self.thread[1:])


DendritePoint = Union[Node, ArcPoint, Endpoint]


def on_arc(arc: str, t) -> Union[Node, ArcPoint]:
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"position {t} outside [0, 1]")
    if not arc:
        if t:
            raise ValueError("the root is a node, not an arc")
        return Node("")
    if t == 0:
        return Node(arc[:-1])
    if t == 1:
        return Node(arc)
    return ArcPoint(arc, t)


def _anchor(p: Union[Node, ArcPoint]) -> tuple[str, Fraction]:
    if isinstance(p, Node):
        return p.code, height(len(p.code))
    return p.arc, height(len(p.arc) - 1) + p.t * arc_len(p.arc)


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class TreePath:
    """Geodesic from node ``start`` to node ``end``."""

    start: str
    end: str

    @property
    def apex(self) -> str:
        return common_prefix(self.start, self.end)

    @property
    def arcs(self) -> list[str]:
        top = len(self.apex)
        up = [self.start[:k] for k in range(len(self.start), top, -1)]
        down = [self.end[:k] for k in range(top + 1, len(self.end) + 1)]
        return up + down

    @property
    def total_len(self) -> Fraction:
        top = height(len(self.apex))
        return height(len(self.start)) + height(len(self.end)) - 2 * top

    def locate(self, dist: Fraction) -> Union[Node, ArcPoint]:
        """The point at path-distance ``dist`` from ``start``."""
        if dist < 0 or dist > self.total_len:
            raise ValueError(f"distance {dist} outside path of length {self.total_len}")
        a = len(self.apex)
        up_len = height(len(self.start)) - height(a)
        if dist <= up_len:
            # climbing: distance from apex is up_len - dist
            return _descend(self.start, a, up_len - dist)
        return _descend(self.end, a, dist - up_len)

    def reversed(self) -> "TreePath":
        return TreePath(self.end, self.start)


def _descend(code: str, top: int, x: Fraction) -> Union[Node, ArcPoint]:
    """Point at distance ``x`` below depth ``top`` on the ray towards ``code``."""
    if x == 0:
        return Node(code[:top])
    # smallest k with height(k) - height(top) >= x, i.e. 4**-k <= 4**-top - 3x
    rest = Fraction(1, 4 ** top) - 3 * x
    if rest <= 0:
        raise ValueError("distance beyond the end of the ray")
    num, den = rest.numerator, rest.denominator
    k = max(top + 1, (den.bit_length() - num.bit_length()) // 2 - 1)
    while num << (2 * k) < den:
        k += 1
    if k > len(code):
        raise ValueError("distance beyond the end of the path")
    t = (x - (height(k - 1) - height(top))) * 4 ** k
    return on_arc(code[:k], t)


def path_between(u: str, v: str) -> TreePath:
    return TreePath(u, v)


# ---------------------------------------------------------------------------
# metric


@dataclass(frozen=True)
class Distance:
    """Truncated distance ``value`` with the true distance in ``[value - error, value + error]``."""

    value: Fraction
    error: Fraction = Fraction(0)

    @property
    def upper(self) -> Fraction:
        return self.value + self.error


def _resolve(p: DendritePoint, codes: CodeTable, truncation: int | None):
    if isinstance(p, Endpoint):
        level = len(p.thread) - 1
        code = codes.code(level, p.thread[-1])
        if truncation is not None and truncation < len(code):
            code = code[:truncation]
        return Node(code), tail(len(code))
    code = p.code if isinstance(p, Node) else p.arc
    if len(code) > codes.max_depth or not codes.in_s(code):
        raise DepthRangeError(f"point {p} is not resolvable in the built skeleton")
    return p, Fraction(0)


def point_distance(p: Union[Node, ArcPoint], q: Union[Node, ArcPoint]) -> Fraction:
    a, ra = _anchor(p)
    b, rb = _anchor(q)
    g = common_prefix(a, b)
    if g == a or g == b:
        # one anchor arc lies on the root path of the other point
        return abs(ra - rb)
    return ra + rb - 2 * height(len(g))


def metric(p: DendritePoint, q: DendritePoint, codes: CodeTable,
           truncation: int | None = None) -> Distance:
    """Taxicab distance; endpoints are cut at tree depth ``truncation``."""
    if p == q:
        return Distance(Fraction(0))
    pp, ep = _resolve(p, codes, truncation)
    qq, eq = _resolve(q, codes, truncation)
    return Distance(point_distance(pp, qq), ep + eq)


def subdendrite_diameter_bound(code: str) -> tuple[Fraction, Fraction]:
    """Bounds on the diameter of the full subtree below a depth-``N`` node.

    Returns ``(2/3 * 4**-N, 4**-N)``: twice one descending ray, and the
    coarser bound by the whole length of one level.
    """
    N = len(code)
    return 2 * tail(N), Fraction(1, 4 ** N)


def subtree_diameter(code: str, codes: CodeTable) -> Fraction:
    """Exact diameter of the S-subdendrite rooted at ``code``.

    S branches below every node, so the diameter is two rays if ``code``
    itself branches and one ray (from ``code`` down) otherwise.
    """
    if len(codes.s_children(code)) == 2:
        return 2 * tail(len(code))
    return tail(len(code))


# ---------------------------------------------------------------------------
# skeleton

ROOT, LEVEL_POINT, BRANCH, CHAIN = "root", "level-point", "S-branch", "chain"


@dataclass
class Skeleton:
    depth_cut: int
    nodes: list[str]
    arcs: list[str]
    node_kind: dict[str, str]

    def arc_len(self, code: str) -> Fraction:
        return arc_len(code)

    def arcs_to(self, depth: int) -> list[str]:
        return [a for a in self.arcs if len(a) <= depth]

    def layout(self) -> dict[str, tuple[Fraction, int]]:
        """Tidy layout: leaves ranked left to right, parents centred over children."""
        kids: dict[str, list[str]] = {c: [] for c in self.nodes}
        for a in self.arcs:
            kids[a[:-1]].append(a)
        pos: dict[str, tuple[Fraction, int]] = {}
        rank = 0

        def place(u: str) -> Fraction:
            nonlocal rank
            if not kids[u]:
                x = Fraction(rank)
                rank += 1
            else:
                xs = [place(v) for v in kids[u]]
                x = (xs[0] + xs[-1]) / 2
            pos[u] = (x, len(u))
            return x

        stack_limit = _enough_recursion(self.depth_cut)
        with stack_limit:
            place("")
        return pos


class _enough_recursion:
    def __init__(self, depth: int):
        import sys
        self.sys = sys
        self.want = depth + 200

    def __enter__(self):
        self.old = self.sys.getrecursionlimit()
        if self.old < self.want:
            self.sys.setrecursionlimit(self.want)

    def __exit__(self, *exc):
        self.sys.setrecursionlimit(self.old)


def iter_s_nodes(codes: CodeTable, depth_cut: int) -> Iterator[str]:
    """All S nodes down to ``depth_cut``, in lexicographic (preorder) order."""
    stack = [""]
    while stack:
        u = stack.pop()
        yield u
        if len(u) < depth_cut:
            stack.extend(reversed(codes.s_children(u)))


def build_skeleton(codes: CodeTable, depth_cut: int | None = None) -> Skeleton:
    if depth_cut is None:
        depth_cut = codes.max_depth
    if depth_cut > codes.max_depth:
        raise DepthRangeError(f"depth_cut {depth_cut} beyond n_D = {codes.max_depth}")
    nodes = list(iter_s_nodes(codes, depth_cut))
    kinds = {}
    for u in nodes:
        if not u:
            kinds[u] = ROOT
        elif codes.is_level_point(u):
            kinds[u] = LEVEL_POINT
        elif len(codes.s_children(u)) == 2:
            kinds[u] = BRANCH
        else:
            kinds[u] = CHAIN
    arcs = sorted(u for u in nodes if u)
    return Skeleton(depth_cut, nodes, arcs, kinds)
