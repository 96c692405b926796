"""Finite-truncation checkers for the dynamical claims about F and F_mod.

Every report records the truncation it was computed at; nothing here
certifies an infinite-horizon property.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .cover_core import thread_successor
from .dendrite import (
    Endpoint,
    TreePath,
    metric,
    subdendrite_diameter_bound,
)
from .errors import DepthRangeError, GehmanError
from .exact_mod import ROOT_ARCS, stage_check
from .system import GehmanSystem


@dataclass
class Report:
    check: str
    params: dict[str, Any]
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)
    witnesses: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def as_dict(self, timings: bool = True) -> dict:
        out = {"check": self.check, "params": self.params, "passed": self.passed,
               "details": _jsonable(self.details), "witnesses": self.witnesses[:20]}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out

    def summary(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        bits = ", ".join(f"{k}={_short(v)}" for k, v in self.details.items())
        return f"[{mark}] {self.check} {self.params} {bits}"


def _short(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        if len(v) > 12:
            return f"[{len(v)} items]"
        return "[" + ", ".join(str(_short(x)) for x in v) + "]"
    return v


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


class _timed:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# ---------------------------------------------------------------------------
# flooding


def cover_of(system: GehmanSystem, arc: str, map_kind: str, level_cut: int) -> frozenset[str]:
    if map_kind in ("Fmod", "F_mod") and arc in ROOT_ARCS:
        return system.Fmod.root_arc_cover(level_cut)
    return system.F.arc_cover_set(arc)


def flood(system: GehmanSystem, start_arcs: Iterable[str], level_cut: int,
          max_iter: int = 10, map_kind: str = "F") -> Report:
    """Least ``n`` such that the closure after ``n`` steps holds every S-arc to ``level_cut``."""
    start = sorted(set(start_arcs))
    params = {"start": start, "level_cut": level_cut, "max_iter": max_iter, "map": map_kind}
    with _timed() as clock:
        target = set(system.skeleton(level_cut).arcs)
        covered = set(start)
        frontier = set(start)
        sizes, n_min, error = [], None, ""
        seen_classes: set = set()
        for n in range(1, max_iter + 1):
            new: set[str] = set()
            try:
                for arc in sorted(frontier):
                    if map_kind == "F" or arc not in ROOT_ARCS:
                        key = system.F.classify(arc)[1]
                        if key in seen_classes:
                            continue
                        seen_classes.add(key)
                    new |= cover_of(system, arc, map_kind, level_cut)
            except DepthRangeError as exc:
                error = str(exc)
                break
            frontier = new - covered
            covered |= new
            sizes.append(len(covered & target))
            if target <= covered:
                n_min = n
                break
    details = {"n_min": n_min, "covered_per_step": sizes, "target_arcs": len(target)}
    witnesses = [error] if error else []
    if n_min is None and not error:
        missing = sorted(target - covered, key=lambda a: (len(a), a))
        witnesses.append(f"uncovered after {max_iter} steps: {missing[:3]}")
    return Report("flood", params, n_min is not None, details, witnesses, clock.seconds)


# ---------------------------------------------------------------------------
# per-step images as unions of descending paths


def _classes_on_path(path: TreePath, n: list[int]) -> list[tuple]:
    lo, hi = len(path.start), len(path.end)
    out = []
    for i in range(1, len(n)):
        a, b = max(lo, n[i - 1]), min(hi, n[i])
        if a >= b:
            continue
        if a + 1 < n[i]:
            out.append(("A", path.end[:n[i - 1]]))
        if b == n[i]:
            out.append(("T", path.end[:n[i]]))
    return out


def count_arcs(paths: Iterable[TreePath], codes) -> int:
    """Number of distinct arcs in a union of descending paths, without listing chain arcs."""
    n = codes.n
    branch_keys: set = set()
    chains: dict[tuple, list[tuple[int, int]]] = {}
    for path in paths:
        lo, hi = len(path.start), len(path.end)
        for i in range(1, len(n)):
            a, b = max(lo, n[i - 1]), min(hi, n[i])
            if a >= b:
                continue
            parent = path.end[:n[i - 1]]
            head = codes.head_bits[codes.cell_at[parent]]
            suffix_start = n[i - 1]
            for k in range(a + 1, min(b, suffix_start + head) + 1):
                branch_keys.add((parent, path.end[suffix_start:k]))
            if b > suffix_start + head:
                key = (parent, path.end[suffix_start:suffix_start + head])
                chains.setdefault(key, []).append((max(a, suffix_start + head), b))
    total = len(branch_keys)
    for spans in chains.values():
        spans.sort()
        cur_lo, cur_hi = spans[0]
        for s_lo, s_hi in spans[1:]:
            if s_lo > cur_hi:
                total += cur_hi - cur_lo
                cur_lo, cur_hi = s_lo, s_hi
            else:
                cur_hi = max(cur_hi, s_hi)
        total += cur_hi - cur_lo
    return total


def image_paths(system: GehmanSystem, paths: Iterable[TreePath]) -> set[TreePath]:
    """Exact one-step image under F of a union of descending paths."""
    F = system.F
    out: set[TreePath] = set()
    classes = set()
    for p in paths:
        classes.update(_classes_on_path(p, system.codes.n))
    for key in sorted(classes):
        for target in F.class_targets(key):
            if not target.end.startswith(target.start):
                raise GehmanError(f"target {target} of {key} is not a descending path")
            if target.start != target.end:
                out.add(target)
    return out


def pure_mixing_witness(system: GehmanSystem, start_arc: str = "0", n_max: int = 4) -> Report:
    """Per-step images ``F^n(e)`` for ``n <= n_max`` as finite unions of arcs.

    Images are kept as sets of descending tree paths, which hold no endpoint
    of S by construction; each step's arc count is exact.
    """
    params = {"start_arc": start_arc, "n_max": n_max, "depth": system.depth}
    with _timed() as clock:
        paths = {TreePath(start_arc[:-1], start_arc)}
        sizes = [count_arcs(paths, system.codes)]
        deepest = [len(start_arc)]
        error = ""
        for _ in range(n_max):
            try:
                paths = image_paths(system, paths)
            except DepthRangeError as exc:
                error = str(exc)
                break
            sizes.append(count_arcs(paths, system.codes))
            deepest.append(max(len(p.end) for p in paths))
        endpoint_free = all(isinstance(p, TreePath) and len(p.end) <= system.codes.max_depth
                            for p in paths)
    finite = len(sizes) == n_max + 1
    details = {"arcs_per_step": sizes, "deepest_arc_per_step": deepest,
               "endpoint_free": endpoint_free,
               "monotone": all(a <= b for a, b in zip(sizes, sizes[1:]))}
    return Report("pure_mixing_witness", params, finite and endpoint_free, details,
                  [error] if error else [], clock.seconds)


# ---------------------------------------------------------------------------
# conjugacy


def conjugacy_check(system: GehmanSystem, depth: int | None = None) -> Report:
    """Commutation of branch images with the inverse-limit map on every thread."""
    seq, codes, F = system.seq, system.codes, system.F
    depth = seq.depth if depth is None else depth
    if depth > seq.depth:
        raise DepthRangeError(f"conjugacy depth {depth} beyond built depth {seq.depth}")
    witnesses: list[str] = []
    checked = 0
    with _timed() as clock:
        candidates = [seq.thread_of(depth - 1, w) for w in seq.cells(depth - 1)] if depth else []
        for t in seq.threads(depth):
            checked += 1
            name = "/".join(t)
            try:
                s = thread_successor(t, seq)
            except GehmanError as exc:
                witnesses.append(f"thread {name}: {exc}")
                continue
            if depth:
                # truncated threads stay adjacent at every level and are
                # witnessed by one edge out of the deepest coordinate
                tops = {seq.parent(depth, x) for x in seq.successors(depth, t[depth])}
                brute = [c for c in candidates if c[depth - 1] in tops
                         and all((t[i], c[i]) in seq.levels[i].edges for i in range(depth))]
                if brute != [s]:
                    witnesses.append(f"thread {name}: {len(brute)} compatible successor threads")
                    continue
            try:
                images = [F.branch_image(codes.code(i, t[i])) for i in range(depth + 1)]
            except GehmanError as exc:
                witnesses.append(f"thread {name}: {exc}")
                continue
            for i in range(1, depth + 1):
                if images[i] != codes.code(i - 1, s[i - 1]):
                    witnesses.append(f"thread {name}: F(phi(t_{i})) != phi(s_{i - 1})")
            for i in range(depth):
                if not images[i + 1].startswith(images[i]):
                    witnesses.append(f"thread {name}: image code at level {i} is not a prefix")
    return Report("conjugacy", {"depth": depth}, not witnesses,
                  {"threads": checked}, witnesses, clock.seconds)


# ---------------------------------------------------------------------------
# continuity


def _random_descent(system: GehmanSystem, level: int, cell: str, rng: random.Random) -> str:
    seq = system.seq
    while level < seq.depth:
        cell = rng.choice(seq.children(level, cell))
        level += 1
    return cell


def continuity_modulus(system: GehmanSystem, samples: int = 200, depth: int = 2,
                       seed: int = 0) -> Report:
    """Image distances of endpoint pairs that agree exactly to partition level ``depth``.

    The truncated image distance plus its remainder must not exceed the
    diameter bound of the subtree at the shared image node.
    """
    seq, codes = system.seq, system.codes
    N = depth
    if N < 1 or N + 1 > seq.depth:
        raise DepthRangeError(f"continuity at level {N} needs built depth >= {N + 1}")
    rng = random.Random(seed)
    witnesses: list[str] = []
    worst = Fraction(0)
    with _timed() as clock:
        for _ in range(samples):
            u = rng.choice(seq.cells(N))
            a, b = rng.sample(seq.children(N, u), 2)
            x = seq.thread_of(seq.depth, _random_descent(system, N + 1, a, rng))
            y = seq.thread_of(seq.depth, _random_descent(system, N + 1, b, rng))
            fx, fy = thread_successor(x, seq), thread_successor(y, seq)
            shared = fx[N - 1]
            if fy[N - 1] != shared:
                witnesses.append(f"images of {x[-1]}, {y[-1]} split above level {N - 1}")
                continue
            bound = subdendrite_diameter_bound(codes.code(N - 1, shared))[0]
            dist = metric(Endpoint(fx), Endpoint(fy), codes)
            worst = max(worst, dist.upper / bound)
            if dist.upper > bound:
                witnesses.append(f"{x[-1]}, {y[-1]}: {dist.upper} > {bound}")
        same = metric(Endpoint(x), Endpoint(x), codes).value
    details = {"pairs": samples, "worst_ratio": worst, "identical_distance": same,
               "bound_at_level": N - 1}
    return Report("continuity", {"samples": samples, "depth": N, "seed": seed},
                  not witnesses and same == 0, details, witnesses, clock.seconds)


# ---------------------------------------------------------------------------
# wrappers used by the command line


def cover_check(system: GehmanSystem) -> Report:
    from .cover_core import validate_presentation

    with _timed() as clock:
        rep = validate_presentation(system.seq)
    return Report("cover", {"depth": system.depth}, rep.passed,
                  {"checks": len(rep.results)},
                  [f"level {r.level}: {r.prop}: {r.witness}" for r in rep.failures()],
                  clock.seconds)


def stretch_check(system: GehmanSystem, depth_cut: int | None = None, stages: int = 8) -> Report:
    if depth_cut is None:
        depth_cut = system.n[1] + 1 if system.depth >= 2 else system.n[-1]
    with _timed() as clock:
        rep = system.F.stretch_stats(depth_cut)
        stage_lams = {p.lam for k in range(stages + 1)
                      for p in system.Fmod.build_stage(k).pieces if p.lam is not None}
    ok_mod = stage_lams == {Fraction(8)}
    details = {"F_min": rep.overall[0], "F_min_below_level_1": rep.min_below_level_one,
               "pieces": rep.pieces, "Fmod_stage_lambdas": sorted(stage_lams)}
    witnesses = [f"arc {a}: lambda {lam}" for a, lam in rep.flagged]
    return Report("stretch", {"depth_cut": depth_cut, "stages": stages},
                  rep.passed and ok_mod, details, witnesses, clock.seconds)


def exact_check(system: GehmanSystem, level_cut: int | None = None, stages: int = 8) -> Report:
    """Stage tables cover every S-arc to their depth; one F_mod step floods from a root arc."""
    if level_cut is None:
        level_cut = system.n[1]
    witnesses = []
    with _timed() as clock:
        for k in range(stages + 1):
            table = system.Fmod.build_stage(k)
            linear = {p.code for p in table.pieces if p.lam is not None}
            missing = [a for a in system.skeleton(min(k, system.codes.max_depth)).arcs
                       if a not in linear]
            if missing:
                witnesses.append(f"stage {k}: arc {missing[0]} uncovered")
        fl = flood(system, ["0"], level_cut, max_iter=3, map_kind="Fmod")
    ok = not witnesses and fl.details["n_min"] == 1
    return Report("exact", {"level_cut": level_cut, "stages": stages}, ok,
                  {"flood_n_min": fl.details["n_min"]}, witnesses + fl.witnesses, clock.seconds)


def nadler_check(system: GehmanSystem, stages: int = 6, samples: int = 1000, seed: int = 0) -> Report:
    from .dendrite import Node

    with _timed() as clock:
        rep = stage_check(system.Fmod, stages, samples, seed)
        f_fixed = [system.Fmod.eval_limit_f(t) for t in (Fraction(0), Fraction(1))]
    ok = rep.passed and all(v == Node("") for v in f_fixed)
    return Report("nadler", {"stages": stages, "samples": samples, "seed": seed}, ok,
                  {"points_checked": rep.points_checked},
                  (rep.nesting_failures + rep.diameter_failures + rep.chain_failures
                   + rep.boundary_failures + rep.surjectivity_failures)[:20],
                  clock.seconds)
