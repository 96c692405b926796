"""System descriptions and the assembled construction."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

from .cover_core import (
    DEFAULT_EXTENSION_BOUND,
    CoverSequence,
    Subshift,
    ValidationReport,
    build_subshift_presentation,
    explicit_presentation,
    check_thread,
    validate_presentation,
)
from .dendrite import (
    CodeTable,
    DendritePoint,
    Endpoint,
    Node,
    Skeleton,
    assign_codes,
    build_skeleton,
    on_arc,
)
from .dynamics_f import FMap
from .errors import DepthRangeError, GehmanError, StructuralError
from .exact_mod import ExactMap, Nested

SYSTEM_KINDS = ("full_shift", "sft", "explicit_covers")


class InvalidPresentation(GehmanError):
    def __init__(self, report: ValidationReport):
        super().__init__("presentation fails validation:\n" + str(report))
        self.report = report


@dataclass(frozen=True)
class SystemSpec:
    system: dict[str, Any]
    depth: int
    code_policy: str = "balanced"
    extension_bound: int = DEFAULT_EXTENSION_BOUND

    @classmethod
    def from_dict(cls, data: dict) -> "SystemSpec":
        try:
            system = dict(data["system"])
            kind = system["type"]
        except (KeyError, TypeError):
            raise StructuralError("spec needs a 'system' object with a 'type'") from None
        if kind not in SYSTEM_KINDS:
            raise StructuralError(f"unknown system type {kind!r}; expected one of {SYSTEM_KINDS}")
        if kind == "explicit_covers":
            depth = int(data.get("depth", len(system.get("levels", [])) - 1))
        else:
            if "depth" not in data:
                raise StructuralError("spec needs 'depth'")
            depth = int(data["depth"])
        if kind == "full_shift" and int(system.get("symbols", 0)) < 2:
            raise StructuralError("full_shift needs 'symbols' >= 2")
        if kind == "sft":
            words = system.get("forbidden", [])
            if not isinstance(words, list) or not all(isinstance(w, str) and w for w in words):
                raise StructuralError("sft 'forbidden' must be a list of nonempty strings")
        if depth < 0:
            raise StructuralError("depth must be non-negative")
        return cls(system, depth, data.get("code_policy", "balanced"),
                   int(data.get("extension_bound", DEFAULT_EXTENSION_BOUND)))

    @classmethod
    def load(cls, path) -> "SystemSpec":
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise StructuralError(f"spec is not valid JSON: {exc}") from None

    def as_dict(self) -> dict:
        return {"system": self.system, "depth": self.depth,
                "code_policy": self.code_policy, "extension_bound": self.extension_bound}

    def canonical_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def presentation(self) -> CoverSequence:
        kind = self.system["type"]
        if kind == "full_shift":
            shift = Subshift.full(int(self.system["symbols"]))
        elif kind == "sft":
            shift = Subshift.sft(self.system["alphabet"], self.system.get("forbidden", []))
        else:
            levels = self.system.get("levels")
            homs = self.system.get("homs")
            if not isinstance(levels, list) or not isinstance(homs, list):
                raise StructuralError("explicit_covers needs 'levels' and 'homs' lists")
            if self.depth > len(levels) - 1:
                raise StructuralError(f"depth {self.depth} exceeds the {len(levels)} given levels")
            return explicit_presentation(levels[:self.depth + 1], homs[:self.depth])
        return build_subshift_presentation(shift, self.depth, self.extension_bound)


@dataclass
class GehmanSystem:
    """Presentation, codes and both maps for one spec."""

    seq: CoverSequence
    codes: CodeTable
    spec: SystemSpec | None = None
    report: ValidationReport | None = None
    _skeletons: dict[int, Skeleton] = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, spec: SystemSpec) -> "GehmanSystem":
        seq = spec.presentation()
        report = validate_presentation(seq)
        if not report.passed:
            raise InvalidPresentation(report)
        return cls(seq, assign_codes(seq, spec.code_policy), spec, report)

    @classmethod
    def full_shift(cls, k: int = 2, depth: int = 2) -> "GehmanSystem":
        return cls.build(SystemSpec({"type": "full_shift", "symbols": k}, depth))

    @property
    def depth(self) -> int:
        return self.seq.depth

    @property
    def n(self) -> list[int]:
        return self.codes.n

    @cached_property
    def F(self) -> FMap:
        return FMap(self.seq, self.codes)

    @cached_property
    def Fmod(self) -> ExactMap:
        return ExactMap(self.F)

    def skeleton(self, depth_cut: int | None = None) -> Skeleton:
        if depth_cut is None:
            depth_cut = self.codes.max_depth
        if depth_cut not in self._skeletons:
            self._skeletons[depth_cut] = build_skeleton(self.codes, depth_cut)
        return self._skeletons[depth_cut]

    def map_for(self, kind: str):
        if kind == "F":
            return self.F
        if kind in ("Fmod", "F_mod"):
            return self.Fmod
        raise StructuralError(f"unknown map {kind!r}; expected F or Fmod")

    def parse_point(self, desc: str) -> DendritePoint:
        """Read ``root``, ``node=<bits>``, ``arc=<bits>,t=<p/q>`` or ``end=<cell>/<cell>/...``."""
        desc = desc.strip()
        try:
            if desc == "root":
                return Node("")
            if desc.startswith("node="):
                code = desc[5:]
                self._check_code(code)
                return Node(code)
            if desc.startswith("arc="):
                arc, _, rest = desc[4:].partition(",")
                if not rest.startswith("t="):
                    raise ValueError("expected ',t=<p/q>' after the arc code")
                self._check_code(arc)
                return on_arc(arc, Fraction(rest[2:]))
            if desc.startswith("end="):
                cells = [c for c in desc[4:].split("/") if c]
                thread = (self.seq.cells(0)[0], *cells)
                check_thread(thread, self.seq)
                return Endpoint(thread)
        except (ValueError, ZeroDivisionError, GehmanError) as exc:
            raise StructuralError(f"bad point descriptor {desc!r}: {exc}") from None
        raise StructuralError(f"bad point descriptor {desc!r}: expected root, node=, arc= or end=")

    def _check_code(self, code: str) -> None:
        if set(code) - {"0", "1"}:
            raise ValueError("codes are binary strings")
        if len(code) > self.codes.max_depth:
            raise DepthRangeError(f"depth {len(code)} beyond n_D = {self.codes.max_depth}")
        if not self.codes.in_s(code):
            raise ValueError(f"{code!r} is not in S")

    def orbit(self, point: DendritePoint, steps: int, kind: str = "F") -> tuple[list, str]:
        """Iterates ``point, g(point), ...`` and a notice if the orbit stopped early."""
        g = self.map_for(kind)
        out: list = [point]
        for k in range(steps):
            cur = out[-1]
            if isinstance(cur, Nested):
                return out, f"step {k}: value is only known as a subtree at depth {cur.depth}"
            if isinstance(cur, Endpoint) and len(cur.thread) == 1:
                return out, f"step {k}: endpoint thread exhausted the trusted levels"
            try:
                out.append(g.eval(cur))
            except DepthRangeError as exc:
                return out, f"step {k + 1}: left the trusted depth ({exc})"
        return out, ""
