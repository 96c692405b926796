"""Command line: build, eval, orbit, verify, export.

Exit status is 0 on success, 1 when a checked property fails and 2 on usage
or structural errors.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .errors import DepthRangeError, GehmanError, NotCantorError
from .export import (
    codes_record,
    dumps,
    export_json,
    export_svg,
    map_pieces,
    presentation_record,
    skeleton_record,
    stage_pieces,
)
from .system import GehmanSystem, InvalidPresentation, SystemSpec
from . import verify as V

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CHECKS = ("cover", "conjugacy", "stretch", "mixing", "pure", "exact", "nadler", "continuity")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# build


def _default_cut(system: GehmanSystem) -> int:
    return system.n[1] if system.depth >= 1 else 0


def cmd_build(args) -> int:
    spec = SystemSpec.load(args.input)
    out = Path(args.output)
    manifest_path = out / "manifest.json"
    if manifest_path.exists() and not args.force:
        old = json.loads(manifest_path.read_text())
        if old.get("spec_hash") == spec.content_hash:
            print(f"up to date: {out} (spec {spec.content_hash[:12]})")
            return EXIT_OK
    system = GehmanSystem.build(spec)
    out.mkdir(parents=True, exist_ok=True)
    cut = _default_cut(system)
    table_cut = min(cut + 1, system.codes.max_depth)
    stage = min(6, system.codes.max_depth)
    files = {
        "spec.json": dumps(spec.as_dict()),
        "presentation.json": dumps(presentation_record(system)),
        "codes.json": dumps(codes_record(system)),
        "skeleton.json": dumps(skeleton_record(system.skeleton(cut))),
        "maps.json": dumps({
            "depth_cut": table_cut,
            "pieces": map_pieces(system, system.skeleton(table_cut).arcs),
            "stage": stage,
            "stage_pieces": stage_pieces(system, stage),
        }),
    }
    for name, text in files.items():
        (out / name).write_text(text)
    manifest = {
        "tool": "gehman", "version": __version__,
        "spec_hash": spec.content_hash,
        "depth": system.depth,
        "n": system.n,
        "level_sizes": [len(system.seq.cells(i)) for i in range(system.depth + 1)],
        "skeleton_depth_cut": cut,
        "map_depth_cut": table_cut,
        "files": {k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(files.items())},
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    manifest_path.write_text(dumps(manifest))
    print(f"built {out}: depth {system.depth}, n = {system.n}")
    return EXIT_OK


def load_built(directory: str) -> GehmanSystem:
    d = Path(directory)
    try:
        manifest = json.loads((d / "manifest.json").read_text())
        spec = SystemSpec.from_dict(json.loads((d / "spec.json").read_text()))
    except FileNotFoundError:
        raise UsageError(f"{d} holds no build; run 'build' first") from None
    if manifest.get("spec_hash") != spec.content_hash:
        raise UsageError(f"{d}: manifest does not match spec.json; rebuild")
    return GehmanSystem.build(spec)


# ---------------------------------------------------------------------------
# eval / orbit


def cmd_eval(args) -> int:
    system = load_built(args.dir)
    point = system.parse_point(args.point)
    print(system.map_for(args.map).eval(point))
    return EXIT_OK


def cmd_orbit(args) -> int:
    system = load_built(args.dir)
    points, note = system.orbit(system.parse_point(args.point), args.steps, args.map)
    for k, p in enumerate(points):
        print(f"{k}\t{p}")
    if note:
        print(f"stopped: {note}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def run_check(system: GehmanSystem, args) -> V.Report:
    check = args.check
    if check == "cover":
        return V.cover_check(system)
    if check == "conjugacy":
        return V.conjugacy_check(system, args.depth)
    if check == "stretch":
        return V.stretch_check(system, args.level_cut)
    if check == "mixing":
        cut = args.level_cut if args.level_cut is not None else system.n[-1]
        return V.flood(system, [args.start], cut, args.max_iter, "F")
    if check == "pure":
        n_max = args.n_max if args.n_max is not None else max(2 * system.depth - 1, 0)
        return V.pure_mixing_witness(system, args.start, n_max)
    if check == "exact":
        return V.exact_check(system, args.level_cut)
    if check == "nadler":
        stages = args.stages if args.stages is not None else min(6, system.codes.max_depth)
        return V.nadler_check(system, stages, args.samples or 1000, args.seed)
    depth = args.depth if args.depth is not None else system.depth - 1
    return V.continuity_modulus(system, args.samples or 200, depth, args.seed)


def cmd_verify(args) -> int:
    system = load_built(args.dir)
    report = run_check(system, args)
    if args.json:
        print(json.dumps(report.as_dict(timings=not args.no_timings), sort_keys=True, indent=1))
    else:
        print(report.summary())
        for w in report.witnesses[:20]:
            print(f"  witness: {w}")
        print(f"  ({report.seconds:.2f} s)")
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# export


def cmd_export(args) -> int:
    system = load_built(args.dir)
    cut = args.depth if args.depth is not None else _default_cut(system)
    if cut > system.codes.max_depth:
        raise DepthRangeError(f"depth {cut} beyond n_D = {system.codes.max_depth}")
    orbit = None
    if args.orbit:
        desc, sep, steps = args.orbit.rpartition(":")
        if not sep or not steps.isdigit():
            raise UsageError("--orbit expects <point>:<steps>")
        orbit = system.orbit(system.parse_point(desc), int(steps), args.map)
    if args.format == "json":
        stage = args.stage if args.stage is not None else min(4, system.codes.max_depth)
        text = dumps(export_json(system, cut, stage, orbit))
    else:
        text = export_svg(system, cut, orbit)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gehman", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="validate a system spec and write build artifacts")
    p.add_argument("-i", "--input", required=True, help="system spec (JSON)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--force", action="store_true", help="rebuild even if the spec is unchanged")
    p.set_defaults(func=cmd_build)

    def with_dir(q):
        q.add_argument("-d", "--dir", default=".", help="build directory")
        return q

    def with_map(q):
        q.add_argument("--map", choices=("F", "Fmod"), default="F")
        return q

    p = with_map(with_dir(sub.add_parser("eval", help="evaluate one point")))
    p.add_argument("--point", required=True, help="root | node=<bits> | arc=<bits>,t=<p/q> | end=<cells>")
    p.set_defaults(func=cmd_eval)

    p = with_map(with_dir(sub.add_parser("orbit", help="print an orbit")))
    p.add_argument("--point", required=True)
    p.add_argument("--steps", type=int, default=5)
    p.set_defaults(func=cmd_orbit)

    p = with_dir(sub.add_parser("verify", help="run one finite-truncation check"))
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("--level-cut", type=int)
    p.add_argument("--max-iter", type=int, default=10)
    p.add_argument("--depth", type=int, help="thread depth (conjugacy) or agreement level (continuity)")
    p.add_argument("--n-max", type=int, help="steps for the pure-mixing witness")
    p.add_argument("--stages", type=int, help="stages for the nadler check")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", default="0", help="start arc for mixing and pure")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--no-timings", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = with_map(with_dir(sub.add_parser("export", help="write skeleton, tables and orbit")))
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.add_argument("--depth", type=int, help="skeleton depth cut (default n_1)")
    p.add_argument("--stage", type=int, help="F_mod stage table to include (json)")
    p.add_argument("--orbit", help="<point>:<steps>")
    p.add_argument("-o", "--output", help="file to write (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidPresentation as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    except NotCantorError as exc:
        msg = str(exc)
        print(msg if msg.startswith("not a Cantor") else f"not a Cantor system: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, GehmanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
