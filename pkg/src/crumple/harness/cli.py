"""``crumple`` command line: hull, bind, simulate, bench, snapshot decode.

Exit codes: 0 success, 1 usage, 2 I/O or unreadable input, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..binding import DEFAULT_ALPHA, compute_weights, save_binding
from ..errors import (
    BindingFormatError,
    CrumpleError,
    EmptyMeshError,
    ObjParseError,
    ScenarioError,
    SimulationDiverged,
    SnapshotDecodeError,
)
from ..geometry import build_control_mesh, load_obj, write_obj

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DIVERGED = 0, 1, 2, 3

_INPUT_ERRORS = (OSError, ObjParseError, EmptyMeshError, SnapshotDecodeError, BindingFormatError, ScenarioError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits with 2; that code is reserved for I/O failures here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_mesh(path):
    with open(path, "rb") as fh:
        return load_obj(fh)


def _cmd_hull(args):
    if args.points < 4:
        raise _UsageError("--points must be >= 4")
    mesh = _load_mesh(args.mesh)
    control, lod = build_control_mesh(mesh.vertices, args.points, args.mass)
    comment = f"control hull: {lod.achieved} points, {lod.n_triangles} triangles (requested {args.points})"
    if args.output:
        write_obj(args.output, lod.points, lod.triangles, comment=comment)
        print(f"{lod.achieved} points, {lod.n_triangles} triangles -> {args.output}")
    else:
        write_obj(sys.stdout, lod.points, lod.triangles, comment=comment)
    return EXIT_OK


def _cmd_bind(args):
    if not args.alpha > 0:
        raise _UsageError("--alpha must be > 0")
    mesh = _load_mesh(args.mesh)
    control = _load_mesh(args.hull).vertices
    table = compute_weights(mesh.vertices, control, args.alpha)
    out = args.output or str(Path(args.mesh).with_suffix(".crbw"))
    save_binding(out, table)
    print(f"{table.n_vertices} vertices x {table.n_controls} controls (alpha {table.alpha:g}) -> {out}")
    return EXIT_OK


def _cmd_simulate(args):
    from .run import front_rear_deformation, run_scenario

    result = run_scenario(args.scenario, out_dir=args.out)
    world = result.world
    front, rear = front_rear_deformation(world)
    print(f"steps           {len(result.reports)}")
    print(f"frames exported {len(result.frames_written)}")
    print(f"plastic events  {result.plastic_events}")
    print(f"final speed     {float((world.core.linear_velocity ** 2).sum() ** 0.5):.4g} m/s")
    print(f"front/rear dent {front:.4g} / {rear:.4g} m")
    print(f"artifacts       {args.out}")
    return EXIT_OK


def _parse_budgets(text):
    try:
        budgets = [int(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise _UsageError(f"--budgets must be comma-separated integers, got {text!r}") from None
    if not budgets or any(b < 4 for b in budgets) or budgets != sorted(budgets):
        raise _UsageError("--budgets must be ascending integers >= 4")
    return budgets


def _cmd_bench(args):
    from .bench import BENCH_HEADER, bench_scaling

    budgets = _parse_budgets(args.budgets)
    if args.steps < 1:
        raise _UsageError("--steps must be >= 1")
    mesh = _load_mesh(args.mesh)
    print(f"# {mesh.n_vertices} surface vertices, {args.steps} timed steps after warm-up")
    print(BENCH_HEADER)
    for row in bench_scaling(mesh, budgets, steps=args.steps):
        print(row.row())
    return EXIT_OK


def _cmd_snapshot_decode(args):
    from .snapshot import decode_snapshot

    with open(args.file, "rb") as fh:
        snap = decode_snapshot(fh.read())
    print(snap.describe())
    return EXIT_OK


def build_parser():
    p = _Parser(prog="crumple", description="Control-hull vehicle deformation tools.")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings such as budget clamping")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    h = sub.add_parser("hull", help="build a simplified convex control hull")
    h.add_argument("mesh")
    h.add_argument("--points", type=int, default=32, help="control-point budget (default 32)")
    h.add_argument("--mass", type=float, default=1000.0, help=argparse.SUPPRESS)
    h.add_argument("-o", "--output", help="output OBJ (default: stdout)")
    h.set_defaults(func=_cmd_hull)

    b = sub.add_parser("bind", help="compute inverse-distance weights to a CRBW file")
    b.add_argument("mesh")
    b.add_argument("hull", help="OBJ whose vertices are the control points")
    b.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    b.add_argument("-o", "--output", help="output .crbw (default: next to the mesh)")
    b.set_defaults(func=_cmd_bind)

    s = sub.add_parser("simulate", help="run a scenario file")
    s.add_argument("scenario")
    s.add_argument("--out", default="out", help="artifact directory (default ./out)")
    s.set_defaults(func=_cmd_simulate)

    n = sub.add_parser("bench", help="time stepping and surface sync per control budget")
    n.add_argument("mesh")
    n.add_argument("--budgets", default="8,16,32,64")
    n.add_argument("--steps", type=int, default=100)
    n.set_defaults(func=_cmd_bench)

    snap = sub.add_parser("snapshot", help="deformation snapshot tools")
    snap_sub = snap.add_subparsers(dest="action", parser_class=_Parser, required=True)
    d = snap_sub.add_parser("decode", help="print a snapshot in readable form")
    d.add_argument("file")
    d.set_defaults(func=_cmd_snapshot_decode)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"crumple: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationDiverged as exc:
        print(f"crumple: simulation diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except _INPUT_ERRORS as exc:
        print(f"crumple: {exc}", file=sys.stderr)
        return EXIT_IO
    except CrumpleError as exc:
        print(f"crumple: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
