"""Command-line front end.

Subcommands: realize, sweep, critical, rigidity, flex-trace, dof.
Exit codes: 0 success (including zero realizations), 2 input error,
3 precondition failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from typing import List, Optional

import numpy as np

from . import rigidity as rg
from . import solver
from .dof import FaceVector, dof_balance
from .errors import InputError, InvalidLengths, PreconditionError
from .geometry import CONGRUENCE_TOL, EdgeLengthSet, normalize_to_standard

CSV_HEADER = ("alpha", "branch", "ec2", "z3sq", "base_class", "admissible")
COORD_NAMES = ("x1", "y1", "x2", "y2", "x3", "y3", "z3")

_SQRT = re.compile(r"^\s*sqrt\(\s*([^()]+?)\s*\)\s*$")


def parse_length(text) -> float:
    """A decimal literal or ``sqrt(N)``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _SQRT.match(text)
    try:
        value = math.sqrt(float(m.group(1))) if m else float(text)
    except ValueError as exc:
        raise InvalidLengths(f"cannot parse length {text!r}") from exc
    return value


def _parse_lengths(items, allow_missing_l7=False) -> list:
    items = list(items)
    if allow_missing_l7 and len(items) == 7:
        items = items[:6] + [None] + items[6:]
    if len(items) != 8:
        raise InvalidLengths(f"expected 8 lengths, got {len(items)}")
    out = []
    for i, t in enumerate(items):
        if i == 6 and allow_missing_l7 and (t is None or str(t).strip() in {"-", "_", "?"}):
            out.append(None)
        else:
            out.append(parse_length(t))
    return out


def _g15(v: float) -> str:
    return format(float(v), ".15g")


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _emit_json(obj, out):
    json.dump(obj, out, indent=2, sort_keys=False, allow_nan=True)
    out.write("\n")


# --------------------------------------------------------------------------

def _load_problem(args):
    opts = {}
    if args.problem:
        try:
            with open(args.problem) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read problem file: {exc}") from exc
        if not isinstance(data, dict) or "lengths" not in data:
            raise InputError("problem file needs a 'lengths' array")
        lengths = data["lengths"]
        opts = dict(data.get("options") or {})
        if not isinstance(lengths, list):
            raise InputError("'lengths' must be an array")
    else:
        lengths = args.lengths
    return lengths, opts


def cmd_realize(args, out) -> int:
    raw, opts = _load_problem(args)
    L = EdgeLengthSet.from_sequence(_parse_lengths(raw))
    grid = int(opts.get("grid", args.grid))
    tol = float(opts.get("tol", args.tol))
    ctol = float(opts.get("congruence_tol", args.congruence_tol))
    incl = bool(opts.get("include_degenerate", args.include_degenerate))
    found = solver.find_realizations(L, grid=grid, tol=tol, congruence_tol=ctol,
                                     include_degenerate=incl)
    records = []
    for r in found:
        res = rg.residuals(r.coords, L)
        rec = {"alpha": float(r.alpha)}
        rec.update({k: float(v) for k, v in zip(COORD_NAMES, r.scaled_coords())})
        rec["residual_norm"] = float(np.linalg.norm(res))
        rec["base_class"] = r.base_class.value
        records.append(rec)
    if args.format == "json":
        _emit_json({"lengths": list(L.as_tuple()), "count": len(records),
                    "realizations": records}, out)
        return 0
    out.write(f"count {len(records)}\n")
    for i, rec in enumerate(records, 1):
        fields = " ".join(f"{k}={_g15(rec[k])}" for k in ("alpha",) + COORD_NAMES + ("residual_norm",))
        out.write(f"[{i}] {fields} base_class={rec['base_class']}\n")
    return 0


def cmd_sweep(args, out) -> int:
    lengths = _parse_lengths(args.lengths, allow_missing_l7=True)
    lo, hi = args.range
    if not lo < hi:
        prof = None
    else:
        prof = solver.ec_profile(lengths, alpha_range=(lo, hi), n=args.grid)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    if prof is None:
        return 0
    mask = prof.admissible_mask()
    names = {0: "convex", 1: "nonconvex", 2: "selfint", 3: "degenerate"}
    for i, a in enumerate(prof.alphas):
        for b in (0, 1):
            w.writerow((_g17(a), b, _g17(prof.ec2[b, i]), _g17(prof.z3sq[i]),
                        names[int(prof.classes[b, i])], int(mask[b, i])))
    return 0


def cmd_critical(args, out) -> int:
    lengths = _parse_lengths(args.lengths, allow_missing_l7=True)
    prof = solver.ec_profile(lengths, n=args.grid)
    cps = solver.critical_points(prof)
    if args.format == "json":
        _emit_json({"critical_points": [
            {"kind": c.kind, "alpha": c.alpha, "value": c.value} for c in cps]}, out)
        return 0
    out.write(f"count {len(cps)}\n")
    for c in cps:
        out.write(f"{c.kind} alpha={_g15(c.alpha)} ec2={_g15(c.value)}\n")
    return 0


BUILTINS = {
    "flex": rg.FLEX_BASE_POINT,
    "square": np.array([0.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0]),
}


def _coords_from_args(args) -> np.ndarray:
    if args.points is not None:
        pts = np.array([parse_length(v) for v in args.points]).reshape(5, 3)
        _, r = normalize_to_standard(*pts)
        return r.coords
    if args.coords is not None:
        return np.array([parse_length(v) for v in args.coords])
    return np.array(BUILTINS[args.builtin], dtype=float)


def _lengths_from_args(args, c) -> EdgeLengthSet:
    if args.lengths is not None:
        return EdgeLengthSet.from_sequence(_parse_lengths(args.lengths))
    return rg.measured_lengths(c)


def cmd_rigidity(args, out) -> int:
    c = _coords_from_args(args)
    L = _lengths_from_args(args, c)
    rep = rg.rigidity_verdict(c, L, rank_tol=args.rank_tol)
    if args.format == "json":
        _emit_json({"coords": dict(zip(COORD_NAMES, map(float, c))),
                    "residuals": dict(zip(rg.CONSTRAINT_NAMES, map(float, rep.residuals))),
                    "singular_values": [float(s) for s in rep.singular_values],
                    "kernel_dim": rep.kernel_dim, "verdict": rep.verdict.value}, out)
        return 0
    out.write(f"verdict={rep.verdict.value} kernel_dim={rep.kernel_dim}\n")
    out.write("singular_values " + " ".join(_g15(s) for s in rep.singular_values) + "\n")
    out.write("residuals " + " ".join(f"{n}={_g15(v)}" for n, v in
                                      zip(rg.CONSTRAINT_NAMES, rep.residuals)) + "\n")
    return 0


def cmd_flex_trace(args, out) -> int:
    c = _coords_from_args(args)
    L = _lengths_from_args(args, c)
    directions = {"both": (-1, 1), "forward": (1,), "backward": (-1,)}[args.direction]
    rows = []
    reasons = {}
    for d in directions:
        tr = rg.trace_family(c, L, steps=args.steps, h=args.step_size, direction=d,
                             y1_window=args.y1_window)
        reasons[d] = tr.stop_reason.value if tr.stop_reason else "completed"
        pts = tr.points if d == directions[0] else tr.points[1:]
        for k, p in enumerate(pts):
            step = k if d == directions[0] else k + 1
            res = float(np.max(np.abs(rg.residuals(p, L))))
            rows.append((d * step, p, res))
    rows.sort(key=lambda t: t[0])
    if args.format == "json":
        _emit_json({"stop_reasons": {str(k): v for k, v in reasons.items()},
                    "samples": [dict(step=s, **dict(zip(COORD_NAMES, map(float, p))),
                                     max_residual=r) for s, p, r in rows]}, out)
        return 0
    out.write("step " + " ".join(COORD_NAMES) + " max_residual\n")
    for s, p, r in rows:
        out.write(f"{s} " + " ".join(_g15(v) for v in p) + f" {_g15(r)}\n")
    for d, why in reasons.items():
        out.write(f"# direction {d:+d}: {why}\n")
    return 0


def cmd_dof(args, out) -> int:
    F = FaceVector.parse(args.faces, args.pinned)
    b = dof_balance(F)
    if args.format == "json":
        _emit_json({"e": b.e, "v": b.v, "k": b.k, "freedoms": b.freedoms,
                    "relations": b.relations, "balanced": b.balanced}, out)
        return 0
    out.write(f"freedoms={b.freedoms} relations={b.relations} balanced={str(b.balanced).lower()}\n")
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=solver.GRID, help="grid sub-intervals (default 8192)")
    common.add_argument("--tol", type=float, default=solver.RESIDUAL_TOL,
                        help="residual tolerance of the Newton polish")
    common.add_argument("--congruence-tol", type=float, default=CONGRUENCE_TOL)
    common.add_argument("--include-degenerate", action="store_true")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="random seed (reserved for batch runs)")

    parser = argparse.ArgumentParser(
        prog="qpyramid",
        description="Realizations and rigidity of labelled quadrangular pyramids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", parents=[common],
                       help="enumerate convex realizations of 8 edge lengths")
    p.add_argument("lengths", nargs="*",
                   help="|AB| |BC| |CD| |DA| |EA| |EB| |EC| |ED|; 'sqrt(N)' accepted")
    p.add_argument("--problem", help="JSON problem file with 'lengths' and optional 'options'")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("sweep", parents=[common], help="CSV profile of |EC|^2 over the base angle")
    p.add_argument("lengths", nargs="+", help="7 lengths, or 8 with '-' in place of |EC|")
    p.add_argument("--range", nargs=2, type=float, default=(0.0, math.pi), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("critical", parents=[common], help="critical points of the |EC|^2 profile")
    p.add_argument("lengths", nargs="+", help="7 lengths, or 8 with '-' in place of |EC|")
    p.set_defaults(func=cmd_critical)

    for name, func, help_ in (("rigidity", cmd_rigidity, "rigidity matrix diagnostics"),
                              ("flex-trace", cmd_flex_trace, "continue a flex of the pyramid")):
        p = sub.add_parser(name, parents=[common], help=help_)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--coords", nargs=7, metavar="C", help="x1 y1 x2 y2 x3 y3 z3")
        g.add_argument("--points", nargs=15, metavar="P", help="A B C D E as 15 numbers")
        g.add_argument("--builtin", choices=sorted(BUILTINS), default="flex")
        p.add_argument("--lengths", nargs=8, metavar="L", help="target lengths (default: measured)")
        p.add_argument("--rank-tol", type=float, default=rg.RANK_TOL)
        p.set_defaults(func=func)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--step-size", type=float, default=0.01)
    p.add_argument("--direction", choices=("both", "forward", "backward"), default="both")
    p.add_argument("--y1-window", nargs=2, type=float, default=None, metavar=("LO", "HI"))

    p = sub.add_parser("dof", parents=[common], help="freedom/relation census of a face vector")
    p.add_argument("faces", help="face vector as size:count pairs, e.g. 3:4,4:1")
    p.add_argument("--pinned", type=int, default=None, help="size of the pinned face (default: largest)")
    p.set_defaults(func=cmd_dof)
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "realize" and not args.problem and not args.lengths:
            raise InputError("give 8 lengths or --problem FILE")
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
