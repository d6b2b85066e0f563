"""Command-line front end.

Exit status: 0 on success, 2 when results carry numerical warnings
(unbracketed b search, unconverged levels, failed oracle comparison),
1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import DislospecError
from .fd_oracle import GridSpec, fd_lowest, richardson
from .model import ModelParams
from .optimize import Objective, OptimizeConfig, optimize_b
from .sweep import SpectrumRecord, converge, detect_crossings, lambda_grid, sweep

SCHEMA_VERSION = 1
CSV_COLUMNS = ["lambda", "m", "level", "energy", "b_opt", "M", "N", "converged"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _num(x: float) -> float:
    return float(fmt(x))


def parse_range(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"lambda range must be start:stop:step, got {text!r}") from None
    try:
        return lambda_grid(start, stop, step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_mlist(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"m must be an integer or comma-separated list, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dislospec", description="Spectrum of the harmonic oscillator with a screw dislocation.")
    sub = p.add_subparsers(dest="command")

    def common(sp, *, levels=8, fmt_default="csv"):
        sp.add_argument("--levels", type=int, default=levels, help="number of lowest levels R (default %(default)s)")
        sp.add_argument("--M", type=int, default=10, help="radial basis size (default %(default)s)")
        sp.add_argument("--N", type=int, default=10, help="axial basis size (default %(default)s)")
        sp.add_argument(
            "--objective",
            choices=[o.value for o in Objective],
            default=Objective.LOWEST.value,
            help="b-optimisation target (default %(default)s)",
        )
        sp.add_argument("--K", type=int, default=1, help="level count for sum-of-lowest-K")
        sp.add_argument("--r", type=int, default=0, help="level index for target-level-r")
        sp.add_argument("--b-tol", type=float, default=1e-8, help="golden-section tolerance on b")
        sp.add_argument("--conv-tol", type=float, default=1e-3, help="truncation error bound for 'converged'")
        sp.add_argument("--format", choices=["csv", "json"], default=fmt_default)
        sp.add_argument("--output", "-o", default="-", help="output file ('-' = stdout)")

    sp = sub.add_parser("spectrum", help="levels at a single lambda")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0)
    sp.add_argument("--m", type=int, default=0)
    common(sp)

    sp = sub.add_parser("sweep", help="levels on a lambda grid")
    sp.add_argument("--m", default="0", help="m or comma-separated m list")
    sp.add_argument("--lambda-range", default="0:5:0.025")
    common(sp)

    sp = sub.add_parser("crossings", help="avoided crossings on a lambda grid")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--lambda-range", default="0:2:0.01")
    sp.add_argument("--refine-tol", type=float, default=1e-5)
    common(sp, fmt_default="json")

    sp = sub.add_parser("converge", help="basis-size convergence study")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-size", type=int, default=20)
    common(sp, levels=6)

    sp = sub.add_parser("oracle-check", help="compare Rayleigh-Ritz against finite differences")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--grid", type=int, default=200, help="fine FD grid points per direction")
    sp.add_argument("--box", type=float, default=7.0)
    sp.add_argument("--rel-tol", type=float, default=5e-3)
    sp.add_argument("--tol", type=float, default=1e-6, help="RR convergence tolerance")
    common(sp, levels=1, fmt_default="json")
    return p


def _config(args) -> OptimizeConfig:
    return OptimizeConfig(objective=args.objective, b_tolerance=args.b_tol, K=args.K, r=args.r)


def records_to_rows(records: list[SpectrumRecord]) -> list[dict]:
    rows = []
    for rec in sorted(records, key=lambda r: (r.m, r.lam)):
        for lvl, E in enumerate(rec.energies):
            rows.append(
                {
                    "lambda": _num(rec.lam),
                    "m": rec.m,
                    "level": lvl,
                    "energy": _num(E),
                    "b_opt": _num(rec.b_opt),
                    "M": rec.M,
                    "N": rec.N,
                    "converged": bool(rec.converged),
                }
            )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [
                fmt(r["lambda"]),
                r["m"],
                r["level"],
                fmt(r["energy"]),
                fmt(r["b_opt"]),
                r["M"],
                r["N"],
                "true" if r["converged"] else "false",
            ]
        )
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        out.append(
            {
                "lambda": float(r["lambda"]),
                "m": int(r["m"]),
                "level": int(r["level"]),
                "energy": float(r["energy"]),
                "b_opt": float(r["b_opt"]),
                "M": int(r["M"]),
                "N": int(r["N"]),
                "converged": r["converged"] == "true",
            }
        )
    return out


def _json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2, allow_nan=True) + "\n"


def _emit_records(args, records, command) -> str:
    rows = records_to_rows(records)
    if args.format == "csv":
        return rows_to_csv(rows)
    return _json({"command": command, "records": rows})


def _status(records) -> int:
    if any(r.failed for r in records):
        return 1
    if any(r.warning or not r.converged for r in records):
        return 2
    return 0


def cmd_spectrum(args):
    recs = sweep(args.m, [args.lam], args.levels, args.M, args.N, _config(args), conv_tol=args.conv_tol)
    return _emit_records(args, recs, "spectrum"), _status(recs)


def cmd_sweep(args):
    grid = parse_range(args.lambda_range)
    recs = []
    for m in parse_mlist(args.m):
        recs += sweep(m, grid, args.levels, args.M, args.N, _config(args), conv_tol=args.conv_tol)
    return _emit_records(args, recs, "sweep"), _status(recs)


def cmd_crossings(args):
    grid = parse_range(args.lambda_range)
    cfg = _config(args)
    recs = sweep(args.m, grid, args.levels, args.M, args.N, cfg, conv_tol=args.conv_tol)
    reports = detect_crossings(recs, args.refine_tol, cfg)
    items = []
    for c in reports:
        d = c.to_json()
        d["lambda_star"], d["gap"] = _num(d["lambda_star"]), _num(d["gap"])
        items.append(d)
    status = _status(recs)
    if any(c.status != "avoided" for c in reports):
        status = max(status, 2)
    if args.format == "json":
        text = _json({"command": "crossings", "crossings": items})
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "lower_level", "upper_level", "lambda_star", "gap", "multiplet_origin", "status"])
        for d in items:
            origin = ";".join(d["multiplet_origin"] or [])
            w.writerow([d["m"], d["lower_level"], d["upper_level"], fmt(d["lambda_star"]), fmt(d["gap"]), origin, d["status"]])
        text = buf.getvalue()
    return text, status


def cmd_converge(args):
    rec = converge(args.m, args.lam, args.levels, args.tol, max_size=args.max_size, cfg=_config(args))
    return _emit_records(args, [rec], "converge"), _status([rec])


def cmd_oracle_check(args):
    rr = converge(args.m, args.lam, args.levels, args.tol, max_size=14, cfg=_config(args))
    params = ModelParams(args.lam, args.m)
    fine = GridSpec(args.box, args.box, args.grid, args.grid)
    coarse = GridSpec(args.box, args.box, args.grid // 2, args.grid // 2)
    fd_c = fd_lowest(params, coarse, args.levels)
    fd_f = fd_lowest(params, fine, args.levels)
    fd_x = richardson(fd_c, fd_f)
    rel = np.abs(rr.energies - fd_x) / np.abs(fd_x)
    ok = bool(np.all(rel <= args.rel_tol))
    payload = {
        "command": "oracle-check",
        "lambda": _num(args.lam),
        "m": args.m,
        "rr": [_num(x) for x in rr.energies],
        "rr_M": rr.M,
        "rr_N": rr.N,
        "fd_coarse": [_num(x) for x in fd_c],
        "fd_fine": [_num(x) for x in fd_f],
        "fd_extrapolated": [_num(x) for x in fd_x],
        "relative_difference": [_num(x) for x in rel],
        "rel_tol": args.rel_tol,
        "agree": ok,
    }
    if args.format == "json":
        text = _json(payload)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "m", "level", "rr", "fd_extrapolated", "relative_difference"])
        for lvl in range(len(fd_x)):
            w.writerow([fmt(args.lam), args.m, lvl, fmt(rr.energies[lvl]), fmt(fd_x[lvl]), fmt(rel[lvl])])
        text = buf.getvalue()
    return text, 0 if ok else 2


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "crossings": cmd_crossings,
    "converge": cmd_converge,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        if args.levels < 1 or args.M < 1 or args.N < 1:
            raise UsageError("--levels, --M and --N must be positive")
        if args.levels > args.M * args.N:
            raise UsageError(f"--levels {args.levels} exceeds basis dimension {args.M * args.N}")
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dislospec: error: {exc}", file=sys.stderr)
        return 1
    except (DislospecError, ValueError, ArithmeticError) as exc:
        print(f"dislospec: error: {exc}", file=sys.stderr)
        return 1

    if args.output == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"dislospec: error: cannot write {args.output}: {exc}", file=sys.stderr)
            return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
