"""Command-line front end.

    qswitch-ergo point    --kind product --beta 0.5 --beta-in 2
    qswitch-ergo sweep    --kind classical --beta 0.1,0.4 --beta-in 0:4:0.1
    qswitch-ergo region   --kind product --beta 0.1:3:0.1 --beta-in 0.1:3:0.1
    qswitch-ergo verify   [--tol 1e-15] [--n-max 5]
    qswitch-ergo optimize --beta 1 --beta-in 3
    qswitch-ergo compare  --beta 1 --beta-in 1 --samples 200 --seed 7

Single records are JSON, tables are CSV (see docs/FORMATS.md). Sweeps run in
parallel when QSWITCH_ERGO_THREADS is above one; row order never changes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .scenarios import (
    KINDS,
    THREADS_ENV,
    PurificationParams,
    compare_discord_entanglement,
    optimize_purification,
    region_map,
    run_point,
    sweep,
)
from .verification import DEFAULT_TOLERANCES, run_checks

SWEEP_COLUMNS = ("beta_in", "beta", "n", "kind", "w_d_numeric", "w_d_closed", "w_di", "w_dc")
REGION_COLUMNS = ("beta", "beta_in", "positive", "w_d", "checked", "w_d_numeric")
# Agreement required between analytic and recomputed region points.
REGION_CHECK_TOL = 1e-9


class CliError(Exception):
    pass


def parse_grid(spec: str) -> list[float]:
    """``min:max:step`` (inclusive), a comma list, or a single number."""
    spec = spec.strip()
    if not spec:
        raise CliError("empty grid")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise CliError(f"grid spec {spec!r} must look like min:max:step")
        lo, hi, step = (_number(p) for p in parts)
        if not lo < hi:
            raise CliError(f"grid spec {spec!r} needs min < max")
        if not step > 0:
            raise CliError(f"grid spec {spec!r} needs step > 0")
        count = int(math.floor((hi - lo) / step + 1e-9))
        # Multiply instead of accumulating, then drop representation noise.
        return [round(lo + k * step, 12) for k in range(count + 1)]
    return [_number(p) for p in spec.split(",")]


def _number(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise CliError(f"not a number: {text!r}") from None
    if math.isnan(x):
        raise CliError("NaN is not a valid parameter")
    return x


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def metadata(args, **extra) -> dict:
    meta = {
        "version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "tolerances": dict(DEFAULT_TOLERANCES) if getattr(args, "tol", None) is None
        else {k: args.tol for k in DEFAULT_TOLERANCES},
    }
    meta.update(extra)
    return meta


def to_json(meta: dict, result) -> str:
    return json.dumps({"metadata": meta, "result": result}, indent=2, sort_keys=True, allow_nan=False) + "\n"


def to_csv(meta: dict, columns, rows) -> str:
    buf = io.StringIO()
    for key in sorted(meta):
        value = meta[key]
        text = json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else _fmt(value)
        buf.write(f"# {key}={text}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from None


def _single(args, name: str) -> float:
    values = parse_grid(getattr(args, name))
    if len(values) != 1:
        raise CliError(f"--{name.replace('_', '-')} takes a single value for this command")
    return values[0]


def cmd_point(args) -> int:
    beta, beta_in = _single(args, "beta"), _single(args, "beta_in")
    if args.kind == "purified":
        PurificationParams(args.alpha, args.phi)
    point = run_point(args.kind, beta_in, beta, args.n, args.alpha, args.phi)
    emit(to_json(metadata(args), point.to_dict()), args.output)
    return 0


def cmd_sweep(args) -> int:
    betas, beta_ins = parse_grid(args.beta), parse_grid(args.beta_in)
    if args.kind == "purified":
        PurificationParams(args.alpha, args.phi)
    points = sweep(args.kind, betas, beta_ins, args.n, args.alpha, args.phi)
    meta = metadata(args, kind=args.kind, alpha=args.alpha, phi=args.phi, n=args.n)
    if args.format == "json":
        emit(to_json(meta, [p.to_dict() for p in points]), args.output)
        return 0
    rows = [(p.beta_in, p.beta, p.n, p.kind, p.w_d, p.w_d_closed, p.w_di, p.w_dc) for p in points]
    emit(to_csv(meta, SWEEP_COLUMNS, rows), args.output)
    return 0


def cmd_region(args) -> int:
    rows = region_map(
        parse_grid(args.beta),
        parse_grid(args.beta_in),
        args.kind,
        seed=args.seed,
        check_fraction=args.check_fraction,
    )
    meta = metadata(args, kind=args.kind, check_fraction=args.check_fraction)
    table = [(r.beta, r.beta_in, r.positive, r.w_d, r.checked, r.w_d_numeric) for r in rows]
    emit(to_csv(meta, REGION_COLUMNS, table), args.output)
    bad = [r for r in rows if r.residual is not None and r.residual > REGION_CHECK_TOL]
    if bad:
        print(f"error: {len(bad)} cross-checked points disagree with the analytic value", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    out = sys.stdout if args.output == "-" else io.StringIO()
    results = run_checks(
        seed=args.seed,
        n_max=args.n_max,
        tol=args.tol,
        on_result=lambda c: (out.write(c.line() + "\n"), out.flush()),
    )
    failed = sum(not c.passed for c in results)
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    if args.output != "-":
        emit(out.getvalue(), args.output)
    return 0 if failed == 0 else 1


def cmd_optimize(args) -> int:
    beta, beta_in = _single(args, "beta"), _single(args, "beta_in")
    _, point = optimize_purification(beta_in, beta, args.alpha_steps, args.phi_steps)
    meta = metadata(args, alpha_steps=args.alpha_steps, phi_steps=args.phi_steps)
    emit(to_json(meta, point.to_dict()), args.output)
    return 0


def cmd_compare(args) -> int:
    beta, beta_in = _single(args, "beta"), _single(args, "beta_in")
    rec = compare_discord_entanglement(beta_in, beta, args.samples, args.seed)
    emit(to_json(metadata(args), rec.to_dict()), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qswitch-ergo",
        description="Daemonic ergotropy of thermal inputs through the quantum N-SWITCH.",
        epilog=f"Set {THREADS_ENV} to run sweep points on several threads.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, temps=True, kind=True):
        if kind:
            p.add_argument("--kind", choices=KINDS, default="product")
        if temps:
            p.add_argument("--beta", required=True, help="map inverse temperature (value, list or min:max:step)")
            p.add_argument("--beta-in", required=True, help="input inverse temperature (value, list or min:max:step)")
        p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
        p.add_argument("--seed", type=int, default=0)

    def params(p):
        p.add_argument("--n", type=int, default=2, help="number of switched channels")
        p.add_argument("--alpha", type=float, default=0.0, help="purification weight in [0, 1]")
        p.add_argument("--phi", type=float, default=0.0, help="purification phase in [0, 2 pi]")

    p = sub.add_parser("point", help="evaluate one (beta, beta_in) point, JSON output")
    common(p)
    params(p)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="grid of points, beta outer and beta_in inner")
    common(p)
    params(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region", help="positivity map from analytic values with a numerical subsample")
    common(p)
    p.add_argument("--check-fraction", type=float, default=0.05)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify", help="run the oracle suite")
    common(p, temps=False, kind=False)
    p.add_argument("--tol", type=float, default=None, help="replace every check tolerance")
    p.add_argument("--n-max", type=int, default=5, help="largest N in the N-SWITCH checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="optimize the purification (alpha, phi)")
    common(p, kind=False)
    p.add_argument("--alpha-steps", type=int, default=256)
    p.add_argument("--phi-steps", type=int, default=128)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="separable-discordant samples against the best purification")
    common(p, kind=False)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

