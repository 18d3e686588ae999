"""Command-line front end.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage
or parameter errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import heuristics, verify
from .heuristics import DistTable
from .pgroups import format_type
from .residue_linalg import is_prime
from .spectrum import SpectrumReport, exhaustive_spectrum, mc_spectrum
from .sympm import GroupSpec, enumerate_members, order

WORKERS_ENV = "EIGENLAB_WORKERS"


class UsageError(Exception):
    pass


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise UsageError(f"{WORKERS_ENV} must be >= 1")
        return value
    return os.cpu_count() or 1


def _spec(args) -> GroupSpec:
    return GroupSpec(args.p, args.f, args.m, args.n)


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _table_text(args, table: DistTable) -> str:
    return table.to_csv() if args.format == "csv" else table.dumps() + "\n"


def cmd_order(args) -> int:
    _emit(args, f"{order(_spec(args))}\n")
    return 0


def cmd_enumerate(args) -> int:
    spec = _spec(args)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for i, h in enumerate(enumerate_members(spec, bound=args.bound)):
            if args.limit is not None and i >= args.limit:
                print(f"warning: output truncated after {args.limit} members",
                      file=sys.stderr)
                break
            rows = h.tolist()
            if args.format == "csv":
                out.write(",".join(str(x) for row in rows for x in row) + "\n")
            else:
                out.write(json.dumps(rows) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_spectrum(args) -> int:
    spec = _spec(args)
    if args.exhaustive:
        report = exhaustive_spectrum(spec)
    else:
        workers = args.workers if args.workers is not None else default_workers()
        report = mc_spectrum(spec, args.samples, args.seed, workers)
    if args.format == "csv":
        text = "group,count\n" + "".join(
            f"\"{format_type(g)}\",{c}\n" for g, c in report.counts.items())
    else:
        text = report.dumps()
    _emit(args, text)
    return 0


def cmd_predict(args) -> int:
    base = None
    if args.base:
        base = SpectrumReport.from_json(_load_json(args.base))
    table = heuristics.predict(args.p, args.m, args.u, args.max_weight, base=base,
                               eps=args.eps)
    _emit(args, _table_text(args, table))
    return 0


def cmd_uprob(args) -> int:
    table = DistTable.from_json(_load_json(args.base))
    if not is_prime(table.q):
        raise UsageError(f"the recursion needs a prime q, table has q={table.q}")
    if args.steps < 0:
        raise UsageError("--steps must be >= 0")
    for _ in range(args.steps):
        table = heuristics.u_step(table, args.max_weight, table.q)
    _emit(args, _table_text(args, table))
    return 0


def cmd_verify(args) -> int:
    names = [args.suite] if args.suite else list(verify.SUITES)
    failed = 0
    lines = []
    for name in names:
        if name == "spectrum":
            workers = args.workers if args.workers is not None else default_workers()
            checks = verify.suite_spectrum(args.samples, args.seed, workers)
        else:
            checks = verify.SUITES[name]()
        for check in checks:
            failed += not check.passed
            line = check.line()
            lines.append(line)
            if not args.output:
                print(line, flush=True)
    if args.output:
        _emit(args, "\n".join(lines) + "\n")
    return 1 if failed else 0


def _add_group_args(p, with_n=True):
    p.add_argument("--p", type=int, required=True, help="residue characteristic (prime)")
    p.add_argument("--f", type=int, required=True, help="modulus exponent: ring Z/p^f")
    p.add_argument("--m", type=int, required=True, help="form is preserved mod p^m")
    if with_n:
        p.add_argument("--n", type=int, required=True, help="matrices are 2n x 2n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenlab",
        description="Fixed-space statistics of m-th symplectic groups and "
                    "Cohen-Lenstra type predictions.",
        epilog="JSON is the canonical output. CSV is a convenience view of the same rows.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", parents=[common], help="order of Sp^(m)_{2n}(Z/p^f)")
    _add_group_args(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("enumerate", parents=[common], help="stream all members (tiny cases only)")
    _add_group_args(p)
    p.add_argument("--limit", type=int, help="stop after this many members")
    p.add_argument("--bound", type=int, default=2 ** 24,
                   help="maximum number of candidate matrices to scan")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("spectrum", parents=[common], help="distribution of ker(g - 1) types")
    _add_group_args(p)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int,
                   help=f"sampling threads (default: ${WORKERS_ENV} or CPU count)")
    p.add_argument("--exhaustive", action="store_true", help="enumerate the whole group")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("predict", parents=[common], help="table of P^(u)_{m,p}")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--u", type=int, default=0)
    p.add_argument("--max-weight", type=int, default=None,
                   help="largest weight kept (default 10 for p=2, 7 otherwise)")
    p.add_argument("--base", help="spectrum report JSON, required for m >= 3")
    p.add_argument("--eps", type=float, default=heuristics.DEFAULT_EPS)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("uprob", parents=[common], help="apply the u-step recursion to a table")
    p.add_argument("--base", required=True, help="distribution table JSON")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=None)
    p.set_defaults(func=cmd_uprob)

    p = sub.add_parser("verify", parents=[common], help="run self-check suites")
    p.add_argument("--suite", choices=sorted(verify.SUITES))
    p.add_argument("--samples", type=int, default=200_000, help="spectrum suite sample count")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def _default_weight(p: int) -> int:
    return 10 if p == 2 else 7


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "max_weight", 0) is None:
        q = args.p if args.command == "predict" else _load_q(args.base)
        args.max_weight = _default_weight(q) if q is not None else 10
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"eigenlab {args.command}: error: {exc}", file=sys.stderr)
        return 2


def _load_q(path):
    try:
        return int(_load_json(path)["q"])
    except (UsageError, KeyError, ValueError, TypeError):
        return None


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
