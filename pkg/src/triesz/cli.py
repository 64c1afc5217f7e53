"""Command line front end: ``triesz analyze | gen | verify``.

Exit codes: 0 everything passed, 1 a certificate or request failed,
2 malformed input, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import InputError, TrieszError
from .generators import KINDS
from .numerics import ToleranceConfig
from .scenario import emit, generate, parse_report, parse_scenario, run, verify

_INT_FIELDS = {f.name for f in dataclasses.fields(ToleranceConfig) if f.type == "int"}


def _tol(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), int(value) if name.strip() in _INT_FIELDS else float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value for {name!r}: {value!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read: {exc.strerror}", path=path) from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="triesz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run every request of a scenario file")
    a.add_argument("file", help="scenario JSON ('-' for stdin)")
    a.add_argument("--tol", action="append", type=_tol, default=[], metavar="NAME=VALUE",
                   help="tolerance override, repeatable")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--witness-samples", type=int, metavar="N")
    a.add_argument("--quadrature-max-nodes", type=int, metavar="N")
    a.add_argument("--no-timing", action="store_true", help="leave timing fields out of the report")
    a.add_argument("-o", "--output", help="write the report here instead of stdout")

    g = sub.add_parser("gen", help="write a seeded random scenario")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("spec", help="shapes, e.g. '4,3->4' or '2,1->2,3:1,0;1,1'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")

    v = sub.add_parser("verify", help="re-check the certificates of a report")
    v.add_argument("report", help="report JSON ('-' for stdin)")
    return p


def _analyze(args) -> int:
    sc = parse_scenario(_read(args.file))
    overrides = dict(args.tol)
    if args.witness_samples is not None:
        overrides["witness_samples"] = args.witness_samples
    if args.quadrature_max_nodes is not None:
        overrides["quadrature_max_nodes"] = args.quadrature_max_nodes
    if overrides:
        sc = sc.with_tolerances(**overrides)
    report = run(sc)
    _write(emit(report, args.format, timing=not args.no_timing), args.output)
    return report.exit_code


def _gen(args) -> int:
    _write(generate(args.kind, args.spec, args.seed).to_json(), args.output)
    return 0


def _verify(args) -> int:
    res = verify(parse_report(_read(args.report)))
    for line in res.problems:
        print(line)
    print(f"{res.checked} certificate(s) checked, {len(res.problems)} problem(s)")
    return res.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {"analyze": _analyze, "gen": _gen, "verify": _verify}[args.command](args)
    except TrieszError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
