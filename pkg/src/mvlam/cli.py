"""``mvlam``: build, check, verify and benchmark linear-term representations.

Reports go to stdout as JSON lines; a one-line human summary goes to stderr.
Exit codes: 0 success, 1 verification failure, 2 usage or load error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .belnap import MajorityOptions, compile_majority, majority_table, merge_candidates
from .checker import Certificate, check, is_monomorphic
from .circuit import (
    DEFAULT_SIZE_GUARD,
    build_binary,
    build_dnf,
    build_hetero,
    build_unary,
)
from .errors import MvlamError
from .inductive import build_hybrid, build_inductive
from .optimize import add_mod_table, build_add_mod, build_binary_opt, build_unary_opt
from .reduce import INHABITANT_GUARD, decode_value, enumerate_normal_inhabitants
from .sweep import sweep_table
from .table import FunctionTable
from .terms import parse_term, print_term
from .types import parse_type, print_type

OK, FAIL, USAGE = 0, 1, 2
STYLES = ("circuit-dnf", "inductive", "binary", "unary", "hybrid")
OPTS = ("none", "runs", "addmod")


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, sort_keys=False))


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_table(path: str) -> FunctionTable:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg})") from exc
    return FunctionTable.from_json(data)


# ---------------------------------------------------------------------------
# build

def _build(table: FunctionTable, style: str, opt: str, size_guard: int):
    extra = {}
    if opt == "addmod":
        if table.arity != 2 or not table.is_uniform or table != add_mod_table(table.output_radix):
            raise UsageError("--opt addmod needs the addition-mod-r table")
        return build_add_mod(table.output_radix), extra
    if style == "unary":
        if table.arity != 1:
            raise UsageError(f"style unary needs a 1-argument table, got {table.arity}")
        return (build_unary_opt(table) if opt == "runs" and table.is_uniform
                else build_unary(table)), extra
    if style == "binary":
        if table.arity != 2:
            raise UsageError(f"style binary needs a 2-argument table, got {table.arity}")
        if opt == "runs":
            built, report = build_binary_opt(table)
            extra["orientation"] = report.to_json()
            return built, extra
        return build_binary(table), extra
    if not table.is_uniform:
        return build_hetero(table, size_guard), extra
    if style == "circuit-dnf":
        return build_dnf(table, size_guard, optimize=opt == "runs"), extra
    if style == "inductive":
        return build_inductive(table, size_guard), extra
    return build_hybrid(table, size_guard), extra


def cmd_build(args) -> int:
    table = _load_table(args.table)
    built, extra = _build(table, args.style, args.opt, args.size_guard)
    report = check([], built.term, built.certificate, built.declared_type)
    result = sweep_table(built.term, table, jobs=args.jobs)
    if args.term_out:
        Path(args.term_out).write_text(print_term(built.term) + "\n")
    if args.cert_out:
        Path(args.cert_out).write_text(built.certificate.dumps() + "\n")
    _emit({"command": "build", **built.summary(), **extra,
           "checks": report.ok, "agreement": result.agreement, "total": result.total})
    _say(f"built {args.style} term: {built.node_count} nodes, {built.const_count} const terms, "
         f"type {print_type(built.declared_type)}")
    if not report.ok:
        _say(f"self-check failed: {report.error}")
        return FAIL
    if not result.ok:
        _say(f"self-check failed: {result.total - result.agreement} mismatches")
        return FAIL
    return OK


# ---------------------------------------------------------------------------
# check

def cmd_check(args) -> int:
    term = parse_term(_read(args.term))
    cert = Certificate.loads(_read(args.certificate))
    ty = parse_type(args.type)
    report = check([], term, cert, ty)
    out = {"command": "check", "ok": report.ok}
    if report.ok:
        _say("PASS")
    else:
        err = report.error
        out.update({"error": type(err).__name__, "path": list(err.path), "message": err.message})
        _say(f"FAIL {type(err).__name__} at {list(err.path)}: {err.message}")
    if args.mono:
        mono = is_monomorphic(cert)
        out["monomorphic"] = mono
        _say("monomorphic" if mono else "not monomorphic")
    for w in report.warnings:
        _say(f"warning: {w}")
    _emit(out)
    return OK if report.ok else FAIL


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    term = parse_term(_read(args.term))
    table = _load_table(args.table)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    result = sweep_table(term, table, jobs=args.jobs)
    _emit({"command": "verify", **result.to_json()})
    for m in result.to_json()["mismatches"]:
        _say(f"mismatch at {m['args']}: got {m['got']}, expected {m['expected']}"
             + (f" ({m['error']})" if "error" in m else ""))
    _say(f"{result.agreement}/{result.total} inputs agree")
    return OK if result.ok else FAIL


# ---------------------------------------------------------------------------
# bench, inhabitants, belnap

def cmd_bench(args) -> int:
    report = bench.run(args.scenario, args.radix)
    _emit(report)
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    _say(f"bench {args.scenario} done")
    return OK


def cmd_inhabitants(args) -> int:
    r = args.radix
    if not 1 <= r <= INHABITANT_GUARD:
        raise UsageError(f"--radix must lie in 1..{INHABITANT_GUARD}")
    canonical = 0
    terms = enumerate_normal_inhabitants(r)
    for t in terms:
        v = decode_value(t, r)
        is_value = isinstance(v, int)
        canonical += is_value
        _emit({"term": print_term(t), "canonical": is_value, "value": v if is_value else None})
    _say(f"{len(terms)} normal inhabitants of T{r}, {canonical} canonical")
    return OK


def cmd_belnap(args) -> int:
    if args.what == "merges":
        for c in merge_candidates():
            _emit(c)
        return OK
    opts = MajorityOptions(args.merge, args.dontcare, args.row_opt)
    built, _ = compile_majority(opts, verify=False)
    result = sweep_table(built.term, majority_table(), jobs=args.jobs)
    if args.term_out:
        Path(args.term_out).write_text(print_term(built.term) + "\n")
    if args.cert_out:
        Path(args.cert_out).write_text(built.certificate.dumps() + "\n")
    _emit({"agreement": result.agreement, "node_count": built.node_count,
           "beta1_total": result.steps.beta1, "beta2_total": result.steps.beta2,
           "options": opts.to_json(), "subfunctions": built.stats["subfunctions"]})
    _say(f"majority: {result.agreement}/{result.total} agree, {built.node_count} nodes")
    return OK if result.ok else FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvlam", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="synthesize a term for a table")
    b.add_argument("table")
    b.add_argument("--style", choices=STYLES, default="inductive")
    b.add_argument("--opt", choices=OPTS, default="none")
    b.add_argument("--term-out")
    b.add_argument("--cert-out")
    b.add_argument("--size-guard", type=int, default=DEFAULT_SIZE_GUARD)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="type-check a term against a certificate")
    c.add_argument("term")
    c.add_argument("certificate")
    c.add_argument("type")
    c.add_argument("--mono", action="store_true")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="evaluate a term on every input of a table")
    v.add_argument("term")
    v.add_argument("table")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="measured counts next to the claimed ones")
    be.add_argument("scenario", choices=bench.SCENARIOS)
    be.add_argument("--radix", type=int)
    be.add_argument("--out")
    be.set_defaults(func=cmd_bench)

    i = sub.add_parser("inhabitants", help="list the normal inhabitants of T_r")
    i.add_argument("--radix", type=int, required=True)
    i.set_defaults(func=cmd_inhabitants)

    bl = sub.add_parser("belnap", help="the four-argument majority case study")
    bl.add_argument("what", choices=("majority", "merges"))
    bl.add_argument("--merge", action="store_true")
    bl.add_argument("--dontcare", action="store_true")
    bl.add_argument("--row-opt", action="store_true")
    bl.add_argument("--jobs", type=int, default=1)
    bl.add_argument("--term-out")
    bl.add_argument("--cert-out")
    bl.set_defaults(func=cmd_belnap)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MvlamError, ValueError) as exc:
        _say(f"error: {exc}")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
