"""Command-line driver.

Every subcommand prints one VerificationReport (JSON by default) and
exits 0 on pass, 1 on fail, 2 on malformed input.  Operators are given as
builtin names (``standard:2``, ``permutation:3``, ``cremmer_gervais_r``,
...) or as paths to JSON operator files::

    {"n": 2, "arity": 2, "entries": {"1,1|1,1": "q", "1,2|2,1": "1", ...}}
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .chn import (
    ChnInstance,
    ClassicalMatrix,
    UnsupportedCombination,
    classical_chn_check,
    classical_newton_check,
    consistency_bridge,
    verify_chn,
)
from .expr import ParseError, parse_scalar
from .ncalg import NoAdmissiblePoint, Randomized, relations_from
from .report import Stopwatch, SystemSize, VerificationReport, combine
from .scalar import Scalar
from .tensor import ShapeError, TensorOp, flat_index, multi_index
from .ybkit import (
    DMatrixError,
    NotHeckeError,
    antisymmetrizer,
    builtin,
    check_compatible,
    check_dd_conjugation,
    check_hecke,
    check_yang_baxter,
    d_matrix,
    twist,
)

KMAX_CAP = 4
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class SessionConfig:
    params: tuple[str, ...] = ()
    mode: str | None = None
    seed: int = 0
    trials: int = 3
    output: str = "json"
    k_max_cap: int = KMAX_CAP
    out: str | None = None
    extra: dict = field(default_factory=dict)


# -- operator files ----------------------------------------------------------


def operator_to_json(op: TensorOp) -> dict:
    entries = {}
    for (row, col), value in op.entries().items():
        entries[f"{','.join(map(str, row))}|{','.join(map(str, col))}"] = str(value)
    return {"n": op.n, "arity": op.arity, "entries": entries}


def operator_from_json(data: dict, params: Sequence[str] = ()) -> TensorOp:
    """Validate shape first, then parse every entry expression."""
    try:
        n, arity, raw = int(data["n"]), int(data["arity"]), data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"operator file needs integer 'n', 'arity' and an 'entries' map ({exc})") from exc
    if n < 1 or arity < 0:
        raise InputError(f"invalid shape n={n}, arity={arity}")
    if not isinstance(raw, dict):
        raise InputError("'entries' must be an object")
    keys = []
    for key in raw:
        try:
            row_text, col_text = key.split("|")
            row = tuple(int(x) for x in row_text.split(",")) if row_text else ()
            col = tuple(int(x) for x in col_text.split(",")) if col_text else ()
        except ValueError as exc:
            raise InputError(f"bad entry key {key!r}; expected 'i1,..,ik|j1,..,jk'") from exc
        if len(row) != arity or len(col) != arity:
            raise InputError(f"entry key {key!r} does not match arity {arity}")
        if any(not 1 <= x <= n for x in row + col):
            raise InputError(f"entry key {key!r} has an index outside 1..{n}")
        keys.append((key, row, col))
    entries = {}
    for key, row, col in keys:
        text = raw[key]
        try:
            value = parse_scalar(str(text), params)
        except ParseError as exc:
            raise InputError(f"entry {key}: {exc}") from exc
        entries[(flat_index(row, n), flat_index(col, n))] = value
    return TensorOp(n, arity, entries)


def resolve_operator(spec: str, config: SessionConfig, n: int | None = None) -> TensorOp:
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise InputError(f"cannot read {spec}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{spec}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        op = operator_from_json(data, config.params)
    else:
        name = spec
        if ":" not in name and name.split("_")[0] in ("standard", "permutation", "perm") and n is not None:
            name = f"{name}:{n}"
        try:
            op = builtin(name, config.params)
        except (KeyError, ValueError) as exc:
            raise InputError(str(exc).strip('"')) from exc
    if n is not None and op.n != n:
        raise InputError(f"{spec} has n={op.n}, but --n {n} was given")
    return op


def _require_arity(op: TensorOp, arity: int, label: str):
    if op.arity != arity:
        raise InputError(f"{label} must have arity {arity}, got {op.arity}")


# -- subcommand handlers -----------------------------------------------------


def _operator_report(check: str, op: TensorOp, watch: Stopwatch, passed: bool = True, **details) -> VerificationReport:
    return VerificationReport(
        check=check,
        passed=passed,
        system=SystemSize(op.dim, op.dim, op.rank()),
        elapsed_ms=watch.ms,
        details={**details, "operator": operator_to_json(op)},
    )


def cmd_check(args, config: SessionConfig) -> VerificationReport:
    r = resolve_operator(args.r, config, args.n)
    _require_arity(r, 2, "--r")
    if args.what == "yb":
        return check_yang_baxter(r)
    if args.what == "hecke":
        return check_hecke(r, parse_scalar(args.q, config.params) if args.q else None)[0]
    if args.f is None:
        raise InputError(f"check {args.what} needs --f")
    f = resolve_operator(args.f, config, args.n)
    _require_arity(f, 2, "--f")
    if f.n != r.n:
        raise InputError("--r and --f have different n")
    report, pair = check_compatible(r, f)
    if args.what == "compatible" or pair is None:
        return report
    return check_dd_conjugation(pair)


def cmd_derive(args, config: SessionConfig) -> VerificationReport:
    watch = Stopwatch()
    f = resolve_operator(args.f, config, args.n)
    _require_arity(f, 2, "--f")
    try:
        d = d_matrix(f)
    except DMatrixError as exc:
        return VerificationReport(
            check="d_matrix",
            passed=False,
            elapsed_ms=watch.ms,
            details={"error": str(exc), "nullity": exc.nullity, "consistent": exc.consistent},
        )
    return _operator_report("d_matrix", d, watch, identity=d == TensorOp.identity(f.n, 1))


def cmd_build(args, config: SessionConfig) -> VerificationReport:
    watch = Stopwatch()
    r = resolve_operator(args.r, config, args.n)
    _require_arity(r, 2, "--r")
    report, data = check_hecke(r, parse_scalar(args.q, config.params) if args.q else None)
    if data is None:
        return report
    a = antisymmetrizer(data, args.k)
    idempotent = a @ a == a
    return _operator_report(
        f"antisymmetrizer_k{args.k}", a, watch, passed=idempotent, idempotent=idempotent, rank=a.rank()
    )


def cmd_twist(args, config: SessionConfig) -> VerificationReport:
    watch = Stopwatch()
    r = resolve_operator(args.r, config, args.n)
    f = resolve_operator(args.f, config, args.n)
    _require_arity(r, 2, "--r")
    _require_arity(f, 2, "--f")
    out = twist(r, f)
    if args.twice:
        out = twist(out, f)
    yb = check_yang_baxter(out)
    return _operator_report("twist_twice" if args.twice else "twist", out, watch, passed=yb.passed, yang_baxter=yb.passed)


def cmd_export(args, config: SessionConfig) -> dict:
    return operator_to_json(resolve_operator(args.r, config, args.n))


def _mode(args, config: SessionConfig, n: int, k: int):
    mode = config.mode
    if mode is None:
        mode = "randomized" if n > 2 and k >= 3 else "exact"
    if mode == "randomized":
        return Randomized(config.seed, config.trials)
    return "exact"


def cmd_verify(args, config: SessionConfig) -> VerificationReport:
    if args.what == "classical":
        return _verify_classical(args, config)
    if args.k is not None and args.k > config.k_max_cap:
        raise InputError(f"k={args.k} exceeds the cap of {config.k_max_cap}")
    if args.kmax is not None and args.kmax > config.k_max_cap:
        raise InputError(f"kmax={args.kmax} exceeds the cap of {config.k_max_cap}")
    n = args.n or 2
    if args.what == "chn":
        algebra = args.algebra
        r = resolve_operator(args.r or f"standard:{n}", config, args.n)
        if algebra == "rtt":
            f = resolve_operator(args.f or f"permutation:{r.n}", config, args.n)
        elif algebra == "rlrl":
            f = resolve_operator(args.f, config, args.n) if args.f else r
        else:
            if args.f is None:
                raise InputError("--algebra general needs --f")
            f = resolve_operator(args.f, config, args.n)
        _require_arity(r, 2, "--r")
        _require_arity(f, 2, "--f")
        pair_report, pair = check_compatible(r, f)
        if pair is None:
            return pair_report
        spec = relations_from(pair)
        if algebra != "general" and spec.flavor != algebra:
            raise InputError(f"--algebra {algebra} does not match the pair (detected {spec.flavor})")
        if algebra == "rtt":
            family = f"rtt_{args.variant}"
        elif args.variant != "overline":
            raise InputError("the underline variant exists only for --algebra rtt")
        else:
            family = algebra
        ks = [args.k] if args.k is not None else list(range(1, (args.kmax or r.n + 1) + 1))
        if any(k > config.k_max_cap for k in ks):
            raise InputError(f"degree exceeds the cap of {config.k_max_cap}; pass --k or --kmax")
        reports = [verify_chn(spec, k, family, _mode(args, config, r.n, k), args.rlrl_sigma) for k in ks]
        return reports[0] if len(reports) == 1 else combine(f"chn_{family}", reports)
    # bridge
    r = resolve_operator(args.r or f"standard:{n}", config, args.n)
    f = resolve_operator(args.f or f"permutation:{r.n}", config, args.n)
    pair_report, pair = check_compatible(r, f)
    if pair is None:
        return pair_report
    spec = relations_from(pair)
    k_max = args.kmax or args.k or min(r.n + 1, config.k_max_cap)
    inst = ChnInstance(spec, k_max)
    return consistency_bridge(inst, k_max, _mode(args, config, r.n, k_max), args.rlrl_sigma)


def _verify_classical(args, config: SessionConfig) -> VerificationReport:
    n = args.n or 3
    k_max = args.kmax or n + 1
    rng = random.Random(config.seed)
    reports = []
    for index in range(args.count):
        x = ClassicalMatrix.random(n, rng)
        if args.flavor == "newton":
            rep = classical_newton_check(x, k_max)
        else:
            rep = classical_chn_check(x, k_max, args.flavor)
        rep.check = f"{rep.check}_{index}"
        reports.append(rep)
    report = reports[0] if len(reports) == 1 else combine(f"classical_{args.flavor}", reports, n=n)
    report.seed = config.seed
    return report


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", default="", help="comma-separated extra indeterminates, e.g. b,y")
    common.add_argument("--n", type=int, help="dimension of V")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="also write the JSON report to this file")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="chnlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="structural checks of R and F")
    check.add_argument("what", choices=("yb", "hecke", "compatible", "dd"))
    check.add_argument("--r", required=True)
    check.add_argument("--f")
    check.add_argument("--q", help="value of q for the Hecke check (default: symbolic q)")
    check.set_defaults(handler=cmd_check)

    derive = sub.add_parser("derive", help="derive D from Tr_2(F D_2) = I")
    derive.add_argument("what", choices=("dmat",))
    derive.add_argument("--f", required=True)
    derive.set_defaults(handler=cmd_derive)

    build = sub.add_parser("build", help="build the antisymmetrizer A_k")
    build.add_argument("what", choices=("antisym",))
    build.add_argument("--r", required=True)
    build.add_argument("--k", type=int, required=True)
    build.add_argument("--q", help="value of q (default: symbolic q)")
    build.set_defaults(handler=cmd_build)

    tw = sub.add_parser("twist", help="F R F^-1 (or twice with --twice)")
    tw.add_argument("--r", required=True)
    tw.add_argument("--f", required=True)
    tw.add_argument("--twice", action="store_true")
    tw.set_defaults(handler=cmd_twist)

    export = sub.add_parser("export", help="print a builtin in the JSON operator format")
    export.add_argument("--r", required=True, help="builtin name")
    export.set_defaults(handler=cmd_export)

    verify = sub.add_parser("verify", help="classical and quantum CHN identities")
    verify.add_argument("what", choices=("classical", "chn", "bridge"))
    verify.add_argument("--algebra", choices=("rtt", "rlrl", "general"), default="rtt")
    verify.add_argument("--r")
    verify.add_argument("--f")
    verify.add_argument("--k", type=int)
    verify.add_argument("--kmax", type=int)
    verify.add_argument("--variant", choices=("overline", "underline"), default="overline")
    verify.add_argument("--mode", choices=("exact", "randomized"))
    verify.add_argument("--trials", type=int, default=3)
    verify.add_argument("--flavor", choices=("wedge", "symmetric", "newton"), default="wedge")
    verify.add_argument("--count", type=int, default=1, help="number of random classical matrices")
    verify.add_argument(
        "--rlrl-sigma",
        choices=("plain", "rescaled"),
        default="plain",
        help="sigma_j(L) as the plain q-trace, or multiplied by q^j",
    )
    verify.set_defaults(handler=cmd_verify)

    for p in (check, derive, build, tw, export, verify):
        for action in common._actions:
            if action.dest != "help":
                p._add_action(action)
    return parser


def _emit(result, config: SessionConfig, stream) -> None:
    if isinstance(result, VerificationReport):
        text = result.to_json()
        if config.output == "text":
            lines = [result.summary()]
            for key, value in result.details.items():
                if key == "operator":
                    op = value
                    lines.append(f"  operator n={op['n']} arity={op['arity']}")
                    lines.extend(f"    {k}: {v}" for k, v in op["entries"].items())
                else:
                    lines.append(f"  {key}: {value}")
            shown = "\n".join(lines)
        else:
            shown = text
    else:
        text = shown = json.dumps(result, indent=2)
    print(shown, file=stream)
    if config.out:
        Path(config.out).write_text(text + "\n")


def main(argv: Sequence[str] | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    params = tuple(p.strip() for p in args.params.split(",") if p.strip())
    config = SessionConfig(
        params=params,
        mode=getattr(args, "mode", None),
        seed=args.seed,
        trials=getattr(args, "trials", 3),
        output=args.format,
        out=args.out,
    )
    try:
        result = args.handler(args, config)
    except (InputError, ParseError, ShapeError, UnsupportedCombination, NotHeckeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoAdmissiblePoint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(result, config, stream)
    if isinstance(result, VerificationReport):
        return EXIT_PASS if result.passed else EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
