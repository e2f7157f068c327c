"""
Command-line interface.

    snfc bound     NETWORK --r R
    snfc construct NETWORK --R R --r r [--mode target|source-gen|source-legacy] [--out FILE]
    snfc verify    NETWORK --code CODE --r r [--security target|source|both] [--oracle]
    snfc simulate  NETWORK --code CODE --messages "1;2" [--keys "1;1"]
    snfc reduce    NETWORK --r r
    snfc count     NETWORK --R R --r r [--field q]

NETWORK is a JSON file (positional or ``--network``) or ``--fixture NAME``.
Every command prints a JSON report.  Exit status: 0 success, 2 insecure or
not computable, 3 construction failure, 4 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fixtures, gf
from .bounds import bound_report
from .code import check_computability, check_source_security, check_target_security, evaluate
from .construct import (construct_base, construct_source_generalized, construct_source_legacy,
                        construct_target, extension_lift, required_field_size)
from .errors import ConstructionFailed, FieldMismatch, InputError, ShapeError, SNFCError, TooLarge
from .io import code_to_dict, dumps, load_code, load_network, sha256_bytes
from .network import c_min, primary_min_cut, wiretap_collection
from .oracle import default_cap, enumerate_transform_sets, oracle_secure_all

EXIT_OK, EXIT_INSECURE, EXIT_CONSTRUCT, EXIT_INPUT = 0, 2, 3, 4

FIXTURES = {
    "rbfly": ("rbfly", None),
    "toy2": ("toy2", None),
    "toy2x2": ("toy2x2", None),
    "rbfly-base": ("rbfly", "rbfly-base"),
    "rbfly-secure": ("rbfly", "rbfly-secure"),
    "toy2-keyless": ("toy2", "toy2-keyless"),
}
MODES = {"target": construct_target, "source-gen": construct_source_generalized,
         "source-legacy": construct_source_legacy}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fixture_hash(obj) -> str:
    return sha256_bytes(json.dumps(obj, sort_keys=True).encode())


class _Ctx:
    """Loaded inputs plus the pieces of the report being built."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.warnings = []
        self.code = None
        if args.fixture:
            net_name, code_name = FIXTURES[args.fixture]
            self.net = fixtures.NETWORKS[net_name]()
            self.q = 3 if net_name == "rbfly" else None
            self.inputs["network"] = {"fixture": net_name, "sha256": _fixture_hash(self.net.to_dict())}
            if code_name:
                self.code = fixtures.CODES[code_name]()
                self.q = self.code.F.q
                self.inputs["code"] = {"fixture": code_name,
                                       "sha256": _fixture_hash(self.code.to_dict())}
        else:
            path = args.network_pos or args.network
            if not path:
                raise InputError("no network given (positional path, --network or --fixture)")
            self.net, self.q, h = load_network(path)
            self.inputs["network"] = {"path": path, "sha256": h}
        code_path = getattr(args, "code", None)
        if code_path:
            self.code, h = load_code(code_path, self.net, self.q)
            self.inputs["code"] = {"path": code_path, "sha256": h}

    def field(self, explicit=None) -> gf.GF:
        q = explicit or (self.code.F.q if self.code is not None else self.q)
        if q is None:
            raise InputError("no field order: add \"field\" to the network file or pass --field")
        if self.q is not None and explicit is not None and explicit != self.q:
            if self.code is not None:
                raise FieldMismatch(f"--field {explicit} disagrees with the code's GF({self.code.F.q})")
            self.warnings.append(f"--field {explicit} overrides the network's GF({self.q})")
        return gf.field(int(q))

    def report(self, command, results) -> dict:
        return {"command": command, "inputs": self.inputs, "seed": getattr(self.args, "seed", None),
                "results": results, "warnings": self.warnings}


def _cap(args) -> int:
    return args.max_oracle if getattr(args, "max_oracle", None) else default_cap()


def _wiretaps(ctx, r, reduce):
    return wiretap_collection(ctx.net, r, reduce=reduce)


def _security(code, wt, kinds, oracle, cap, warnings):
    out, ok = {}, True
    for kind in kinds:
        check = check_target_security if kind == "target" else check_source_security
        rep = check(code, wt)
        entry = rep.to_dict()
        ok &= rep.secure
        if oracle:
            try:
                verdicts = oracle_secure_all(code, wt.sets, kind, cap)
                entry["oracle_secure"] = all(verdicts)
                entry["oracle_agrees"] = all(verdicts) == rep.secure
                ok &= all(verdicts)
            except TooLarge as exc:
                warnings.append(f"oracle skipped for {kind}: {exc}")
        out[kind] = entry
    return out, ok


def cmd_bound(ctx, args):
    try:
        rep = bound_report(ctx.net, args.r, max_edges=args.max_enum_edges, fallback=True)
    except TooLarge as exc:  # pragma: no cover - bound_report already falls back
        raise InputError(str(exc))
    if rep.mode == "closed_form":
        ctx.warnings.append("cut-set enumeration too large; only the closed-form interval is reported")
    return ctx.report("bound", rep.to_dict()), EXIT_OK


def cmd_construct(ctx, args):
    net, R, r = ctx.net, args.R, args.r
    if not 0 <= r <= R:
        raise InputError(f"need 0 <= r <= R, got r={r}, R={R}")
    cm = c_min(net)
    if R > cm:
        raise InputError(f"R={R} exceeds the smallest source min cut {cm}")
    F = ctx.field(args.field)
    try:
        threshold = required_field_size(net, r, reduced=True)
    except TooLarge:
        threshold = None
    kwargs = {"reduce": args.reduce_wiretaps} if args.mode == "target" else {}
    try:
        code = MODES[args.mode](net, R, r, F, args.seed, **kwargs)
    except ConstructionFailed as exc:
        hint = "" if threshold is None else f"; fields larger than {threshold} always succeed"
        res = {"error": f"{type(exc).__name__}: {exc}{hint}", "field": F.q,
               "threshold": threshold}
        return ctx.report("construct", res), EXIT_CONSTRUCT
    if R - r == 0:
        ctx.warnings.append("rate 0; keyless codes of positive rate may exist for this instance "
                            "(check candidates with verify)")
    full = _wiretaps(ctx, r, False)
    sec, _ = _security(code, full, ["target", "source"], args.oracle, _cap(args), ctx.warnings)
    D = check_computability(code)
    must = ["target"] + (["source"] if args.mode != "target" else [])
    ok = D is not None and all(sec[k]["secure"] and sec[k].get("oracle_secure", True) for k in must)
    res = {
        "mode": args.mode,
        "field": F.q,
        "rate": R - r,
        "ell": code.ell,
        "z": list(code.z),
        "decoder": None if D is None else D.tolist(),
        "security": sec,
        "threshold": threshold,
        "code": code_to_dict(code),
    }
    if threshold is not None and F.q <= threshold:
        lift = extension_lift(F.q, threshold, R, r)
        res["extension_lift"] = lift
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(code_to_dict(code)))
        res["out"] = args.out
    return ctx.report("construct", res), EXIT_OK if ok else EXIT_INSECURE


def cmd_verify(ctx, args):
    code = ctx.code
    if code is None:
        raise InputError("verify needs --code or a code fixture")
    wt = _wiretaps(ctx, args.r, args.reduce_wiretaps)
    kinds = ["target", "source"] if args.security == "both" else [args.security]
    sec, ok = _security(code, wt, kinds, args.oracle, _cap(args), ctx.warnings)
    D = check_computability(code)
    res = {"computable": D is not None, "decoder": None if D is None else D.tolist(),
           "wiretap_sets": len(wt), "reduced": wt.reduced, "security": sec}
    return ctx.report("verify", res), EXIT_OK if ok and D is not None else EXIT_INSECURE


def _rows(text, s, name):
    if text is None:
        return None
    parts = text.split(";")
    if len(parts) != s:
        raise InputError(f"--{name}: expected {s} ';'-separated rows, got {len(parts)}")
    try:
        return [[int(v) for v in p.split(",") if v.strip()] for p in parts]
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from exc


def cmd_simulate(ctx, args):
    code = ctx.code
    if code is None:
        raise InputError("simulate needs --code or a code fixture")
    m = _rows(args.messages, code.s, "messages")
    k = _rows(args.keys, code.s, "keys")
    if k is None:
        k = [[0] * zi for zi in code.z]
    try:
        out = evaluate(code, m, k)
    except (ShapeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    F = code.F
    expected = [0] * code.ell
    for row in m:
        expected = [int(F.add(a, b)) for a, b in zip(expected, row)]
    res = {"y": out["y"], "decoded": out["decoded"], "sum": expected,
           "correct": out["decoded"] == expected}
    return ctx.report("simulate", res), EXIT_OK if res["correct"] else EXIT_INSECURE


def cmd_reduce(ctx, args):
    red = wiretap_collection(ctx.net, args.r, reduce=True)
    full = wiretap_collection(ctx.net, args.r, reduce=False)
    res = {
        "r": args.r,
        "reduced_sets": [list(W) for W in red.sets],
        "count_reduced": len(red),
        "count_full": len(full),
        "count_full_nonempty": len(full.nonempty()),
        "threshold_reduced": len(red) + ctx.net.s,
        "threshold_full": len(full.nonempty()) + ctx.net.s,
        "threshold_full_literal": len(full) + ctx.net.s,
        "primary_cuts": {",".join(W): list(primary_min_cut(ctx.net, W)) for W in full.nonempty()
                         if len(W) == args.r},
    }
    return ctx.report("reduce", res), EXIT_OK


def cmd_count(ctx, args):
    F = ctx.field(args.field)
    if not 0 <= args.r <= args.R:
        raise InputError("need 0 <= r <= R")
    if ctx.code is not None:
        base = ctx.code
        if base.ell != args.R or any(base.z):
            raise InputError("the supplied code is not a keyless rate-R base code")
    else:
        try:
            base = construct_base(ctx.net, args.R, F, args.seed)
        except ConstructionFailed as exc:
            return ctx.report("count", {"error": str(exc)}), EXIT_CONSTRUCT
    try:
        counts = enumerate_transform_sets(base, args.R, args.r, method=args.method)
    except TooLarge as exc:
        raise InputError(f"{exc}; try --method bijection") from exc
    res = counts.to_dict()
    res["ratio"] = counts.ratio
    res["field"] = F.q
    return ctx.report("count", res), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="snfc", description="Secure linear network codes for computing sums.",
                allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, code=False):
        sp.add_argument("network_pos", nargs="?", metavar="NETWORK", help="network JSON file")
        sp.add_argument("--network", help="network JSON file")
        sp.add_argument("--fixture", choices=sorted(FIXTURES), help="use a built-in network/code")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-enum-edges", type=int, default=20)
        if code:
            sp.add_argument("--code", help="code JSON file")

    sp = sub.add_parser("bound", help="capacity bounds", allow_abbrev=False)
    common(sp)
    sp.add_argument("--r", type=int, required=True)

    sp = sub.add_parser("construct", help="build a secure code", allow_abbrev=False)
    common(sp)
    sp.add_argument("--R", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--mode", choices=sorted(MODES), default="target")
    sp.add_argument("--field", type=int)
    sp.add_argument("--out")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--max-oracle", type=int)
    sp.add_argument("--reduce-wiretaps", action=argparse.BooleanOptionalAction, default=True)

    sp = sub.add_parser("verify", help="check computability and security", allow_abbrev=False)
    common(sp, code=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--security", choices=["target", "source", "both"], default="both")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--max-oracle", type=int)
    sp.add_argument("--reduce-wiretaps", action="store_true")

    sp = sub.add_parser("simulate", help="run a code on given inputs", allow_abbrev=False)
    common(sp, code=True)
    sp.add_argument("--messages", required=True, help='rows per source, e.g. "1,0;2,1"')
    sp.add_argument("--keys", help='key rows per source, e.g. "1;1"')

    sp = sub.add_parser("reduce", help="reduced wiretap collection", allow_abbrev=False)
    common(sp)
    sp.add_argument("--r", type=int, required=True)

    sp = sub.add_parser("count", help="count admissible transforms", allow_abbrev=False)
    common(sp, code=True)
    sp.add_argument("--R", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--field", type=int)
    sp.add_argument("--method", choices=["exhaustive", "bijection"], default="exhaustive")
    return p


COMMANDS = {"bound": cmd_bound, "construct": cmd_construct, "verify": cmd_verify,
            "simulate": cmd_simulate, "reduce": cmd_reduce, "count": cmd_count}


def run(argv=None) -> tuple[dict | None, int]:
    args = build_parser().parse_args(argv)
    try:
        ctx = _Ctx(args)
        return COMMANDS[args.command](ctx, args)
    except (InputError, FieldMismatch, ShapeError, TooLarge, KeyError) as exc:
        return {"command": args.command, "error": f"{type(exc).__name__}: {exc}"}, EXIT_INPUT
    except ConstructionFailed as exc:
        return {"command": args.command, "error": f"{type(exc).__name__}: {exc}"}, EXIT_CONSTRUCT
    except SNFCError as exc:
        return {"command": args.command, "error": f"{type(exc).__name__}: {exc}"}, EXIT_INPUT


def main(argv=None) -> int:
    try:
        report, status = run(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    if report is not None:
        out = sys.stderr if status == EXIT_INPUT else sys.stdout
        out.write(dumps(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
