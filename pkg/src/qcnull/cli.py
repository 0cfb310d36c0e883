"""Command-line entry point: ``qcnull <command> ...`` or ``qcnull --check FILE``.

Exit status is 0 when every check passes (or fails exactly as documented),
1 on a verification failure and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import certcheck, classify, padic, torus
from .circle import VARIANTS, verify_first_digit_theorem
from .finite import (generated_subgroup, is_quasi_convex, parse_elements, parse_group,
                     standard_null_set)
from .sequences import InsufficientPrefix, SequenceSpec, is_prime, parse_int_list

SCHEMA = "qcnull.report/1"
COMMANDS = ("hull", "verify-cyclic", "verify-torus", "verify-padic", "density-probe",
            "digit-theorems", "classify")
FORMATS = ("text", "json", "jsonl")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    format: str = "text"
    output: Path | None = None


@dataclass
class RunResult:
    exit_code: int
    document: dict
    lines: list[str]


# -- argument types ------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _prime(text: str) -> int:
    v = _positive(text)
    if not is_prime(v):
        raise argparse.ArgumentTypeError(f"{v} is not prime")
    return v


def _primes(text: str) -> list[int]:
    try:
        ps = parse_int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")
    bad = [p for p in ps if not is_prime(p)]
    if bad or not ps:
        raise argparse.ArgumentTypeError(f"not a list of primes: {text!r}")
    return ps


def _int_list(text: str) -> list[int]:
    try:
        return parse_int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}; use e.g. 0,1,2 or 0..4")


def _group(text: str):
    try:
        return parse_group(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


# -- commands ------------------------------------------------------------------

def _spec(params: dict, p: int) -> SequenceSpec:
    a = params.get("a")
    mode = params.get("mode") or ("naturals" if a is None else "prefix")
    try:
        return SequenceSpec(p, tuple(a or ()), mode)
    except ValueError as e:
        raise UsageError(f"--a: {e}")


def _elements(group, text: str):
    try:
        return parse_elements(group, text)
    except (ValueError, TypeError) as e:
        raise UsageError(f"--set: {e}")


def _hull_report(group, S) -> dict:
    qc, cert = is_quasi_convex(group, S)
    rep = cert.to_dict()
    hull_elems = sorted(set(group.elements()) - set(cert.excluded))
    rep["hull"] = [list(x.coords) for x in hull_elems]
    rep["hull_size"] = len(hull_elems)
    rep["subgroup_size"] = len(generated_subgroup(group, S))
    rep["quasi_convex"] = qc
    return rep


def _run_hull(params):
    group = params["group"]
    S = _elements(group, params["set"])
    rep = _hull_report(group, S)
    rep["status"] = "pass"
    lines = [f"group {group}: |S| = {len(S)}, |hull| = {rep['hull_size']}, "
             f"|<S>| = {rep['subgroup_size']}, quasi-convex = {str(rep['quasi_convex']).lower()}",
             f"{len(rep['certificates'])} excluded elements certified"]
    return 0, [rep], lines


def _run_verify_cyclic(params):
    group = params["group"]
    S = standard_null_set(group)
    rep = _hull_report(group, S)
    rep["status"] = "pass" if rep["quasi_convex"] else "fail"
    lines = [f"group {group}: standard null set of size {len(S)}, hull size {rep['hull_size']}: "
             + ("quasi-convex" if rep["quasi_convex"] else "NOT quasi-convex")]
    return (0 if rep["quasi_convex"] else 1), [rep], lines


def _sweep_lines(rep: dict) -> list[str]:
    spec = rep["spec"]
    head = (f"{rep['kind']} p={spec['p']} a={spec['a']} mode={spec['mode']} depth={rep['depth']}: "
            f"{rep['checked']} points, {rep['members']} members, "
            f"{len(rep['certificates'])} separated, {len(rep['unseparated'])} unseparated")
    stages = ", ".join(f"{k}={v}" for k, v in rep["stages"].items())
    out = [head]
    if stages:
        out.append(f"  stages: {stages}")
    out.extend(f"  UNSEPARATED {x}" for x in rep["unseparated"])
    return out


def _run_verify_torus(params):
    spec = _spec(params, params["p"])
    depth = params["depth"]
    try:
        report = torus.verify_quasi_convex(spec, depth, params.get("budget"), params.get("workers"))
    except InsufficientPrefix as e:
        raise UsageError(f"--depth/--a: {e}")
    except ValueError as e:
        raise UsageError(f"--p: {e}")
    rep = report.to_dict()
    return (0 if report.ok else 1), [rep], _sweep_lines(rep)


def _run_verify_padic(params):
    spec = _spec(params, params["p"])
    try:
        report = padic.verify_quasi_convex(spec, params["depth"], params.get("level_budget"))
    except InsufficientPrefix as e:
        raise UsageError(f"--depth/--a: {e}")
    except ValueError as e:
        raise UsageError(f"--p: {e}")
    rep = report.to_dict()
    return (0 if report.ok else 1), [rep], _sweep_lines(rep)


def _run_density_probe(params):
    reports, lines, ok = [], [], True
    sides = ("torus", "padic") if params["side"] == "both" else (params["side"],)
    for p in params["p"]:
        if p not in (2, 3):
            raise UsageError(f"--p: density probes are for p = 2 and p = 3, got {p}")
        spec = _spec(params, p)
        for side in sides:
            try:
                if side == "torus":
                    r = torus.density_probe(spec, params["depth"], params["budget"],
                                            params.get("sample"), params["seed"])
                else:
                    r = padic.density_probe(spec, params["depth"], params["level_budget"],
                                            params.get("sample"), params["seed"])
            except InsufficientPrefix as e:
                raise UsageError(f"--depth/--a: {e}")
            ok &= r.ok
            d = r.to_dict()
            reports.append(d)
            lines.append(f"{side} p={p} depth={params['depth']} "
                         f"{'budget' if side == 'torus' else 'level budget'}={r.budget}: "
                         f"{len(d['probed'])} non-members probed, {d['separations']} separated "
                         f"({d['status']})")
    return (0 if ok else 1), reports, lines


def _run_digit_theorems(params):
    variants = VARIANTS if params["variant"] == "all" else (params["variant"],)
    reports, lines, ok = [], [], True
    for p in params["p"]:
        if p < 3:
            raise UsageError(f"--p: balanced digits need an odd prime, got {p}")
        for v in variants:
            if v.startswith("cor") and p < 5:
                continue
            r = verify_first_digit_theorem(p, params["depth"], v)
            ok &= r.ok
            reports.append(r.to_dict())
            line = (f"variant {v} p={p} depth={params['depth']}: {r.checked} expansions, "
                    f"{r.hypothesis_held} satisfy the hypothesis, "
                    f"{len(r.counterexamples)} counterexamples: {r.status}")
            if r.status == "expected-counterexample":
                line += " (matches the documented exception 11/49)"
            lines.append(line)
    return (0 if ok else 1), reports, lines


def _run_classify(params):
    texts = list(classify.CATALOG) if params["catalog"] else params["descriptors"]
    if not texts:
        raise UsageError("classify: give at least one descriptor or --catalog")
    reports, lines, ok = [], [], True
    for text in texts:
        try:
            d = classify.parse(text)
        except classify.ParseError as e:
            raise UsageError(f"descriptor: {e}")
        v = classify.verdict(d)
        rep = {"kind": "classify", **v.to_dict()}
        cc = classify.compact_conditions(d)
        rep["compact_cross_check"] = cc.to_dict() if cc else None
        status = "pass"
        if cc is not None and not cc.agrees:
            status = "fail"
        if params["catalog"] and classify.CATALOG[text] != v.admits:
            status = "fail"
        rep["status"] = status
        ok &= status == "pass"
        reports.append(rep)
        line = f"{rep['input']}: admits={str(v.admits).lower()}"
        if cc is not None:
            line += f" (compact cross-check agrees={str(cc.agrees).lower()})"
        lines.append(line)
        lines.extend(f"  [{c}] {r}" for c, r in v.justification)
    return (0 if ok else 1), reports, lines


_DISPATCH = {
    "hull": _run_hull,
    "verify-cyclic": _run_verify_cyclic,
    "verify-torus": _run_verify_torus,
    "verify-padic": _run_verify_padic,
    "density-probe": _run_density_probe,
    "digit-theorems": _run_digit_theorems,
    "classify": _run_classify,
}


def run(config: RunConfig) -> RunResult:
    """Dispatch one command; raises UsageError on bad parameters."""
    if config.command not in _DISPATCH:
        raise UsageError(f"unknown command {config.command!r}")
    code, reports, lines = _DISPATCH[config.command](config.params)
    doc = {"schema": SCHEMA, "command": config.command,
           "status": "pass" if code == 0 else "fail", "reports": reports}
    return RunResult(code, doc, lines)


def render(result: RunResult, fmt: str) -> str:
    doc = result.document
    if fmt == "json":
        return json.dumps(doc, indent=1) + "\n"
    if fmt == "jsonl":
        head = {k: v for k, v in doc.items() if k != "reports"}
        return "".join(json.dumps(r) + "\n" for r in [head, *doc["reports"]])
    return "\n".join(result.lines + [f"status: {doc['status']}"]) + "\n"


def run_check(path: Path) -> tuple[int, list[str]]:
    try:
        doc = certcheck.load_document(path)
    except (OSError, ValueError) as e:
        raise UsageError(f"--check: cannot read {path}: {e}")
    if doc.get("schema") != SCHEMA:
        raise UsageError(f"--check: {path} is not a {SCHEMA} document")
    n, problems = certcheck.check_document(doc)
    lines = [f"re-verified {n} certificates from {path}: {len(problems)} discrepancies"]
    lines.extend(f"  {p}" for p in problems)
    return (0 if not problems else 1), lines


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS,
                        help="output format (default text)")
    common.add_argument("--output", "-o", type=Path, default=argparse.SUPPRESS,
                        help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="qcnull", parents=[common],
                                     description="Quasi-convex null sequences: hulls, "
                                                 "verification sweeps and verdicts.")
    parser.add_argument("--check", type=Path, metavar="FILE",
                        help="re-verify every certificate in a structured report")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("hull", parents=[common], help="quasi-convex hull in a finite group")
    p.add_argument("--group", type=_group, required=True, help="e.g. Z5xZ6xZ7")
    p.add_argument("--set", default="std", help='elements like "(1,0),(4,0)", or "std"')

    p = sub.add_parser("verify-cyclic", parents=[common],
                       help="is {0, +-e_k} quasi-convex in a finite product of cyclic groups")
    p.add_argument("--group", type=_group, required=True)

    def sequence_args(p, prime_list=False):
        p.add_argument("--p", type=_primes if prime_list else _prime, required=True)
        p.add_argument("--a", type=_int_list, default=None, help="exponents, e.g. 0,2,4 or 0..4")
        p.add_argument("--mode", choices=("prefix", "exact", "naturals"), default=None,
                       help="prefix (default with --a), exact, or naturals (default without)")
        p.add_argument("--depth", type=_positive, required=True)

    p = sub.add_parser("verify-torus", parents=[common],
                       help="separate every point of denominator p^depth outside K")
    sequence_args(p)
    p.add_argument("--budget", type=_positive, default=None, help="largest |n| in the scan")
    p.add_argument("--workers", type=_positive, default=None,
                   help="processes (default $QCNULL_WORKERS or 1)")

    p = sub.add_parser("verify-padic", parents=[common],
                       help="separate every coset of p^depth J_p avoiding L")
    sequence_args(p)
    p.add_argument("--level-budget", type=int, default=None,
                   help="highest character level in the scan (default depth-1)")

    p = sub.add_parser("density-probe", parents=[common],
                       help="look for separators for p = 2, 3 (none expected)")
    sequence_args(p, prime_list=True)
    p.add_argument("--side", choices=("torus", "padic", "both"), default="both")
    p.add_argument("--budget", type=_positive, default=10 ** 4)
    p.add_argument("--level-budget", type=int, default=6)
    p.add_argument("--sample", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("digit-theorems", parents=[common],
                       help="exhaustive check of first-digit bounds")
    p.add_argument("--p", type=_primes, required=True, help="odd primes, e.g. 5,7,11,13")
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--variant", choices=VARIANTS + ("all",), default="all")

    p = sub.add_parser("classify", parents=[common],
                       help="does a group admit a non-trivial quasi-convex null sequence")
    p.add_argument("descriptors", nargs="*", help='e.g. "J5" or "Z2^w x Z3^w"')
    p.add_argument("--catalog", action="store_true", help="run the built-in catalog")
    return parser


_GLOBAL = {"command", "format", "output", "check"}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "text")
    output = getattr(args, "output", None)
    try:
        if args.check is not None:
            if args.command:
                parser.error("--check takes no command")
            code, lines = run_check(args.check)
            text = "\n".join(lines) + "\n"
        else:
            if not args.command:
                parser.error("a command is required (or --check FILE)")
            params = {k: v for k, v in vars(args).items() if k not in _GLOBAL}
            config = RunConfig(args.command, params, fmt, output)
            result = run(config)
            code, text = result.exit_code, render(result, fmt)
    except UsageError as e:
        print(f"qcnull: error: {e}", file=sys.stderr)
        return 2
    if output is not None:
        output.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
