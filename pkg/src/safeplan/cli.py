"""Command-line front end.

Exit codes: 0 success, 1 a negative finding (unrealizable specification,
failed verification, safety violation), 2 unreadable or invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .dsl import SourceText, parse_specification
from .model import SpecificationError
from .planner import planner_for
from .policy import ConvergenceError, UnrealizableError, build_policy, explain, spec_digest
from .policyfile import PolicyFormatError, dump_policy, load_policy
from .simulator import SimParams, simulate
from .verifier import DEFAULT_MAX_COUNTEREXAMPLES, verify_policy

EXIT_OK, EXIT_FINDING, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc.strerror or exc}") from None


def _spec(path: str):
    text = _read(path)
    try:
        return parse_specification(SourceText(text, path))
    except SpecificationError as exc:
        raise InputError("\n".join(f"{path}:{d}" for d in exc.diagnostics)) from None


def _policy(path: str, spec):
    try:
        return load_policy(_read(path), spec)
    except PolicyFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(data: dict) -> None:
    print(json.dumps(data, indent=2))


def default_policy_path(spec_path: str) -> Path:
    path = Path(spec_path)
    return path.with_name(path.stem + ".policy.json")


def cmd_plan(args) -> int:
    spec = _spec(args.spec)
    try:
        policy = build_policy(spec)
    except UnrealizableError as exc:
        if args.json:
            print(json.dumps(exc.report.to_dict(spec), indent=2), file=sys.stderr)
        else:
            _err("specification is unrealizable")
            _err(exc.report.render().rstrip())
        return EXIT_FINDING
    except ConvergenceError as exc:
        _err(f"internal error: {exc}")
        return EXIT_FINDING
    out = Path(args.output) if args.output else default_policy_path(args.spec)
    out.write_text(dump_policy(policy, spec), encoding="utf-8")
    if args.explain:
        planner = planner_for(spec)
        for entry in policy.entries:
            plan = planner.find_plan(entry.state)
            steps = " ; ".join(", ".join(sorted(s)) for s in plan.steps) or "(idle)"
            print(f"{entry.state}: {steps}")
    _err(f"wrote {len(policy)} entries to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args.spec)
    policy = _policy(args.policy, spec)
    digest = spec_digest(spec)
    if policy.meta.spec_digest != digest:
        _err(f"warning: policy digest {policy.meta.spec_digest or '(none)'} does not match specification {digest}")
    report = verify_policy(spec, policy, args.max_counterexamples)
    if args.json:
        _emit(report.to_dict(spec))
    else:
        print(report.render(), end="")
    return EXIT_OK if report.passed else EXIT_FINDING


def _probability(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability out of [0, 1]: {text}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def parse_state(text: str, spec):
    """Parse ``"S_A is x, S_B is y"`` into a full state of ``spec``."""
    assignment = {}
    for part in text.split(","):
        words = part.split()
        if len(words) != 3 or words[1] != "is":
            raise InputError(f"bad state literal {part.strip()!r}; expected '<variable> is <value>'")
        if words[0] in assignment:
            raise InputError(f"variable {words[0]} given twice")
        assignment[words[0]] = words[2]
    try:
        return spec.state(assignment)
    except ValueError as exc:
        raise InputError(f"bad start state: {exc}") from None


def cmd_simulate(args) -> int:
    spec = _spec(args.spec)
    policy = _policy(args.policy, spec)
    start = parse_state(args.start, spec) if args.start else None
    params = SimParams(seed=args.seed, max_ticks=args.ticks, p_nominal=args.p_nominal,
                       p_stall=args.p_stall, runs=args.runs, start=start)
    try:
        report = simulate(spec, policy, params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.json:
        _emit(report.to_dict(spec))
    else:
        print(report.render(), end="")
    return EXIT_OK if report.violations == 0 else EXIT_FINDING


def cmd_explain(args) -> int:
    spec = _spec(args.spec)
    report = explain(spec)
    if args.json:
        _emit(report.to_dict(spec))
    else:
        print(report.render(), end="")
    return EXIT_FINDING if report else EXIT_OK


def cmd_lint(args) -> int:
    _spec(args.spec)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="safeplan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="synthesise a policy")
    p.add_argument("spec")
    p.add_argument("-o", "--output", help="policy file (default: <spec>.policy.json)")
    p.add_argument("--explain", action="store_true", help="print the full plan behind every entry")
    p.add_argument("--json", action="store_true", help="unrealizability report as JSON")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="check a policy against a specification")
    p.add_argument("spec")
    p.add_argument("policy")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-counterexamples", type=_positive, default=DEFAULT_MAX_COUNTEREXAMPLES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="run a policy against random outcomes")
    p.add_argument("spec")
    p.add_argument("policy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ticks", type=_positive, default=50)
    p.add_argument("--p-nominal", type=_probability, default=Fraction(4, 5))
    p.add_argument("--p-stall", type=_probability, default=Fraction(0))
    p.add_argument("--runs", type=_positive, default=1)
    p.add_argument("--start", help='e.g. "S_Location is corridor, S_Battery is low, ..."')
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("explain", help="list states for which no plan exists")
    p.add_argument("spec")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("lint", help="parse and validate only")
    p.add_argument("spec")
    p.set_defaults(func=cmd_lint)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
