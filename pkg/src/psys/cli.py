"""Command-line interface.

Exit codes are a stable contract:
  0  success
  1  usage error or unparseable input
  2  the input parsed but failed validation
  3  a budget ran out before reaching a verdict
  4  a property or verification check failed

Machine-readable results go to standard output (JSON, or the documented
line formats); diagnostics and violations go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dsl, rm
from .engine import Engine, trace_to_lines
from .explore import ExploreBudget, explore
from .measures import classify, profile
from .model import validate
from .multiset import MultisetSyntaxError, parse_multiset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_MISMATCH = 4


class BudgetExhausted(Exception):
    pass


class _CliFailure(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; our contract reserves 2 for
    validation failures, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as err:
        print(f"error: cannot read {path}: {err}", file=sys.stderr)
        raise _CliFailure(EXIT_USAGE) from err


def _load_system(path: str):
    sys_, diags = dsl.parse_system(_read_text(path))
    if sys_ is None:
        for diag in diags:
            print(f"{path}:{diag}", file=sys.stderr)
        raise _CliFailure(EXIT_USAGE)
    return sys_


def _validated_system(path: str):
    sys_ = _load_system(path)
    report = validate(sys_)
    for violation in report.violations:
        print(
            f"{path}: {violation.code} [{violation.severity}] "
            f"{violation.location}: {violation.message}",
            file=sys.stderr,
        )
    if not report.ok:
        raise _CliFailure(EXIT_INVALID)
    return sys_


def cmd_validate(args) -> int:
    sys_, diags = dsl.parse_system(_read_text(args.file))
    if sys_ is None:
        for diag in diags:
            print(f"{args.file}:{diag}", file=sys.stderr)
        return EXIT_USAGE
    report = validate(sys_)
    if args.pretty:
        print(str(report))
    else:
        print(
            json.dumps(
                {
                    "ok": report.ok,
                    "violations": [
                        {
                            "code": v.code,
                            "severity": v.severity,
                            "location": v.location,
                            "message": v.message,
                        }
                        for v in report.violations
                    ],
                }
            )
        )
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_run(args) -> int:
    sys_ = _validated_system(args.file)
    engine = Engine(sys_)
    if args.accept is not None:
        if args.region is None:
            print("error: --accept requires --region", file=sys.stderr)
            return EXIT_USAGE
        try:
            input_objects = parse_multiset(args.accept)
        except MultisetSyntaxError as err:
            print(f"error: bad --accept multiset: {err}", file=sys.stderr)
            return EXIT_USAGE
        if args.region not in engine.labels:
            print(f"error: no region labeled {args.region}", file=sys.stderr)
            return EXIT_USAGE
        status, trace = engine.run_accepting(
            input_objects,
            args.region,
            seed=args.seed,
            max_steps=args.max_steps,
            policy=args.policy,
        )
        for line in trace_to_lines(engine, trace):
            print(line)
        print(json.dumps({"accept": status}))
        return EXIT_OK if status == "accepted" else EXIT_BUDGET
    trace = engine.run(seed=args.seed, max_steps=args.max_steps, policy=args.policy)
    for line in trace_to_lines(engine, trace):
        print(line)
    return EXIT_OK if trace.halted else EXIT_BUDGET


def cmd_explore(args) -> int:
    sys_ = _validated_system(args.file)
    budget = ExploreBudget(
        max_depth=args.max_depth,
        max_total_objects=args.max_objects,
        max_branches=args.max_branches,
        max_configs=args.max_configs,
    )
    outcome = explore(sys_, budget)
    print(json.dumps(outcome.as_dict(), indent=2 if args.pretty else None))
    return EXIT_OK if outcome.exhausted else EXIT_BUDGET


def cmd_profile(args) -> int:
    sys_ = _validated_system(args.file)
    measured = profile(sys_)
    if args.pretty:
        for key, value in measured.as_dict().items():
            print(f"{key:18} {value}")
    else:
        print(json.dumps(measured.as_dict()))
    return EXIT_OK


def cmd_classify(args) -> int:
    rules, diags = dsl.parse_interactions(_read_text(args.file))
    if diags:
        for diag in diags:
            print(f"{args.file}:{diag}", file=sys.stderr)
        return EXIT_USAGE
    for rule in rules:
        if args.pretty:
            from .model import interaction_rule_text

            print(f"{interaction_rule_text(rule):48} {classify(rule)}")
        else:
            print(classify(rule))
    return EXIT_OK


def _load_machine(path: str) -> rm.RegisterMachine:
    machine, diags = dsl.parse_machine(_read_text(path))
    if machine is None:
        for diag in diags:
            print(f"{path}:{diag}", file=sys.stderr)
        raise _CliFailure(EXIT_USAGE)
    problems = rm.machine_problems(machine)
    if problems:
        for problem in problems:
            print(f"{path}: {problem}", file=sys.stderr)
        raise _CliFailure(EXIT_INVALID)
    return machine


def cmd_compile_rm(args) -> int:
    machine = _load_machine(args.file)
    try:
        compiled = rm.compile_machine(machine)
    except rm.CompileError as err:
        print(f"{args.file}: {err}", file=sys.stderr)
        return EXIT_INVALID
    text = dsl.print_system(compiled.system)
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
        print(
            json.dumps(
                {
                    "output": args.output,
                    "rules": len(compiled.system.rules),
                    "objects": len(compiled.system.alphabet),
                    "max_antiport_size": compiled.certificate,
                }
            )
        )
    return EXIT_OK


def cmd_rm_verify(args) -> int:
    machine = _load_machine(args.file)
    try:
        report = rm.verify_compilation(machine, value_bound=args.bound)
    except rm.CompileError as err:
        print(f"{args.file}: {err}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(report.as_dict(), indent=2 if args.pretty else None))
    for message in report.messages:
        print(message, file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def build_parser() -> _Parser:
    parser = _Parser(
        prog="psys",
        description="Simulate, explore and analyze symport/antiport P systems.",
    )
    sub = parser.add_subparsers(metavar="command")

    p = sub.add_parser("validate", help="check a system file for rule violations")
    p.add_argument("file")
    p.add_argument("--pretty", action="store_true", help="human-readable report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run one computation, streaming the trace")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument(
        "--policy",
        choices=("enumerate-uniform", "greedy-random"),
        default="enumerate-uniform",
    )
    p.add_argument(
        "--accept",
        metavar="MULTISET",
        help="accepting mode: add this input and report whether the system halts",
    )
    p.add_argument("--region", type=int, help="region receiving the --accept input")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="enumerate halting results within budgets")
    p.add_argument("file")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--max-objects", type=int, default=64)
    p.add_argument("--max-branches", type=int, default=10_000)
    p.add_argument("--max-configs", type=int, default=1_000_000)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("profile", help="descriptional-complexity summary")
    p.add_argument("file")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("classify", help="classify interaction rules, one per line")
    p.add_argument("file")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compile-rm", help="compile a register machine to a system file")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="write the system here instead of stdout")
    p.set_defaults(func=cmd_compile_rm)

    p = sub.add_parser("rm-verify", help="bounded equivalence audit of the compiler")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_rm_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _CliFailure as failure:
        return failure.code


if __name__ == "__main__":
    sys.exit(main())
