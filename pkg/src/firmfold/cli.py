"""Command-line front end.

Four subcommands: `verify` reports well-formedness findings, `fold`
rewrites a graph to its fixpoint, `explore` exhausts the rewrite state
space and reports whether it converges, and `example` emits a small
built-in program for experimenting.  Exit codes are uniform: 0 on
success, 1 when the requested outcome was not reached (violations
found, no fixpoint within the step budget, state space too large), 2
on unusable input or arguments.

`FIRMFOLD_MAX_STEPS` provides the default step budget for `fold` when
`--max-steps` is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .engine import explore, fold
from .errors import GxlError, StateLimitExceeded, StepLimitExceeded
from .graph import RELATIONS, ProgramGraph
from .gxl import DialectTag, export_dot, load, save_native
from .rules import CATALOG, build_min_plus_one
from .verifier import verify

MAX_STEPS_ENV = "FIRMFOLD_MAX_STEPS"
DEFAULT_MAX_STEPS = 10_000


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _read_graph(path: str, dialect_name: str | None) -> ProgramGraph:
    dialect = DialectTag(dialect_name) if dialect_name else None
    return load(Path(path).read_bytes(), dialect)


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        g = _read_graph(args.input, args.dialect)
    except (OSError, GxlError) as exc:
        return _fail(str(exc))
    violations = verify(g)
    for violation in violations:
        print(violation.render())
    return 1 if violations else 0


def _max_steps(args: argparse.Namespace) -> int:
    if args.max_steps is not None:
        return args.max_steps
    raw = os.environ.get(MAX_STEPS_ENV)
    if raw is None:
        return DEFAULT_MAX_STEPS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{MAX_STEPS_ENV} must be an integer, got {raw!r}") from None


def _cmd_fold(args: argparse.Namespace) -> int:
    try:
        max_steps = _max_steps(args)
        g = _read_graph(args.input, args.dialect)
    except (OSError, GxlError, ValueError) as exc:
        return _fail(str(exc))
    try:
        result = fold(g, CATALOG, max_steps)
    except StepLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        Path(args.output).write_bytes(save_native(result.graph))
        if args.trace:
            Path(args.trace).write_text(result.format_trace(), encoding="utf-8")
        if args.dot:
            Path(args.dot).write_text(export_dot(result.graph), encoding="utf-8")
    except OSError as exc:
        return _fail(str(exc))
    return 0


def _cmd_explore(args: argparse.Namespace) -> int:
    try:
        g = _read_graph(args.input, args.dialect)
    except (OSError, GxlError) as exc:
        return _fail(str(exc))
    try:
        lts = explore(g, CATALOG, args.max_states)
    except StateLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    converges = lts.final_states_isomorphic()
    report = (
        f"states: {len(lts.states)}\n"
        f"transitions: {len(lts.transitions)}\n"
        f"final_states: {len(lts.final)}\n"
        f"final_states_isomorphic: {'true' if converges else 'false'}\n"
    )
    if args.report:
        try:
            Path(args.report).write_text(report, encoding="utf-8")
        except OSError as exc:
            return _fail(str(exc))
    else:
        print(report, end="")
    return 0


def _cmd_example(args: argparse.Namespace) -> int:
    g = build_min_plus_one(args.a, args.b, args.rel)
    try:
        Path(args.output).write_bytes(save_native(g))
    except OSError as exc:
        return _fail(str(exc))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmfold",
        description="Constant folding on program graphs by graph rewriting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dialect(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--dialect",
            choices=[d.value for d in DialectTag],
            help="input dialect (default: auto-detect)",
        )

    p_verify = sub.add_parser("verify", help="check well-formedness")
    p_verify.add_argument("input", help="GXL file to check")
    add_dialect(p_verify)
    p_verify.set_defaults(handler=_cmd_verify)

    p_fold = sub.add_parser("fold", help="rewrite to the fixpoint")
    p_fold.add_argument("input", help="GXL file to fold")
    p_fold.add_argument("output", help="native GXL file to write")
    p_fold.add_argument("--trace", help="write the applied rule sequence here")
    p_fold.add_argument("--dot", help="write a Graphviz rendering of the result here")
    p_fold.add_argument(
        "--max-steps",
        type=int,
        default=None,
        help=f"step budget (default: ${MAX_STEPS_ENV} or {DEFAULT_MAX_STEPS})",
    )
    add_dialect(p_fold)
    p_fold.set_defaults(handler=_cmd_fold)

    p_explore = sub.add_parser("explore", help="exhaust the rewrite state space")
    p_explore.add_argument("input", help="GXL file to explore from")
    p_explore.add_argument(
        "--max-states", type=int, default=10_000, help="state budget (default: 10000)"
    )
    p_explore.add_argument("--report", help="write the report here instead of stdout")
    add_dialect(p_explore)
    p_explore.set_defaults(handler=_cmd_explore)

    p_example = sub.add_parser("example", help="write a built-in example program")
    p_example.add_argument("--a", type=int, default=3, help="first constant")
    p_example.add_argument("--b", type=int, default=5, help="second constant")
    p_example.add_argument(
        "--rel", choices=list(RELATIONS), default="lt", help="comparison relation"
    )
    p_example.add_argument("-o", "--output", required=True, help="native GXL file to write")
    p_example.set_defaults(handler=_cmd_example)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
