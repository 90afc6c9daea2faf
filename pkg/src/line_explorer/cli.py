"""Author-facing command line: trace, validate, grade, sus, serve.

Output discipline: results go to stdout and are byte-stable for
identical inputs (no timestamps, no absolute paths); notices and
diagnostics go to stderr.  Exit codes: 0 success, 1 rejected input
(parse, validation, schema, bad arguments), 2 runtime trouble (runtime
error in the traced program, or the step budget cutting a run short).

Every relevant flag can also be set through the environment with the
``LINE_EXPLORER_`` prefix (``--max-steps`` becomes
``LINE_EXPLORER_MAX_STEPS``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import LineExplorerError, SchemaError
from .exercises import TraceError, ValidationError, load_exercise
from .grading import answer_from_payload, grade_answers, result_to_payload
from .language import (
    ExerciseMode,
    ParseError,
    Severity,
    SourceProgram,
    Value,
    parse,
    render_value,
    validate,
)
from .sus import (
    classify,
    cohort_means,
    means_payload,
    read_responses_csv,
    report_table,
    sus_score,
)
from .tracing import (
    ExecutionLimits,
    Termination,
    TraceRuntimeError,
    columns_for,
    execute,
    render_steps,
    render_table,
    trace_payload,
)
from .service import ServiceConfig, serve

ENV_PREFIX = "LINE_EXPLORER_"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

STEP_MARKS = {"correct": "ok", "incorrect": "no", "not_executed": "--"}


def _env_default(option: str, fallback=None):
    return os.environ.get(ENV_PREFIX + option.upper().replace("-", "_"), fallback)


def _parse_env_assignments(pairs: Sequence[str]) -> dict[str, Value]:
    env: dict[str, Value] = {}
    for pair in pairs:
        name, sep, raw = pair.partition("=")
        if not sep or not name:
            raise SchemaError(f"--env expects NAME=VALUE, got {pair!r}")
        if raw == "true":
            env[name] = True
        elif raw == "false":
            env[name] = False
        else:
            try:
                env[name] = int(raw, 10)
            except ValueError:
                raise SchemaError(
                    f"--env value for {name!r} must be an integer or "
                    f"true/false, got {raw!r}") from None
    return env


# ---------------------------------------------------------------------------


def cmd_trace(args: argparse.Namespace) -> int:
    text = Path(args.program).read_text(encoding="utf-8")
    env = _parse_env_assignments(args.env)
    limits = ExecutionLimits(max_steps=args.max_steps)
    program = parse(SourceProgram.from_text(text))
    diagnostics = validate(program, env, ExerciseMode.DEMONSTRATION)
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    if errors:
        for diagnostic in errors:
            print(diagnostic.render(), file=sys.stderr)
        return EXIT_INVALID

    columns = columns_for(program, env)
    try:
        trace = execute(program, env, limits)
    except TraceRuntimeError as err:
        if args.format == "machine":
            payload = {
                "columns": list(columns),
                "terminated": "error",
                "error": {"line": err.line, "message": str(err)},
                "steps": trace_payload_steps(err.steps),
            }
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            sys.stdout.write(render_steps(columns, err.steps))
        print(f"RuntimeError: {err}", file=sys.stderr)
        return EXIT_RUNTIME

    if args.format == "machine":
        print(json.dumps(trace_payload(trace), indent=2, sort_keys=True))
    else:
        sys.stdout.write(render_table(trace))
    if trace.terminated is Termination.STEP_LIMIT:
        print(f"StepLimit: stopped after {args.max_steps} steps; "
              "the program was still running", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def trace_payload_steps(steps) -> list[dict]:
    return [
        {"index": s.index, "line": s.line, "iteration": list(s.iteration),
         "env_after": dict(s.env_after), "next_line": s.next_line}
        for s in steps
    ]


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        exercise = load_exercise(Path(args.exercise))
    except ValidationError as err:
        for diagnostic in err.diagnostics:
            print(diagnostic.render(), file=sys.stderr)
        return EXIT_INVALID
    for warning in exercise.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.format == "machine":
        print(json.dumps({
            "id": exercise.id,
            "modes": sorted(m.value for m in exercise.modes),
            "steps": len(exercise.trace.steps),
            "columns": list(exercise.trace.columns),
            "warnings": list(exercise.warnings),
        }, indent=2, sort_keys=True))
    else:
        modes = "+".join(sorted(m.value for m in exercise.modes))
        print(f"{exercise.id}: ok ({len(exercise.trace.steps)} steps, {modes})")
    return EXIT_OK


def _render_result_text(result, columns: Sequence[str]) -> str:
    lines = [
        f"score: {result.score_percent:.1f}",
        f"cells: {result.correct_cells}/{result.total_cells} correct",
        f"steps: {result.path_matched_steps}/{result.truth_steps} on the truth path",
        "",
    ]
    header = ["step", "truth", "claimed", *columns]
    rows = [header]
    for step in result.per_step:
        marks = {cell.variable: STEP_MARKS[cell.verdict.kind.value]
                 for cell in step.cells}
        rows.append([
            str(step.index),
            "-" if step.truth_line is None else str(step.truth_line),
            "-" if step.claimed_line is None else str(step.claimed_line),
            *[marks.get(col, "--") for col in columns],
        ])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    for row in rows:
        lines.append("  ".join(cell.rjust(w)
                               for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_grade(args: argparse.Namespace) -> int:
    exercise = load_exercise(Path(args.exercise))
    try:
        doc = json.loads(Path(args.submission).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SchemaError(f"submission file is not valid JSON: {err}") from err
    if not isinstance(doc, dict) or not isinstance(doc.get("answers"), list):
        raise SchemaError("submission file must be an object with an "
                          "'answers' list")
    answers = [answer_from_payload(a) for a in doc["answers"]]
    result = grade_answers(exercise, answers)
    if args.format == "machine":
        print(json.dumps(result_to_payload(result), indent=2, sort_keys=True))
    else:
        sys.stdout.write(_render_result_text(result, exercise.trace.columns))
    return EXIT_OK


def cmd_sus_score(args: argparse.Namespace) -> int:
    responses, problems = read_responses_csv(Path(args.responses))
    for problem in problems:
        print(problem, file=sys.stderr)
    if args.format == "machine":
        print(json.dumps([
            {"score": sus_score(r).value, "rating": classify(sus_score(r)).label}
            for r in responses
        ], indent=2, sort_keys=True))
    else:
        for response in responses:
            print(f"{sus_score(response).value:.1f}")
    return EXIT_INVALID if problems else EXIT_OK


def cmd_sus_report(args: argparse.Namespace) -> int:
    responses, problems = read_responses_csv(Path(args.responses))
    for problem in problems:
        print(problem, file=sys.stderr)
    if args.format == "machine":
        means = cohort_means(responses, args.group_by)
        print(json.dumps({
            "group_by": args.group_by,
            "total_responses": len(responses),
            "groups": means_payload(means),
        }, indent=2, sort_keys=True))
    else:
        sys.stdout.write(report_table(responses, args.group_by))
    return EXIT_INVALID if problems else EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    config = ServiceConfig(
        exercises_dir=Path(args.exercises_dir),
        data_dir=Path(args.data_dir),
        media_dir=Path(args.media_dir) if args.media_dir else None,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
        session_ttl_seconds=args.session_ttl,
    )
    serve(config, host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "machine"),
                        default=_env_default("format", "text"),
                        help="text tables (default) or JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="line-explorer",
        description="Trace-prediction tutor: author tools and server.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="run a program file and print its trace")
    p.add_argument("program", help="program source file")
    p.add_argument("--env", action="append", default=[], metavar="NAME=VALUE",
                   help="initial variable (repeatable)")
    p.add_argument("--max-steps", type=int,
                   default=_env_default("max-steps", "10000"),
                   help="step budget before the run is cut short")
    _add_format_flag(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("validate", help="check an exercise file end to end")
    p.add_argument("exercise", help="exercise document (.yaml)")
    _add_format_flag(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("grade", help="grade a submission file offline")
    p.add_argument("exercise", help="exercise document (.yaml)")
    p.add_argument("submission", help="JSON file with an 'answers' list")
    _add_format_flag(p)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("sus", help="usability questionnaire tools")
    sus_sub = p.add_subparsers(dest="sus_command", required=True)
    ps = sus_sub.add_parser("score", help="print the score of every response")
    ps.add_argument("responses", help="response CSV file")
    _add_format_flag(ps)
    ps.set_defaults(func=cmd_sus_score)
    pr = sus_sub.add_parser("report", help="per-cohort mean scores")
    pr.add_argument("responses", help="response CSV file")
    pr.add_argument("--group-by", default=_env_default("group-by",
                                                       "academic_program"),
                    help="demographic field to group on")
    _add_format_flag(pr)
    pr.set_defaults(func=cmd_sus_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--exercises-dir",
                   default=_env_default("exercises-dir", "exercises"))
    p.add_argument("--data-dir", default=_env_default("data-dir", "data"))
    p.add_argument("--media-dir", default=_env_default("media-dir"))
    p.add_argument("--ui-dir", default=_env_default("ui-dir"))
    p.add_argument("--host", default=_env_default("host", "127.0.0.1"))
    p.add_argument("--port", type=int, default=_env_default("port", "8000"))
    p.add_argument("--session-ttl", type=float,
                   default=_env_default("session-ttl", "86400"),
                   help="idle seconds before a session expires")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on usage errors; fold that into the "rejected
        # input" code so 2 stays reserved for runtime trouble
        code = err.code if isinstance(err.code, int) else EXIT_INVALID
        return EXIT_OK if code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as err:
        for diagnostic in err.diagnostics:
            print(diagnostic.render(), file=sys.stderr)
        return EXIT_INVALID
    except TraceRuntimeError as err:
        print(f"RuntimeError: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except TraceError as err:
        print(f"TraceError: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except LineExplorerError as err:
        print(f"{err.code}: {err}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as err:
        print(f"IOError: {err}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
