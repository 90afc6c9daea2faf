"""Reference execution: turns a program into the step-by-step trace that
students are asked to reproduce.

One trace step per executed line.  Assignments record the environment
*after* the write; a while header records one step per condition check
(including the final failing one) and leaves the environment untouched.
Iteration vectors have one 1-based counter per enclosing loop, innermost
last; the header line belongs to its own loop, so its steps carry that
loop's counter too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence, Union

from .errors import LineExplorerError
from .language import (
    INT_MAX,
    INT_MIN,
    Assign,
    Binary,
    Expr,
    If,
    Literal,
    Program,
    Stmt,
    Unary,
    Value,
    Var,
    While,
    render_value,
)

Environment = dict[str, Value]
IterationVector = tuple[int, ...]


class Termination(Enum):
    NORMAL = "normal"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class ExecutionLimits:
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class TraceStep:
    index: int
    line: int
    iteration: IterationVector
    env_after: Mapping[str, Value]
    next_line: Optional[int]  # None means the program ends after this step


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]
    columns: tuple[str, ...]
    terminated: Termination

    def final_env(self) -> Mapping[str, Value]:
        return self.steps[-1].env_after if self.steps else {}


class TraceRuntimeError(LineExplorerError):
    """Execution failed (overflow, division by zero, bad operand types,
    unassigned read).  Carries the steps completed before the failure so
    callers can still show a partial table."""

    def __init__(self, line: int, message: str, steps: tuple[TraceStep, ...] = ()):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
        self.steps = steps


class UnknownVariable(LineExplorerError):
    pass


class UnknownCell(LineExplorerError):
    pass


class _NotExecuted:
    """Singleton marker for worksheet cells with no value: either the
    variable is unassigned at that step or the (line, iteration) never ran."""

    _instance: Optional["_NotExecuted"] = None

    def __new__(cls) -> "_NotExecuted":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_EXECUTED"


NOT_EXECUTED = _NotExecuted()
CellValue = Union[Value, _NotExecuted]


# --- expression evaluation ------------------------------------------------

def _type_name(v: Value) -> str:
    return "bool" if isinstance(v, bool) else "int"


def _want_int(v: Value, op: str, line: int) -> int:
    if isinstance(v, bool):
        raise TraceRuntimeError(line, f"operator '{op}' needs an int, got {_type_name(v)}")
    return v


def _want_bool(v: Value, op: str, line: int) -> bool:
    if not isinstance(v, bool):
        raise TraceRuntimeError(line, f"operator '{op}' needs a bool, got {_type_name(v)}")
    return v


def _check_range(result: int, op: str, line: int) -> int:
    if result < INT_MIN or result > INT_MAX:
        raise TraceRuntimeError(line, f"'{op}' overflowed the 64-bit integer range")
    return result


def evaluate(expr: Expr, env: Mapping[str, Value], line: int) -> Value:
    """Evaluate one expression under 64-bit integer semantics.

    Division and remainder truncate toward zero (so the remainder takes
    the dividend's sign), && and || short-circuit, and == / != demand
    operands of the same type rather than coercing.
    """
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        if expr.name not in env:
            raise TraceRuntimeError(line, f"variable '{expr.name}' read before assignment")
        return env[expr.name]
    if isinstance(expr, Unary):
        v = evaluate(expr.operand, env, line)
        if expr.op == "-":
            return _check_range(-_want_int(v, "-", line), "-", line)
        return not _want_bool(v, "!", line)
    assert isinstance(expr, Binary)
    op = expr.op
    if op in ("&&", "||"):
        left = _want_bool(evaluate(expr.left, env, line), op, line)
        if op == "&&" and not left:
            return False
        if op == "||" and left:
            return True
        return _want_bool(evaluate(expr.right, env, line), op, line)
    lv = evaluate(expr.left, env, line)
    rv = evaluate(expr.right, env, line)
    if op in ("==", "!="):
        if isinstance(lv, bool) is not isinstance(rv, bool):
            raise TraceRuntimeError(
                line, f"'{op}' compares {_type_name(lv)} with {_type_name(rv)}")
        return (lv == rv) if op == "==" else (lv != rv)
    a = _want_int(lv, op, line)
    b = _want_int(rv, op, line)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "+":
        return _check_range(a + b, op, line)
    if op == "-":
        return _check_range(a - b, op, line)
    if op == "*":
        return _check_range(a * b, op, line)
    if op in ("/", "%"):
        if b == 0:
            raise TraceRuntimeError(line, "division by zero")
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        if op == "/":
            return _check_range(q, op, line)
        return a - b * q  # same sign as the dividend; cannot overflow
    raise AssertionError(f"unhandled operator {op!r}")


# --- execution ------------------------------------------------------------

def columns_for(program: Program, initial_env: Mapping[str, Value]) -> tuple[str, ...]:
    """Worksheet column order: initial-environment variables first (in
    their given order), then program variables in first-assignment order."""
    cols = list(initial_env)
    for name in program.declared_variables:
        if name not in cols:
            cols.append(name)
    return tuple(cols)


def _run(program: Program, env: Environment,
         loop_stack: list[int]) -> Iterator[tuple[int, Environment, IterationVector]]:
    """Yield (line, env snapshot, iteration vector) per executed line."""

    def block(stmts: tuple[Stmt, ...]) -> Iterator[tuple[int, Environment, IterationVector]]:
        for st in stmts:
            if isinstance(st, Assign):
                env[st.target] = evaluate(st.value, env, st.line)
                yield st.line, dict(env), tuple(loop_stack)
            elif isinstance(st, While):
                loop_stack.append(1)
                try:
                    while True:
                        keep_going = _want_bool(
                            evaluate(st.condition, env, st.line), "while", st.line)
                        yield st.line, dict(env), tuple(loop_stack)
                        if not keep_going:
                            break
                        yield from block(st.body)
                        loop_stack[-1] += 1
                finally:
                    loop_stack.pop()
            else:
                assert isinstance(st, If)
                taken = _want_bool(evaluate(st.condition, env, st.line), "if", st.line)
                yield st.line, dict(env), tuple(loop_stack)
                yield from block(st.then_body if taken else (st.else_body or ()))

    yield from block(program.statements)


def _freeze(raw: list[tuple[int, Environment, IterationVector]],
            end: Optional[int]) -> tuple[TraceStep, ...]:
    """Fill in next_line links; ``end`` is where control was headed after
    the last recorded step (an error line, the first unrecorded line at
    the step limit, or None for normal termination)."""
    steps = []
    for k, (line, env, vec) in enumerate(raw):
        nxt = raw[k + 1][0] if k + 1 < len(raw) else end
        steps.append(TraceStep(k, line, vec, env, nxt))
    return tuple(steps)


def execute(program: Program, initial_env: Mapping[str, Value],
            limits: ExecutionLimits = ExecutionLimits()) -> Trace:
    """Run the program and record every executed line.

    The step limit is only reported when the program *would* have gone
    past it: a run that finishes in exactly max_steps steps terminates
    normally.  Runtime failures raise TraceRuntimeError with the partial
    step list attached.
    """
    env: Environment = dict(initial_env)
    cols = columns_for(program, initial_env)
    raw: list[tuple[int, Environment, IterationVector]] = []
    gen = _run(program, env, [])
    try:
        while True:
            if len(raw) == limits.max_steps:
                try:
                    overflow = next(gen)
                except StopIteration:
                    break
                gen.close()
                return Trace(_freeze(raw, overflow[0]), cols, Termination.STEP_LIMIT)
            try:
                raw.append(next(gen))
            except StopIteration:
                break
    except TraceRuntimeError as err:
        raise TraceRuntimeError(err.line, err.message, _freeze(raw, err.line)) from None
    return Trace(_freeze(raw, None), cols, Termination.NORMAL)


# --- worksheet views ------------------------------------------------------

def trace_cell(trace: Trace, line: int, iteration: IterationVector,
               variable: str) -> CellValue:
    """Ground-truth content of one worksheet cell.

    Raises UnknownVariable for a name outside the trace's columns and
    UnknownCell for a (line, iteration) pair the execution never reached.
    """
    if variable not in trace.columns:
        raise UnknownVariable(f"'{variable}' is not a column of this trace")
    iteration = tuple(iteration)
    for step in trace.steps:
        if step.line == line and step.iteration == iteration:
            if variable in step.env_after:
                return step.env_after[variable]
            return NOT_EXECUTED
    raise UnknownCell(f"line {line} was never executed with iteration {iteration or '()'}")


@dataclass(frozen=True)
class WorksheetLayout:
    """Which (line, iteration) rows exist on the answer sheet, per line,
    in execution order."""

    columns: tuple[str, ...]
    line_iterations: Mapping[int, tuple[IterationVector, ...]]


def worksheet_layout(program: Program, trace: Trace) -> WorksheetLayout:
    per_line: dict[int, list[IterationVector]] = {
        line: [] for line in program.executable_lines()}
    for step in trace.steps:
        per_line[step.line].append(step.iteration)
    return WorksheetLayout(
        columns=trace.columns,
        line_iterations={line: tuple(vecs) for line, vecs in per_line.items()},
    )


# --- rendering ------------------------------------------------------------

def render_iteration(vec: IterationVector) -> str:
    """Dotted counter display: () -> "", (2,) -> "2", (2, 1) -> "2.1"."""
    return ".".join(str(n) for n in vec)


def render_steps(columns: Sequence[str], steps: Sequence[TraceStep]) -> str:
    """Fixed-width text table, one row per step; also covers the partial
    step list salvaged from an errored run.

    Deterministic for given steps: same steps in, same bytes out.
    """
    header = ["step", "line", "iteration", *columns]
    rows = [header]
    for step in steps:
        cells = [str(step.index), str(step.line), render_iteration(step.iteration)]
        for col in columns:
            cells.append(render_value(step.env_after[col]) if col in step.env_after else "")
        rows.append(cells)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    return "\n".join(lines) + "\n"


def render_table(trace: Trace) -> str:
    return render_steps(trace.columns, trace.steps)


def trace_payload(trace: Trace) -> dict:
    """JSON-ready form of a trace (machine CLI output, demonstration API)."""
    return {
        "columns": list(trace.columns),
        "terminated": trace.terminated.value,
        "steps": [
            {
                "index": s.index,
                "line": s.line,
                "iteration": list(s.iteration),
                "env_after": dict(s.env_after),
                "next_line": s.next_line,
            }
            for s in trace.steps
        ],
    }
