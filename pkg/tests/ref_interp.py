"""Brute-force reference interpreter, tests only.

A second, deliberately different implementation of the language
semantics used as the oracle for the real tracer.  It shares the parsed
AST (so both sides agree on *what* the program is) but nothing of the
execution machinery: no generators, different iteration-counter
bookkeeping (increment-before-check starting from zero instead of
start-at-one), floor-division-with-correction instead of abs-based
truncation, and error signalling by status value instead of exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from line_explorer.language import Assign, Binary, If, Literal, Program, Unary, Var, While

LO = -(2**63)
HI = 2**63 - 1


class RefError(Exception):
    def __init__(self, line: int):
        super().__init__(f"ref failure at line {line}")
        self.line = line


class _Cut(Exception):
    def __init__(self, line: int):
        self.line = line


@dataclass
class RefResult:
    steps: list  # of (line, iteration tuple, env dict)
    status: str  # "normal" | "limit" | "error"
    stop_line: Optional[int]  # where control was headed when cut short


def _bounds(v: int, line: int) -> int:
    if v < LO or v > HI:
        raise RefError(line)
    return v


def ref_eval(expr, env, line):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        if expr.name not in env:
            raise RefError(line)
        return env[expr.name]
    if isinstance(expr, Unary):
        v = ref_eval(expr.operand, env, line)
        if expr.op == "-":
            if isinstance(v, bool):
                raise RefError(line)
            return _bounds(-v, line)
        if not isinstance(v, bool):
            raise RefError(line)
        return not v
    op = expr.op
    if op in ("&&", "||"):
        left = ref_eval(expr.left, env, line)
        if not isinstance(left, bool):
            raise RefError(line)
        if op == "&&" and not left:
            return False
        if op == "||" and left:
            return True
        right = ref_eval(expr.right, env, line)
        if not isinstance(right, bool):
            raise RefError(line)
        return right
    left = ref_eval(expr.left, env, line)
    right = ref_eval(expr.right, env, line)
    if op in ("==", "!="):
        if isinstance(left, bool) != isinstance(right, bool):
            raise RefError(line)
        return (left == right) if op == "==" else (left != right)
    if isinstance(left, bool) or isinstance(right, bool):
        raise RefError(line)
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    if op == "+":
        return _bounds(left + right, line)
    if op == "-":
        return _bounds(left - right, line)
    if op == "*":
        return _bounds(left * right, line)
    if op in ("/", "%"):
        if right == 0:
            raise RefError(line)
        # Python's // floors; correct toward zero when signs differ.
        q = left // right
        if left % right != 0 and (left < 0) != (right < 0):
            q += 1
        if op == "/":
            return _bounds(q, line)
        return left - right * q
    raise AssertionError(f"unhandled op {op!r}")


def _ref_bool(expr, env, line) -> bool:
    v = ref_eval(expr, env, line)
    if not isinstance(v, bool):
        raise RefError(line)
    return v


def run_ref(program: Program, initial_env, max_steps: int = 10_000) -> RefResult:
    env = dict(initial_env)
    steps: list = []
    counters: list[int] = []

    def record(line: int) -> None:
        if len(steps) >= max_steps:
            raise _Cut(line)
        steps.append((line, tuple(counters), dict(env)))

    def exec_block(stmts) -> None:
        for st in stmts:
            if isinstance(st, Assign):
                env[st.target] = ref_eval(st.value, env, st.line)
                record(st.line)
            elif isinstance(st, While):
                counters.append(0)
                while True:
                    counters[-1] += 1
                    cond = _ref_bool(st.condition, env, st.line)
                    record(st.line)
                    if not cond:
                        break
                    exec_block(st.body)
                counters.pop()
            else:
                assert isinstance(st, If)
                cond = _ref_bool(st.condition, env, st.line)
                record(st.line)
                exec_block(st.then_body if cond else (st.else_body or ()))

    try:
        exec_block(program.statements)
    except _Cut as cut:
        return RefResult(steps, "limit", cut.line)
    except RefError as err:
        return RefResult(steps, "error", err.line)
    return RefResult(steps, "normal", None)
