"""Worksheet grading: demonstration-mode check/show, the evaluation-mode
session state machine, and positional scoring of submitted answer sheets.

The two modes treat the ground truth very differently.  Demonstration
ops answer immediately from the trace.  Evaluation ops must never reveal
anything derived from the trace until submission: a session only records
what the student typed, where the cursor is, and which actions got them
there, so every pre-submit return value is made of student-supplied data.
"""

from __future__ import annotations

import re
import time
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Optional, Sequence, Union

from .errors import LineExplorerError
from .language import ExerciseMode, Value, render_value
from .tracing import NOT_EXECUTED, UnknownCell, UnknownVariable, trace_cell

if TYPE_CHECKING:
    from .exercises import Exercise


class ModeUnavailable(LineExplorerError):
    pass


class SessionComplete(LineExplorerError):
    pass


class MissingColumns(LineExplorerError):
    pass


class NothingToUndo(LineExplorerError):
    pass


class InvalidTarget(LineExplorerError):
    pass


class NotComplete(LineExplorerError):
    pass


class AlreadySubmitted(LineExplorerError):
    pass


# --- entry canonicalization -----------------------------------------------

_INT_ENTRY_RE = re.compile(r"[+-]?[0-9]+")


class _Unparseable:
    _instance: Optional["_Unparseable"] = None

    def __new__(cls) -> "_Unparseable":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNPARSEABLE"


UNPARSEABLE = _Unparseable()


def canonical_entry(raw: str) -> Union[Value, None, _Unparseable]:
    """Student keystrokes -> comparable value.

    Whitespace is trimmed; integers go through int() so "05" equals 5;
    "True"/"FALSE" etc. count as booleans; an empty box means "no value
    here" (None); anything else is UNPARSEABLE and can never be correct.
    """
    s = raw.strip()
    if not s:
        return None
    if _INT_ENTRY_RE.fullmatch(s):
        return int(s)
    low = s.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    return UNPARSEABLE


def entry_matches(entered: str, truth: Optional[Value]) -> bool:
    """truth=None means the variable holds no value at that step, which
    only a blank box matches.  Comparison is type-strict: the bool "true"
    never equals the int 1."""
    c = canonical_entry(entered)
    if c is UNPARSEABLE:
        return False
    if c is None or truth is None:
        return c is None and truth is None
    return type(c) is type(truth) and c == truth


# --- verdicts -------------------------------------------------------------

class VerdictKind(Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    NOT_EXECUTED = "not_executed"


@dataclass(frozen=True)
class CellVerdict:
    """expected_hidden stays True for live demo checks (press show to see
    the value) and flips to False in post-submission reports, where the
    expected rendering travels alongside."""

    kind: VerdictKind
    expected_hidden: bool = True


def _require_mode(exercise: "Exercise", mode: ExerciseMode) -> None:
    if mode not in exercise.modes:
        raise ModeUnavailable(
            f"exercise '{exercise.id}' does not offer {mode.value} mode")


def _find_step(exercise: "Exercise", line: int, iteration: Sequence[int]):
    vec = tuple(iteration)
    for step in exercise.trace.steps:
        if step.line == line and step.iteration == vec:
            return step
    raise UnknownCell(
        f"line {line} never executes at iteration {list(vec) or '[]'}")


def check_cell(exercise: "Exercise", line: int, iteration_vector: Sequence[int],
               variable: str, entered: str) -> CellVerdict:
    """Demonstration-mode check: green/red without disclosing the value."""
    _require_mode(exercise, ExerciseMode.DEMONSTRATION)
    truth = trace_cell(exercise.trace, line, tuple(iteration_vector), variable)
    target = None if truth is NOT_EXECUTED else truth
    kind = VerdictKind.CORRECT if entry_matches(entered, target) else VerdictKind.INCORRECT
    return CellVerdict(kind)


def reveal_cells(exercise: "Exercise", line: int,
                 iteration_vector: Sequence[int]) -> dict[str, Optional[Value]]:
    """Demonstration-mode show: the whole row's truth values, None where
    the variable holds nothing at that step."""
    _require_mode(exercise, ExerciseMode.DEMONSTRATION)
    step = _find_step(exercise, line, iteration_vector)
    return {col: (step.env_after[col] if col in step.env_after else None)
            for col in exercise.trace.columns}


# --- evaluation session ---------------------------------------------------

@dataclass(frozen=True)
class AnswerStep:
    ordinal: int  # 0-based position in the locked sequence
    line: int
    iteration_vector_claimed: tuple[int, ...]
    entries: Mapping[str, str]


@dataclass(frozen=True)
class EnterLine:
    answer: AnswerStep
    prev_cursor: int
    # whatever was staged (open) at that line before locking, if anything
    displaced_open: Optional[Mapping[str, str]]


@dataclass(frozen=True)
class MakeLoop:
    target_line: int
    prev_cursor: Optional[int]
    cleared_open: Mapping[int, Mapping[str, str]]


Action = Union[EnterLine, MakeLoop]


@dataclass(frozen=True)
class CellGrade:
    variable: str
    entered: Optional[str]   # None: the student never reached this step
    expected: Optional[str]  # rendered truth; "" = unassigned; None = no truth step
    verdict: CellVerdict


@dataclass(frozen=True)
class StepGrade:
    index: int
    truth_line: Optional[int]
    claimed_line: Optional[int]
    line_matched: bool
    cells: tuple[CellGrade, ...]


@dataclass(frozen=True)
class SubmissionResult:
    total_cells: int
    correct_cells: int
    path_matched_steps: int
    truth_steps: int
    score_percent: float
    per_step: tuple[StepGrade, ...]


@dataclass(frozen=True)
class EvalSession:
    """Pure value: every operation returns a new session.

    cursor_line None means END (the student has advanced past the last
    executable line).  open_entries holds staged-but-unlocked box
    contents by line; undo puts things back exactly as they were, which
    is what makes apply-then-undo an identity on the observable state.
    """

    session_id: str
    exercise_id: str
    cursor_line: Optional[int]
    open_entries: Mapping[int, Mapping[str, str]]
    archived_answers: tuple[AnswerStep, ...]
    action_stack: tuple[Action, ...]
    created_at: float
    updated_at: float
    result: Optional[SubmissionResult] = None

    @property
    def iteration_indicator(self) -> int:
        return 1 + sum(1 for a in self.action_stack if isinstance(a, MakeLoop))

    @property
    def submitted(self) -> bool:
        return self.result is not None

    def observable(self) -> tuple:
        """The state the student can see; timestamps and ids excluded."""
        return (
            self.cursor_line,
            self.iteration_indicator,
            {line: dict(entries) for line, entries in self.open_entries.items()},
            self.archived_answers,
        )


def _now(now: Optional[float]) -> float:
    return time.time() if now is None else now


def _mutable(session: EvalSession) -> None:
    if session.submitted:
        raise AlreadySubmitted("session was already submitted and is read-only")


def eval_begin(exercise: "Exercise", *, session_id: Optional[str] = None,
               now: Optional[float] = None) -> EvalSession:
    _require_mode(exercise, ExerciseMode.EVALUATION)
    t = _now(now)
    return EvalSession(
        session_id=session_id or uuid.uuid4().hex,
        exercise_id=exercise.id,
        cursor_line=exercise.program.first_executable(),
        open_entries={},
        archived_answers=(),
        action_stack=(),
        created_at=t,
        updated_at=t,
    )


def eval_enter_line(session: EvalSession, exercise: "Exercise",
                    entries: Mapping[str, str], *,
                    now: Optional[float] = None) -> EvalSession:
    """Lock the current line's boxes and advance the cursor.

    Every worksheet column must be present (blank strings allowed); no
    judgement of any kind comes back.
    """
    _mutable(session)
    if session.cursor_line is None:
        raise SessionComplete("cursor is already past the last line")
    cols = exercise.trace.columns
    missing = [c for c in cols if c not in entries]
    if missing:
        raise MissingColumns("entries missing column(s): " + ", ".join(missing))
    stray = [k for k in entries if k not in cols]
    if stray:
        raise UnknownVariable("unknown column(s): " + ", ".join(sorted(stray)))
    answer = AnswerStep(
        ordinal=len(session.archived_answers),
        line=session.cursor_line,
        iteration_vector_claimed=(session.iteration_indicator,),
        entries={c: str(entries[c]) for c in cols},
    )
    open_entries = dict(session.open_entries)
    displaced = open_entries.pop(session.cursor_line, None)
    return replace(
        session,
        cursor_line=exercise.program.next_executable_after(session.cursor_line),
        open_entries=open_entries,
        archived_answers=session.archived_answers + (answer,),
        action_stack=session.action_stack + (EnterLine(answer, session.cursor_line, displaced),),
        updated_at=_now(now),
    )


@dataclass(frozen=True)
class UndoneAction:
    """What undo reverted, so a UI can put the student's text back into
    the unlocked boxes without the session having to leak anything."""

    kind: str  # "enter_line" | "make_loop"
    line: Optional[int]
    entries: Optional[Mapping[str, str]]
    target_line: Optional[int] = None


def eval_undo(session: EvalSession, *,
              now: Optional[float] = None) -> tuple[EvalSession, UndoneAction]:
    _mutable(session)
    if not session.action_stack:
        raise NothingToUndo("nothing to undo")
    action = session.action_stack[-1]
    stack = session.action_stack[:-1]
    open_entries = dict(session.open_entries)
    if isinstance(action, EnterLine):
        if action.displaced_open is not None:
            open_entries[action.answer.line] = action.displaced_open
        else:
            open_entries.pop(action.answer.line, None)
        undone = UndoneAction("enter_line", action.answer.line, action.answer.entries)
        new = replace(
            session,
            cursor_line=action.prev_cursor,
            open_entries=open_entries,
            archived_answers=session.archived_answers[:-1],
            action_stack=stack,
            updated_at=_now(now),
        )
        return new, undone
    open_entries.update(action.cleared_open)
    undone = UndoneAction("make_loop", action.prev_cursor, None,
                          target_line=action.target_line)
    new = replace(
        session,
        cursor_line=action.prev_cursor,
        open_entries=open_entries,
        action_stack=stack,
        updated_at=_now(now),
    )
    return new, undone


def eval_make_loop(session: EvalSession, exercise: "Exercise", target_line: int,
                   *, now: Optional[float] = None) -> EvalSession:
    """Jump the cursor back to an already-answered line to start the next
    loop iteration.  Locked answers stay; staged boxes at or below the
    target are wiped (saved on the action for undo)."""
    _mutable(session)
    cursor = session.cursor_line
    if cursor is not None and target_line >= cursor:
        raise InvalidTarget(f"line {target_line} is not before the cursor")
    if target_line not in exercise.program.executable_lines():
        raise InvalidTarget(f"line {target_line} is not an executable line")
    if not any(a.line == target_line for a in session.archived_answers):
        raise InvalidTarget(f"line {target_line} has no locked answer yet")
    cleared = {line: entries for line, entries in session.open_entries.items()
               if line >= target_line}
    kept = {line: entries for line, entries in session.open_entries.items()
            if line < target_line}
    return replace(
        session,
        cursor_line=target_line,
        open_entries=kept,
        action_stack=session.action_stack + (MakeLoop(target_line, cursor, cleared),),
        updated_at=_now(now),
    )


def eval_can_submit(session: EvalSession) -> bool:
    return session.cursor_line is None and not session.submitted


def eval_submit(session: EvalSession, exercise: "Exercise", *,
                now: Optional[float] = None) -> tuple[EvalSession, SubmissionResult]:
    if session.submitted:
        raise AlreadySubmitted("session was already submitted")
    if session.cursor_line is not None:
        raise NotComplete(
            f"cursor is still at line {session.cursor_line}; finish every line first")
    result = grade_answers(exercise, session.archived_answers)
    return replace(session, result=result, updated_at=_now(now)), result


# --- scoring --------------------------------------------------------------

def grade_answers(exercise: "Exercise",
                  answers: Sequence[AnswerStep]) -> SubmissionResult:
    """Positional alignment: answer k is graded against truth step k.

    A cell is correct only when the claimed line for that position equals
    the truth line and the canonical entry equals the truth value (blank
    matching unassigned).  The denominator is fixed by the truth —
    truth_steps x columns — so extra answer steps can only fail to add,
    never subtract, and missing steps simply score nothing.
    """
    truth = exercise.trace.steps
    cols = exercise.trace.columns
    total = len(truth) * len(cols)
    correct = 0
    path_matched = 0
    per_step: list[StepGrade] = []

    for k in range(max(len(truth), len(answers))):
        t = truth[k] if k < len(truth) else None
        a = answers[k] if k < len(answers) else None
        cells: list[CellGrade] = []
        if t is not None and a is not None:
            matched = a.line == t.line
            if matched:
                path_matched += 1
            for col in cols:
                truth_val = t.env_after[col] if col in t.env_after else None
                entered = a.entries.get(col, "")
                ok = matched and entry_matches(entered, truth_val)
                if ok:
                    correct += 1
                cells.append(CellGrade(
                    col, entered,
                    render_value(truth_val) if truth_val is not None else "",
                    CellVerdict(VerdictKind.CORRECT if ok else VerdictKind.INCORRECT,
                                expected_hidden=False)))
            per_step.append(StepGrade(k, t.line, a.line, matched, tuple(cells)))
        elif t is not None:
            for col in cols:
                truth_val = t.env_after[col] if col in t.env_after else None
                cells.append(CellGrade(
                    col, None,
                    render_value(truth_val) if truth_val is not None else "",
                    CellVerdict(VerdictKind.INCORRECT, expected_hidden=False)))
            per_step.append(StepGrade(k, t.line, None, False, tuple(cells)))
        else:
            assert a is not None
            for col in cols:
                cells.append(CellGrade(
                    col, a.entries.get(col, ""), None,
                    CellVerdict(VerdictKind.NOT_EXECUTED, expected_hidden=False)))
            per_step.append(StepGrade(k, None, a.line, False, tuple(cells)))

    score = (100.0 * correct / total) if total else 100.0
    return SubmissionResult(total, correct, path_matched, len(truth), score,
                            tuple(per_step))


# --- replaying a trace through the session engine -------------------------

@dataclass(frozen=True)
class ReplayAction:
    kind: str  # "enter" | "loop"
    entries: Optional[Mapping[str, str]] = None
    target_line: Optional[int] = None


def trace_replay_actions(exercise: "Exercise") -> list[ReplayAction]:
    """The action sequence a perfectly informed student would perform.

    Works for the evaluation-eligible program shape (single non-nested
    loop, nothing the forward cursor cannot reach): forward motion enters
    lines in order, a backward truth step becomes a loop-back, and any
    executable lines left below the final truth step are entered as
    pass-throughs carrying the final values (those rows are beyond the
    truth and score nothing either way).
    """
    program = exercise.program
    cols = exercise.trace.columns
    actions: list[ReplayAction] = []
    cursor = program.first_executable()

    def row(env: Mapping[str, Value]) -> dict[str, str]:
        return {c: (render_value(env[c]) if c in env else "") for c in cols}

    for step in exercise.trace.steps:
        if cursor != step.line:
            if cursor is not None and step.line > cursor:
                raise ValueError(
                    f"trace jumps forward from line {cursor} to {step.line}; "
                    "not replayable with a forward cursor")
            actions.append(ReplayAction("loop", target_line=step.line))
            cursor = step.line
        actions.append(ReplayAction("enter", entries=row(step.env_after)))
        cursor = program.next_executable_after(step.line)

    final_env = exercise.trace.final_env()
    while cursor is not None:
        actions.append(ReplayAction("enter", entries=row(final_env)))
        cursor = program.next_executable_after(cursor)
    return actions


def apply_replay(exercise: "Exercise", actions: Sequence[ReplayAction],
                 *, now: Optional[float] = None) -> EvalSession:
    session = eval_begin(exercise, now=now)
    for action in actions:
        if action.kind == "enter":
            assert action.entries is not None
            session = eval_enter_line(session, exercise, action.entries, now=now)
        else:
            assert action.target_line is not None
            session = eval_make_loop(session, exercise, action.target_line, now=now)
    return session


# --- serialization (submission log, HTTP bodies) --------------------------

def answer_to_payload(answer: AnswerStep) -> dict:
    return {
        "ordinal": answer.ordinal,
        "line": answer.line,
        "iteration_claimed": list(answer.iteration_vector_claimed),
        "entries": dict(answer.entries),
    }


def answer_from_payload(data: Mapping) -> AnswerStep:
    return AnswerStep(
        ordinal=int(data["ordinal"]),
        line=int(data["line"]),
        iteration_vector_claimed=tuple(int(n) for n in data["iteration_claimed"]),
        entries={str(k): str(v) for k, v in dict(data["entries"]).items()},
    )


def _verdict_to_payload(v: CellVerdict) -> dict:
    return {"kind": v.kind.value, "expected_hidden": v.expected_hidden}


def _verdict_from_payload(data: Mapping) -> CellVerdict:
    return CellVerdict(VerdictKind(data["kind"]), bool(data["expected_hidden"]))


def result_to_payload(result: SubmissionResult) -> dict:
    return {
        "total_cells": result.total_cells,
        "correct_cells": result.correct_cells,
        "path_matched_steps": result.path_matched_steps,
        "truth_steps": result.truth_steps,
        "score_percent": result.score_percent,
        "per_step": [
            {
                "index": s.index,
                "truth_line": s.truth_line,
                "claimed_line": s.claimed_line,
                "line_matched": s.line_matched,
                "cells": [
                    {
                        "variable": c.variable,
                        "entered": c.entered,
                        "expected": c.expected,
                        "verdict": _verdict_to_payload(c.verdict),
                    }
                    for c in s.cells
                ],
            }
            for s in result.per_step
        ],
    }


def result_from_payload(data: Mapping) -> SubmissionResult:
    return SubmissionResult(
        total_cells=int(data["total_cells"]),
        correct_cells=int(data["correct_cells"]),
        path_matched_steps=int(data["path_matched_steps"]),
        truth_steps=int(data["truth_steps"]),
        score_percent=float(data["score_percent"]),
        per_step=tuple(
            StepGrade(
                index=int(s["index"]),
                truth_line=s["truth_line"],
                claimed_line=s["claimed_line"],
                line_matched=bool(s["line_matched"]),
                cells=tuple(
                    CellGrade(
                        variable=c["variable"],
                        entered=c["entered"],
                        expected=c["expected"],
                        verdict=_verdict_from_payload(c["verdict"]),
                    )
                    for c in s["cells"]
                ),
            )
            for s in data["per_step"]
        ),
    )
