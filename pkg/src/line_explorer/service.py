"""HTTP service tying the tutor together for a browser client.

Demonstration payloads deliberately carry the whole solved trace plus
worksheet layout, so the page can answer check/show clicks without a
round trip; the same checks stay available as endpoints so one grading
implementation remains authoritative.  Evaluation payloads are built
only from the parsed program and the initial environment — never from
the trace — and the trace itself stays server-side until submit.

Sessions live in memory behind a revision counter: every mutating call
must present the revision it last saw, and the first of two racing
writers wins while the second gets a conflict.  Anything a domain
module raises crosses the wire as {"code", "message"} with exactly one
HTTP status per code.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .errors import LineExplorerError, SchemaError
from .exercises import Exercise, SubmissionStore, load_exercise_dir, new_submission
from .grading import (
    EvalSession,
    ModeUnavailable,
    answer_to_payload,
    check_cell,
    eval_begin,
    eval_can_submit,
    eval_enter_line,
    eval_make_loop,
    eval_submit,
    eval_undo,
    result_to_payload,
    reveal_cells,
)
from .language import ExerciseMode
from .sus import (
    DEFAULT_QUESTIONNAIRE,
    AcademicProgram,
    CompletedCourses,
    InvalidResponse,
    Respondent,
    SurveyMode,
    SusResponse,
    append_response_csv,
    classify,
    cohort_means,
    load_questionnaire,
    means_payload,
    read_responses_csv,
    report_table,
    sus_score,
)
from .tracing import columns_for, render_value, trace_payload, worksheet_layout

log = logging.getLogger(__name__)


class UnknownExercise(LineExplorerError):
    pass


class UnknownSession(LineExplorerError):
    pass


class StaleRevision(LineExplorerError):
    pass


#: One status per machine code; the code is always the error class name.
STATUS_BY_CODE: Mapping[str, int] = {
    # malformed documents or requests
    "SchemaError": 400,
    "ParseError": 400,
    "ValidationError": 400,
    "TraceError": 400,
    # nothing there
    "UnknownExercise": 404,
    "UnknownSession": 404,
    "EmptyInput": 404,
    # well-formed but wrong for the current state
    "ModeUnavailable": 409,
    "SessionComplete": 409,
    "AlreadySubmitted": 409,
    "NotComplete": 409,
    "NothingToUndo": 409,
    "StaleRevision": 409,
    # well-formed but unacceptable field values
    "MissingColumns": 422,
    "UnknownVariable": 422,
    "UnknownCell": 422,
    "InvalidTarget": 422,
    "InvalidResponse": 422,
    "UnknownGrouping": 422,
    # server-side trouble
    "StorageError": 500,
}

DEFAULT_SESSION_TTL = 24 * 60 * 60.0


@dataclass(frozen=True)
class ServiceConfig:
    exercises_dir: Path
    data_dir: Path
    media_dir: Optional[Path] = None  # default: exercises_dir / "media"
    ui_dir: Optional[Path] = None
    session_ttl_seconds: float = DEFAULT_SESSION_TTL


class _SessionRow:
    __slots__ = ("session", "revision", "touched")

    def __init__(self, session: EvalSession, revision: int, touched: float):
        self.session = session
        self.revision = revision
        self.touched = touched


class SessionStore:
    """In-memory sessions with optimistic concurrency and idle expiry.

    All mutations run under one lock, so two racing writers are
    serialized and the loser's stale revision is detected; expiry is
    lazy, checked whenever a session is touched.
    """

    def __init__(self, *, ttl_seconds: float = DEFAULT_SESSION_TTL,
                 clock: Callable[[], float] = time.time):
        self._ttl = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._rows: dict[str, _SessionRow] = {}

    def _live_row(self, session_id: str) -> _SessionRow:
        row = self._rows.get(session_id)
        if row is not None and self._clock() - row.touched > self._ttl:
            del self._rows[session_id]
            row = None
        if row is None:
            raise UnknownSession(f"no session {session_id!r} (unknown or expired)")
        return row

    def create(self, session: EvalSession) -> int:
        with self._lock:
            self._rows[session.session_id] = _SessionRow(session, 0, self._clock())
        return 0

    def get(self, session_id: str) -> tuple[EvalSession, int]:
        with self._lock:
            row = self._live_row(session_id)
            row.touched = self._clock()
            return row.session, row.revision

    def mutate(self, session_id: str, expected_revision: int,
               op: Callable[[EvalSession], tuple[EvalSession, dict]]):
        with self._lock:
            row = self._live_row(session_id)
            if expected_revision != row.revision:
                raise StaleRevision(
                    f"revision {expected_revision} is stale; "
                    f"session is at revision {row.revision}")
            new_session, extra = op(row.session)
            row.session = new_session
            row.revision += 1
            row.touched = self._clock()
            return new_session, row.revision, extra


# ---------------------------------------------------------------------------
# request parsing — everything raises SchemaError so the one handler
# renders it, instead of the framework's own validation format


async def _json_body(request: Request) -> dict:
    try:
        payload = await request.json()
    except Exception as err:
        raise SchemaError(f"request body must be JSON: {err}") from err
    if not isinstance(payload, dict):
        raise SchemaError("request body must be a JSON object")
    return payload


def _str_field(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be a string")
    return value


def _int_field(payload: dict, key: str) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field {key!r} must be an integer")
    return value


def _int_list_field(payload: dict, key: str) -> tuple[int, ...]:
    value = payload.get(key)
    if (not isinstance(value, list)
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value)):
        raise SchemaError(f"field {key!r} must be a list of integers")
    return tuple(value)


def _entries_field(payload: dict) -> dict[str, str]:
    value = payload.get("entries")
    if (not isinstance(value, dict)
            or any(not isinstance(k, str) or not isinstance(v, str)
                   for k, v in value.items())):
        raise SchemaError("field 'entries' must map variable names to strings")
    return value


def _bool_field(payload: dict, key: str) -> bool:
    value = payload.get(key)
    if not isinstance(value, bool):
        raise InvalidResponse(f"field {key!r} must be true or false")
    return value


def _likert_field(payload: dict, key: str) -> int:
    value = payload.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidResponse(f"field {key!r} must be an integer 1-5")
    return value


def _enum_field(payload: dict, key: str, enum_type):
    raw = payload.get(key)
    try:
        return enum_type(raw)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_type)
        raise InvalidResponse(f"field {key!r} must be one of: {allowed}") from None


def _sus_response_from_payload(payload: dict) -> SusResponse:
    items = payload.get("items")
    if (not isinstance(items, list)
            or any(isinstance(v, bool) or not isinstance(v, int) for v in items)):
        raise InvalidResponse("field 'items' must be a list of integers")
    respondent_doc = payload.get("respondent")
    if not isinstance(respondent_doc, dict):
        raise InvalidResponse("field 'respondent' must be an object")
    resources = respondent_doc.get("resources", [])
    if (not isinstance(resources, list)
            or any(not isinstance(r, str) for r in resources)):
        raise InvalidResponse("field 'resources' must be a list of strings")
    respondent = Respondent(
        academic_program=_enum_field(respondent_doc, "academic_program",
                                     AcademicProgram),
        first_course=_bool_field(respondent_doc, "first_course"),
        completed_courses=_enum_field(respondent_doc, "completed_courses",
                                      CompletedCourses),
        experience=_likert_field(respondent_doc, "experience"),
        comfort=_likert_field(respondent_doc, "comfort"),
        attitude=_likert_field(respondent_doc, "attitude"),
        course_attitude=_likert_field(respondent_doc, "course_attitude"),
        used_internet=_bool_field(respondent_doc, "used_internet"),
        resources=tuple(resources),
    )
    return SusResponse(items=tuple(items),
                       mode_tested=_enum_field(payload, "mode", SurveyMode),
                       respondent=respondent)


# ---------------------------------------------------------------------------
# payload builders


def _demo_payload(exercise: Exercise) -> dict:
    layout = worksheet_layout(exercise.program, exercise.trace)
    return {
        "id": exercise.id,
        "title": exercise.title,
        "mode": ExerciseMode.DEMONSTRATION.value,
        "assumptions": exercise.assumptions_text,
        "source": exercise.source.text,
        "env": dict(exercise.initial_env),
        "columns": list(layout.columns),
        "executable_lines": list(exercise.program.executable_lines()),
        "trace": trace_payload(exercise.trace),
        "layout": {
            "columns": list(layout.columns),
            "line_iterations": {
                str(line): [list(vec) for vec in vectors]
                for line, vectors in layout.line_iterations.items()
            },
        },
        "media": {
            "video": exercise.media.video,
            "audio": {str(line): ref
                      for line, ref in sorted(exercise.media.audio.items())},
        },
    }


def _eval_payload(exercise: Exercise) -> dict:
    # built from the program and inputs only — nothing here may come
    # from exercise.trace
    program = exercise.program
    return {
        "id": exercise.id,
        "title": exercise.title,
        "mode": ExerciseMode.EVALUATION.value,
        "assumptions": exercise.assumptions_text,
        "source": exercise.source.text,
        "env": dict(exercise.initial_env),
        "columns": list(columns_for(program, exercise.initial_env)),
        "executable_lines": list(program.executable_lines()),
        "first_line": program.first_executable(),
        "max_steps": exercise.limits.max_steps,
    }


def _session_payload(session: EvalSession, revision: int) -> dict:
    data = {
        "session_id": session.session_id,
        "exercise_id": session.exercise_id,
        "revision": revision,
        "cursor_line": session.cursor_line,
        "iteration_indicator": session.iteration_indicator,
        "open_entries": {str(line): dict(entries)
                         for line, entries in session.open_entries.items()},
        "answers": [answer_to_payload(a) for a in session.archived_answers],
        "can_submit": eval_can_submit(session),
        "submitted": session.submitted,
    }
    if session.submitted:
        data["result"] = result_to_payload(session.result)
    return data


# ---------------------------------------------------------------------------


def create_app(config: ServiceConfig, *,
               clock: Callable[[], float] = time.time) -> FastAPI:
    exercises, problems = load_exercise_dir(config.exercises_dir)
    for problem in problems:
        log.warning("exercise catalogue: %s", problem)
    for exercise in exercises.values():
        for warning in exercise.warnings:
            log.warning("%s: %s", exercise.id, warning)

    sessions = SessionStore(ttl_seconds=config.session_ttl_seconds, clock=clock)
    submissions = SubmissionStore(config.data_dir)
    sus_path = Path(config.data_dir) / "sus_responses.csv"
    questionnaire_path = Path(config.data_dir) / "questionnaire.txt"

    app = FastAPI(title="line-explorer", version=__version__,
                  openapi_url="/api/openapi.json", docs_url="/api/docs",
                  redoc_url=None)

    @app.exception_handler(LineExplorerError)
    async def domain_error(request: Request, err: LineExplorerError):
        status = STATUS_BY_CODE.get(err.code, 400)
        return JSONResponse({"code": err.code, "message": str(err)},
                            status_code=status)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, err: RequestValidationError):
        return JSONResponse({"code": "SchemaError", "message": str(err)},
                            status_code=400)

    def get_exercise_or_404(exercise_id: str) -> Exercise:
        exercise = exercises.get(exercise_id)
        if exercise is None:
            raise UnknownExercise(f"no exercise {exercise_id!r}")
        return exercise

    # -- catalogue ---------------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/exercises")
    def list_exercises():
        return {"exercises": [
            {"id": e.id, "title": e.title,
             "modes": sorted(m.value for m in e.modes)}
            for e in sorted(exercises.values(), key=lambda e: e.id)
        ]}

    @app.get("/api/exercises/{exercise_id}")
    def get_exercise(exercise_id: str, mode: Optional[str] = None):
        exercise = get_exercise_or_404(exercise_id)
        if mode is None:
            raise SchemaError("query parameter 'mode' is required "
                              "(demonstration or evaluation)")
        try:
            requested = ExerciseMode(mode)
        except ValueError:
            raise SchemaError(f"unknown mode {mode!r}") from None
        if requested not in exercise.modes:
            raise ModeUnavailable(
                f"exercise {exercise_id!r} does not offer {requested.value} mode")
        if requested is ExerciseMode.DEMONSTRATION:
            return _demo_payload(exercise)
        return _eval_payload(exercise)

    # -- demonstration -----------------------------------------------------

    @app.post("/api/exercises/{exercise_id}/check")
    async def demo_check(exercise_id: str, request: Request):
        exercise = get_exercise_or_404(exercise_id)
        payload = await _json_body(request)
        verdict = check_cell(
            exercise,
            _int_field(payload, "line"),
            _int_list_field(payload, "iteration"),
            _str_field(payload, "variable"),
            _str_field(payload, "entry"),
        )
        return {"verdict": verdict.kind.value}

    @app.post("/api/exercises/{exercise_id}/reveal")
    async def demo_reveal(exercise_id: str, request: Request):
        exercise = get_exercise_or_404(exercise_id)
        payload = await _json_body(request)
        values = reveal_cells(exercise, _int_field(payload, "line"),
                              _int_list_field(payload, "iteration"))
        return {"values": {
            variable: None if value is None else render_value(value)
            for variable, value in values.items()
        }}

    # -- evaluation sessions ----------------------------------------------

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        payload = await _json_body(request)
        exercise = get_exercise_or_404(_str_field(payload, "exercise_id"))
        session = eval_begin(exercise, now=clock())
        revision = sessions.create(session)
        return _session_payload(session, revision)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session, revision = sessions.get(session_id)
        return _session_payload(session, revision)

    @app.post("/api/sessions/{session_id}/enter-line")
    async def enter_line(session_id: str, request: Request):
        payload = await _json_body(request)
        revision = _int_field(payload, "revision")
        entries = _entries_field(payload)

        def op(session: EvalSession):
            exercise = get_exercise_or_404(session.exercise_id)
            return eval_enter_line(session, exercise, entries, now=clock()), {}

        session, revision, _ = sessions.mutate(session_id, revision, op)
        return _session_payload(session, revision)

    @app.post("/api/sessions/{session_id}/undo")
    async def undo(session_id: str, request: Request):
        payload = await _json_body(request)
        revision = _int_field(payload, "revision")

        def op(session: EvalSession):
            new_session, undone = eval_undo(session, now=clock())
            return new_session, {"undone": {
                "kind": undone.kind,
                "line": undone.line,
                "entries": None if undone.entries is None else dict(undone.entries),
                "target_line": undone.target_line,
            }}

        session, revision, extra = sessions.mutate(session_id, revision, op)
        return {**_session_payload(session, revision), **extra}

    @app.post("/api/sessions/{session_id}/make-loop")
    async def make_loop(session_id: str, request: Request):
        payload = await _json_body(request)
        revision = _int_field(payload, "revision")
        target_line = _int_field(payload, "target_line")

        def op(session: EvalSession):
            exercise = get_exercise_or_404(session.exercise_id)
            return eval_make_loop(session, exercise, target_line,
                                  now=clock()), {}

        session, revision, _ = sessions.mutate(session_id, revision, op)
        return _session_payload(session, revision)

    @app.get("/api/sessions/{session_id}/can-submit")
    def can_submit(session_id: str):
        session, _ = sessions.get(session_id)
        return {"can_submit": eval_can_submit(session),
                "submitted": session.submitted}

    @app.post("/api/sessions/{session_id}/submit")
    async def submit(session_id: str, request: Request):
        payload = await _json_body(request)
        revision = _int_field(payload, "revision")
        tag = payload.get("respondent_tag")
        if tag is not None and not isinstance(tag, str):
            raise SchemaError("field 'respondent_tag' must be a string")

        def op(session: EvalSession):
            exercise = get_exercise_or_404(session.exercise_id)
            new_session, result = eval_submit(session, exercise, now=clock())
            submission = new_submission(exercise.id,
                                        new_session.archived_answers, result,
                                        respondent_tag=tag, now=clock())
            submissions.store_submission(submission)
            return new_session, {"receipt": submission.receipt}

        session, revision, extra = sessions.mutate(session_id, revision, op)
        return {**_session_payload(session, revision), **extra}

    # -- usability survey --------------------------------------------------

    @app.get("/api/sus/questionnaire")
    def questionnaire():
        if questionnaire_path.is_file():
            return {"items": list(load_questionnaire(questionnaire_path))}
        return {"items": list(DEFAULT_QUESTIONNAIRE)}

    @app.post("/api/sus/responses", status_code=201)
    async def post_sus_response(request: Request):
        payload = await _json_body(request)
        tag = payload.get("tag", "")
        if not isinstance(tag, str):
            raise SchemaError("field 'tag' must be a string")
        response = _sus_response_from_payload(payload)
        append_response_csv(sus_path, response, tag=tag)
        score = sus_score(response)
        return {"score": score.value, "rating": classify(score).label}

    @app.get("/api/sus/report")
    def sus_report(group_by: str = "academic_program", format: str = "json"):
        if format not in ("json", "text"):
            raise SchemaError(f"unknown format {format!r}")
        if sus_path.is_file():
            responses, problems = read_responses_csv(sus_path)
        else:
            responses, problems = [], []
        if format == "text":
            return PlainTextResponse(report_table(responses, group_by))
        means = cohort_means(responses, group_by)
        return {"group_by": group_by,
                "total_responses": len(responses),
                "groups": means_payload(means),
                "problems": problems}

    # -- static assets -----------------------------------------------------

    media_dir = config.media_dir or Path(config.exercises_dir) / "media"
    if Path(media_dir).is_dir():
        app.mount("/media", StaticFiles(directory=media_dir), name="media")
    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True),
                  name="ui")

    return app


def serve(config: ServiceConfig, *, host: str = "127.0.0.1",
          port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port)
