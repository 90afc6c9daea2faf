"""Exercise documents and on-disk persistence.

An exercise is a single YAML file an instructor can edit by hand:

    format: 1
    id: count-up
    title: Counting up
    modes: [demonstration, evaluation]
    assumptions: |
      No initial parameters; every variable starts unassigned.
    env:
      n: 3
    limits:
      max_steps: 10000
    media:
      video: count-up-intro.mp4
      audio:
        1: count-up-line1.mp3
        2: none
    source: |
      i = 0
      while i < 2 {
      i = i + 1
      }

Loading runs the full gauntlet: shape checks, parse, per-mode static
validation, and one complete execution within the step limit, so an
Exercise object in hand is guaranteed traceable.  Missing media *files*
are only warnings (the worksheet works without audio); missing media
*declarations* for a demonstration exercise are errors.

Submissions append to a newline-delimited JSON log; survey responses go
through the sus module's CSV helpers.  Both are plain files on purpose:
desk scale, trivially backed up.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import yaml

from .errors import LineExplorerError, SchemaError, StorageError
from .grading import (
    AnswerStep,
    SubmissionResult,
    answer_from_payload,
    answer_to_payload,
    result_from_payload,
    result_to_payload,
)
from .language import (
    INT_MAX,
    INT_MIN,
    Diagnostic,
    ExerciseMode,
    ParseError,
    Program,
    Severity,
    SourceProgram,
    Value,
    parse,
    validate,
)
from .tracing import (
    ExecutionLimits,
    Termination,
    Trace,
    TraceRuntimeError,
    WorksheetLayout,
    execute,
    worksheet_layout,
)

FORMAT_VERSION = 1

_ID_OK = "abcdefghijklmnopqrstuvwxyz0123456789-"


class ValidationError(LineExplorerError):
    """The program inside an exercise document failed static checks."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))


class TraceError(LineExplorerError):
    """The validation execution of an exercise program failed or ran into
    the step limit — the ground truth cannot be established."""


@dataclass(frozen=True)
class Media:
    video: Optional[str] = None
    # line -> relative path, or None for an explicit "no audio here"
    audio: Mapping[int, Optional[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class Exercise:
    id: str
    title: str
    assumptions_text: str
    initial_env: Mapping[str, Value]
    source: SourceProgram
    modes: frozenset[ExerciseMode]
    media: Media
    limits: ExecutionLimits
    # derived once at load; deterministic given the authored fields
    program: Program
    trace: Trace
    layout: WorksheetLayout
    warnings: tuple[str, ...] = ()


# --- document parsing -----------------------------------------------------

def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _check_id(raw: object) -> str:
    _expect(isinstance(raw, str) and raw != "", "id must be a non-empty string")
    assert isinstance(raw, str)
    _expect(all(ch in _ID_OK for ch in raw) and not raw.startswith("-"),
            f"id {raw!r} must be a lowercase slug (a-z, 0-9, hyphens)")
    return raw


def _check_env(raw: object) -> dict[str, Value]:
    if raw is None:
        return {}
    _expect(isinstance(raw, dict), "env must be a mapping of variable to value")
    assert isinstance(raw, dict)
    env: dict[str, Value] = {}
    for key, value in raw.items():
        _expect(isinstance(key, str) and key.isidentifier(),
                f"env variable name {key!r} is not a valid identifier")
        if isinstance(value, bool):
            env[str(key)] = value
        elif isinstance(value, int):
            _expect(INT_MIN <= value <= INT_MAX,
                    f"env value for {key!r} does not fit in 64 bits")
            env[str(key)] = value
        else:
            raise SchemaError(f"env value for {key!r} must be an integer or boolean")
    return env


def _check_modes(raw: object) -> frozenset[ExerciseMode]:
    _expect(isinstance(raw, list) and raw, "modes must be a non-empty list")
    assert isinstance(raw, list)
    modes = set()
    for item in raw:
        try:
            modes.add(ExerciseMode(str(item)))
        except ValueError:
            raise SchemaError(
                f"unknown mode {item!r}; expected demonstration or evaluation") from None
    return frozenset(modes)


def _check_media(raw: object) -> Media:
    if raw is None:
        return Media()
    _expect(isinstance(raw, dict), "media must be a mapping")
    assert isinstance(raw, dict)
    unknown = set(raw) - {"video", "audio"}
    _expect(not unknown, f"unknown media key(s): {', '.join(sorted(map(str, unknown)))}")
    video = raw.get("video")
    if video is not None:
        _expect(isinstance(video, str) and video != "", "media.video must be a path string")
    audio_raw = raw.get("audio") or {}
    _expect(isinstance(audio_raw, dict), "media.audio must map line numbers to paths")
    audio: dict[int, Optional[str]] = {}
    for key, value in audio_raw.items():
        _expect(isinstance(key, int) and not isinstance(key, bool) and key >= 1,
                f"media.audio key {key!r} must be a line number")
        if value is None or (isinstance(value, str) and value.lower() == "none"):
            audio[key] = None
        elif isinstance(value, str) and value:
            audio[key] = value
        else:
            raise SchemaError(f"media.audio[{key}] must be a path or the word none")
    return Media(video=video, audio=audio)


def _check_limits(raw: object) -> ExecutionLimits:
    if raw is None:
        return ExecutionLimits()
    _expect(isinstance(raw, dict), "limits must be a mapping")
    assert isinstance(raw, dict)
    unknown = set(raw) - {"max_steps"}
    _expect(not unknown, f"unknown limits key(s): {', '.join(sorted(map(str, unknown)))}")
    max_steps = raw.get("max_steps", 10_000)
    _expect(isinstance(max_steps, int) and not isinstance(max_steps, bool)
            and max_steps >= 1, "limits.max_steps must be a positive integer")
    return ExecutionLimits(max_steps=max_steps)


def _media_warnings(media: Media, media_base: Optional[Path]) -> list[str]:
    if media_base is None:
        return []
    warnings = []
    refs = [("video", media.video)] + [
        (f"audio for line {line}", ref) for line, ref in sorted(media.audio.items())]
    for what, ref in refs:
        if ref is not None and not (media_base / ref).is_file():
            warnings.append(f"{what}: file not found: {ref}")
    return warnings


def load_exercise_text(text: str, *, media_base: Optional[Path] = None,
                       name: str = "<exercise>") -> Exercise:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise SchemaError(f"{name}: not valid YAML: {err}") from err
    _expect(isinstance(doc, dict), f"{name}: document must be a mapping")
    assert isinstance(doc, dict)

    unknown = set(doc) - {"format", "id", "title", "modes", "assumptions",
                          "env", "limits", "media", "source"}
    _expect(not unknown, f"unknown key(s): {', '.join(sorted(map(str, unknown)))}")
    _expect(doc.get("format") == FORMAT_VERSION,
            f"format must be {FORMAT_VERSION}, got {doc.get('format')!r}")

    exercise_id = _check_id(doc.get("id"))
    title = doc.get("title")
    _expect(isinstance(title, str) and title.strip() != "",
            "title must be a non-empty string")
    assumptions = doc.get("assumptions") or ""
    _expect(isinstance(assumptions, str), "assumptions must be a string")
    modes = _check_modes(doc.get("modes"))
    env = _check_env(doc.get("env"))
    limits = _check_limits(doc.get("limits"))
    media = _check_media(doc.get("media"))
    source_text = doc.get("source")
    _expect(isinstance(source_text, str) and source_text.strip() != "",
            "source must be a non-empty string")

    source = SourceProgram.from_text(source_text)
    try:
        program = parse(source)
    except ParseError as err:
        raise ValidationError([Diagnostic(Severity.ERROR, err.line, "ParseError",
                                          err.message)]) from err
    _expect(program.first_executable() is not None,
            "source has no executable statements")

    diagnostics: list[Diagnostic] = []
    for mode in sorted(modes, key=lambda m: m.value):
        for diag in validate(program, env, mode):
            if diag not in diagnostics:
                diagnostics.append(diag)
    if any(d.severity is Severity.ERROR for d in diagnostics):
        raise ValidationError(diagnostics)

    try:
        trace = execute(program, env, limits)
    except TraceRuntimeError as err:
        raise TraceError(f"validation run failed: {err}") from err
    if trace.terminated is Termination.STEP_LIMIT:
        raise TraceError(
            f"validation run exceeded {limits.max_steps} steps; "
            "raise limits.max_steps or fix the program")

    if ExerciseMode.DEMONSTRATION in modes:
        undeclared = [line for line in program.executable_lines()
                      if line not in media.audio]
        _expect(not undeclared,
                "demonstration mode needs an audio entry (path or none) for "
                "every executable line; missing: "
                + ", ".join(str(n) for n in undeclared))

    return Exercise(
        id=exercise_id,
        title=title.strip(),
        assumptions_text=assumptions,
        initial_env=env,
        source=source,
        modes=modes,
        media=media,
        limits=limits,
        program=program,
        trace=trace,
        layout=worksheet_layout(program, trace),
        warnings=tuple(_media_warnings(media, media_base)),
    )


def load_exercise(path: Union[str, Path], *,
                  media_base: Optional[Path] = None) -> Exercise:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise StorageError(f"cannot read {path}: {err}") from err
    if media_base is None:
        media_base = path.parent / "media"
    return load_exercise_text(text, media_base=media_base, name=path.name)


def load_exercise_dir(directory: Union[str, Path]) -> tuple[dict[str, Exercise], list[str]]:
    """Load every *.yaml/*.yml in a directory; files that fail to load
    are reported as problem strings, not fatal (the rest still serve)."""
    directory = Path(directory)
    exercises: dict[str, Exercise] = {}
    problems: list[str] = []
    for path in sorted(list(directory.glob("*.yaml")) + list(directory.glob("*.yml"))):
        try:
            exercise = load_exercise(path)
        except LineExplorerError as err:
            problems.append(f"{path.name}: {err.code}: {err}")
            continue
        if exercise.id in exercises:
            problems.append(f"{path.name}: duplicate exercise id '{exercise.id}'")
            continue
        exercises[exercise.id] = exercise
    return exercises, problems


# --- document writing -----------------------------------------------------

class _Block(str):
    """Marker so multiline strings round-trip as YAML literal blocks."""


def _represent_block(dumper: yaml.Dumper, data: "_Block"):
    style = "|" if "\n" in data else None
    return dumper.represent_scalar("tag:yaml.org,2002:str", str(data), style=style)


yaml.SafeDumper.add_representer(_Block, _represent_block)


def save_exercise_document(exercise: Exercise) -> str:
    doc: dict = {
        "format": FORMAT_VERSION,
        "id": exercise.id,
        "title": exercise.title,
        "modes": sorted(m.value for m in exercise.modes),
    }
    if exercise.assumptions_text:
        doc["assumptions"] = _Block(exercise.assumptions_text)
    if exercise.initial_env:
        doc["env"] = dict(exercise.initial_env)
    if exercise.limits != ExecutionLimits():
        doc["limits"] = {"max_steps": exercise.limits.max_steps}
    media: dict = {}
    if exercise.media.video is not None:
        media["video"] = exercise.media.video
    if exercise.media.audio:
        media["audio"] = {line: (ref if ref is not None else "none")
                          for line, ref in sorted(exercise.media.audio.items())}
    if media:
        doc["media"] = media
    doc["source"] = _Block(exercise.source.text)
    return yaml.dump(doc, Dumper=yaml.SafeDumper, sort_keys=False,
                     allow_unicode=True, width=100)


def save_exercise(exercise: Exercise, path: Union[str, Path]) -> None:
    try:
        Path(path).write_text(save_exercise_document(exercise), encoding="utf-8")
    except OSError as err:
        raise StorageError(f"cannot write {path}: {err}") from err


# --- submission log -------------------------------------------------------

@dataclass(frozen=True)
class StoredSubmission:
    receipt: str
    exercise_id: str
    created_at: float
    respondent_tag: Optional[str]
    answers: tuple[AnswerStep, ...]
    result: SubmissionResult


def new_submission(exercise_id: str, answers: Sequence[AnswerStep],
                   result: SubmissionResult, *,
                   respondent_tag: Optional[str] = None,
                   now: Optional[float] = None) -> StoredSubmission:
    return StoredSubmission(
        receipt=uuid.uuid4().hex,
        exercise_id=exercise_id,
        created_at=time.time() if now is None else now,
        respondent_tag=respondent_tag,
        answers=tuple(answers),
        result=result,
    )


def _submission_to_record(sub: StoredSubmission) -> dict:
    return {
        "format": FORMAT_VERSION,
        "receipt": sub.receipt,
        "exercise_id": sub.exercise_id,
        "created_at": sub.created_at,
        "respondent_tag": sub.respondent_tag,
        "answers": [answer_to_payload(a) for a in sub.answers],
        "result": result_to_payload(sub.result),
    }


def _submission_from_record(record: Mapping) -> StoredSubmission:
    if record.get("format") != FORMAT_VERSION:
        raise SchemaError(f"unknown submission record format {record.get('format')!r}")
    return StoredSubmission(
        receipt=str(record["receipt"]),
        exercise_id=str(record["exercise_id"]),
        created_at=float(record["created_at"]),
        respondent_tag=(None if record.get("respondent_tag") is None
                        else str(record["respondent_tag"])),
        answers=tuple(answer_from_payload(a) for a in record["answers"]),
        result=result_from_payload(record["result"]),
    )


class SubmissionStore:
    """Append-only JSONL log of graded submissions.

    Appends are serialized by an in-process lock; a reader that races a
    writer sees a clean prefix of the log because records are written as
    single flushed lines.
    """

    def __init__(self, data_dir: Union[str, Path]):
        self._path = Path(data_dir) / "submissions.jsonl"
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        return self._path

    def store_submission(self, sub: StoredSubmission) -> str:
        line = json.dumps(_submission_to_record(sub), separators=(",", ":"),
                          sort_keys=True)
        try:
            with self._lock:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
        except OSError as err:
            raise StorageError(f"cannot write {self._path}: {err}") from err
        return sub.receipt

    def list_submissions(self, exercise_id: Optional[str] = None) -> list[StoredSubmission]:
        if not self._path.exists():
            return []
        try:
            text = self._path.read_text(encoding="utf-8")
        except OSError as err:
            raise StorageError(f"cannot read {self._path}: {err}") from err
        out: list[StoredSubmission] = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise SchemaError(f"{self._path}:{line_no}: bad record: {err}") from err
            sub = _submission_from_record(record)
            if exercise_id is None or sub.exercise_id == exercise_id:
                out.append(sub)
        return out
