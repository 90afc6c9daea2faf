"""Usability questionnaire analytics.

Ten Likert items (1-5) per response.  Odd-numbered items are phrased
positively and contribute (item - 1); even items are phrased negatively
and contribute (5 - item); the summed contributions times 2.5 give a
0-100 score in steps of 2.5.  Scores map onto six adjective bands, and
per-cohort means can be grouped by any of the demographic fields we
collect alongside each response.
"""

from __future__ import annotations

import csv
import enum
import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

from .errors import LineExplorerError, SchemaError, StorageError


class InvalidResponse(LineExplorerError):
    pass


class EmptyInput(LineExplorerError):
    pass


class UnknownGrouping(LineExplorerError):
    pass


class SurveyMode(enum.Enum):
    """Which tool mode the respondent had just used."""

    NARRATED = "narrated"
    EVALUATION = "evaluation"


class AcademicProgram(enum.Enum):
    IT = "IT"
    CS = "CS"
    IS = "IS"
    MATH_PHYS_SCI = "MathPhysSci"
    LIBERAL_ARTS = "LiberalArts"
    BUSINESS_ECON = "BusinessEcon"
    FINE_ARTS = "FineArts"


class CompletedCourses(enum.Enum):
    NONE = "0"
    ONE = "1"
    TWO = "2"
    THREE = "3"
    FOUR_PLUS = "4+"


def _likert(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
        raise InvalidResponse(f"{name} must be an integer in 1..5, got {value!r}")
    return value


@dataclass(frozen=True)
class Respondent:
    academic_program: AcademicProgram
    first_course: bool
    completed_courses: CompletedCourses
    experience: int      # 1 not experienced .. 5 very experienced
    comfort: int         # 1 low .. 5 high
    attitude: int        # feeling about programming in general
    course_attitude: int  # reaction to programming courses taken
    used_internet: bool  # has used online resources to learn programming
    resources: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("experience", "comfort", "attitude", "course_attitude"):
            _likert(getattr(self, name), name)


@dataclass(frozen=True)
class SusResponse:
    items: tuple[int, ...]
    mode_tested: SurveyMode
    respondent: Respondent

    def __post_init__(self) -> None:
        if len(self.items) != 10:
            raise InvalidResponse(f"expected 10 items, got {len(self.items)}")
        for i, item in enumerate(self.items, start=1):
            _likert(item, f"item {i}")


@dataclass(frozen=True)
class SusScore:
    value: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 100.0:
            raise InvalidResponse(f"score {self.value} outside [0, 100]")


class AdjectiveRating(enum.IntEnum):
    WORST_IMAGINABLE = 0
    POOR = 1
    OK = 2
    GOOD = 3
    EXCELLENT = 4
    BEST_IMAGINABLE = 5

    @property
    def label(self) -> str:
        return _RATING_LABELS[self]


_RATING_LABELS = {
    AdjectiveRating.WORST_IMAGINABLE: "Worst Imaginable",
    AdjectiveRating.POOR: "Poor",
    AdjectiveRating.OK: "OK",
    AdjectiveRating.GOOD: "Good",
    AdjectiveRating.EXCELLENT: "Excellent",
    AdjectiveRating.BEST_IMAGINABLE: "Best Imaginable",
}

# Band lower bounds; each band is [lower, next lower) and the last runs
# through 100 inclusive.
_BANDS: tuple[tuple[float, AdjectiveRating], ...] = (
    (85.0, AdjectiveRating.BEST_IMAGINABLE),
    (73.0, AdjectiveRating.EXCELLENT),
    (52.0, AdjectiveRating.GOOD),
    (38.0, AdjectiveRating.OK),
    (25.0, AdjectiveRating.POOR),
    (0.0, AdjectiveRating.WORST_IMAGINABLE),
)


def score_items(items: Sequence[int]) -> SusScore:
    """Score a bare 10-item sequence (validated here, not at call sites)."""
    if len(items) != 10:
        raise InvalidResponse(f"expected 10 items, got {len(items)}")
    contributions = 0
    for i, item in enumerate(items, start=1):
        _likert(item, f"item {i}")
        contributions += (item - 1) if i % 2 == 1 else (5 - item)
    return SusScore(contributions * 2.5)


def sus_score(response: SusResponse) -> SusScore:
    return score_items(response.items)


def classify(score: Union[SusScore, float]) -> AdjectiveRating:
    value = score.value if isinstance(score, SusScore) else float(score)
    if not 0.0 <= value <= 100.0:
        raise InvalidResponse(f"score {value} outside [0, 100]")
    for lower, rating in _BANDS:
        if value >= lower:
            return rating
    raise AssertionError("unreachable")


# --- cohort aggregation ---------------------------------------------------

@dataclass(frozen=True)
class CohortMean:
    group_key: str
    mode: SurveyMode
    mean: float
    n: int


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


# group_by name -> (extractor, canonical display order of group keys)
GROUPINGS: dict[str, tuple[Callable[[Respondent], str], tuple[str, ...]]] = {
    "academic_program": (lambda r: r.academic_program.value,
                         tuple(p.value for p in AcademicProgram)),
    "first_course": (lambda r: _yes_no(r.first_course), ("yes", "no")),
    "completed_courses": (lambda r: r.completed_courses.value,
                          tuple(c.value for c in CompletedCourses)),
    "experience": (lambda r: str(r.experience), ("1", "2", "3", "4", "5")),
    "comfort": (lambda r: str(r.comfort), ("1", "2", "3", "4", "5")),
    "attitude": (lambda r: str(r.attitude), ("1", "2", "3", "4", "5")),
    "course_attitude": (lambda r: str(r.course_attitude), ("1", "2", "3", "4", "5")),
    "used_internet": (lambda r: _yes_no(r.used_internet), ("yes", "no")),
}


def cohort_means(responses: Sequence[SusResponse],
                 group_by: str) -> list[CohortMean]:
    """Mean score per (group value, mode), in canonical group order with
    narrated before evaluation; (group, mode) pairs nobody hit are
    omitted rather than reported as zero."""
    if group_by not in GROUPINGS:
        raise UnknownGrouping(
            f"unknown group_by {group_by!r}; expected one of: "
            + ", ".join(sorted(GROUPINGS)))
    if not responses:
        raise EmptyInput("no responses to aggregate")
    extractor, order = GROUPINGS[group_by]
    buckets: dict[tuple[str, SurveyMode], list[float]] = {}
    for response in responses:
        key = (extractor(response.respondent), response.mode_tested)
        buckets.setdefault(key, []).append(sus_score(response).value)
    out: list[CohortMean] = []
    for group in order:
        for mode in (SurveyMode.NARRATED, SurveyMode.EVALUATION):
            scores = buckets.get((group, mode))
            if scores:
                out.append(CohortMean(group, mode, sum(scores) / len(scores),
                                      len(scores)))
    return out


def report_table(responses: Sequence[SusResponse], group_by: str) -> str:
    """Aligned text table of cohort means, one row per group value that
    anyone belongs to; a mode cell nobody hit prints as ---."""
    means = cohort_means(responses, group_by)
    by_group: dict[str, dict[SurveyMode, CohortMean]] = {}
    _, order = GROUPINGS[group_by]
    for m in means:
        by_group.setdefault(m.group_key, {})[m.mode] = m
    rows = [[group_by, "narrated", "n", "evaluation", "n"]]
    for group in order:
        if group not in by_group:
            continue
        cells = [group]
        for mode in (SurveyMode.NARRATED, SurveyMode.EVALUATION):
            m = by_group[group].get(mode)
            if m is None:
                cells += ["---", "0"]
            else:
                cells += [f"{m.mean:.1f}", str(m.n)]
        rows.append(cells)
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])]
        cells += [r[i].rjust(widths[i]) for i in range(1, 5)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def means_payload(means: Sequence[CohortMean]) -> list[dict]:
    return [
        {"group": m.group_key, "mode": m.mode.value, "mean": m.mean, "n": m.n}
        for m in means
    ]


# --- questionnaire text ---------------------------------------------------

# Standard ten-item usability questionnaire; deployments can override the
# wording with a plain-text file, one item per line.
DEFAULT_QUESTIONNAIRE: tuple[str, ...] = (
    "I think that I would like to use this system frequently.",
    "I found the system unnecessarily complex.",
    "I thought the system was easy to use.",
    "I think that I would need the support of a technical person to be able to use this system.",
    "I found the various functions in this system were well integrated.",
    "I thought there was too much inconsistency in this system.",
    "I would imagine that most people would learn to use this system very quickly.",
    "I found the system very cumbersome to use.",
    "I felt very confident using the system.",
    "I needed to learn a lot of things before I could get going with this system.",
)


def load_questionnaire(path: Union[str, Path]) -> tuple[str, ...]:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    items = tuple(ln for ln in lines if ln and not ln.startswith("#"))
    if len(items) != 10:
        raise SchemaError(f"questionnaire file must contain exactly 10 items, found {len(items)}")
    return items


# --- CSV interchange ------------------------------------------------------

FORMAT_LINE = "#format=1"

CSV_HEADER: tuple[str, ...] = (
    *(f"item{i}" for i in range(1, 11)),
    "mode",
    "academic_program",
    "first_course",
    "completed_courses",
    "experience",
    "comfort",
    "attitude",
    "course_attitude",
    "used_internet",
    "resources",
    "tag",
)


def _parse_bool(raw: str, name: str) -> bool:
    low = raw.strip().lower()
    if low in ("yes", "true", "1"):
        return True
    if low in ("no", "false", "0"):
        return False
    raise InvalidResponse(f"{name} must be yes/no, got {raw!r}")


def _parse_likert(raw: str, name: str) -> int:
    try:
        return _likert(int(raw.strip()), name)
    except ValueError:
        raise InvalidResponse(f"{name} must be an integer in 1..5, got {raw!r}") from None


def response_from_row(row: Sequence[str]) -> SusResponse:
    if len(row) not in (len(CSV_HEADER), len(CSV_HEADER) - 1):  # tag optional
        raise InvalidResponse(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
    items = tuple(_parse_likert(row[i], f"item{i + 1}") for i in range(10))
    mode_raw = row[10].strip().lower()
    try:
        mode = SurveyMode(mode_raw)
    except ValueError:
        raise InvalidResponse(f"mode must be narrated or evaluation, got {row[10]!r}") from None
    program_raw = row[11].strip()
    try:
        program = AcademicProgram(program_raw)
    except ValueError:
        raise InvalidResponse(f"unknown academic_program {program_raw!r}") from None
    courses_raw = row[13].strip()
    try:
        courses = CompletedCourses(courses_raw)
    except ValueError:
        raise InvalidResponse(f"completed_courses must be 0/1/2/3/4+, got {row[13]!r}") from None
    respondent = Respondent(
        academic_program=program,
        first_course=_parse_bool(row[12], "first_course"),
        completed_courses=courses,
        experience=_parse_likert(row[14], "experience"),
        comfort=_parse_likert(row[15], "comfort"),
        attitude=_parse_likert(row[16], "attitude"),
        course_attitude=_parse_likert(row[17], "course_attitude"),
        used_internet=_parse_bool(row[18], "used_internet"),
        resources=tuple(part.strip() for part in row[19].split(";") if part.strip()),
    )
    return SusResponse(items=items, mode_tested=mode, respondent=respondent)


def response_to_row(response: SusResponse, tag: str = "") -> list[str]:
    r = response.respondent
    return [
        *(str(item) for item in response.items),
        response.mode_tested.value,
        r.academic_program.value,
        _yes_no(r.first_course),
        r.completed_courses.value,
        str(r.experience),
        str(r.comfort),
        str(r.attitude),
        str(r.course_attitude),
        _yes_no(r.used_internet),
        ";".join(r.resources),
        tag,
    ]


def read_responses_text(text: str) -> tuple[list[SusResponse], list[str]]:
    """Parse a response CSV; bad rows are collected as problem strings
    (1-based data row numbers) instead of aborting the whole file."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_LINE:
        raise SchemaError(f"response file must start with '{FORMAT_LINE}'")
    body = "\n".join(lines[1:])
    reader = csv.reader(io.StringIO(body))
    responses: list[SusResponse] = []
    problems: list[str] = []
    data_row = 0
    for row_index, row in enumerate(reader):
        if not row or all(not cell.strip() for cell in row):
            continue
        if row_index == 0 and row[0].strip() == "item1":
            continue  # header row
        data_row += 1
        try:
            responses.append(response_from_row(row))
        except InvalidResponse as err:
            problems.append(f"row {data_row}: {err}")
    return responses, problems


def read_responses_csv(path: Union[str, Path]) -> tuple[list[SusResponse], list[str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise StorageError(f"cannot read {path}: {err}") from err
    return read_responses_text(text)


def append_response_csv(path: Union[str, Path], response: SusResponse,
                        tag: str = "") -> None:
    """Append one response, creating the file (with format line and
    header) on first write.  Callers serialize concurrent appends."""
    path = Path(path)
    try:
        fresh = not path.exists() or path.stat().st_size == 0
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if fresh:
                fh.write(FORMAT_LINE + "\n")
                writer.writerow(CSV_HEADER)
            writer.writerow(response_to_row(response, tag))
            fh.flush()
            os.fsync(fh.fileno())
    except OSError as err:
        raise StorageError(f"cannot write {path}: {err}") from err
