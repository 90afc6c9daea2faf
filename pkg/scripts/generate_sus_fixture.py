"""Regenerate tests/goldens/sus_responses.csv.

Deterministic (fixed seed): thirty synthetic questionnaire rows covering
both tool modes, every demographic field, multi-valued resource lists,
and at least one academic program with nobody in it so grouped reports
exercise the omission path.  Run from the repository root:

    python3 scripts/generate_sus_fixture.py
"""

from __future__ import annotations

import random
from pathlib import Path

from line_explorer.sus import (
    AcademicProgram,
    CompletedCourses,
    Respondent,
    SurveyMode,
    SusResponse,
    append_response_csv,
)

OUT = Path(__file__).resolve().parent.parent / "tests" / "goldens" / "sus_responses.csv"

PROGRAMS = [  # FineArts intentionally absent
    AcademicProgram.IT, AcademicProgram.IT, AcademicProgram.IT,
    AcademicProgram.CS, AcademicProgram.CS,
    AcademicProgram.IS, AcademicProgram.IS,
    AcademicProgram.MATH_PHYS_SCI,
    AcademicProgram.LIBERAL_ARTS,
    AcademicProgram.BUSINESS_ECON,
]

RESOURCES = [
    (), ("videos",), ("videos", "forums"), ("textbook",),
    ("videos", "textbook", "tutor"), ("forums",),
]


def likert(rng: random.Random, center: float) -> int:
    return max(1, min(5, round(rng.gauss(center, 1.1))))


def one_response(rng: random.Random, index: int) -> SusResponse:
    mode = SurveyMode.NARRATED if index % 2 == 0 else SurveyMode.EVALUATION
    agreeable = 4.1 if mode is SurveyMode.NARRATED else 3.7
    items = tuple(
        likert(rng, agreeable) if i % 2 == 0 else likert(rng, 6 - agreeable)
        for i in range(10)
    )
    respondent = Respondent(
        academic_program=rng.choice(PROGRAMS),
        first_course=rng.random() < 0.6,
        completed_courses=rng.choice(list(CompletedCourses)),
        experience=likert(rng, 2.6),
        comfort=likert(rng, 3.2),
        attitude=likert(rng, 3.6),
        course_attitude=likert(rng, 3.4),
        used_internet=rng.random() < 0.7,
        resources=rng.choice(RESOURCES),
    )
    return SusResponse(items=items, mode_tested=mode, respondent=respondent)


def main() -> None:
    rng = random.Random(20240817)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    if OUT.exists():
        OUT.unlink()
    for index in range(30):
        append_response_csv(OUT, one_response(rng, index), tag=f"p{index:02d}")
    print(f"wrote 30 responses to {OUT}")


if __name__ == "__main__":
    main()
