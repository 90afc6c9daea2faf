"""line_explorer: a trace-prediction tutor.

Students act as the interpreter: for each executed line they predict
every variable's value, either with immediate check/show feedback
(demonstration mode) or silently until a final graded submission
(evaluation mode).  A usability-survey module scores and aggregates the
standard ten-item questionnaire used to study the tool.
"""

from .errors import LineExplorerError, SchemaError, StorageError
from .exercises import (
    Exercise,
    Media,
    StoredSubmission,
    SubmissionStore,
    TraceError,
    ValidationError,
    load_exercise,
    load_exercise_dir,
    load_exercise_text,
    new_submission,
    save_exercise,
    save_exercise_document,
)
from .grading import (
    AnswerStep,
    CellVerdict,
    EvalSession,
    SubmissionResult,
    VerdictKind,
    apply_replay,
    canonical_entry,
    check_cell,
    eval_begin,
    eval_can_submit,
    eval_enter_line,
    eval_make_loop,
    eval_submit,
    eval_undo,
    grade_answers,
    reveal_cells,
    trace_replay_actions,
)
from .language import (
    Diagnostic,
    ExerciseMode,
    ParseError,
    Program,
    SourceProgram,
    parse,
    render_value,
    validate,
)
from .sus import (
    AcademicProgram,
    AdjectiveRating,
    CohortMean,
    Respondent,
    SurveyMode,
    SusResponse,
    SusScore,
    classify,
    cohort_means,
    sus_score,
)
from .tracing import (
    NOT_EXECUTED,
    ExecutionLimits,
    Termination,
    Trace,
    TraceRuntimeError,
    TraceStep,
    execute,
    render_steps,
    render_table,
    trace_cell,
    worksheet_layout,
)

__version__ = "0.1.0"

__all__ = [
    "AcademicProgram",
    "AdjectiveRating",
    "AnswerStep",
    "CellVerdict",
    "CohortMean",
    "Diagnostic",
    "EvalSession",
    "Exercise",
    "ExecutionLimits",
    "ExerciseMode",
    "LineExplorerError",
    "Media",
    "NOT_EXECUTED",
    "ParseError",
    "Program",
    "Respondent",
    "SchemaError",
    "SourceProgram",
    "StorageError",
    "StoredSubmission",
    "SubmissionResult",
    "SubmissionStore",
    "SurveyMode",
    "SusResponse",
    "SusScore",
    "Termination",
    "Trace",
    "TraceError",
    "TraceRuntimeError",
    "TraceStep",
    "ValidationError",
    "VerdictKind",
    "apply_replay",
    "canonical_entry",
    "check_cell",
    "classify",
    "cohort_means",
    "eval_begin",
    "eval_can_submit",
    "eval_enter_line",
    "eval_make_loop",
    "eval_submit",
    "eval_undo",
    "execute",
    "grade_answers",
    "load_exercise",
    "load_exercise_dir",
    "load_exercise_text",
    "new_submission",
    "parse",
    "render_steps",
    "render_table",
    "render_value",
    "reveal_cells",
    "save_exercise",
    "save_exercise_document",
    "sus_score",
    "trace_cell",
    "trace_replay_actions",
    "validate",
    "worksheet_layout",
]
