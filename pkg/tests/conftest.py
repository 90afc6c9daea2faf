from __future__ import annotations

from pathlib import Path

import pytest

from line_explorer.exercises import Exercise, load_exercise_dir, load_exercise_text
from line_explorer.language import parse

REPO_ROOT = Path(__file__).resolve().parent.parent
EXERCISES_DIR = REPO_ROOT / "exercises"
GOLDEN_DIR = Path(__file__).resolve().parent / "goldens"

# fixture exercises that offer evaluation mode; the replay-identity and
# perturbation suites iterate exactly these
EVAL_FIXTURE_IDS = ("straight-line", "count-up", "sum-to-n", "zero-iterations")


@pytest.fixture(scope="session")
def fixture_exercises() -> dict[str, Exercise]:
    exercises, problems = load_exercise_dir(EXERCISES_DIR)
    assert problems == [], f"fixture exercises failed to load: {problems}"
    return exercises


@pytest.fixture(scope="session")
def count_up(fixture_exercises) -> Exercise:
    return fixture_exercises["count-up"]


@pytest.fixture(scope="session")
def sum_to_n(fixture_exercises) -> Exercise:
    return fixture_exercises["sum-to-n"]


@pytest.fixture(scope="session")
def straight_line(fixture_exercises) -> Exercise:
    return fixture_exercises["straight-line"]


@pytest.fixture(scope="session")
def nested_loops(fixture_exercises) -> Exercise:
    return fixture_exercises["nested-loops"]


@pytest.fixture(scope="session")
def branching(fixture_exercises) -> Exercise:
    return fixture_exercises["branching"]


ENTRY_POOL = ("", "0", "5", "-1", "true", "false", "junk", "05", " 7 ", "999")


def session_random_walk(exercise, rng, length: int) -> int:
    """Drive a session through `length` random applicable actions.

    Before committing each action, verify that applying it and undoing
    it lands back on the exact observable state; then commit the action
    and keep walking.  Returns the number of apply/undo pairs checked.
    Also asserts the iteration-indicator bookkeeping the whole way.
    """
    from line_explorer import grading

    def random_entries():
        return {c: rng.choice(ENTRY_POOL) for c in exercise.trace.columns}

    session = grading.eval_begin(exercise, now=0.0)
    checks = 0
    for _ in range(length):
        moves = []
        if session.cursor_line is not None:
            moves.append("enter")
        answered = sorted({a.line for a in session.archived_answers
                           if session.cursor_line is None
                           or a.line < session.cursor_line})
        if answered:
            moves.append("loop")
        if session.action_stack:
            moves.append("undo")
        if not moves:
            break
        move = rng.choice(moves)
        if move == "undo":
            session, _ = grading.eval_undo(session, now=0.0)
        else:
            before = session.observable()
            if move == "enter":
                applied = grading.eval_enter_line(session, exercise,
                                                  random_entries(), now=0.0)
            else:
                applied = grading.eval_make_loop(session, exercise,
                                                 rng.choice(answered), now=0.0)
            reverted, _ = grading.eval_undo(applied, now=0.0)
            assert reverted.observable() == before
            checks += 1
            session = applied
        stack_loops = sum(isinstance(a, grading.MakeLoop)
                          for a in session.action_stack)
        assert session.iteration_indicator == 1 + stack_loops
    return checks


def build_exercise(source: str, *, env: dict | None = None,
                   modes: tuple[str, ...] = ("demonstration", "evaluation"),
                   exercise_id: str = "inline-test", title: str = "Inline test",
                   assumptions: str = "", max_steps: int | None = None,
                   media_base: Path | None = None) -> Exercise:
    """Assemble and load a throwaway exercise document around a source
    snippet; audio gets an explicit none for every executable line."""
    doc_lines = [
        "format: 1",
        f"id: {exercise_id}",
        f"title: {title}",
        "modes: [" + ", ".join(modes) + "]",
    ]
    if assumptions:
        doc_lines.append("assumptions: |")
        doc_lines += [f"  {ln}" for ln in assumptions.splitlines()]
    if env:
        doc_lines.append("env:")
        doc_lines += [f"  {k}: {str(v).lower() if isinstance(v, bool) else v}"
                      for k, v in env.items()]
    if max_steps is not None:
        doc_lines += ["limits:", f"  max_steps: {max_steps}"]
    if "demonstration" in modes:
        exec_lines = parse(source).executable_lines()
        doc_lines.append("media:")
        doc_lines.append("  audio:")
        doc_lines += [f"    {n}: none" for n in exec_lines]
    doc_lines.append("source: |")
    doc_lines += [f"  {ln}" if ln else "" for ln in source.splitlines()]
    return load_exercise_text("\n".join(doc_lines) + "\n", media_base=media_base)


# --- no-leak scanning over HTTP -------------------------------------------

#: entered for every cell when driving scripted sessions; chosen so it can
#: never collide with a truth-cell rendering in any fixture
SENTINEL_ENTRY = "424242"


def truth_renderings(exercise) -> set[str]:
    """Every string a truth cell could render as, over the whole trace."""
    from line_explorer.tracing import render_value

    values: set[str] = set()
    for step in exercise.trace.steps:
        for value in step.env_after.values():
            values.add(render_value(value))
    return values


def leak_violations(doc, truth: set[str], allowed: set[str]) -> list[str]:
    """Paths of string-valued JSON leaves equal to a truth rendering.

    Only values are scanned: object keys are line numbers ("3" as an
    open_entries key is structure, not a cell value), and cell values
    always cross the wire as strings, so integer leaves cannot leak.
    """
    found: list[str] = []

    def walk(node, path):
        if isinstance(node, str):
            if node in truth and node not in allowed:
                found.append(f"{path} = {node!r}")
        elif isinstance(node, dict):
            for key, value in node.items():
                walk(value, f"{path}.{key}")
        elif isinstance(node, list):
            for i, value in enumerate(node):
                walk(value, f"{path}[{i}]")

    walk(doc, "$")
    return found


def drive_session_over_http(client, exercise_id: str):
    """Walk an evaluation session to a submittable state entering only
    sentinel values, collecting every response seen before submit.

    Covers enter-line, undo, make-loop, session reads, and the
    evaluation exercise payload.  Returns (session_id, revision,
    [(label, response_json), ...]).
    """
    collected = []

    def keep(label, response):
        assert response.status_code < 500, response.text
        body = response.json()
        collected.append((label, body))
        return body

    body = keep("exercise", client.get(f"/api/exercises/{exercise_id}",
                                       params={"mode": "evaluation"}))
    columns = body["columns"]
    entries = {column: SENTINEL_ENTRY for column in columns}

    body = keep("create", client.post("/api/sessions",
                                      json={"exercise_id": exercise_id}))
    sid, revision = body["session_id"], body["revision"]

    def enter():
        nonlocal revision
        body = keep("enter", client.post(
            f"/api/sessions/{sid}/enter-line",
            json={"revision": revision, "entries": entries}))
        revision = body["revision"]
        return body

    def walk_to_end(body):
        while body["cursor_line"] is not None:
            body = enter()
        return body

    body = walk_to_end(body)

    # undo the last answer and redo it, then claim one loop-back pass
    body = keep("undo", client.post(f"/api/sessions/{sid}/undo",
                                    json={"revision": revision}))
    revision = body["revision"]
    body = walk_to_end(body)
    target = body["answers"][0]["line"]
    body = keep("make-loop", client.post(
        f"/api/sessions/{sid}/make-loop",
        json={"revision": revision, "target_line": target}))
    revision = body["revision"]
    body = walk_to_end(body)

    keep("can-submit", client.get(f"/api/sessions/{sid}/can-submit"))
    keep("read", client.get(f"/api/sessions/{sid}"))
    return sid, revision, collected
