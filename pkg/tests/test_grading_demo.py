"""Demonstration-mode checking and revealing, plus entry parsing."""

from __future__ import annotations

import pytest

from line_explorer.grading import (
    UNPARSEABLE,
    ModeUnavailable,
    VerdictKind,
    canonical_entry,
    check_cell,
    entry_matches,
    reveal_cells,
)
from line_explorer.tracing import UnknownCell, UnknownVariable

from conftest import build_exercise


class TestCanonicalEntry:
    @pytest.mark.parametrize("raw,expected", [
        ("5", 5),
        ("05", 5),
        (" 5 ", 5),
        ("-3", -3),
        ("+7", 7),
        ("-0", 0),
        ("true", True),
        ("True", True),
        ("FALSE", False),
        ("", None),
        ("   ", None),
    ])
    def test_parses(self, raw, expected):
        assert canonical_entry(raw) == expected
        if expected is not None:
            assert type(canonical_entry(raw)) is type(expected)

    @pytest.mark.parametrize("raw", ["5x", "tru", "1.5", "- 3", "0b1", "yes"])
    def test_garbage(self, raw):
        assert canonical_entry(raw) is UNPARSEABLE

    def test_matching_is_type_strict(self):
        assert entry_matches("1", 1)
        assert not entry_matches("1", True)
        assert not entry_matches("true", 1)
        assert entry_matches("true", True)

    def test_blank_matches_only_unassigned(self):
        assert entry_matches("", None)
        assert not entry_matches("", 0)
        assert not entry_matches("0", None)
        assert not entry_matches("junk", None)


class TestCheckCell:
    def test_correct_and_incorrect(self, count_up):
        assert check_cell(count_up, 3, [2], "i", "2").kind is VerdictKind.CORRECT
        assert check_cell(count_up, 3, [2], "i", "02").kind is VerdictKind.CORRECT
        assert check_cell(count_up, 3, [2], "i", "1").kind is VerdictKind.INCORRECT

    def test_check_never_discloses_value(self, count_up):
        verdict = check_cell(count_up, 3, [2], "i", "1")
        assert verdict.expected_hidden is True

    def test_blank_against_unassigned(self, straight_line):
        assert check_cell(straight_line, 1, [], "y", "").kind is VerdictKind.CORRECT
        assert check_cell(straight_line, 1, [], "y", "5").kind is VerdictKind.INCORRECT
        assert check_cell(straight_line, 2, [], "y", "").kind is VerdictKind.INCORRECT

    def test_unknown_cell(self, count_up):
        with pytest.raises(UnknownCell):
            check_cell(count_up, 3, [3], "i", "0")
        with pytest.raises(UnknownCell):
            check_cell(count_up, 4, [], "i", "0")

    def test_unknown_variable(self, count_up):
        with pytest.raises(UnknownVariable):
            check_cell(count_up, 1, [], "q", "0")

    def test_demo_mode_required(self):
        eval_only = build_exercise("x = 1\n", modes=("evaluation",),
                                   exercise_id="eval-only")
        with pytest.raises(ModeUnavailable):
            check_cell(eval_only, 1, [], "x", "1")
        with pytest.raises(ModeUnavailable):
            reveal_cells(eval_only, 1, [])


class TestRevealCells:
    def test_row_values(self, count_up):
        assert reveal_cells(count_up, 3, [2]) == {"i": 2}

    def test_unassigned_revealed_as_none(self, straight_line):
        assert reveal_cells(straight_line, 1, []) == {"x": 2, "y": None}
        assert reveal_cells(straight_line, 2, []) == {"x": 2, "y": 5}

    def test_nested_iteration_rows(self, nested_loops):
        assert reveal_cells(nested_loops, 6, [2, 2]) == {"total": 4, "i": 2, "j": 2}

    def test_condition_step_row(self, sum_to_n):
        # header rows show the env the check observed
        assert reveal_cells(sum_to_n, 3, [4]) == {"n": 3, "total": 6, "k": 4}

    def test_unknown_row(self, branching):
        with pytest.raises(UnknownCell):
            reveal_cells(branching, 4, [])  # the branch not taken
