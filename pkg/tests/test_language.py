"""Parser and validator behavior, pinned against hand-built ASTs."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from line_explorer.language import (
    Assign,
    Binary,
    Diagnostic,
    ExerciseMode,
    If,
    Literal,
    ParseError,
    Program,
    SourceProgram,
    Unary,
    Var,
    While,
    parse,
    render_value,
    validate,
)

COUNT_UP = "i = 0\nwhile i < 2 {\ni = i + 1\n}\n"

BRANCHING = (
    "if x > 3 {\n"
    "y = x * 2\n"
    "} else {\n"
    "y = x - 1\n"
    "}\n"
    "z = y + x\n"
)


class TestParseGolden:
    def test_count_up_ast(self):
        program = parse(COUNT_UP)
        assert program.statements == (
            Assign(1, "i", Literal(0)),
            While(2, Binary("<", Var("i"), Literal(2)),
                  (Assign(3, "i", Binary("+", Var("i"), Literal(1))),),
                  close_line=4),
        )
        assert program.declared_variables == ("i",)
        assert program.executable_lines() == (1, 2, 3)

    def test_branching_ast(self):
        program = parse(BRANCHING)
        assert program.statements == (
            If(1, Binary(">", Var("x"), Literal(3)),
               (Assign(2, "y", Binary("*", Var("x"), Literal(2))),),
               (Assign(4, "y", Binary("-", Var("x"), Literal(1))),),
               close_line=5),
            Assign(6, "z", Binary("+", Var("y"), Var("x"))),
        )
        # x is only ever read; it trails the assigned names
        assert program.declared_variables == ("y", "z", "x")
        assert program.executable_lines() == (1, 2, 4, 6)

    def test_parse_is_deterministic(self):
        assert parse(COUNT_UP) == parse(COUNT_UP)

    def test_line_numbers_follow_source_text(self):
        # comments and blank lines shift nothing
        src = "\n// setup\nx = 1\n\nwhile x < 3 {  // loop\nx = x + 1\n}\n"
        program = parse(src)
        assert [s.line for s in program.walk()] == [3, 5, 6]
        assert program.source.lines == tuple(src.split("\n"))

    def test_crlf_normalized(self):
        assert parse("x = 1\r\ny = 2\r\n") == parse("x = 1\ny = 2\n")


class TestParseForms:
    def test_brace_on_next_line(self):
        program = parse("x = 0\nwhile x < 1\n{\nx = 1\n}\n")
        loop = program.statements[1]
        assert isinstance(loop, While)
        assert loop.line == 2
        assert loop.body == (Assign(4, "x", Literal(1)),)
        assert loop.close_line == 5

    def test_else_on_separate_line(self):
        program = parse("if true {\nx = 1\n}\nelse {\nx = 2\n}\n")
        node = program.statements[0]
        assert isinstance(node, If)
        assert node.then_body[0].line == 2
        assert node.else_body[0].line == 5
        assert node.close_line == 6

    def test_if_without_else(self):
        program = parse("if true {\nx = 1\n}\ny = 2\n")
        node = program.statements[0]
        assert isinstance(node, If) and node.else_body is None
        assert program.statements[1] == Assign(4, "y", Literal(2))

    def test_empty_loop_body(self):
        program = parse("while 0 == 0 {\n}\n")
        assert program.statements[0].body == ()

    def test_precedence(self):
        program = parse("a = 1 + 2 * 3\n")
        assert program.statements[0].value == Binary(
            "+", Literal(1), Binary("*", Literal(2), Literal(3)))

    def test_parentheses_override(self):
        program = parse("a = (1 + 2) * 3\n")
        assert program.statements[0].value == Binary(
            "*", Binary("+", Literal(1), Literal(2)), Literal(3))

    def test_comparison_binds_looser_than_arithmetic(self):
        program = parse("a = true\nb = 1 + 1 < 3 && a\n")
        assert program.statements[1].value == Binary(
            "&&",
            Binary("<", Binary("+", Literal(1), Literal(1)), Literal(3)),
            Var("a"))

    def test_unary_chains(self):
        program = parse("a = - -2\nb = !false\n")
        assert program.statements[0].value == Unary("-", Unary("-", Literal(2)))
        assert program.statements[1].value == Unary("!", Literal(False))

    def test_bool_literals(self):
        program = parse("t = true\nf = false\n")
        assert program.statements[0].value == Literal(True)
        assert program.statements[1].value == Literal(False)


class TestParseErrors:
    @pytest.mark.parametrize("src,line", [
        ("}\n", 1),
        ("x = 1\n}\n", 2),
        ("while x < 1 {\n", 1),          # never closed
        ("while x < 1\nx = 2\n", 2),     # expected '{'
        ("else {\n}\n", 1),
        ("x = 1 +\n", 1),
        ("x 5\n", 1),
        ("x = 3 3\n", 1),
        ("if x { y = 1 }\n", 1),         # statement crammed onto header line
        ("x = (1 + 2\n", 1),
        ("while = 3 {\n}\n", 1),
        ("x = 9223372036854775808\n", 1),
        ("x = @\n", 1),
    ])
    def test_rejects(self, src, line):
        with pytest.raises(ParseError) as excinfo:
            parse(src)
        assert excinfo.value.line == line

    def test_first_error_wins(self):
        with pytest.raises(ParseError) as excinfo:
            parse("x = \ny = @\n")
        assert excinfo.value.line == 1

    def test_error_column(self):
        with pytest.raises(ParseError) as excinfo:
            parse("x = 3 3\n")
        assert excinfo.value.column == 7

    def test_max_int_literal_allowed(self):
        program = parse("x = 9223372036854775807\n")
        assert program.statements[0].value == Literal(2**63 - 1)


class TestValidate:
    def run(self, src, env=None, mode=ExerciseMode.DEMONSTRATION):
        return validate(parse(src), env or {}, mode)

    def test_clean_program(self):
        assert self.run(COUNT_UP) == []

    def test_use_before_assign(self):
        diags = self.run("x = y + 1\n")
        assert [(d.line, d.code) for d in diags] == [(1, "use_before_assign")]

    def test_initial_env_counts_as_assigned(self):
        assert self.run("x = y + 1\n", env={"y": 2}) == []

    def test_loop_body_may_run_zero_times(self):
        src = "x = 1\nwhile x < 0 {\ny = 5\n}\nz = y\n"
        diags = self.run(src)
        assert [(d.line, d.code) for d in diags] == [(5, "use_before_assign")]

    def test_both_branches_assign_is_definite(self):
        assert self.run(BRANCHING, env={"x": 5}) == []

    def test_one_branch_is_not_definite(self):
        src = "x = 1\nif x > 0 {\ny = 1\n}\nz = y\n"
        diags = self.run(src)
        assert [(d.line, d.code) for d in diags] == [(5, "use_before_assign")]

    def test_condition_reads_are_checked(self):
        diags = self.run("while q < 3 {\n}\n")
        assert [(d.line, d.code) for d in diags] == [(1, "use_before_assign")]

    def test_constant_zero_divisor(self):
        assert [(d.line, d.code) for d in self.run("x = 1 / 0\n")] == \
            [(1, "constant_zero_divisor")]
        assert [(d.line, d.code) for d in self.run("x = 4 % (-0)\n")] == \
            [(1, "constant_zero_divisor")]
        assert self.run("x = 4 / 2\n") == []

    def test_evaluation_rejects_conditionals(self):
        diags = self.run(BRANCHING, env={"x": 5}, mode=ExerciseMode.EVALUATION)
        assert ("conditional_in_evaluation" in {d.code for d in diags})
        assert diags[0].line == 1

    def test_evaluation_rejects_nested_loops(self):
        src = ("i = 0\nwhile i < 2 {\nj = 0\nwhile j < 2 {\nj = j + 1\n}\n"
               "i = i + 1\n}\n")
        diags = self.run(src, mode=ExerciseMode.EVALUATION)
        assert [(d.line, d.code) for d in diags] == [(4, "nested_loop_in_evaluation")]
        # the same program is fine for demonstration
        assert self.run(src) == []

    def test_single_loop_allowed_in_evaluation(self):
        assert self.run(COUNT_UP, mode=ExerciseMode.EVALUATION) == []


class TestProgramViews:
    def test_loop_depth(self):
        src = ("t = 0\ni = 0\nwhile i < 2 {\nj = 0\nwhile j < 2 {\n"
               "t = t + 1\nj = j + 1\n}\ni = i + 1\n}\n")
        program = parse(src)
        assert program.loop_depth_at(1) == 0
        assert program.loop_depth_at(3) == 1   # header inside its own loop
        assert program.loop_depth_at(4) == 1
        assert program.loop_depth_at(5) == 2
        assert program.loop_depth_at(6) == 2
        assert program.loop_depth_at(9) == 1
        assert program.max_loop_depth() == 2

    def test_next_executable_skips_structure_lines(self):
        program = parse(COUNT_UP)
        assert program.first_executable() == 1
        assert program.next_executable_after(1) == 2
        assert program.next_executable_after(3) is None  # "}" is line 4

    def test_render_value(self):
        assert render_value(True) == "true"
        assert render_value(False) == "false"
        assert render_value(-7) == "-7"


class TestFuzz:
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_parse_total(self, text):
        # arbitrary input either parses or raises ParseError; never
        # anything else, never a hang
        try:
            program = parse(text)
        except ParseError:
            return
        assert isinstance(program, Program)

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=100, deadline=None)
    def test_generated_programs_parse_and_validate(self, seed):
        import random

        from program_gen import generate_program

        src = generate_program(random.Random(seed))
        program = parse(src)
        assert len(program.source.lines) <= 13  # 12 + trailing blank
        diags = validate(program, {}, ExerciseMode.DEMONSTRATION)
        assert diags == [], f"generator produced invalid program:\n{src}"
