"""Parser and static checks for the small imperative teaching language.

The language is deliberately tiny: 64-bit signed integers and booleans,
assignment statements, ``while`` loops and ``if``/``else`` conditionals
with mandatory braces, C-style operators, and ``//`` line comments.
Exactly one statement per line; brace-only lines (``{``, ``}``,
``} else {``) structure blocks but are never executed themselves.

Line numbers are 1-based and refer to the original source text, which is
what students see on screen, so every AST node keeps the line it came
from and parsing never reorders or renumbers anything.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from .errors import LineExplorerError

Value = Union[int, bool]

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_KEYWORDS = frozenset({"while", "if", "else", "true", "false"})

# Binary operators by precedence level, loosest first.  Unary - and !
# bind tighter than all of these.
_PRECEDENCE: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class ExerciseMode(enum.Enum):
    """How an exercise is presented: narrated walkthrough or graded test."""

    DEMONSTRATION = "demonstration"
    EVALUATION = "evaluation"


class ParseError(LineExplorerError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def render_value(value: Value) -> str:
    """Literal syntax for a runtime value: ``true``/``false`` or digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class SourceProgram:
    """Raw program text split into 1-based display lines.

    Line endings are normalized to ``\\n`` once, here, so every later
    stage (parser, worksheet layout, web payloads) agrees on numbering.
    """

    text: str
    lines: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "SourceProgram":
        normalized = text.replace("\r\n", "\n").replace("\r", "\n")
        return cls(text=normalized, lines=tuple(normalized.split("\n")))

    def line(self, number: int) -> str:
        return self.lines[number - 1]


# --- expression AST -------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Literal, Var, Unary, Binary]


# --- statement AST --------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    line: int
    target: str
    value: Expr


@dataclass(frozen=True)
class While:
    line: int  # header line, the one that executes on every condition check
    condition: Expr
    body: tuple["Stmt", ...]
    close_line: int


@dataclass(frozen=True)
class If:
    line: int
    condition: Expr
    then_body: tuple["Stmt", ...]
    else_body: Optional[tuple["Stmt", ...]]
    close_line: int  # line of the final "}"


Stmt = Union[Assign, While, If]


@dataclass(frozen=True)
class Program:
    source: SourceProgram
    statements: tuple[Stmt, ...]
    declared_variables: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "declared_variables", _collect_variables(self.statements))

    def walk(self) -> Iterator[Stmt]:
        """All statements in source order, outer before inner."""
        def go(stmts: tuple[Stmt, ...]) -> Iterator[Stmt]:
            for st in stmts:
                yield st
                if isinstance(st, While):
                    yield from go(st.body)
                elif isinstance(st, If):
                    yield from go(st.then_body)
                    if st.else_body is not None:
                        yield from go(st.else_body)
        return go(self.statements)

    def executable_lines(self) -> tuple[int, ...]:
        return tuple(sorted(st.line for st in self.walk()))

    def statement_at(self, line: int) -> Optional[Stmt]:
        for st in self.walk():
            if st.line == line:
                return st
        return None

    def loop_depth_at(self, line: int) -> int:
        """Number of while loops whose span encloses this line; a while
        header counts as inside its own loop."""
        depth = 0
        def go(stmts: tuple[Stmt, ...], d: int) -> None:
            nonlocal depth
            for st in stmts:
                if st.line == line:
                    depth = d + (1 if isinstance(st, While) else 0)
                if isinstance(st, While):
                    go(st.body, d + 1)
                elif isinstance(st, If):
                    go(st.then_body, d)
                    if st.else_body is not None:
                        go(st.else_body, d)
        go(self.statements, 0)
        return depth

    def next_executable_after(self, line: int) -> Optional[int]:
        """Next executable line strictly below ``line`` in the source text,
        or None when nothing executable remains (program end)."""
        later = [n for n in self.executable_lines() if n > line]
        return min(later) if later else None

    def first_executable(self) -> Optional[int]:
        lines = self.executable_lines()
        return lines[0] if lines else None

    def max_loop_depth(self) -> int:
        def go(stmts: tuple[Stmt, ...], d: int) -> int:
            deepest = d
            for st in stmts:
                if isinstance(st, While):
                    deepest = max(deepest, go(st.body, d + 1))
                elif isinstance(st, If):
                    deepest = max(deepest, go(st.then_body, d))
                    if st.else_body is not None:
                        deepest = max(deepest, go(st.else_body, d))
            return deepest
        return go(self.statements, 0)


def _collect_variables(statements: tuple[Stmt, ...]) -> tuple[str, ...]:
    """Assignment targets in first-assignment order, then any variables
    that are only ever read, in first-read order."""
    assigned: list[str] = []
    read: list[str] = []

    def note_expr(e: Expr) -> None:
        if isinstance(e, Var):
            if e.name not in assigned and e.name not in read:
                read.append(e.name)
        elif isinstance(e, Unary):
            note_expr(e.operand)
        elif isinstance(e, Binary):
            note_expr(e.left)
            note_expr(e.right)

    def go(stmts: tuple[Stmt, ...]) -> None:
        for st in stmts:
            if isinstance(st, Assign):
                note_expr(st.value)
                if st.target not in assigned:
                    assigned.append(st.target)
            elif isinstance(st, While):
                note_expr(st.condition)
                go(st.body)
            elif isinstance(st, If):
                note_expr(st.condition)
                go(st.then_body)
                if st.else_body is not None:
                    go(st.else_body)

    go(statements)
    return tuple(assigned + [v for v in read if v not in assigned])


# --- lexer ----------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "name" | "op" | "punct"
    text: str
    value: Optional[int] = None
    column: int = 0


_TWO_CHAR_OPS = ("==", "!=", "<=", ">=", "&&", "||")
_ONE_CHAR_OPS = "=<>+-*/%!"
_PUNCT = "(){}"


def _lex_line(text: str, line_no: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if text.startswith("//", i):
            break
        col = i + 1
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(_Token("op", two, column=col))
            i += 2
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            digits = text[i:j]
            value = int(digits)
            if value > INT_MAX:
                raise ParseError(line_no, col, f"integer literal {digits} does not fit in 64 bits")
            tokens.append(_Token("int", digits, value=value, column=col))
            i = j
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("name", m.group(0), column=col))
            i = m.end()
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(_Token("op", ch, column=col))
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, column=col))
            i += 1
            continue
        raise ParseError(line_no, col, f"unexpected character {ch!r}")
    return tokens


# --- expression parsing ---------------------------------------------------

class _ExprParser:
    def __init__(self, tokens: list[_Token], line_no: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            col = self.tokens[-1].column + len(self.tokens[-1].text) if self.tokens else 1
            raise ParseError(self.line_no, col, "unexpected end of line in expression")
        self.pos += 1
        return tok

    def parse(self, level: int = 0) -> Expr:
        if level >= len(_PRECEDENCE):
            return self.parse_unary()
        expr = self.parse(level + 1)
        ops = _PRECEDENCE[level]
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in ops:
                return expr
            self.take()
            right = self.parse(level + 1)
            expr = Binary(tok.text, expr, right)

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in ("-", "!"):
            self.take()
            return Unary(tok.text, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.take()
        if tok.kind == "int":
            assert tok.value is not None
            return Literal(tok.value)
        if tok.kind == "name":
            if tok.text == "true":
                return Literal(True)
            if tok.text == "false":
                return Literal(False)
            if tok.text in _KEYWORDS:
                raise ParseError(self.line_no, tok.column, f"keyword {tok.text!r} is not a value")
            return Var(tok.text)
        if tok.kind == "punct" and tok.text == "(":
            inner = self.parse(0)
            closing = self.take()
            if not (closing.kind == "punct" and closing.text == ")"):
                raise ParseError(self.line_no, closing.column, "expected ')'")
            return inner
        raise ParseError(self.line_no, tok.column, f"unexpected {tok.text!r} in expression")


def _parse_expr(tokens: list[_Token], line_no: int) -> tuple[Expr, int]:
    """Parse a maximal expression prefix; returns (expr, tokens consumed)."""
    p = _ExprParser(tokens, line_no)
    expr = p.parse(0)
    return expr, p.pos


# --- statement / structure parsing ----------------------------------------

@dataclass
class _Frame:
    kind: str  # "top" | "while" | "if" | "else"
    header_line: int
    condition: Optional[Expr]
    body: list[Stmt]
    # for "else" frames: the already-parsed then-branch of the if
    then_body: Optional[tuple[Stmt, ...]] = None


def parse(source: Union[str, SourceProgram]) -> Program:
    """Parse source text into a Program.

    Raises ParseError on the first problem encountered, reading top to
    bottom, so the reported line/column is the earliest offender.
    """
    if isinstance(source, str):
        source = SourceProgram.from_text(source)

    frames: list[_Frame] = [_Frame("top", 0, None, [])]
    # A while/if header may put its "{" on the next line; remember it.
    pending_open: Optional[_Frame] = None
    # After an if-block's "}" we must wait one line to see whether an
    # "else {" follows before committing the If node.
    closed_if: Optional[tuple[_Frame, int]] = None

    def finish_if(frame: _Frame, close_line: int,
                  else_body: Optional[tuple[Stmt, ...]] = None) -> None:
        assert frame.condition is not None
        if frame.kind == "else":
            node = If(frame.header_line, frame.condition, frame.then_body or (),
                      tuple(frame.body), close_line)
        else:
            node = If(frame.header_line, frame.condition, tuple(frame.body),
                      else_body, close_line)
        frames[-1].body.append(node)

    for idx, raw in enumerate(source.lines):
        line_no = idx + 1
        tokens = _lex_line(raw, line_no)
        if not tokens:
            continue

        if pending_open is not None:
            if len(tokens) == 1 and tokens[0].text == "{":
                frames.append(pending_open)
                pending_open = None
                continue
            raise ParseError(line_no, tokens[0].column,
                             "expected '{' to open the block started on line "
                             f"{pending_open.header_line}")

        if closed_if is not None:
            frame, close_line = closed_if
            closed_if = None
            if tokens[0].kind == "name" and tokens[0].text == "else":
                if len(tokens) == 2 and tokens[1].text == "{":
                    frames.append(_Frame("else", frame.header_line, frame.condition,
                                         [], then_body=tuple(frame.body)))
                    continue
                raise ParseError(line_no, tokens[0].column, "expected 'else {'")
            finish_if(frame, close_line)
            # fall through: current line parsed normally

        first = tokens[0]

        # "}" and "} else {"
        if first.kind == "punct" and first.text == "}":
            frame = frames[-1]
            if frame.kind == "top":
                raise ParseError(line_no, first.column, "unmatched '}'")
            if len(tokens) == 1:
                frames.pop()
                if frame.kind == "while":
                    assert frame.condition is not None
                    frames[-1].body.append(
                        While(frame.header_line, frame.condition, tuple(frame.body), line_no))
                elif frame.kind == "if":
                    closed_if = (frame, line_no)
                else:  # else frame
                    finish_if(frame, line_no)
                continue
            if (len(tokens) == 3 and tokens[1].kind == "name"
                    and tokens[1].text == "else" and tokens[2].text == "{"):
                if frame.kind != "if":
                    raise ParseError(line_no, tokens[1].column,
                                     "'else' without a matching 'if'")
                frames.pop()
                frames.append(_Frame("else", frame.header_line, frame.condition,
                                     [], then_body=tuple(frame.body)))
                continue
            raise ParseError(line_no, tokens[1].column,
                             "unexpected tokens after '}'")

        if first.kind == "name" and first.text in ("while", "if"):
            condition, used = _parse_expr(tokens[1:], line_no)
            rest = tokens[1 + used:]
            frame = _Frame(first.text, line_no, condition, [])
            if len(rest) == 1 and rest[0].text == "{":
                frames.append(frame)
            elif not rest:
                pending_open = frame
            else:
                raise ParseError(line_no, rest[0].column,
                                 f"unexpected {rest[0].text!r} after {first.text} condition")
            continue

        if first.kind == "name" and first.text == "else":
            raise ParseError(line_no, first.column, "'else' without a matching 'if'")

        if first.kind == "punct" and first.text == "{":
            raise ParseError(line_no, first.column, "unexpected '{'")

        # Plain assignment: name = expr, consuming the whole line.
        if first.kind != "name":
            raise ParseError(line_no, first.column, f"expected a statement, found {first.text!r}")
        if first.text in _KEYWORDS:
            raise ParseError(line_no, first.column,
                             f"keyword {first.text!r} cannot start an assignment")
        if len(tokens) < 2 or not (tokens[1].kind == "op" and tokens[1].text == "="):
            col = tokens[1].column if len(tokens) > 1 else first.column + len(first.text)
            raise ParseError(line_no, col, "expected '=' after variable name")
        value, used = _parse_expr(tokens[2:], line_no)
        rest = tokens[2 + used:]
        if rest:
            raise ParseError(line_no, rest[0].column,
                             f"unexpected {rest[0].text!r} after expression")
        frames[-1].body.append(Assign(line_no, first.text, value))

    if pending_open is not None:
        raise ParseError(pending_open.header_line, 1,
                         f"block started on line {pending_open.header_line} is never opened with '{{'")
    if closed_if is not None:
        finish_if(*closed_if)
    if len(frames) > 1:
        frame = frames[-1]
        raise ParseError(frame.header_line, 1,
                         f"block started on line {frame.header_line} is never closed")

    return Program(source=source, statements=tuple(frames[0].body))


# --- static validation ----------------------------------------------------

class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    line: int
    code: str
    message: str

    def render(self) -> str:
        return f"{self.severity.value}: line {self.line}: {self.message} [{self.code}]"


def _expr_names(expr: Expr) -> Iterator[str]:
    if isinstance(expr, Var):
        yield expr.name
    elif isinstance(expr, Unary):
        yield from _expr_names(expr.operand)
    elif isinstance(expr, Binary):
        yield from _expr_names(expr.left)
        yield from _expr_names(expr.right)


def _constant_zero(expr: Expr) -> bool:
    if isinstance(expr, Literal):
        return expr.value == 0 and not isinstance(expr.value, bool)
    if isinstance(expr, Unary) and expr.op == "-":
        return _constant_zero(expr.operand)
    return False


def validate(program: Program, initial_env: Mapping[str, Value],
             mode: ExerciseMode) -> list[Diagnostic]:
    """Static checks before a program is traced or served to students.

    Flow-sensitive definite-assignment: a while body may run zero times,
    so nothing assigned inside it counts afterwards; after if/else only
    variables assigned on *both* branches count.  Evaluation mode
    additionally forbids conditionals and nested loops, because the
    answer sheet for those cannot be walked with a single forward cursor
    plus loop-back jumps.
    """
    diags: list[Diagnostic] = []
    seen: set[tuple[int, str, str]] = set()

    def report(line: int, code: str, message: str) -> None:
        key = (line, code, message)
        if key not in seen:
            seen.add(key)
            diags.append(Diagnostic(Severity.ERROR, line, code, message))

    def check_expr(expr: Expr, line: int, assigned: set[str]) -> None:
        for name in _expr_names(expr):
            if name not in assigned:
                report(line, "use_before_assign",
                       f"variable '{name}' may be read before it is assigned")

    def check_div(expr: Expr, line: int) -> None:
        if isinstance(expr, Binary):
            if expr.op in ("/", "%") and _constant_zero(expr.right):
                report(line, "constant_zero_divisor",
                       f"right side of '{expr.op}' is the constant 0")
            check_div(expr.left, line)
            check_div(expr.right, line)
        elif isinstance(expr, Unary):
            check_div(expr.operand, line)

    def go(stmts: tuple[Stmt, ...], assigned: set[str], loop_depth: int) -> set[str]:
        for st in stmts:
            if isinstance(st, Assign):
                check_expr(st.value, st.line, assigned)
                check_div(st.value, st.line)
                assigned = assigned | {st.target}
            elif isinstance(st, While):
                if mode is ExerciseMode.EVALUATION and loop_depth >= 1:
                    report(st.line, "nested_loop_in_evaluation",
                           "nested loops cannot be answered in evaluation mode")
                check_expr(st.condition, st.line, assigned)
                check_div(st.condition, st.line)
                go(st.body, set(assigned), loop_depth + 1)
                # body may run zero times: no new definite assignments
            elif isinstance(st, If):
                if mode is ExerciseMode.EVALUATION:
                    report(st.line, "conditional_in_evaluation",
                           "if/else cannot be answered in evaluation mode")
                check_expr(st.condition, st.line, assigned)
                check_div(st.condition, st.line)
                after_then = go(st.then_body, set(assigned), loop_depth)
                if st.else_body is not None:
                    after_else = go(st.else_body, set(assigned), loop_depth)
                    assigned = after_then & after_else
        return assigned

    go(program.statements, set(initial_env), 0)
    return diags
