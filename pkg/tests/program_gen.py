"""Seeded random generator of small well-formed programs, tests only.

Constraints mirror the tracer-equivalence suite: at most 3 variables,
loop nesting at most 2 deep, at most 12 source lines.  Generated
programs are use-before-assign clean by construction (the generator
tracks definite assignment with the same conservatism as the validator:
loop bodies may run zero times, if/else contributes the branch
intersection).  They are not guaranteed to terminate or avoid overflow —
the comparison harness treats step-limit cutoffs and runtime failures as
outcomes both interpreters must agree on exactly.
"""

from __future__ import annotations

import random

NAMES = ("a", "b", "c")
MAX_LINES = 12


def _int_expr(rng: random.Random, readable: list[str], depth: int) -> str:
    if depth >= 2 or rng.random() < 0.4 or not readable:
        if readable and rng.random() < 0.55:
            return rng.choice(readable)
        return str(rng.randint(-4, 9))
    op = rng.choice(("+", "-", "+", "-", "*", "/", "%"))
    left = _int_expr(rng, readable, depth + 1)
    right = _int_expr(rng, readable, depth + 1)
    if op in ("/", "%"):
        # dodge the validator's constant-zero check; zero divisors can
        # still show up through variables at runtime, which is intended
        right = rng.choice(readable) if (readable and rng.random() < 0.5) \
            else str(rng.randint(1, 6))
    if rng.random() < 0.25:
        return f"({left} {op} {right})"
    return f"{left} {op} {right}"


def _cond_expr(rng: random.Random, readable: list[str], depth: int = 0) -> str:
    r = rng.random()
    if depth == 0 and r < 0.15:
        joiner = rng.choice(("&&", "||"))
        return f"{_cond_expr(rng, readable, 1)} {joiner} {_cond_expr(rng, readable, 1)}"
    if r < 0.22:
        return f"!({_cond_expr(rng, readable, 1)})"
    op = rng.choice(("<", "<=", ">", ">=", "==", "!="))
    return f"{_int_expr(rng, readable, 1)} {op} {_int_expr(rng, readable, 1)}"


def _free_name(assigned: set[str]) -> str | None:
    for name in NAMES:
        if name not in assigned:
            return name
    return None


def generate_program(rng: random.Random) -> str:
    """One random program as source text, never more than MAX_LINES lines.

    Every emitter spends from an explicit line budget and only starts a
    construct when its full cost (header, body minimum, closing braces)
    fits, so blocks always close.
    """
    lines: list[str] = []

    def emit_assign(assigned: set[str]) -> set[str]:
        fresh = _free_name(assigned)
        if fresh is not None and rng.random() < 0.5:
            target = fresh
        else:
            target = rng.choice(sorted(assigned)) if assigned else NAMES[0]
        lines.append(f"{target} = {_int_expr(rng, sorted(assigned), 0)}")
        return assigned | {target}

    def emit_while(assigned: set[str], loop_depth: int, budget: int) -> tuple[int, set[str]]:
        # counting loop: counter = 0 / while counter < K { / body / bump / }
        if rng.random() < 0.8:
            counter = _free_name(assigned) or rng.choice(sorted(assigned))
            lines.append(f"{counter} = 0")
            lines.append(f"while {counter} < {rng.randint(1, 4)} {{")
            body_used = emit_block(assigned | {counter}, loop_depth + 1, budget - 4)[0]
            lines.append(f"{counter} = {counter} + 1")
            lines.append("}")
            return 4 + body_used, assigned | {counter}
        # wild loop: arbitrary condition; may spin until the step limit
        lines.append(f"while {_cond_expr(rng, sorted(assigned))} {{")
        body_used = emit_block(assigned, loop_depth + 1, budget - 2)[0]
        lines.append("}")
        return 2 + body_used, assigned

    def emit_if(assigned: set[str], loop_depth: int, budget: int) -> tuple[int, set[str]]:
        lines.append(f"if {_cond_expr(rng, sorted(assigned))} {{")
        then_used, then_assigned = emit_block(assigned, loop_depth, budget - 2)
        if budget - 2 - then_used >= 2 and rng.random() < 0.5:
            lines.append("} else {")
            else_used, else_assigned = emit_block(assigned, loop_depth,
                                                  budget - 3 - then_used)
            lines.append("}")
            return 3 + then_used + else_used, then_assigned & else_assigned
        lines.append("}")
        return 2 + then_used, assigned

    def emit_block(assigned: set[str], loop_depth: int, budget: int) -> tuple[int, set[str]]:
        """Emit at least one statement if the budget allows; returns
        (lines used, definitely-assigned afterwards)."""
        used = 0
        while used < budget:
            remaining = budget - used
            roll = rng.random()
            if roll < 0.25 and remaining >= 5 and loop_depth < 2 and assigned:
                step_used, assigned = emit_while(assigned, loop_depth,
                                                min(remaining, rng.randint(5, 8)))
            elif roll < 0.38 and remaining >= 3 and assigned:
                step_used, assigned = emit_if(assigned, loop_depth,
                                              min(remaining, rng.randint(3, 6)))
            else:
                assigned = emit_assign(assigned)
                step_used = 1
            used += step_used
            if rng.random() < 0.3:
                break
        return used, assigned

    assigned = emit_assign(set())
    emit_block(assigned, 0, MAX_LINES - 1)
    assert len(lines) <= MAX_LINES, f"generator overran: {len(lines)} lines"
    return "\n".join(lines) + "\n"
