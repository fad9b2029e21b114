"""Seeded random generation of base-tier programs for property tests.

The generator is deterministic given the ``random.Random`` instance, so a
failing case can always be replayed from its seed.  ``allow`` selects which
instruction forms may appear; the property suites use it to carve out the
sub-corpora some laws require (e.g. straight-line programs, or programs
without ``forget``).
"""

from __future__ import annotations

import random
from typing import FrozenSet, List, Tuple

from .lang import (
    Assign,
    Cond,
    Create,
    Cut,
    Forget,
    Instruction,
    Loop,
    Procedure,
    Program,
    Repeat,
    Skip,
)
from .paths import var

ALL_FORMS: FrozenSet[str] = frozenset(
    {"skip", "create", "forget", "cut", "assign", "cond", "loop", "repeat"}
)
STRAIGHT_LINE: FrozenSet[str] = ALL_FORMS - {"cond", "loop", "repeat"}

# Relative weights; compound forms are kept rare so most programs are
# shallow and the concrete enumeration stays cheap.
_WEIGHTS = {
    "assign": 6,
    "create": 3,
    "forget": 2,
    "cut": 2,
    "skip": 1,
    "cond": 2,
    "loop": 1,
    "repeat": 1,
}


def random_program(
    rng: random.Random,
    max_instructions: int = 12,
    max_vars: int = 6,
    allow: FrozenSet[str] = ALL_FORMS,
    depth: int = 2,
) -> Program:
    """A random base-tier program over variables a, b, c, ..."""
    names = [chr(ord("a") + i) for i in range(max_vars)]
    count = rng.randint(1, max_instructions)
    body = _body(rng, names, count, allow, depth)
    main = Procedure(name="Main", formals=(), body=tuple(body))
    return Program(procedures=(main,), level="e0")


def _body(
    rng: random.Random,
    names: List[str],
    budget: int,
    allow: FrozenSet[str],
    depth: int,
) -> List[Instruction]:
    forms = [f for f in allow if f in _WEIGHTS]
    if depth <= 0:
        forms = [f for f in forms if f not in ("cond", "loop", "repeat")]
    if not forms:
        forms = ["skip"]
    weights = [_WEIGHTS.get(f, 1) for f in forms]
    out: List[Instruction] = []
    remaining = budget
    while remaining > 0:
        form = rng.choices(forms, weights)[0]
        ins, cost = _instruction(rng, names, form, remaining, allow, depth)
        out.append(ins)
        remaining -= cost
    return out


def _instruction(
    rng: random.Random,
    names: List[str],
    form: str,
    budget: int,
    allow: FrozenSet[str],
    depth: int,
) -> Tuple[Instruction, int]:
    pick = lambda: var(rng.choice(names))
    if form == "skip":
        return Skip(), 1
    if form == "create":
        return Create(name=rng.choice(names)), 1
    if form == "forget":
        return Forget(name=rng.choice(names)), 1
    if form == "assign":
        return Assign(target=pick(), source=pick()), 1
    if form == "cut":
        return Cut(left=pick(), right=pick()), 1
    # Compound forms: spend part of the budget (at least one atom, at
    # most three per branch) on each sub-body.
    inner = min(budget, rng.randint(1, 3))
    if form == "cond":
        then_branch = _body(rng, names, inner, allow, depth - 1)
        else_branch = _body(rng, names, min(budget, rng.randint(1, 3)), allow, depth - 1)
        cost = len_of(then_branch) + len_of(else_branch) + 1
        return Cond(then_branch=tuple(then_branch), else_branch=tuple(else_branch)), cost
    if form == "loop":
        inner_body = _body(rng, names, inner, allow, depth - 1)
        return Loop(body=tuple(inner_body)), len_of(inner_body) + 1
    if form == "repeat":
        inner_body = _body(rng, names, inner, allow, depth - 1)
        return (
            Repeat(count=rng.randint(0, 3), body=tuple(inner_body)),
            len_of(inner_body) + 1,
        )
    raise ValueError(f"unknown instruction form {form!r}")  # pragma: no cover


def len_of(body: List[Instruction]) -> int:
    total = 0
    for ins in body:
        if isinstance(ins, Cond):
            total += len_of(list(ins.then_branch)) + len_of(list(ins.else_branch)) + 1
        elif isinstance(ins, (Loop, Repeat)):
            total += len_of(list(ins.body)) + 1
        else:
            total += 1
    return total
