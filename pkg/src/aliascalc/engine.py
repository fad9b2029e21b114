"""The analysis engine: forward transfer of alias relations through programs.

The transfer of a relation through an instruction follows one rule per form:

* ``skip`` — identity.
* ``create x`` / ``forget x`` — drop every pair rooted at ``x`` (a freshly
  created object is unaliased, exactly like a forgotten one).
* ``cut e, f`` — drop the single pair, on the caller's word.
* ``x := y`` — the substitution operator from :mod:`.relations`.
* sequence — left fold.
* ``then p else q end`` — union of the two branch results in may mode,
  intersection in must mode (there is no condition to test).
* ``iterate n`` — n-fold application.
* ``loop`` — least (may) / greatest (must) fixpoint of the one-step
  extension, reached in finitely many steps because the pair universe is
  finite and the step is monotone.
* ``call r (l)`` — formals are assigned the actuals, then the body runs;
  resolved through a summary table so recursion terminates.
* ``call x.r (l)`` — the caller's relation is re-rooted under the negated
  target (every element prefixed by ``x'``), formals are assigned the
  re-rooted actuals, the body runs, the result is re-rooted back under
  ``x``, and pairs that mention a formal of ``r`` under ``x`` or a leftover
  negated segment — both meaningless to the caller — are dropped.

Interprocedural analysis caches one exit relation per (procedure, entry
relation) pair and iterates the whole table to a fixpoint, so mutually
recursive procedures converge; a re-entered key simply serves its current
value.  In may mode fresh keys start empty and exits only grow; in must
mode they start at the full relation over the program's expressions and
only shrink.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import relations as rel
from .lang import (
    Assign,
    Call,
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
    expressions_of,
    max_dot_count,
)
from .paths import Path, concat, dot_count, negation, render
from .relations import Relation

Recorder = Callable[[str, Relation], None]


@dataclass(frozen=True)
class AnalysisConfig:
    mode: str = "may"  # "may" or "must"
    max_dots: Optional[int] = None  # None: derived from the program
    max_rounds: int = 1000  # interprocedural safety cap
    loop_cap: int = 100_000  # loop-chain safety cap


@dataclass(frozen=True)
class TracePoint:
    context: str  # procedure name plus the entry relation it was run from
    label: str  # one-line instruction text, or "t_k" inside a loop
    relation: Relation


@dataclass
class AnalysisResult:
    relation: Relation
    procedure_exits: Dict[str, Relation]
    summary_keys: int
    rounds: int
    trace: List[TracePoint] = field(default_factory=list)


def resolve_max_dots(program: Program, config: AnalysisConfig, init: Relation) -> int:
    """The dot budget: explicit override, else deep enough for both the
    program's own expressions and the caller-supplied initial relation,
    and never less than 3 (matching the reference behaviour on the
    list-manipulation examples)."""
    if config.max_dots is not None:
        return config.max_dots
    depth = max_dot_count(program)
    for e in rel.elements(init):
        depth = max(depth, dot_count(e))
    return max(depth, 3)


def brief(ins: Instruction) -> str:
    """One-line instruction label for trace output."""
    if isinstance(ins, Skip):
        return "skip"
    if isinstance(ins, Create):
        return f"create {ins.name}"
    if isinstance(ins, Forget):
        return f"forget {ins.name}"
    if isinstance(ins, Cut):
        return f"cut {render(ins.left)}, {render(ins.right)}"
    if isinstance(ins, Assign):
        return f"{render(ins.target)} := {render(ins.source)}"
    if isinstance(ins, Cond):
        return "then ... else ... end"
    if isinstance(ins, Loop):
        return "loop ... end"
    if isinstance(ins, Repeat):
        return f"iterate {ins.count} ... end"
    if isinstance(ins, Call):
        target = f"{render(ins.qualifier)}.{ins.proc}" if ins.qualifier else ins.proc
        if ins.args:
            return f"call {target} ({', '.join(render(a) for a in ins.args)})"
        return f"call {target}"
    raise TypeError(f"unknown instruction {ins!r}")  # pragma: no cover


class Analysis:
    """One analysis run over one program.

    The summary table maps (procedure name, entry relation) to the exit
    relation current at this point of the fixpoint computation.
    """

    def __init__(self, program: Program, config: AnalysisConfig = AnalysisConfig(),
                 init: Relation = rel.EMPTY):
        self.program = program
        self.config = config
        self.init = init
        self.max_dots = resolve_max_dots(program, config, init)
        self.table: Dict[Tuple[str, Relation], Relation] = {}
        self.rounds = 0
        if config.mode == "may":
            self._seed = rel.EMPTY
        elif config.mode == "must":
            self._seed = rel.bound_filter(
                rel.universal(expressions_of(program)), self.max_dots
            )
        else:
            raise ValueError(f"unknown mode {config.mode!r}")

    # -- mode plumbing -------------------------------------------------------

    def combine(self, a: Relation, b: Relation) -> Relation:
        if self.config.mode == "may":
            return a | b
        return a & b

    # -- transfer ------------------------------------------------------------

    def transfer(self, a: Relation, ins: Instruction) -> Relation:
        if isinstance(ins, Skip):
            return a
        if isinstance(ins, (Create, Forget)):
            return rel.restrict(a, {ins.name})
        if isinstance(ins, Cut):
            return rel.cut_pair(a, ins.left, ins.right)
        if isinstance(ins, Assign):
            return rel.subst(a, ins.target, ins.source, self.max_dots)
        if isinstance(ins, Cond):
            return self.combine(
                self.transfer_body(a, ins.then_branch),
                self.transfer_body(a, ins.else_branch),
            )
        if isinstance(ins, Repeat):
            out = a
            for _ in range(ins.count):
                out = self.transfer_body(out, ins.body)
            return out
        if isinstance(ins, Loop):
            return self.loop_fixpoint(a, ins.body)
        if isinstance(ins, Call):
            if ins.qualifier:
                return self.call_qualified(a, ins)
            return self.call_unqualified(a, ins)
        raise TypeError(f"unknown instruction {ins!r}")  # pragma: no cover

    def transfer_body(
        self, a: Relation, body: Sequence[Instruction], record: Optional[Recorder] = None
    ) -> Relation:
        out = a
        for ins in body:
            if record is not None and isinstance(ins, Loop):
                out = self.loop_fixpoint(out, ins.body, record)
            else:
                out = self.transfer(out, ins)
            if record is not None:
                record(brief(ins), out)
        return out

    def loop_fixpoint(
        self, a: Relation, body: Sequence[Instruction], record: Optional[Recorder] = None
    ) -> Relation:
        """Iterate t_{n+1} = t_n combined with (t_n through the body) until
        stable.  The chain is monotone over a finite universe, so failure
        to stabilize within the cap is an internal error, not bad input.
        """
        t = a
        for n in range(self.config.loop_cap):
            if record is not None:
                record(f"t_{n}", t)
            step = self.combine(t, self.transfer_body(t, body))
            if step == t:
                return t
            t = step
        raise RuntimeError(
            "loop failed to stabilize within "
            f"{self.config.loop_cap} steps; this is a bug"
        )

    # -- calls ----------------------------------------------------------------

    def summary(self, proc: Procedure, entry: Relation) -> Relation:
        """Exit relation for running proc from entry, per the current table.

        A missing key is seeded (empty in may mode, full in must mode) and
        queued for evaluation by the driving rounds; a key already being
        evaluated serves its current value, which is what makes recursion
        converge instead of diverging.
        """
        key = (proc.name, entry)
        if key not in self.table:
            self.table[key] = self._seed
        return self.table[key]

    def call_unqualified(self, a: Relation, ins: Call) -> Relation:
        proc = self.program.procedure(ins.proc)
        entry = rel.subst_list(
            a, [(f,) for f in proc.formals], list(ins.args), self.max_dots
        )
        return self.summary(proc, entry)

    def call_qualified(self, a: Relation, ins: Call) -> Relation:
        proc = self.program.procedure(ins.proc)
        target = ins.qualifier
        back = negation(target)
        # The caller's relation, seen from the callee.
        inside = rel.prefix_relation(a, back, self.max_dots)
        # Formals receive the actuals as the callee sees them.
        entry = rel.subst_list(
            inside,
            [(f,) for f in proc.formals],
            [concat(back, arg) for arg in ins.args],
            self.max_dots,
        )
        exit_rel = self.summary(proc, entry)
        # Back to the caller's frame.
        outside = rel.prefix_relation(exit_rel, target, self.max_dots)
        # Pairs mentioning a formal under the target, or a residual negated
        # segment, mean nothing to the caller once the call has returned.
        formal_roots = [concat(target, (f,)) for f in proc.formals]
        cleaned = frozenset(
            (e, f)
            for e, f in outside
            if not any(_starts_with(e, root) or _starts_with(f, root)
                       for root in formal_roots)
        )
        return rel.drop_negated(cleaned)

    # -- whole-program -----------------------------------------------------

    def run(self) -> AnalysisResult:
        main = self.program.procedure(self.program.main)
        entry = rel.bound_filter(self.init, self.max_dots)
        self.summary(main, entry)  # creates the root key
        for round_no in range(self.config.max_rounds):
            self.rounds = round_no + 1
            before = len(self.table)
            changed = False
            for key in list(self.table):
                name, key_entry = key
                body = self.program.procedure(name).body
                exit_rel = self.transfer_body(key_entry, body)
                if exit_rel != self.table[key]:
                    self.table[key] = exit_rel
                    changed = True
            if not changed and len(self.table) == before:
                break
        else:
            raise RuntimeError(
                "interprocedural fixpoint failed to stabilize within "
                f"{self.config.max_rounds} rounds; this is a bug"
            )
        exits: Dict[str, Relation] = {}
        for (name, _), exit_rel in self.table.items():
            if name in exits:
                exits[name] = self.combine(exits[name], exit_rel)
            else:
                exits[name] = exit_rel
        return AnalysisResult(
            relation=self.table[(main.name, entry)],
            procedure_exits=exits,
            summary_keys=len(self.table),
            rounds=self.rounds,
        )

    def run_with_trace(self) -> AnalysisResult:
        """Run to the fixpoint, then replay each cached body once against
        the frozen table, recording the relation after every top-level
        instruction (and each t_k of top-level loops)."""
        result = self.run()
        points: List[TracePoint] = []
        for name, key_entry in list(self.table):
            body = self.program.procedure(name).body
            ctx = f"{name} from {rel.render_relation(key_entry)}"

            def record(label: str, relation: Relation, _ctx: str = ctx) -> None:
                points.append(TracePoint(_ctx, label, relation))

            self.transfer_body(key_entry, body, record)
        result.trace = points
        return result


def _starts_with(path: Path, prefix: Path) -> bool:
    return len(path) >= len(prefix) and path[: len(prefix)] == prefix


def analyze(
    program: Program,
    init: Relation = rel.EMPTY,
    config: AnalysisConfig = AnalysisConfig(),
    trace: bool = False,
) -> AnalysisResult:
    """Analyze a whole program: the result is init transferred through a
    call of the main procedure, with every procedure's exit relation
    exposed alongside."""
    analysis = Analysis(program, config, init)
    if trace:
        return analysis.run_with_trace()
    return analysis.run()


def transfer_instructions(
    program: Program,
    body: Sequence[Instruction],
    init: Relation = rel.EMPTY,
    config: AnalysisConfig = AnalysisConfig(),
) -> Relation:
    """Transfer a relation through a bare instruction sequence in the
    context of a program (used for unit-level checks of single rules)."""
    return Analysis(program, config, init).transfer_body(init, body)
