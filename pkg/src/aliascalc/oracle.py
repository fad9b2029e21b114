"""Concrete reference semantics for the base tier, and the soundness check.

A concrete state maps defined variables to opaque addresses; ``create``
draws the next unused address, so runs are reproducible.  An *execution*
is a state plus what happened along the way: which variables were assigned,
which ``cut`` assumptions turned out to be violated (the operands were in
fact aliased — ``cut`` itself never changes the state), and a trail of the
nondeterministic choices taken, kept only as a witness for reports.

The interpreter enumerates executions, deduplicating on everything except
the trail, with loops unrolled up to a bound; a probe iteration afterwards
detects whether the bound was actually reached, so exactly-explored
programs are not labeled "bounded".

The soundness check compares, for every final execution, the aliasing in
the concrete state against the analysis result: every concrete alias pair
must be predicted.  Executions with violated cut assumptions are excluded
from that containment check — the analysis was explicitly told those two
expressions were distinct, so it owes nothing on such runs — but they are
reported, and they still participate in validating the guaranteed-set of
modified variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from . import relations as rel
from .engine import AnalysisConfig, analyze
from .lang import (
    Assign,
    Call,
    Cond,
    Create,
    Cut,
    Forget,
    Instruction,
    Loop,
    Program,
    Repeat,
    Skip,
    expressions_of,
    instructions_of,
)
from .modvars import modified_vars
from .paths import render, var
from .relations import Relation


@dataclass(frozen=True)
class ExecBounds:
    loop_unroll: int = 4
    max_paths: int = 20_000

    def __post_init__(self):
        if self.loop_unroll < 1 or self.max_paths < 1:
            raise ValueError("bounds must be positive")


@dataclass(frozen=True)
class ConcreteState:
    """values: sorted (variable, address) pairs; next_addr: first address
    never yet allocated.  Defined variables are exactly the value keys."""

    values: Tuple[Tuple[str, int], ...]
    next_addr: int

    def value_map(self) -> Dict[str, int]:
        return dict(self.values)


def _mk_state(values: Dict[str, int], next_addr: int) -> ConcreteState:
    return ConcreteState(tuple(sorted(values.items())), next_addr)


def initial_state(variables: Iterable[str]) -> ConcreteState:
    """Every variable created, all addresses pairwise distinct."""
    names = sorted(set(variables))
    return _mk_state({v: i for i, v in enumerate(names)}, len(names))


@dataclass(frozen=True)
class Execution:
    state: ConcreteState
    assigned: FrozenSet[str] = frozenset()
    cut_violations: FrozenSet[str] = frozenset()
    trail: Tuple[str, ...] = ()

    def key(self):
        """Identity for deduplication: everything but the witness trail."""
        return (self.state, self.assigned, self.cut_violations)


# Execution sets are insertion-ordered dicts keyed by Execution.key(), so
# enumeration is reproducible regardless of hash randomization and two
# routes to the same outcome are explored once (first witness kept).
ExecSet = Dict[tuple, Execution]


def _exec_set(executions: Iterable[Execution]) -> ExecSet:
    out: ExecSet = {}
    for ex in executions:
        out.setdefault(ex.key(), ex)
    return out


def aliases_of(state: ConcreteState) -> Relation:
    """The alias relation a concrete state induces: distinct defined
    variables holding the same address."""
    by_addr: Dict[int, List[str]] = {}
    for name, addr in state.values:
        by_addr.setdefault(addr, []).append(name)
    return rel.from_cliques(
        [[var(n) for n in group] for group in by_addr.values() if len(group) > 1]
    )


def program_variables(program: Program) -> FrozenSet[str]:
    return frozenset(e[0] for e in expressions_of(program) if len(e) == 1)


def ensure_base_tier(program: Program) -> None:
    for ins in instructions_of(program):
        if isinstance(ins, Call):
            raise ValueError("the concrete semantics covers the call-free tier only")
        if isinstance(ins, Assign) and len(ins.source) != 1:
            raise ValueError("the concrete semantics covers undotted programs only")
        if isinstance(ins, Cut) and (len(ins.left) != 1 or len(ins.right) != 1):
            raise ValueError("the concrete semantics covers undotted programs only")


class Interpreter:
    """Enumerates the executions of a call-free, dot-free program."""

    def __init__(self, bounds: ExecBounds = ExecBounds()):
        self.bounds = bounds
        self.bounded = False
        self.truncated = False

    def _clamp(self, execs: ExecSet) -> ExecSet:
        if len(execs) <= self.bounds.max_paths:
            return execs
        self.truncated = True
        return dict(list(execs.items())[: self.bounds.max_paths])

    def run_body(self, execs: ExecSet, body: Sequence[Instruction]) -> ExecSet:
        out = execs
        for ins in body:
            out = self.step(out, ins)
        return out

    def step(self, execs: ExecSet, ins: Instruction) -> ExecSet:
        if isinstance(ins, Cond):
            then_in = _exec_set(_mark(ex, "then") for ex in execs.values())
            else_in = _exec_set(_mark(ex, "else") for ex in execs.values())
            merged = self.run_body(then_in, ins.then_branch)
            for key, ex in self.run_body(else_in, ins.else_branch).items():
                merged.setdefault(key, ex)
            return self._clamp(merged)
        if isinstance(ins, Loop):
            return self.run_loop(execs, ins.body)
        if isinstance(ins, Repeat):
            out = execs
            for _ in range(ins.count):
                out = self.run_body(out, ins.body)
            return out
        return self._clamp(
            _exec_set(self.step_one(ex, ins) for ex in execs.values())
        )

    def step_one(self, ex: Execution, ins: Instruction) -> Execution:
        values = ex.state.value_map()
        next_addr = ex.state.next_addr
        if isinstance(ins, Skip):
            return ex
        if isinstance(ins, Create):
            values[ins.name] = next_addr
            return Execution(
                _mk_state(values, next_addr + 1),
                ex.assigned | {ins.name},
                ex.cut_violations,
                ex.trail,
            )
        if isinstance(ins, Forget):
            values.pop(ins.name, None)
            return Execution(
                _mk_state(values, next_addr),
                ex.assigned | {ins.name},
                ex.cut_violations,
                ex.trail,
            )
        if isinstance(ins, Assign):
            x, y = ins.target[0], ins.source[0]
            if y not in values:
                # An undefined source behaves like forgetting the target.
                values.pop(x, None)
            else:
                values[x] = values[y]
            return Execution(
                _mk_state(values, next_addr),
                ex.assigned | {x},
                ex.cut_violations,
                ex.trail,
            )
        if isinstance(ins, Cut):
            x, y = ins.left[0], ins.right[0]
            violations = ex.cut_violations
            if x in values and y in values and values[x] == values[y]:
                desc = f"{x} ~ {y} at 'cut {render(ins.left)}, {render(ins.right)}'"
                violations = violations | {desc}
            return Execution(
                ex.state,
                ex.assigned | {x, y},
                violations,
                ex.trail,
            )
        raise TypeError(f"unhandled instruction {ins!r}")  # pragma: no cover

    def run_loop(self, execs: ExecSet, body: Sequence[Instruction]) -> ExecSet:
        """Exits after 0..unroll iterations; a probe iteration decides
        whether stopping was an artifact of the bound."""
        seen = _exec_set(_mark(ex, "loop") for ex in execs.values())
        frontier = dict(seen)
        for _ in range(self.bounds.loop_unroll):
            frontier = self.run_body(frontier, body)
            fresh = {k: ex for k, ex in frontier.items() if k not in seen}
            if not fresh:
                return seen
            seen.update(fresh)
            seen = self._clamp(seen)
            frontier = fresh
        probe = self.run_body(frontier, body)
        if any(k not in seen for k in probe):
            self.bounded = True
        return seen


def _mark(ex: Execution, token: str) -> Execution:
    return Execution(ex.state, ex.assigned, ex.cut_violations, ex.trail + (token,))


@dataclass
class RunResult:
    executions: List[Execution]
    bounded: bool
    truncated: bool


def run_program(program: Program, bounds: ExecBounds = ExecBounds()) -> RunResult:
    """All final executions of the main body from the canonical initial
    state (every variable defined, addresses pairwise distinct)."""
    ensure_base_tier(program)
    interp = Interpreter(bounds)
    start = Execution(initial_state(program_variables(program)))
    final = interp.run_body(_exec_set([start]), program.procedure(program.main).body)
    return RunResult(
        executions=list(final.values()),
        bounded=interp.bounded or interp.truncated,
        truncated=interp.truncated,
    )


def path_union_aliases(run: RunResult) -> Relation:
    """Union of the alias relations of all final states, excluding
    executions whose cut assumptions were violated."""
    out: Relation = rel.EMPTY
    for ex in run.executions:
        if not ex.cut_violations:
            out = out | aliases_of(ex.state)
    return out


@dataclass
class SoundnessReport:
    paths: int
    bounded: bool
    containment_violations: List[str] = field(default_factory=list)
    cut_violations: List[str] = field(default_factory=list)
    modvar_violations: List[str] = field(default_factory=list)
    computed: Relation = rel.EMPTY

    @property
    def violation_count(self) -> int:
        return (
            len(self.containment_violations)
            + len(self.cut_violations)
            + len(self.modvar_violations)
        )

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def render(self) -> str:
        lines = list(self.containment_violations)
        lines += self.cut_violations
        lines += self.modvar_violations
        lines.append(
            f"checked {self.paths} paths, {self.violation_count} violations, "
            f"bounded: {'yes' if self.bounded else 'no'}"
        )
        return "\n".join(lines)


def _trail_text(ex: Execution) -> str:
    return ",".join(ex.trail) if ex.trail else "straight-line"


def check_soundness(
    program: Program,
    bounds: ExecBounds = ExecBounds(),
    config: AnalysisConfig = AnalysisConfig(),
) -> SoundnessReport:
    """Compare enumerated concrete aliasing against the analysis result.

    Reports three kinds of problem lines: concrete alias pairs the analysis
    missed (real soundness violations), cut assumptions that some execution
    falsifies, and guaranteed-modified variables that some execution never
    assigned.
    """
    run = run_program(program, bounds)
    computed = analyze(program, config=config).relation
    report = SoundnessReport(
        paths=len(run.executions), bounded=run.bounded, computed=computed
    )
    guaranteed = sorted(
        p[0] for p in modified_vars(program)[program.main] if len(p) == 1
    )
    seen_cut: set = set()
    for ex in run.executions:
        for desc in sorted(ex.cut_violations):
            if desc not in seen_cut:
                seen_cut.add(desc)
                report.cut_violations.append(
                    f"cut assumption violated: {desc} (path: {_trail_text(ex)})"
                )
        if not ex.cut_violations:
            missing = aliases_of(ex.state) - computed
            for e, f in sorted(missing, key=lambda p: (render(p[0]), render(p[1]))):
                report.containment_violations.append(
                    f"violation: concrete alias [{render(e)}, {render(f)}] "
                    f"not predicted (path: {_trail_text(ex)})"
                )
        for name in guaranteed:
            if name not in ex.assigned:
                report.modvar_violations.append(
                    f"modified-variables violation: {name!r} not assigned "
                    f"(path: {_trail_text(ex)})"
                )
    return report
