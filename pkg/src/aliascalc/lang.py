"""The analyzed language: AST, parser, and validation for three tiers.

Tier ``e0`` is bare instruction lists over plain variables (skip, create,
forget, cut, assignment, conditional, loop, bounded iterate).  Tier ``e1``
adds procedure declarations and unqualified calls.  Tier ``e2`` adds dotted
paths as assignment sources / arguments and qualified calls (``call x.r``).

Grammar sketch::

    program    ::= statement-list | procedure+
    procedure  ::= "procedure" NAME [ "(" names ")" ] statements "end"
    statement  ::= "skip" | "create" NAME | "forget" NAME
                 | "cut" path "," path
                 | path ":=" path
                 | "then" statements "else" statements "end"
                 | "loop" statements "end"
                 | "iterate" NUMBER statements "end"
                 | "call" path [ "(" paths ")" ]

Statements are separated by newlines or semicolons; ``--`` starts a comment.
A bare statement list is wrapped in an implicit argumentless ``Main``.  The
conditional has no condition: either branch may execute, which is all the
analysis can use anyway.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .paths import CURRENT, Path, dot_count, render, var

KEYWORDS = {
    "skip", "forget", "create", "cut", "then", "else", "end",
    "loop", "iterate", "call", "procedure", "Current",
}

LEVELS = ("e0", "e1", "e2")


class SourceError(Exception):
    """Parse or validation failure, carrying a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}, col {self.col}: {self.message}"
        return self.message


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Create:
    name: str


@dataclass(frozen=True)
class Forget:
    name: str


@dataclass(frozen=True)
class Cut:
    left: Path
    right: Path


@dataclass(frozen=True)
class Assign:
    target: Path  # always a single variable; the parser enforces it
    source: Path


@dataclass(frozen=True)
class Cond:
    then_branch: Tuple["Instruction", ...]
    else_branch: Tuple["Instruction", ...]


@dataclass(frozen=True)
class Loop:
    body: Tuple["Instruction", ...]


@dataclass(frozen=True)
class Repeat:
    count: int
    body: Tuple["Instruction", ...]


@dataclass(frozen=True)
class Call:
    """``call r (args)`` or ``call x.r (args)``.

    ``qualifier`` is the path before the procedure name — empty for an
    unqualified call.  ``pos`` carries the source position for diagnostics
    and does not participate in equality.
    """

    qualifier: Path
    proc: str
    args: Tuple[Path, ...] = ()
    pos: Tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


Instruction = Union[Skip, Create, Forget, Cut, Assign, Cond, Loop, Repeat, Call]


@dataclass(frozen=True)
class Procedure:
    name: str
    formals: Tuple[str, ...]
    body: Tuple[Instruction, ...]


@dataclass(frozen=True)
class Program:
    procedures: Tuple[Procedure, ...]
    main: str = "Main"
    level: str = "e2"
    _by_name: Dict[str, Procedure] = field(
        default=None, init=False, compare=False, repr=False
    )

    def __post_init__(self):
        object.__setattr__(
            self, "_by_name", {p.name: p for p in self.procedures}
        )

    def procedure(self, name: str) -> Procedure:
        try:
            return self._by_name[name]
        except KeyError:
            raise SourceError(f"undefined procedure {name!r}") from None


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NAME NUMBER ASSIGN DOT COMMA LPAREN RPAREN SEP EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
      (?P<comment>--[^\n]*)
    | (?P<ws>[ \t\r]+)
    | (?P<sep>[\n;])
    | (?P<assign>:=)
    | (?P<name>[A-Za-z][A-Za-z0-9_]*)
    | (?P<number>[0-9]+)
    | (?P<dot>\.)
    | (?P<comma>,)
    | (?P<lparen>\()
    | (?P<rparen>\))
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SourceError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        tok_text = m.group()
        col = pos - line_start + 1
        if kind == "sep":
            tokens.append(Token("SEP", tok_text, line, col))
            if tok_text == "\n":
                line += 1
                line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind.upper(), tok_text, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class Parser:
    """Recursive descent over the token list; one token of lookahead."""

    def __init__(self, tokens: List[Token], level: str = "e2"):
        self.tokens = tokens
        self.pos = 0
        self.level = level

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> SourceError:
        tok = tok or self.peek()
        return SourceError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.next()

    def skip_seps(self) -> None:
        while self.peek().kind == "SEP":
            self.next()

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "NAME" and tok.text in words

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if not self.at_keyword(word):
            raise self.error(f"expected {word!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def identifier(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "NAME" or tok.text in KEYWORDS:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.next()
        return tok.text

    # -- paths --------------------------------------------------------------

    def path(self) -> Path:
        """A dotted path; ``Current`` segments vanish (prefixing by the
        current object is the identity)."""
        segs: List[str] = []
        while True:
            tok = self.peek()
            if tok.kind != "NAME" or (tok.text in KEYWORDS and tok.text != "Current"):
                raise self.error(
                    f"expected a variable or Current, found {tok.text or 'end of input'!r}"
                )
            self.next()
            if tok.text != "Current":
                segs.append(tok.text)
            if self.peek().kind == "DOT":
                self.next()
                continue
            return tuple(segs)

    def fenced_path(self, what: str) -> Path:
        """A path in a position where tiers below e2 allow only a plain
        variable (no dots, not Current)."""
        tok = self.peek()
        p = self.path()
        if self.level != "e2" and len(p) != 1:
            if p:
                raise SourceError(
                    f"dotted {what} {render(p)!r} requires level e2",
                    tok.line, tok.col,
                )
            raise SourceError(
                f"Current as {what} requires level e2", tok.line, tok.col
            )
        return p

    # -- statements ----------------------------------------------------------

    def statements(self, stop_words: Set[str]) -> Tuple[Instruction, ...]:
        out: List[Instruction] = []
        while True:
            self.skip_seps()
            tok = self.peek()
            if tok.kind == "EOF" or (tok.kind == "NAME" and tok.text in stop_words):
                return tuple(out)
            out.append(self.statement())
            nxt = self.peek()
            if nxt.kind not in ("SEP", "EOF") and not (
                nxt.kind == "NAME" and nxt.text in stop_words
            ):
                raise self.error(
                    f"expected end of statement, found {nxt.text!r}"
                )

    def statement(self) -> Instruction:
        tok = self.peek()
        if tok.kind != "NAME":
            raise self.error(f"expected a statement, found {tok.text or 'end of input'!r}")
        word = tok.text
        if word == "skip":
            self.next()
            return Skip()
        if word == "create":
            self.next()
            return Create(self.identifier("a variable after 'create'"))
        if word == "forget":
            self.next()
            return Forget(self.identifier("a variable after 'forget'"))
        if word == "cut":
            self.next()
            left = self.fenced_path("cut operand")
            self.expect("COMMA", "',' between the two cut operands")
            right = self.fenced_path("cut operand")
            return Cut(left, right)
        if word == "then":
            self.next()
            then_branch = self.statements({"else"})
            self.expect_keyword("else")
            else_branch = self.statements({"end"})
            self.expect_keyword("end")
            return Cond(then_branch, else_branch)
        if word == "loop":
            self.next()
            body = self.statements({"end"})
            self.expect_keyword("end")
            return Loop(body)
        if word == "iterate":
            self.next()
            count_tok = self.expect("NUMBER", "an iteration count after 'iterate'")
            body = self.statements({"end"})
            self.expect_keyword("end")
            return Repeat(int(count_tok.text), body)
        if word == "call":
            if self.level == "e0":
                raise self.error("'call' requires level e1 or higher", tok)
            self.next()
            target = self.path()
            if not target:
                raise self.error("call target must name a procedure", tok)
            if len(target) > 1 and self.level != "e2":
                raise self.error(
                    f"qualified call 'call {render(target)}' requires level e2",
                    tok,
                )
            args: Tuple[Path, ...] = ()
            if self.peek().kind == "LPAREN":
                self.next()
                arg_list: List[Path] = [self.fenced_path("call argument")]
                while self.peek().kind == "COMMA":
                    self.next()
                    arg_list.append(self.fenced_path("call argument"))
                self.expect("RPAREN", "')' after call arguments")
                args = tuple(arg_list)
            return Call(target[:-1], target[-1], args, pos=(tok.line, tok.col))
        if word in KEYWORDS:
            raise self.error(f"unexpected keyword {word!r}")
        # Only assignment starts with a bare path.
        target = self.path()
        assign_tok = self.peek()
        if assign_tok.kind != "ASSIGN":
            raise self.error(
                f"expected ':=' after {render(target)!r}", assign_tok
            )
        if not target:
            raise self.error("cannot assign to Current", tok)
        if len(target) > 1:
            raise self.error(
                f"qualified assignment '{render(target)} := ...' is not an "
                f"instruction; translate it to a setter call, e.g. "
                f"'call {render(target[:-1])}.set_{target[-1]} (...)'",
                tok,
            )
        self.next()
        source = self.fenced_path("assignment source")
        return Assign(target, source)

    # -- procedures ----------------------------------------------------------

    def procedure(self) -> Procedure:
        self.expect_keyword("procedure")
        name_tok = self.peek()
        name = self.identifier("a procedure name")
        formals: List[str] = []
        if self.peek().kind == "LPAREN":
            self.next()
            formals.append(self.identifier("a formal argument name"))
            while self.peek().kind == "COMMA":
                self.next()
                formals.append(self.identifier("a formal argument name"))
            self.expect("RPAREN", "')' after formal arguments")
        if len(set(formals)) != len(formals):
            raise self.error(f"duplicate formal argument in {name!r}", name_tok)
        body = self.statements({"end"})
        self.expect_keyword("end")
        return Procedure(name, tuple(formals), body)

    def program(self, level: str) -> Program:
        self.level = level
        self.skip_seps()
        if self.at_keyword("procedure"):
            if level == "e0":
                raise self.error("procedure declarations require level e1 or higher")
            procs: List[Procedure] = []
            while True:
                self.skip_seps()
                if self.peek().kind == "EOF":
                    break
                if not self.at_keyword("procedure"):
                    raise self.error(
                        "top-level statements cannot be mixed with procedures"
                    )
                procs.append(self.procedure())
            prog = Program(tuple(procs), main="Main", level=level)
        else:
            body = self.statements(set())
            prog = Program((Procedure("Main", (), body),), main="Main", level=level)
        validate(prog)
        return prog


def parse(text: str, level: str = "e2") -> Program:
    """Parse and validate source text at the given tier."""
    if level not in LEVELS:
        raise SourceError(f"unknown level {level!r}; expected one of {LEVELS}")
    return Parser(tokenize(text), level).program(level)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _walk(body: Sequence[Instruction]) -> Iterator[Instruction]:
    for ins in body:
        yield ins
        if isinstance(ins, Cond):
            yield from _walk(ins.then_branch)
            yield from _walk(ins.else_branch)
        elif isinstance(ins, (Loop, Repeat)):
            yield from _walk(ins.body)


def instructions_of(prog: Program) -> Iterator[Instruction]:
    for proc in prog.procedures:
        yield from _walk(proc.body)


def validate(prog: Program) -> None:
    """Whole-program checks: main shape, call targets, arity, level fences."""
    level = prog.level
    names = [p.name for p in prog.procedures]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})[0]
        raise SourceError(f"procedure {dup!r} is defined more than once")
    if prog.main not in names:
        raise SourceError(f"no procedure named {prog.main!r}")
    if prog.procedure(prog.main).formals:
        raise SourceError(f"{prog.main!r} must not take arguments")
    if level == "e0" and (
        len(prog.procedures) > 1 or prog.procedures[0].name != prog.main
    ):
        raise SourceError("procedure declarations require level e1 or higher")

    def check_path(p: Path, what: str) -> None:
        if level != "e2" and len(p) > 1:
            raise SourceError(
                f"dotted {what} {render(p)!r} requires level e2"
            )
        if level != "e2" and not p:
            raise SourceError(f"Current as {what} requires level e2")

    for ins in instructions_of(prog):
        if isinstance(ins, Assign):
            check_path(ins.source, "assignment source")
        elif isinstance(ins, Cut):
            check_path(ins.left, "cut operand")
            check_path(ins.right, "cut operand")
        elif isinstance(ins, Call):
            if level == "e0":
                raise SourceError("'call' requires level e1 or higher")
            if ins.qualifier and level != "e2":
                raise SourceError(
                    f"qualified call 'call {render(ins.qualifier)}.{ins.proc}' "
                    f"requires level e2"
                )
            for arg in ins.args:
                check_path(arg, "call argument")
            try:
                callee = prog.procedure(ins.proc)
            except SourceError as exc:
                raise SourceError(exc.message, *ins.pos) from None
            if len(ins.args) != len(callee.formals):
                raise SourceError(
                    f"call to {ins.proc!r} passes {len(ins.args)} argument(s); "
                    f"it declares {len(callee.formals)}",
                    *ins.pos,
                )


# ---------------------------------------------------------------------------
# Expression census
# ---------------------------------------------------------------------------

def expressions_of(prog: Program) -> FrozenSet[Path]:
    """Every path written in the program (plus Current), the universe used
    for assertions and for the default dot budget."""
    out: Set[Path] = {CURRENT}
    for proc in prog.procedures:
        for f in proc.formals:
            out.add(var(f))
    for ins in instructions_of(prog):
        if isinstance(ins, Assign):
            out.add(ins.target)
            out.add(ins.source)
        elif isinstance(ins, (Create, Forget)):
            out.add(var(ins.name))
        elif isinstance(ins, Cut):
            out.add(ins.left)
            out.add(ins.right)
        elif isinstance(ins, Call):
            if ins.qualifier:
                out.add(ins.qualifier)
            out.update(ins.args)
    return frozenset(out)


def max_dot_count(prog: Program) -> int:
    return max(dot_count(e) for e in expressions_of(prog))


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

def _fmt_ins(ins: Instruction, indent: int, out: List[str]) -> None:
    pad = "  " * indent
    if isinstance(ins, Skip):
        out.append(pad + "skip")
    elif isinstance(ins, Create):
        out.append(pad + f"create {ins.name}")
    elif isinstance(ins, Forget):
        out.append(pad + f"forget {ins.name}")
    elif isinstance(ins, Cut):
        out.append(pad + f"cut {render(ins.left)}, {render(ins.right)}")
    elif isinstance(ins, Assign):
        out.append(pad + f"{render(ins.target)} := {render(ins.source)}")
    elif isinstance(ins, Cond):
        out.append(pad + "then")
        for sub in ins.then_branch:
            _fmt_ins(sub, indent + 1, out)
        out.append(pad + "else")
        for sub in ins.else_branch:
            _fmt_ins(sub, indent + 1, out)
        out.append(pad + "end")
    elif isinstance(ins, Loop):
        out.append(pad + "loop")
        for sub in ins.body:
            _fmt_ins(sub, indent + 1, out)
        out.append(pad + "end")
    elif isinstance(ins, Repeat):
        out.append(pad + f"iterate {ins.count}")
        for sub in ins.body:
            _fmt_ins(sub, indent + 1, out)
        out.append(pad + "end")
    elif isinstance(ins, Call):
        target = render(ins.qualifier) + "." + ins.proc if ins.qualifier else ins.proc
        if ins.args:
            out.append(pad + f"call {target} ({', '.join(render(a) for a in ins.args)})")
        else:
            out.append(pad + f"call {target}")
    else:  # pragma: no cover
        raise TypeError(f"unknown instruction {ins!r}")


def pretty(prog: Program) -> str:
    """Source text that parses back to the same AST."""
    out: List[str] = []
    implicit_main = (
        len(prog.procedures) == 1
        and prog.procedures[0].name == prog.main
        and not prog.procedures[0].formals
        and prog.level == "e0"
    )
    if implicit_main:
        for ins in prog.procedures[0].body:
            _fmt_ins(ins, 0, out)
    else:
        for proc in prog.procedures:
            header = f"procedure {proc.name}"
            if proc.formals:
                header += f" ({', '.join(proc.formals)})"
            out.append(header)
            for ins in proc.body:
                _fmt_ins(ins, 1, out)
            out.append("end")
    return "\n".join(out) + "\n"
