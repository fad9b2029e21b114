"""Alias relations and the operations the transfer rules are built from.

A relation is a symmetric, irreflexive set of pairs of paths meaning "these
two expressions may currently denote the same object".  We store each
unordered pair once, oriented by tuple order, inside a plain ``frozenset`` —
all operations are pure functions returning new relations.

Two ideas deserve a note up front:

* **Completion on demand.**  Stored pairs are only the explicitly derived
  ones.  Pairs that follow by composing components (``x.a ~ y.b`` because
  ``x ~ y`` and ``a ~ b``) are *not* materialized; the ``aliased`` query and
  the ``quotient`` search reconstruct them when an operation needs the full
  picture.  This keeps relations small and printable.

* **Quotient for an assignment source.**  For ``x := y`` the new partners of
  ``x`` are the expressions that may equal ``y`` *in the pre-state*, kept
  only if their own meaning survives the update (i.e. they don't start with
  ``x``).  Computing the partner set before removing ``x``'s old pairs — and
  filtering afterwards — is what makes ``x := x`` a no-op and keeps
  ``x := x.a`` from aliasing ``x`` to ``x.a``.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

from .paths import (
    CURRENT,
    Path,
    concat,
    dot_count,
    has_negation,
    head,
    parse_path,
    render,
)

Pair = Tuple[Path, Path]
Relation = FrozenSet[Pair]

EMPTY: Relation = frozenset()


def make_pair(e: Path, f: Path) -> Pair:
    """Canonically oriented pair; alias relations are irreflexive."""
    if e == f:
        raise ValueError(f"reflexive alias pair on {e!r}")
    return (e, f) if e <= f else (f, e)


def from_pairs(pairs: Iterable[Tuple[Path, Path]]) -> Relation:
    """Build a relation: symmetrize and drop reflexive pairs."""
    return frozenset(make_pair(e, f) for e, f in pairs if e != f)


def from_cliques(cliques: Iterable[Sequence[Path]]) -> Relation:
    """All-pairs closure of each group — the overline construction."""
    out: Set[Pair] = set()
    for group in cliques:
        members = list(group)
        for i, e in enumerate(members):
            for f in members[i + 1 :]:
                if e != f:
                    out.add(make_pair(e, f))
    return frozenset(out)


def elements(a: Relation) -> FrozenSet[Path]:
    """Every path occurring in some pair."""
    out: Set[Path] = set()
    for e, f in a:
        out.add(e)
        out.add(f)
    return frozenset(out)


def partners(a: Relation, e: Path) -> FrozenSet[Path]:
    """Directly stored partners of e (no completion)."""
    out: Set[Path] = set()
    for x, y in a:
        if x == e:
            out.add(y)
        elif y == e:
            out.add(x)
    return frozenset(out)


def restrict(a: Relation, names: Iterable[str]) -> Relation:
    """Remove every pair involving one of the given variables.

    "Involving" covers both the variable itself and any longer path that
    starts with it: once the variable is rebound, nothing previously known
    about paths rooted there remains meaningful.  Deeper occurrences of the
    name (as in ``u.x``) are deliberately untouched — only the first segment
    identifies which variable a path hangs off.
    """
    banned = set(names)
    if not banned:
        return a
    return frozenset(
        (e, f) for e, f in a if head(e) not in banned and head(f) not in banned
    )


def bound_filter(a: Relation, max_dots: int) -> Relation:
    """Drop pairs whose elements use more dots than allowed."""
    return frozenset(
        (e, f)
        for e, f in a
        if dot_count(e) <= max_dots and dot_count(f) <= max_dots
    )


def prefix_relation(a: Relation, prefix: Path, max_dots: int) -> Relation:
    """Re-root every element of a under a prefix (the ``x •`` view shift).

    Concatenation normalizes away inverse segments, so shifting into a
    callee and back out restores the original pairs.  Pairs that collapse
    to reflexive ones, or that overflow the dot budget, are dropped.
    """
    out: Set[Pair] = set()
    for e, f in a:
        pe = concat(prefix, e)
        pf = concat(prefix, f)
        if pe == pf:
            continue
        if dot_count(pe) > max_dots or dot_count(pf) > max_dots:
            continue
        out.add(make_pair(pe, pf))
    return frozenset(out)


def drop_negated(a: Relation) -> Relation:
    """Remove pairs still mentioning a negated segment anywhere."""
    return frozenset(
        (e, f) for e, f in a if not has_negation(e) and not has_negation(f)
    )


def _partner_index(a: Relation) -> Dict[Path, Set[Path]]:
    index: Dict[Path, Set[Path]] = {}
    for e, f in a:
        index.setdefault(e, set()).add(f)
        index.setdefault(f, set()).add(e)
    return index


def _closure_sets(a: Relation, roots: Iterable[Path], max_dots: int) -> Dict[Path, Set[Path]]:
    """For each requested path, the set of paths that may denote the same
    object: the path itself, its stored partners, and every recombination
    of a split of the path with partners of the two halves.

    The recursion is on path length (splits are strictly shorter), with a
    memo shared across the roots.
    """
    index = _partner_index(a)
    memo: Dict[Path, Set[Path]] = {}

    def closure(e: Path) -> Set[Path]:
        cached = memo.get(e)
        if cached is not None:
            return cached
        out: Set[Path] = {e}
        out |= index.get(e, set())
        if len(e) >= 2:
            for k in range(1, len(e)):
                h, t = e[:k], e[k:]
                heads = closure(h)
                tails = closure(t)
                for h2 in heads:
                    for t2 in tails:
                        if h2 == h and t2 == t:
                            continue
                        cand = concat(h2, t2)
                        if cand == e:
                            continue
                        if dot_count(cand) <= max_dots:
                            out.add(cand)
        memo[e] = out
        return out

    return {root: closure(root) for root in roots}


def quotient(a: Relation, y: Path, max_dots: int) -> FrozenSet[Path]:
    """All expressions that may denote the same object as y (y included)."""
    return frozenset(_closure_sets(a, [y], max_dots)[y])


def aliased(a: Relation, e: Path, f: Path, max_dots: int) -> bool:
    """Completion-aware aliasing query between two distinct paths."""
    if e == f:
        return False
    return f in _closure_sets(a, [e], max_dots)[e]


def subst(a: Relation, x: Path, y: Path, max_dots: int) -> Relation:
    """Effect of the assignment x := y on the relation.

    x must be a single variable.  The partner set of y is computed against
    the pre-state, then every member rooted at x is discarded (its meaning
    changes with the assignment), x's old pairs are removed, and x is paired
    with what is left.
    """
    if len(x) != 1:
        raise ValueError(f"assignment target must be a variable, got {render(x)}")
    if y == x:
        # Rebinding a variable to itself changes nothing.
        return a
    x_name = x[0]
    members = {
        e
        for e in quotient(a, y, max_dots)
        if head(e) != x_name and dot_count(e) <= max_dots
    }
    b = restrict(a, {x_name})
    fresh = {make_pair(x, e) for e in members if e != x}
    return frozenset(b | fresh)


def subst_list(
    a: Relation, xs: Sequence[Path], ys: Sequence[Path], max_dots: int
) -> Relation:
    """Simultaneous-looking assignment list, applied left to right."""
    if len(xs) != len(ys):
        raise ValueError("target/source lists differ in length")
    out = a
    for x, y in zip(xs, ys):
        out = subst(out, x, y, max_dots)
    return out


def cut_pair(a: Relation, e: Path, f: Path) -> Relation:
    """Remove one pair: the caller vouches that e and f are not aliased."""
    if e == f:
        return a
    return a - {make_pair(e, f)}


def union(a: Relation, b: Relation) -> Relation:
    return a | b


def intersection(a: Relation, b: Relation) -> Relation:
    return a & b


def universal(paths: Iterable[Path]) -> Relation:
    """Complete relation over a finite universe (the must-mode top)."""
    return from_cliques([list(paths)])


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def canonical(a: Relation) -> Tuple[Tuple[Path, ...], ...]:
    """The canonical form: maximal cliques of the pair graph.

    Every relation is the union of complete relations over its maximal
    cliques, none of which may be dropped or shrunk, so this decomposition
    is the unique minimal clique cover of that shape.  Cliques are found by
    the pivoting Bron–Kerbosch search; the output orders elements within a
    clique, and the cliques themselves, by their rendered text.
    """
    adj: Dict[Path, Set[Path]] = {}
    for e, f in a:
        adj.setdefault(e, set()).add(f)
        adj.setdefault(f, set()).add(e)

    cliques: List[Set[Path]] = []

    def expand(r: Set[Path], p: Set[Path], x: Set[Path]) -> None:
        if not p and not x:
            cliques.append(set(r))
            return
        pivot = max(p | x, key=lambda u: len(p & adj[u]))
        for v in list(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    if adj:
        expand(set(), set(adj.keys()), set())

    rendered = [tuple(sorted(c, key=render)) for c in cliques]
    return tuple(sorted(rendered, key=lambda c: tuple(render(e) for e in c)))


def render_relation(a: Relation) -> str:
    """Canonical text form: cliques in braces, e.g. ``{b, c}, {f, g, x}``."""
    cliques = canonical(a)
    if not cliques:
        return "{}"
    return ", ".join("{" + ", ".join(render(e) for e in c) + "}" for c in cliques)


def parse_relation_literal(text: str) -> Relation:
    """Parse the clique syntax produced by render_relation.

    ``{}`` (or an all-whitespace string) is the empty relation.  Groups are
    brace-enclosed, comma-separated lists of paths; a group of one is legal
    but contributes nothing.
    """
    s = text.strip()
    if not s or s == "{}":
        return EMPTY
    cliques: List[List[Path]] = []
    rest = s
    while True:
        rest = rest.lstrip()
        if not rest.startswith("{"):
            raise ValueError("expected '{' to open a relation group")
        close = rest.find("}")
        if close < 0:
            raise ValueError("unbalanced '{' in relation literal")
        body = rest[1:close].strip()
        if body:
            cliques.append([parse_path(part) for part in body.split(",")])
        rest = rest[close + 1 :].lstrip()
        if not rest:
            return from_cliques(cliques)
        if not rest.startswith(","):
            raise ValueError("expected ',' between relation groups")
        rest = rest[1:]


def to_assertion(a: Relation, universe: Iterable[Path]) -> str:
    """Negation of a relation as a conjunction of disequalities.

    Every unordered pair of distinct universe members *not* in the relation
    contributes one ``e ≠ f`` clause; a pair in the relation asserts nothing
    (the two sides may or may not be equal).  An empty conjunction renders
    as ``true``.
    """
    uni = sorted(set(universe), key=render)
    clauses: List[str] = []
    for i, e in enumerate(uni):
        for f in uni[i + 1 :]:
            if make_pair(e, f) not in a:
                lhs, rhs = sorted((render(e), render(f)))
                clauses.append(f"{lhs} ≠ {rhs}")
    if not clauses:
        return "true"
    return " and ".join(sorted(clauses))
