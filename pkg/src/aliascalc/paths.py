"""Reference paths: the expressions an alias relation talks about.

A path is a tuple of segment names, e.g. ``("x", "first", "right")`` for
``x.first.right``.  The empty tuple denotes the current object, rendered as
``Current``.  A segment ending in an apostrophe (``"x'"``) is *negated*: it
undoes a plain segment of the same name, which is how effects computed inside
a routine are re-expressed relative to the caller.  Negated segments never
appear in source programs; they only arise internally while transferring a
relation across a qualified call.

Normalization cancels adjacent inverse segments in either order
(``x.x'`` and ``x'.x`` both vanish), so prefixing a relation by a call
target and later by its negation round-trips cleanly.
"""

from __future__ import annotations

from typing import Iterable, Tuple

Path = Tuple[str, ...]

CURRENT: Path = ()

NEG_MARK = "'"


def is_negated(segment: str) -> bool:
    return segment.endswith(NEG_MARK)


def negate_segment(segment: str) -> str:
    """Flip one segment between its plain and negated form."""
    if is_negated(segment):
        return segment[: -len(NEG_MARK)]
    return segment + NEG_MARK


def normalize(segments: Iterable[str]) -> Path:
    """Cancel adjacent mutually-inverse segments until none remain.

    The scan uses a stack, so cancellations cascade:
    ``x.y.y'.x'.z`` normalizes to ``z``.
    """
    stack: list[str] = []
    for seg in segments:
        if stack and stack[-1] == negate_segment(seg):
            stack.pop()
        else:
            stack.append(seg)
    return tuple(stack)


def concat(prefix: Path, suffix: Path) -> Path:
    """Path concatenation followed by normalization."""
    if not prefix:
        return normalize(suffix) if any(map(is_negated, suffix)) else tuple(suffix)
    return normalize(prefix + tuple(suffix))


def negation(path: Path) -> Path:
    """The inverse of a path: segments reversed and individually negated.

    ``concat(path, negation(path))`` is ``CURRENT``, which is what lets a
    caller-side relation be viewed from a callee and back again.
    """
    return tuple(negate_segment(seg) for seg in reversed(path))


def dot_count(path: Path) -> int:
    """Number of dots in the rendered form; ``Current`` and plain
    variables count zero."""
    return max(len(path) - 1, 0)


def head(path: Path) -> str | None:
    """First segment name, or None for ``Current``."""
    return path[0] if path else None


def has_negation(path: Path) -> bool:
    return any(is_negated(seg) for seg in path)


def render(path: Path) -> str:
    if not path:
        return "Current"
    return ".".join(path)


def parse_path(text: str) -> Path:
    """Parse a dotted path like ``x.first`` (used for relation literals).

    Accepts ``Current`` segments and drops them, since prefixing by the
    current object is the identity.  Negated segments are rejected: they
    are an internal notion, not part of any input syntax.
    """
    parts = [p.strip() for p in text.strip().split(".")]
    segs: list[str] = []
    for part in parts:
        if part == "Current":
            continue
        if not part:
            raise ValueError(f"empty segment in path {text!r}")
        if not (part[0].isalpha() and all(c.isalnum() or c == "_" for c in part)):
            raise ValueError(f"bad path segment {part!r} in {text!r}")
        segs.append(part)
    return tuple(segs)


def var(name: str) -> Path:
    """Single-variable path."""
    return (name,)
