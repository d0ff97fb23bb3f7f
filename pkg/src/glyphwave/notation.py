"""Symbol model and textual DSL for the geometric message alphabet.

A message is an ordered sequence of symbols, each one of: a tensor object
with contravariant rank r (up marks) and covariant rank s (down marks),
optionally anchored at a point or marked as a non-tensorial affinity; the
spacetime manifold; or the electromagnetic three-structure group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

MAX_TOTAL_RANK = 9


class SymbolKind(Enum):
    TENSOR = "tensor"
    SPACETIME = "spacetime"
    MAXWELL = "maxwell"


class DslSyntaxError(ValueError):
    """Raised on any malformed DSL input; carries the offending token index."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


@dataclass(frozen=True)
class SymbolSpec:
    """One symbol: kind plus rank/point/affinity structure.

    Non-tensor kinds carry no rank or flags. Affinity symbols use tilde
    marks instead of arrows, never carry a point dot, and need at least
    one mark. Total rank is bounded so rendered glyph runs stay short.
    """

    kind: SymbolKind
    contra_rank: int = 0
    co_rank: int = 0
    at_point: bool = False
    affinity: bool = False

    def __post_init__(self):
        if self.contra_rank < 0 or self.co_rank < 0:
            raise ValueError("ranks must be non-negative")
        if self.kind is not SymbolKind.TENSOR:
            if self.contra_rank or self.co_rank or self.at_point or self.affinity:
                raise ValueError(f"{self.kind.value} symbol admits no rank or flags")
            return
        if self.contra_rank + self.co_rank > MAX_TOTAL_RANK:
            raise ValueError(
                f"total rank {self.contra_rank + self.co_rank} exceeds maximum {MAX_TOTAL_RANK}"
            )
        if self.affinity and self.at_point:
            raise ValueError("affinity symbols carry no point dot")
        if self.affinity and self.contra_rank + self.co_rank == 0:
            raise ValueError("affinity symbols need at least one mark")


def tensor(r: int, s: int, at_point: bool = False) -> SymbolSpec:
    return SymbolSpec(SymbolKind.TENSOR, r, s, at_point=at_point)


def affinity(r: int, s: int) -> SymbolSpec:
    return SymbolSpec(SymbolKind.TENSOR, r, s, affinity=True)


SPACETIME = SymbolSpec(SymbolKind.SPACETIME)
MAXWELL = SymbolSpec(SymbolKind.MAXWELL)


@dataclass(frozen=True)
class Message:
    """Non-empty ordered sequence of symbols; order is meaningful."""

    symbols: tuple[SymbolSpec, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("message must contain at least one symbol")
        object.__setattr__(self, "symbols", tuple(self.symbols))

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)


_RANKED = re.compile(r"^(tensor|affinity)\((\d+),(\d+)\)(@p)?$")

_PLAIN_TOKENS = {
    "vector": (1, 0, False),
    "vector@p": (1, 0, True),
    "form": (0, 1, False),
    "form@p": (0, 1, True),
    "riemann": (1, 3, False),
}


def _parse_token(token: str, position: int) -> SymbolSpec:
    if token == "spacetime":
        return SPACETIME
    if token == "em":
        return MAXWELL
    if token in _PLAIN_TOKENS:
        r, s, at_p = _PLAIN_TOKENS[token]
        return tensor(r, s, at_point=at_p)
    m = _RANKED.match(token)
    if m is None:
        raise DslSyntaxError(f"unknown token {token!r}", position)
    name, r_text, s_text, at_p = m.groups()
    r, s = int(r_text), int(s_text)
    if r + s > MAX_TOTAL_RANK:
        raise DslSyntaxError(
            f"total rank {r + s} in {token!r} exceeds maximum {MAX_TOTAL_RANK}", position
        )
    if name == "affinity":
        if at_p:
            raise DslSyntaxError(f"affinity token {token!r} admits no @p suffix", position)
        if r + s == 0:
            raise DslSyntaxError(f"affinity token {token!r} needs at least one mark", position)
        return affinity(r, s)
    return tensor(r, s, at_point=bool(at_p))


def parse_dsl(text: str) -> Message:
    """Parse whitespace-separated DSL tokens into a Message.

    Accepted tokens: vector, form (each with optional @p), tensor(r,s),
    tensor(r,s)@p, affinity(r,s), spacetime, em, riemann. Anything else
    raises DslSyntaxError with the token position.
    """
    tokens = text.split()
    if not tokens:
        raise DslSyntaxError("empty input", 0)
    return Message(tuple(_parse_token(tok, i) for i, tok in enumerate(tokens)))


def print_symbol(spec: SymbolSpec) -> str:
    """Canonical token for one symbol; parse_dsl inverts it exactly."""
    if spec.kind is SymbolKind.SPACETIME:
        return "spacetime"
    if spec.kind is SymbolKind.MAXWELL:
        return "em"
    if spec.affinity:
        return f"affinity({spec.contra_rank},{spec.co_rank})"
    suffix = "@p" if spec.at_point else ""
    if (spec.contra_rank, spec.co_rank) == (1, 0):
        return "vector" + suffix
    if (spec.contra_rank, spec.co_rank) == (0, 1):
        return "form" + suffix
    return f"tensor({spec.contra_rank},{spec.co_rank}){suffix}"


def print_dsl(msg: Message) -> str:
    """Canonical text of a message: one token per symbol, space-separated.

    vector/form shorthands are emitted for ranks (1,0) and (0,1); the
    riemann parse alias is never printed, so (1,3) comes out structural.
    """
    return " ".join(print_symbol(s) for s in msg)


def canonical_messages() -> dict[str, Message]:
    """The four named golden messages used throughout the test suite."""
    primer = Message(
        (
            tensor(1, 0, at_point=True),
            tensor(1, 0),
            tensor(0, 1, at_point=True),
            tensor(0, 1),
            tensor(2, 3),
            SPACETIME,
            MAXWELL,
            tensor(1, 3),
        )
    )
    return {
        "riemann": Message((tensor(1, 3),)),
        "spacetime": Message((SPACETIME,)),
        "em": Message((MAXWELL,)),
        "primer": primer,
    }
