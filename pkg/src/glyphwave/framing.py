"""Self-delimiting bit/pause stream for glyph payloads.

The wire shape is runs of bits separated by typed pauses: a row pause
between the rows of one glyph, a longer glyph pause between glyphs, and a
still longer message pause between whole repeated copies. Prime grid
sides mean the receiver can rebuild the rectangle from run lengths alone,
and repetition plus per-bit majority voting buys error tolerance without
any code overhead in the payload itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence, Union

from .glyphs import is_prime
from .raster import GlyphBits


class PauseKind(Enum):
    ROW = "row"
    GLYPH = "glyph"
    MESSAGE = "message"


@dataclass(frozen=True)
class Run:
    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("a run carries at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("run bits must be 0 or 1")
        object.__setattr__(self, "bits", tuple(self.bits))


@dataclass(frozen=True)
class Pause:
    kind: PauseKind


FrameElement = Union[Run, Pause]


@dataclass(frozen=True)
class BitFrame:
    """Framed message: elements plus grid metadata once known.

    Frames built by frame_message always carry dims and repetition; a
    frame recovered from a waveform starts without them until infer_grid
    validates the structure.
    """

    elements: tuple[FrameElement, ...]
    repetition: int | None = None
    dims: tuple[int, int] | None = None

    def runs(self) -> list[Run]:
        return [e for e in self.elements if isinstance(e, Run)]


class DimensionMismatchError(ValueError):
    """Glyph bits do not match the declared grid dimensions."""


class InconsistentFrameError(ValueError):
    """Run lengths or block heights disagree within one frame."""


class NonPrimeDimensionsError(ValueError):
    """Observed grid sides are not both prime."""


class LengthMismatchError(ValueError):
    """Payload copies (or payload vs grid) differ in length."""


class RepetitionMismatchError(ValueError):
    """Repeated copies disagree structurally; carries a best-effort payload."""

    def __init__(self, message: str, corrected_payload: tuple[int, ...] | None = None):
        super().__init__(message)
        self.corrected_payload = corrected_payload


class GridInfo(NamedTuple):
    width: int
    height: int
    n_glyphs: int
    repetition: int


def frame_message(
    glyph_bits: Sequence[GlyphBits], repetition: int, dims: tuple[int, int]
) -> BitFrame:
    """Frame serialized glyphs for transmission.

    Each glyph becomes height runs of width bits joined by row pauses;
    glyphs are joined by glyph pauses and the whole payload is repeated
    with message pauses between copies.
    """
    width, height = dims
    if repetition < 1:
        raise ValueError("repetition must be at least 1")
    if not glyph_bits:
        raise ValueError("nothing to frame")
    if not (is_prime(width) and is_prime(height)):
        raise NonPrimeDimensionsError(f"{width}x{height} is not a prime pair")
    for gb in glyph_bits:
        if gb.height != height or gb.width != width:
            raise DimensionMismatchError(
                f"glyph bits are {gb.width}x{gb.height}, frame wants {width}x{height}"
            )

    copy: list[FrameElement] = []
    for gi, gb in enumerate(glyph_bits):
        if gi:
            copy.append(Pause(PauseKind.GLYPH))
        for ri, row in enumerate(gb.rows):
            if ri:
                copy.append(Pause(PauseKind.ROW))
            copy.append(Run(row))

    elements: list[FrameElement] = []
    for ci in range(repetition):
        if ci:
            elements.append(Pause(PauseKind.MESSAGE))
        elements.extend(copy)
    return BitFrame(tuple(elements), repetition, (width, height))


def _split(elements: Sequence[FrameElement], kind: PauseKind) -> list[list[FrameElement]]:
    parts: list[list[FrameElement]] = [[]]
    for e in elements:
        if isinstance(e, Pause) and e.kind is kind:
            parts.append([])
        else:
            parts[-1].append(e)
    return parts


def _structure(elements: Sequence[FrameElement]) -> list[list[list[Run]]]:
    """Nest elements as copies -> glyph blocks -> runs, validating shape."""
    if not elements:
        raise InconsistentFrameError("empty frame")
    if not isinstance(elements[0], Run) or not isinstance(elements[-1], Run):
        raise InconsistentFrameError("frame must start and end with a run")
    prev_run = False
    for e in elements:
        if isinstance(e, Run):
            if prev_run:
                raise InconsistentFrameError("adjacent runs without a pause")
            prev_run = True
        else:
            if not prev_run:
                raise InconsistentFrameError("adjacent pauses")
            prev_run = False

    copies = []
    for copy_elems in _split(elements, PauseKind.MESSAGE):
        blocks = []
        for block_elems in _split(copy_elems, PauseKind.GLYPH):
            runs = [e for e in block_elems if isinstance(e, Run)]
            if not runs:
                raise InconsistentFrameError("empty glyph block")
            blocks.append(runs)
        copies.append(blocks)
    return copies


def infer_grid(frame: BitFrame | Sequence[FrameElement]) -> GridInfo:
    """Recover (width, height, n_glyphs, repetition) from frame structure.

    Pause structure is authoritative; the prime factorization of the
    per-glyph bit count is re-checked as an independent verification and
    any disagreement is an error rather than a reinterpretation.
    """
    elements = frame.elements if isinstance(frame, BitFrame) else tuple(frame)
    copies = _structure(elements)

    widths = {len(r.bits) for copy in copies for block in copy for r in block}
    if len(widths) != 1:
        raise InconsistentFrameError(f"mixed run lengths {sorted(widths)}")
    width = widths.pop()

    heights = {len(block) for copy in copies for block in copy}
    if len(heights) != 1:
        raise InconsistentFrameError(f"mixed glyph block heights {sorted(heights)}")
    height = heights.pop()

    if not is_prime(width) or not is_prime(height):
        raise NonPrimeDimensionsError(f"observed grid {width}x{height} is not a prime pair")

    n_glyphs = len(copies[0])
    if any(len(copy) != n_glyphs for copy in copies):
        counts = [len(c) for c in copies]
        good = [flatten_copy(c) for c in copies if len(c) == n_glyphs]
        corrected = majority_vote(good).payload if good else None
        raise RepetitionMismatchError(
            f"copies disagree on glyph count: {counts}", corrected_payload=corrected
        )

    per_glyph = width * height
    if prime_pair_factorization(per_glyph) != tuple(sorted((width, height))):
        raise NonPrimeDimensionsError(
            f"per-glyph bit count {per_glyph} does not factor as {width}x{height}"
        )
    return GridInfo(width, height, n_glyphs, len(copies))


def prime_pair_factorization(n: int) -> tuple[int, int]:
    """The unique ordered prime pair (p, q), p <= q, with p*q = n."""
    factors = []
    d, m = 2, n
    while d * d <= m:
        while m % d == 0:
            factors.append(d)
            m //= d
        d += 1
    if m > 1:
        factors.append(m)
    if len(factors) != 2:
        raise NonPrimeDimensionsError(f"{n} is not a product of exactly two primes")
    return (factors[0], factors[1])


def flatten_copy(blocks: list[list[Run]]) -> tuple[int, ...]:
    return tuple(b for block in blocks for run in block for b in run.bits)


def copy_payloads(frame: BitFrame | Sequence[FrameElement]) -> list[tuple[int, ...]]:
    """Flat payload bits of each repeated copy, in transmission order."""
    elements = frame.elements if isinstance(frame, BitFrame) else tuple(frame)
    return [flatten_copy(blocks) for blocks in _structure(elements)]


class MajorityResult(NamedTuple):
    payload: tuple[int, ...]
    tie_positions: tuple[int, ...]


def majority_vote(copies: Sequence[Sequence[int]]) -> MajorityResult:
    """Per-bit majority over equal-length copies.

    An even split falls back to the first copy's bit and the position is
    flagged, so the result is deterministic and the tie is diagnosable.
    """
    if not copies:
        raise ValueError("majority vote needs at least one copy")
    length = len(copies[0])
    if any(len(c) != length for c in copies):
        raise LengthMismatchError(f"copy lengths differ: {[len(c) for c in copies]}")
    voted = []
    ties = []
    k = len(copies)
    for i in range(length):
        ones = sum(c[i] for c in copies)
        if 2 * ones == k:
            voted.append(copies[0][i])
            ties.append(i)
        else:
            voted.append(1 if 2 * ones > k else 0)
    return MajorityResult(tuple(voted), tuple(ties))


_PAUSE_TEXT = {PauseKind.ROW: "/", PauseKind.GLYPH: "//", PauseKind.MESSAGE: "///"}
_TEXT_PAUSE = {v: k for k, v in _PAUSE_TEXT.items()}


def frame_to_text(frame: BitFrame | Sequence[FrameElement]) -> str:
    """Compact dump: runs as 0/1 digits, pauses as /, //, ///."""
    elements = frame.elements if isinstance(frame, BitFrame) else tuple(frame)
    out = []
    for e in elements:
        if isinstance(e, Run):
            out.append("".join(str(b) for b in e.bits))
        else:
            out.append(_PAUSE_TEXT[e.kind])
    return "".join(out)


def frame_from_text(text: str) -> BitFrame:
    """Parse a frame_to_text dump back into a BitFrame."""
    text = text.strip()
    if not text:
        raise ValueError("empty frame dump")
    elements: list[FrameElement] = []
    i = 0
    while i < len(text):
        ch = text[i]
        j = i
        if ch == "/":
            while j < len(text) and text[j] == "/":
                j += 1
            slashes = text[i:j]
            if slashes not in _TEXT_PAUSE:
                raise ValueError(f"bad pause marker {slashes!r} at offset {i}")
            elements.append(Pause(_TEXT_PAUSE[slashes]))
        elif ch in "01":
            while j < len(text) and text[j] in "01":
                j += 1
            elements.append(Run(tuple(int(b) for b in text[i:j])))
        else:
            raise ValueError(f"unexpected character {ch!r} at offset {i}")
        i = j
    frame = BitFrame(tuple(elements))
    try:
        info = infer_grid(frame)
    except ValueError:
        return frame
    return BitFrame(frame.elements, info.repetition, (info.width, info.height))
