"""End-to-end transmitter and receiver.

Transmit: DSL text -> symbols -> glyph run (symbols joined by one blank
cell) -> bitmaps -> framed bits -> waveform. Receive walks the same path
backwards, voting across repeated copies, matching each recovered payload
to the nearest canonical glyph, and re-parsing glyphs into symbols. A
simulated channel applies gain and seeded white Gaussian noise at a given
signal-to-noise ratio so receiver behavior can be studied reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framing import (
    BitFrame,
    LengthMismatchError,
    copy_payloads,
    frame_message,
    infer_grid,
    majority_vote,
)
from .glyphs import DEFAULT_DIMS, Glyph, bitmap_of, glyph_sequence, registry_for
from .modem import ModemConfig, Waveform, demodulate, modulate
from .notation import MAXWELL, SPACETIME, Message, SymbolKind, SymbolSpec, parse_dsl, print_dsl
from .raster import serialize_glyph


class AmbiguousGlyphError(ValueError):
    """Two canonical glyphs are equally near; refusing to guess."""


class UngrammaticalGlyphsError(ValueError):
    """Glyph run matches no symbol linearization; carries the offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (glyph {offset})")
        self.offset = offset


class UnrecoverableMessageError(ValueError):
    """One or more glyph payloads could not be recognized."""

    def __init__(self, failures: list[tuple[int, Exception]]):
        positions = ", ".join(str(i) for i, _ in failures)
        super().__init__(f"unrecoverable glyphs at positions {positions}")
        self.failures = failures


@dataclass(frozen=True)
class ChannelConfig:
    """Additive white Gaussian noise channel with scalar gain.

    snr_db of None means noiseless; the noise level is referenced to the
    root-mean-square of the non-silent part of the (gain-scaled) signal,
    and a fixed seed reproduces the identical noise realization.
    """

    snr_db: float | None = None
    gain: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("gain must be positive")


def apply_channel(wave: Waveform, ch: ChannelConfig) -> Waveform:
    """Scale by gain and add seeded white Gaussian noise at the set SNR."""
    out = ch.gain * wave.samples
    if ch.snr_db is None:
        return Waveform(out, wave.sample_rate)
    # Pauses are exact zeros before noise; dilate the non-zero mask a few
    # samples so in-carrier zero crossings do not bias the reference RMS.
    nonzero = (out != 0).astype(np.float64)
    active = np.convolve(nonzero, np.ones(17), mode="same") > 0
    if not np.any(active):
        return Waveform(out, wave.sample_rate)
    signal_rms = float(np.sqrt(np.mean(out[active] ** 2)))
    sigma = signal_rms * 10 ** (-ch.snr_db / 20)
    rng = np.random.default_rng(ch.seed)
    return Waveform(out + rng.normal(0.0, sigma, len(out)), wave.sample_rate)


def recognize_glyph(
    bits: tuple[int, ...], dims: tuple[int, int] = DEFAULT_DIMS
) -> tuple[Glyph, int, int]:
    """Nearest canonical glyph by Hamming distance, with the runner-up.

    A tie for nearest raises AmbiguousGlyphError rather than guessing.
    """
    table = registry_for(dims)
    width, height = dims
    if len(bits) != width * height:
        raise LengthMismatchError(f"payload has {len(bits)} bits, grid wants {width * height}")
    ranked = sorted(
        ((sum(int(b) != int(p) for b, p in zip(bits, bm.pixels)), g) for g, bm in table.items()),
        key=lambda pair: pair[0],
    )
    (best_d, best_g), (second_d, _) = ranked[0], ranked[1]
    if best_d == second_d:
        raise AmbiguousGlyphError(f"payload is {best_d} flips from two glyphs")
    return best_g, best_d, second_d


_SPACETIME_PATTERN = tuple(glyph_sequence(SPACETIME))
_MAXWELL_PATTERN = tuple(glyph_sequence(MAXWELL))


def _parse_tensor_group(glyphs: tuple[Glyph, ...], at: int) -> tuple[SymbolSpec, int]:
    n = len(glyphs)
    for k, want in enumerate((Glyph.LPAREN, Glyph.BLANK, Glyph.RPAREN)):
        if at + k >= n or glyphs[at + k] is not want:
            raise UngrammaticalGlyphsError(f"expected {want.value} in bracket group", at + k)
    i = at + 3
    r = s = 0
    affinity = at_point = False
    if i < n and glyphs[i] in (Glyph.TILDE_UPPER, Glyph.TILDE_LOWER):
        affinity = True
        up, down = Glyph.TILDE_UPPER, Glyph.TILDE_LOWER
    else:
        up, down = Glyph.ARROW_UP, Glyph.ARROW_DOWN
    while i < n and glyphs[i] is up:
        r, i = r + 1, i + 1
    while i < n and glyphs[i] is down:
        s, i = s + 1, i + 1
    if not affinity and i < n and glyphs[i] is Glyph.POINT_DOT:
        at_point, i = True, i + 1
    try:
        spec = SymbolSpec(SymbolKind.TENSOR, r, s, at_point=at_point, affinity=affinity)
    except ValueError as err:
        raise UngrammaticalGlyphsError(str(err), at) from None
    return spec, i


def _parse_symbols(glyphs: tuple[Glyph, ...], at: int) -> list[SymbolSpec]:
    """Parse symbols from `at` to the end, separator blanks between them.

    The fixed spacetime and electromagnetic patterns take precedence, but
    the parser backtracks to a generic reading when a fixed match leaves
    an unparseable tail (a point-marked group right after the pattern,
    for instance).
    """
    candidates: list[tuple[SymbolSpec, int]] = []
    if glyphs[at : at + len(_SPACETIME_PATTERN)] == _SPACETIME_PATTERN:
        candidates.append((SPACETIME, at + len(_SPACETIME_PATTERN)))
    if glyphs[at : at + len(_MAXWELL_PATTERN)] == _MAXWELL_PATTERN:
        candidates.append((MAXWELL, at + len(_MAXWELL_PATTERN)))
    deepest: UngrammaticalGlyphsError | None = None
    try:
        candidates.append(_parse_tensor_group(glyphs, at))
    except UngrammaticalGlyphsError as err:
        deepest = err

    for spec, end in candidates:
        try:
            if end == len(glyphs):
                return [spec]
            if glyphs[end] is not Glyph.BLANK:
                raise UngrammaticalGlyphsError("expected blank separator between symbols", end)
            if end + 1 == len(glyphs):
                raise UngrammaticalGlyphsError("dangling separator at end of message", end)
            return [spec] + _parse_symbols(glyphs, end + 1)
        except UngrammaticalGlyphsError as err:
            if deepest is None or err.offset > deepest.offset:
                deepest = err
    raise deepest if deepest is not None else UngrammaticalGlyphsError("empty glyph run", at)


def parse_glyphs_to_message(glyphs: list[Glyph]) -> Message:
    """Invert the glyph linearization back into symbols."""
    if not glyphs:
        raise UngrammaticalGlyphsError("empty glyph run", 0)
    return Message(tuple(_parse_symbols(tuple(glyphs), 0)))


def message_glyphs(msg: Message) -> list[Glyph]:
    """Linearize a whole message: symbols joined by one blank cell."""
    out: list[Glyph] = []
    for i, spec in enumerate(msg):
        if i:
            out.append(Glyph.BLANK)
        out.extend(glyph_sequence(spec))
    return out


def message_frame(
    msg: Message, repetition: int = 1, dims: tuple[int, int] = DEFAULT_DIMS
) -> BitFrame:
    glyphs = message_glyphs(msg)
    bits = [serialize_glyph(bitmap_of(g, dims), g) for g in glyphs]
    return frame_message(bits, repetition, dims)


def transmit(
    dsl: str,
    cfg: ModemConfig | None = None,
    repetition: int = 3,
    dims: tuple[int, int] = DEFAULT_DIMS,
) -> Waveform:
    """DSL text straight to waveform with the shared default pipeline."""
    cfg = cfg or ModemConfig()
    frame = message_frame(parse_dsl(dsl), repetition, dims)
    return modulate(frame, cfg)


@dataclass(frozen=True)
class DecodeReport:
    """Everything the receiver learned, including per-glyph confidence."""

    message: Message
    dsl_text: str
    dims: tuple[int, int]
    n_glyphs: int
    repetition: int
    per_glyph: tuple[tuple[Glyph, int, int], ...]
    corrected_bits: int
    tie_flags: int

    def clean(self) -> bool:
        return (
            self.corrected_bits == 0
            and self.tie_flags == 0
            and all(d == 0 for _, d, _ in self.per_glyph)
        )


def receive(wave: Waveform, cfg: ModemConfig | None = None) -> DecodeReport:
    """Full decode: demodulate, vote across copies, recognize, re-parse."""
    cfg = cfg or ModemConfig()
    frame = demodulate(wave, cfg)
    info = infer_grid(frame)
    payloads = copy_payloads(frame)
    vote = majority_vote(payloads)

    stack = np.array(payloads)
    corrected = int(np.sum((stack != np.array(vote.payload)).any(axis=0)))

    per_glyph = []
    failures: list[tuple[int, Exception]] = []
    glyphs: list[Glyph] = []
    n = info.width * info.height
    for gi in range(info.n_glyphs):
        chunk = vote.payload[gi * n : (gi + 1) * n]
        try:
            g, d, runner = recognize_glyph(chunk, (info.width, info.height))
        except AmbiguousGlyphError as err:
            failures.append((gi, err))
            continue
        glyphs.append(g)
        per_glyph.append((g, d, runner))
    if failures:
        raise UnrecoverableMessageError(failures)

    message = parse_glyphs_to_message(glyphs)
    return DecodeReport(
        message=message,
        dsl_text=print_dsl(message),
        dims=(info.width, info.height),
        n_glyphs=info.n_glyphs,
        repetition=info.repetition,
        per_glyph=tuple(per_glyph),
        corrected_bits=corrected,
        tie_flags=len(vote.tie_positions),
    )
