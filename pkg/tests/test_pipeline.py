import numpy as np
import pytest

from conftest import fast_config
from glyphwave.framing import BitFrame, LengthMismatchError, copy_payloads
from glyphwave.glyphs import Glyph, bitmap_of
from glyphwave.modem import ModemConfig, demodulate, modulate
from glyphwave.notation import DslSyntaxError, canonical_messages, parse_dsl, print_dsl
from glyphwave.pipeline import (
    AmbiguousGlyphError,
    ChannelConfig,
    UngrammaticalGlyphsError,
    UnrecoverableMessageError,
    apply_channel,
    message_frame,
    message_glyphs,
    parse_glyphs_to_message,
    receive,
    recognize_glyph,
    transmit,
)
from glyphwave.raster import serialize_glyph


class TestChannel:
    def test_noiseless_identity(self):
        wave = transmit("vector", fast_config("psk"), repetition=1)
        out = apply_channel(wave, ChannelConfig())
        assert np.array_equal(out.samples, wave.samples)

    def test_gain_scaling(self):
        wave = transmit("vector", fast_config("psk"), repetition=1)
        out = apply_channel(wave, ChannelConfig(gain=0.25))
        assert np.array_equal(out.samples, 0.25 * wave.samples)

    def test_seed_determinism(self):
        wave = transmit("form", fast_config("fsk"), repetition=1)
        a = apply_channel(wave, ChannelConfig(snr_db=15, seed=7))
        b = apply_channel(wave, ChannelConfig(snr_db=15, seed=7))
        c = apply_channel(wave, ChannelConfig(snr_db=15, seed=8))
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_empirical_snr_within_one_db(self):
        cfg = ModemConfig(scheme="psk")
        wave = transmit("em", cfg, repetition=1)
        ch = ChannelConfig(snr_db=40, seed=99)
        out = apply_channel(wave, ch)
        noise = out.samples - wave.samples
        active = np.abs(wave.samples) > 0
        measured = 20 * np.log10(
            np.sqrt(np.mean(wave.samples[active] ** 2))
            / np.sqrt(np.mean(noise[active] ** 2))
        )
        assert abs(measured - 40) < 1.0

    def test_gain_must_be_positive(self):
        with pytest.raises(ValueError):
            ChannelConfig(gain=0.0)


class TestRecognize:
    def test_exact_match_every_glyph(self):
        for g in Glyph:
            bits = serialize_glyph(bitmap_of(g)).flatten()
            found, dist, runner = recognize_glyph(bits)
            assert found is g
            assert dist == 0
            assert runner >= 3

    def test_blank_payload(self):
        found, dist, runner = recognize_glyph((0,) * 35)
        assert found is Glyph.BLANK and dist == 0 and runner >= 3

    def test_single_flip_tolerated(self):
        bits = list(serialize_glyph(bitmap_of(Glyph.LPAREN)).flatten())
        bits[17] ^= 1
        found, dist, runner = recognize_glyph(tuple(bits))
        assert found is Glyph.LPAREN
        assert dist == 1
        assert runner >= 2

    def test_equidistant_payload_refused(self):
        a = serialize_glyph(bitmap_of(Glyph.LPAREN)).flatten()
        b = serialize_glyph(bitmap_of(Glyph.RPAREN)).flatten()
        diff = [i for i in range(35) if a[i] != b[i]]
        payload = list(a)
        for i in diff[: len(diff) // 2]:
            payload[i] = b[i]
        with pytest.raises(AmbiguousGlyphError):
            recognize_glyph(tuple(payload))

    def test_length_check(self):
        with pytest.raises(LengthMismatchError):
            recognize_glyph((0,) * 34)


class TestGlyphParsing:
    def test_bare_vector(self):
        msg = parse_glyphs_to_message(
            [Glyph.LPAREN, Glyph.BLANK, Glyph.RPAREN, Glyph.ARROW_UP]
        )
        assert print_dsl(msg) == "vector"

    def test_round_trip_canonical(self):
        for msg in canonical_messages().values():
            assert parse_glyphs_to_message(message_glyphs(msg)) == msg

    def test_round_trip_assorted(self):
        for dsl in (
            "tensor(0,0)",
            "tensor(0,0)@p",
            "affinity(2,1)",
            "spacetime spacetime",
            "em vector@p",
            "tensor(3,2)@p form affinity(0,2)",
        ):
            msg = parse_dsl(dsl)
            assert parse_glyphs_to_message(message_glyphs(msg)) == msg

    def test_lone_arrow_rejected(self):
        with pytest.raises(UngrammaticalGlyphsError) as exc:
            parse_glyphs_to_message([Glyph.ARROW_UP])
        assert exc.value.offset == 0

    def test_trailing_separator_rejected(self):
        with pytest.raises(UngrammaticalGlyphsError):
            parse_glyphs_to_message(
                [Glyph.LPAREN, Glyph.BLANK, Glyph.RPAREN, Glyph.BLANK]
            )

    def test_mixed_marks_rejected(self):
        with pytest.raises(UngrammaticalGlyphsError):
            parse_glyphs_to_message(
                [Glyph.LPAREN, Glyph.BLANK, Glyph.RPAREN, Glyph.TILDE_UPPER, Glyph.ARROW_DOWN]
            )

    def test_up_after_down_rejected(self):
        with pytest.raises(UngrammaticalGlyphsError):
            parse_glyphs_to_message(
                [Glyph.LPAREN, Glyph.BLANK, Glyph.RPAREN, Glyph.ARROW_DOWN, Glyph.ARROW_UP]
            )

    def test_em_shape_collision_prefers_fixed_pattern(self):
        # The three-symbol run (0,2) (0,1) (0,2) shares its glyph image
        # with the electromagnetic triplet; the fixed pattern wins.
        msg = parse_dsl("tensor(0,2) tensor(0,1) tensor(0,2)")
        assert parse_glyphs_to_message(message_glyphs(msg)) == parse_dsl("em")

    def test_backtracking_past_fixed_pattern(self):
        # Same prefix, but the point dot on the tail forces the generic
        # reading; the parser must not commit to the fixed pattern.
        msg = parse_dsl("tensor(0,2) tensor(0,1) tensor(0,2)@p")
        assert parse_glyphs_to_message(message_glyphs(msg)) == msg


class TestTransmitReceive:
    def test_riemann_run_count(self):
        cfg = fast_config("fsk")
        frame = demodulate(transmit("riemann", cfg, repetition=1), cfg)
        assert len(frame.runs()) == 49

    def test_empty_dsl(self):
        with pytest.raises(DslSyntaxError):
            transmit("", fast_config("fsk"))

    def test_repetition_copies_identical(self):
        cfg = fast_config("fsk")
        frame = demodulate(transmit("em", cfg, repetition=3), cfg)
        copies = copy_payloads(frame)
        assert len(copies) == 3
        assert copies[0] == copies[1] == copies[2]

    def test_spacetime_psk_clean(self):
        cfg = fast_config("psk")
        report = receive(transmit("spacetime", cfg, repetition=1), cfg)
        assert report.dsl_text == "spacetime"
        assert report.clean()
        assert report.dims == (5, 7)
        assert all(d == 0 for _, d, _ in report.per_glyph)

    def test_multi_symbol_every_scheme(self):
        dsl = "vector@p form tensor(2,3)"
        for scheme in ("ask", "fsk", "psk"):
            cfg = fast_config(scheme)
            report = receive(transmit(dsl, cfg, repetition=1), cfg)
            assert report.dsl_text == dsl
            assert report.clean()

    def test_noisy_fsk_with_repetition(self):
        cfg = fast_config("fsk")
        wave = transmit("em", cfg, repetition=3)
        noisy = apply_channel(wave, ChannelConfig(snr_db=20, seed=424242))
        report = receive(noisy, cfg)
        assert report.dsl_text == "em"
        assert report.repetition == 3

    def test_determinism_end_to_end(self):
        cfg = fast_config("fsk")
        a = apply_channel(transmit("em", cfg), ChannelConfig(snr_db=25, seed=5))
        b = apply_channel(transmit("em", cfg), ChannelConfig(snr_db=25, seed=5))
        assert np.array_equal(a.samples, b.samples)
        assert receive(a, cfg) == receive(b, cfg)

    def test_corrected_bits_reported(self):
        cfg = fast_config("fsk")
        frame = message_frame(parse_dsl("vector"), repetition=3)
        elements = list(frame.elements)
        # flip one payload bit inside the middle copy
        runs = [i for i, e in enumerate(elements) if hasattr(e, "bits")]
        target = runs[len(runs) // 2]
        bits = list(elements[target].bits)
        bits[2] ^= 1
        elements[target] = type(elements[target])(tuple(bits))
        wave = modulate(BitFrame(tuple(elements)), cfg)
        report = receive(wave, cfg)
        assert report.dsl_text == "vector"
        assert report.corrected_bits == 1
        assert report.tie_flags == 0

    def test_unrecoverable_glyph(self):
        cfg = fast_config("fsk")
        a = serialize_glyph(bitmap_of(Glyph.LPAREN)).flatten()
        b = serialize_glyph(bitmap_of(Glyph.RPAREN)).flatten()
        diff = [i for i in range(35) if a[i] != b[i]]
        payload = list(a)
        for i in diff[: len(diff) // 2]:
            payload[i] = b[i]
        rows = tuple(tuple(payload[r * 5 : (r + 1) * 5]) for r in range(7))
        from glyphwave.framing import frame_message
        from glyphwave.raster import GlyphBits

        frame = frame_message([GlyphBits(rows)], 1, (5, 7))
        with pytest.raises(UnrecoverableMessageError) as exc:
            receive(modulate(frame, cfg), cfg)
        assert exc.value.failures[0][0] == 0
