"""Geometric symbol messages over simulated carrier waves."""

from .framing import (
    BitFrame,
    GridInfo,
    Pause,
    PauseKind,
    Run,
    frame_from_text,
    frame_message,
    frame_to_text,
    infer_grid,
    majority_vote,
)
from .glyphs import DEFAULT_DIMS, Glyph, GlyphBitmap, bitmap_of, glyph_sequence, min_pairwise_hamming
from .modem import ModemConfig, Waveform, demodulate, load_config, modulate, read_wav, save_config, write_wav
from .notation import Message, SymbolKind, SymbolSpec, canonical_messages, parse_dsl, print_dsl
from .pipeline import (
    ChannelConfig,
    DecodeReport,
    apply_channel,
    message_frame,
    message_glyphs,
    parse_glyphs_to_message,
    receive,
    recognize_glyph,
    transmit,
)
from .raster import GlyphBits, Image, compose_strip, deserialize_glyph, export_pbm, serialize_glyph

__version__ = "0.1.0"
