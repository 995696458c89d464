"""
Encoder and decoder for the three-stage pipeline.

Per pixel, in raster order:

    1. Stage 1: if a stored sub-pattern matches, code the color from its
       histogram or code ESC. No match: skipped, nothing coded.
    2. Stage 2: if the palette is not empty, code the color from it or code
       ESC. Empty palette: skipped, nothing coded.
    3. Stage 3: residual coding of the new color.

After every pixel, whatever stage coded it, the pattern store, the palette
models and the side planes are updated identically on both sides.
"""

import hashlib
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .core.bitstream import BitstreamHeader, pack_bitstream, unpack_bitstream, HEADER_SIZE
from .core.config import CodecConfig
from .core.entropy import ArithmeticDecoder, ArithmeticEncoder
from .core.errors import CodecError, CorruptStreamError
from .core.image import Canvas, Image, SidePlanes, check_depth
from .core.logger import Logger
from .stages.palette_model import PaletteModel, escape_context_index
from .stages.pattern_store import PatternStore, extract_pattern
from .stages.residual_coder import ResidualModel, map_errors


@dataclass
class StageStats:
    """
    Per-stage accounting of one encoded image.

    stage_bits[n] is the exact information consumed by events coded in stage
    n + 1, escapes included. The coder keeps its own total, coded_bits, and
    overhead_bits is measured from the coder too: register_bits still held in
    its state when the last symbol was coded, plus termination_bits (the
    final flush and byte padding, minus pending underflow bits the flush
    drops). bits_balance() compares both sides, so a coding event left out
    of the stage totals shows up as an imbalance.
    """

    width: int
    height: int
    stage_pixels: List[int] = field(default_factory=lambda: [0, 0, 0])
    stage_bits: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    stage_escapes: List[int] = field(default_factory=lambda: [0, 0])
    coded_bits: float = 0.0
    register_bits: float = 0.0
    termination_bits: int = 0
    payload_bits: int = 0
    header_bytes: int = HEADER_SIZE
    unique_colors: int = 0
    row_stage_bits: Optional[np.ndarray] = None
    row_stage_pixels: Optional[np.ndarray] = None
    stage_plane: Optional[np.ndarray] = None
    residual_cases: List[Dict[str, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.row_stage_bits is None:
            self.row_stage_bits = np.zeros((self.height, 3), dtype=np.float64)
        if self.row_stage_pixels is None:
            self.row_stage_pixels = np.zeros((self.height, 3), dtype=np.int64)
        if self.stage_plane is None:
            self.stage_plane = np.zeros((self.height, self.width), dtype=np.int8)

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    @property
    def total_bytes(self) -> int:
        return self.header_bytes + self.payload_bits // 8

    @property
    def bpp(self) -> float:
        """Bits per pixel of the whole container."""
        return 8 * self.total_bytes / self.pixel_count

    @property
    def unique_fraction(self) -> float:
        return self.unique_colors / self.pixel_count

    def stage_cost(self, stage: int, from_row: int = 0) -> float:
        """Mean bits per pixel spent by a stage on the pixels it coded, from a given row on."""
        pixels = int(self.row_stage_pixels[from_row:, stage - 1].sum())
        if pixels == 0:
            return 0.0
        return float(self.row_stage_bits[from_row:, stage - 1].sum()) / pixels

    @property
    def overhead_bits(self) -> float:
        return self.register_bits + self.termination_bits

    def bits_balance(self) -> float:
        """payload_bits minus stage bits and coder overhead; zero up to float rounding."""
        return self.payload_bits - (sum(self.stage_bits) + self.overhead_bits)

    def as_row(self) -> Dict[str, Any]:
        return {
            'width': self.width,
            'height': self.height,
            'total_bytes': self.total_bytes,
            'payload_bits': self.payload_bits,
            'bpp': round(self.bpp, 4),
            'unique_colors': self.unique_colors,
            'unique_fraction': self.unique_fraction,
            'stage1_pixels': self.stage_pixels[0],
            'stage2_pixels': self.stage_pixels[1],
            'stage3_pixels': self.stage_pixels[2],
            'stage1_bits': self.stage_bits[0],
            'stage2_bits': self.stage_bits[1],
            'stage3_bits': self.stage_bits[2],
            'overhead_bits': self.overhead_bits,
            'register_bits': self.register_bits,
            'termination_bits': self.termination_bits,
            'stage1_escapes': self.stage_escapes[0],
            'stage2_escapes': self.stage_escapes[1],
        }


class _CodecSession:
    """Model state shared in shape by encoder and decoder for one image."""

    def __init__(self, config: CodecConfig):
        self.config = config
        self.logger = Logger()
        self.row_checksums: List[str] = []

    def _start(self, width: int, height: int, depth: int) -> None:
        self.pattern_store = PatternStore(self.config)
        self.palette_model = PaletteModel(self.config)
        self.residual_model = ResidualModel(self.config, depth)
        self.side = SidePlanes(width, height)
        self.row_checksums = []

    def _finish_pixel(self, canvas: Canvas, i: int, j: int, pat, c, ctx: int, s: int, stage: int) -> None:
        self.pattern_store.update(pat, c)
        was_new = self.palette_model.update(c, ctx, s, stage == 1)
        self.side.write(i, j, map_errors(canvas, i, j, c), was_new)

    def _finish_row(self, j: int) -> None:
        if self.config.debug_checksums:
            self.row_checksums.append(self.state_checksum())
        if self.logger.is_debug():
            self.logger.debug(
                f"{self.__class__.__name__}: row {j} done, "
                f"{self.pattern_store.entries()} patterns, {len(self.palette_model.palette)} colors"
            )

    def state_checksum(self) -> str:
        h = hashlib.sha256()
        self.pattern_store.digest(h)
        self.palette_model.digest(h)
        self.residual_model.digest(h)
        h.update(self.side.checksum().encode())
        return h.hexdigest()

    def describe(self) -> Dict[str, Any]:
        return {
            'pattern_store': self.pattern_store.describe(),
            'palette': self.palette_model.describe(),
            'residual': self.residual_model.describe(),
        }


class SCFEncoder(_CodecSession):
    """
    Encodes images into SCF bitstreams.

    The models stay attached after encode() so tests and the inspect command
    can examine them.
    """

    def __init__(self, config: Optional[CodecConfig] = None):
        super().__init__(config or CodecConfig())

    def encode(self, img: Image) -> bytes:
        return self.encode_with_stats(img)[0]

    def encode_with_stats(self, img: Image) -> Tuple[bytes, StageStats]:
        check_depth(img.depth)
        started = time.perf_counter()
        width, height = img.width, img.height
        self._start(width, height, img.depth)
        canvas = Canvas.from_image(img)
        enc = ArithmeticEncoder()
        stats = StageStats(width, height)
        cfg = self.config
        store = self.pattern_store
        palette_model = self.palette_model
        palette = palette_model.palette
        side = self.side
        row_bits = stats.row_stage_bits
        row_pixels = stats.row_stage_pixels
        plane = stats.stage_plane

        for j in range(height):
            row = canvas.rows[j]
            for i in range(width):
                c = row[i]
                pat = extract_pattern(canvas, i, j)
                s, hist = store.find_best_similarity(pat)
                stage = 0

                if hist is not None:
                    slot = hist.index.get(c)
                    table = store.distribution(hist, s)
                    if slot is not None:
                        bits = enc.encode_symbol(table, slot)
                        stage = 1
                    else:
                        bits = enc.encode_symbol(table, len(hist))
                        stats.stage_escapes[0] += 1
                    store.record_escape(s, stage == 0)
                    stats.stage_bits[0] += bits
                    row_bits[j, 0] += bits

                ctx = 0
                if not stage:
                    ctx = escape_context_index(side, i, j)
                    if len(palette):
                        exclude = hist.colors if cfg.exclude_stage1_colors and hist is not None else None
                        table = palette_model.distribution(ctx, s, exclude)
                        slot = palette.index.get(c)
                        if slot is not None:
                            bits = enc.encode_symbol(table, slot)
                            stage = 2
                        else:
                            bits = enc.encode_symbol(table, len(palette))
                            stats.stage_escapes[1] += 1
                        stats.stage_bits[1] += bits
                        row_bits[j, 1] += bits

                if not stage:
                    bits = self.residual_model.code_residual(enc, canvas, side, i, j, c)
                    stage = 3
                    stats.stage_bits[2] += bits
                    row_bits[j, 2] += bits

                stats.stage_pixels[stage - 1] += 1
                row_pixels[j, stage - 1] += 1
                plane[j, i] = stage
                self._finish_pixel(canvas, i, j, pat, c, ctx, s, stage)
            self._finish_row(j)

        emitted = enc.bits_emitted
        stats.coded_bits = enc.bits_consumed
        stats.register_bits = enc.register_bits
        payload = enc.finish()
        header = BitstreamHeader(width, height, img.depth, cfg, len(payload))
        data = pack_bitstream(header, payload)

        stats.payload_bits = 8 * len(payload)
        stats.termination_bits = stats.payload_bits - emitted
        stats.unique_colors = len(palette)
        stats.residual_cases = self.residual_model.describe()['cases_per_component']
        self.logger.debug(
            f"Encoded {width}x{height} into {len(data)} bytes in {time.perf_counter() - started:.2f}s"
        )
        return data, stats


class SCFDecoder(_CodecSession):
    """
    Decodes SCF bitstreams.

    The configuration stored in the header is used for decoding; only the
    caller's debug_checksums setting is honored.
    """

    def __init__(self, config: Optional[CodecConfig] = None):
        super().__init__(config or CodecConfig())
        self._debug_checksums = self.config.debug_checksums

    def decode(self, data: bytes) -> Image:
        header, payload = unpack_bitstream(data)
        self.config = header.config.with_overrides(debug_checksums=self._debug_checksums)
        width, height = header.width, header.height
        self._start(width, height, header.depth)
        canvas = Canvas(width, height, header.depth)
        dec = ArithmeticDecoder(payload)
        cfg = self.config
        store = self.pattern_store
        palette_model = self.palette_model
        palette = palette_model.palette
        side = self.side

        for j in range(height):
            for i in range(width):
                pat = extract_pattern(canvas, i, j)
                s, hist = store.find_best_similarity(pat)
                stage = 0
                c = None

                if hist is not None:
                    sym = dec.decode_symbol(store.distribution(hist, s))
                    if sym < len(hist):
                        c = hist.colors[sym]
                        stage = 1
                    store.record_escape(s, stage == 0)

                ctx = 0
                if not stage:
                    ctx = escape_context_index(side, i, j)
                    if len(palette):
                        exclude = hist.colors if cfg.exclude_stage1_colors and hist is not None else None
                        sym = dec.decode_symbol(palette_model.distribution(ctx, s, exclude))
                        if sym < len(palette):
                            c = palette.colors[sym]
                            stage = 2

                if not stage:
                    c = self.residual_model.decode_residual(dec, canvas, side, i, j)
                    stage = 3

                canvas.set(i, j, c)
                self._finish_pixel(canvas, i, j, pat, c, ctx, s, stage)
            self._finish_row(j)

        return canvas.to_image()


def encode(img: Image, cfg: Optional[CodecConfig] = None) -> bytes:
    return SCFEncoder(cfg).encode(img)


def encode_with_stats(img: Image, cfg: Optional[CodecConfig] = None) -> Tuple[bytes, StageStats]:
    return SCFEncoder(cfg).encode_with_stats(img)


def decode(data: bytes) -> Image:
    """
    Decode a bitstream back into the original image.

    Raises:
        BitstreamError: Bad magic, version or header fields.
        CorruptStreamError: Truncated or inconsistent payload.
    """
    try:
        return SCFDecoder().decode(data)
    except CodecError as e:
        Logger().error(f"Decoding failed: {e}")
        raise
    except (IndexError, ValueError) as e:
        Logger().error(f"Decoding failed: {e}")
        raise CorruptStreamError(f"Payload could not be decoded: {e}") from e
