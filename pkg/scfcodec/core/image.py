"""
Image representation, raster-scan traversal and the side planes that encoder
and decoder build while coding.

Pixels are held as a (height, width, 3) numpy array on the public Image type.
The codec itself works on a Canvas: nested lists of Color tuples, which are far
cheaper to index one pixel at a time than numpy scalars.
"""

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import ImageFormatError

MIN_DEPTH = 1
MAX_DEPTH = 16
PPM_DEPTH = 8


class Color(NamedTuple):
    """One RGB triple. Tuple ordering gives the lexicographic (r, g, b) order."""
    r: int
    g: int
    b: int


# Causal context template relative to the current pixel X at (i, j), in the
# order A..F. Pattern keys, similarity levels and the escape context bits all
# follow this order.
TEMPLATE: Tuple[Tuple[int, int], ...] = (
    (-1, 0),   # A: left
    (0, -1),   # B: top
    (-1, -1),  # C: top-left
    (1, -1),   # D: top-right
    (-2, 0),   # E: left of left
    (0, -2),   # F: top of top
)

# Neighbors whose prediction errors define the adaptive residual range.
RANGE_NEIGHBORS: Tuple[Tuple[int, int], ...] = ((-1, 0), (-1, -1), (0, -1), (1, -1))

OFF_IMAGE = Color(0, 0, 0)


def max_value(depth: int) -> int:
    return (1 << depth) - 1


def check_depth(depth: int) -> None:
    if not MIN_DEPTH <= depth <= MAX_DEPTH:
        raise ImageFormatError(f"Unsupported bit depth {depth}; expected {MIN_DEPTH}..{MAX_DEPTH}")


@dataclass(eq=False)
class Image:
    """
    A width x height plane of RGB triples with a per-component bit depth.

    Attributes:
        pixels: Array of shape (height, width, 3), row-major.
        depth: Bits per component; every value lies in [0, 2**depth - 1].
    """

    pixels: np.ndarray
    depth: int = PPM_DEPTH

    def __post_init__(self):
        check_depth(self.depth)
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ImageFormatError(f"Pixel array must have shape (height, width, 3), got {pixels.shape}")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ImageFormatError(f"Image must be at least 1x1, got {pixels.shape[1]}x{pixels.shape[0]}")
        if pixels.size and (pixels.min() < 0 or pixels.max() > max_value(self.depth)):
            raise ImageFormatError(f"Component values must lie in [0, {max_value(self.depth)}]")
        self.pixels = pixels.astype(np.uint16, copy=False)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    @property
    def e_max(self) -> int:
        return max_value(self.depth)

    def color(self, i: int, j: int) -> Color:
        return Color(*(int(v) for v in self.pixels[j, i]))

    def unique_colors(self) -> int:
        flat = self.pixels.reshape(-1, 3).astype(np.uint64)
        packed = (flat[:, 0] << np.uint64(32)) | (flat[:, 1] << np.uint64(16)) | flat[:, 2]
        return int(np.unique(packed).size)

    def unique_fraction(self) -> float:
        return self.unique_colors() / self.pixel_count

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.depth == other.depth and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height}, depth={self.depth})"


class Canvas:
    """
    Mutable pixel plane used during coding.

    The encoder fills it from an Image up front; the decoder fills it one pixel
    at a time in raster order. Either way the codec only reads causal positions.
    """

    def __init__(self, width: int, height: int, depth: int, rows: Optional[List[List[Color]]] = None):
        self.width = width
        self.height = height
        self.depth = depth
        if rows is None:
            rows = [[OFF_IMAGE] * width for _ in range(height)]
        self.rows = rows

    @classmethod
    def from_image(cls, img: Image) -> 'Canvas':
        rows = [[Color._make(px) for px in row] for row in img.pixels.tolist()]
        return cls(img.width, img.height, img.depth, rows)

    def to_image(self) -> Image:
        pixels = np.array(self.rows, dtype=np.uint16).reshape(self.height, self.width, 3)
        return Image(pixels, self.depth)

    def neighbor(self, i: int, j: int, dx: int, dy: int) -> Color:
        return neighbor(self, i, j, dx, dy)

    def set(self, i: int, j: int, c: Color) -> None:
        self.rows[j][i] = c


def neighbor(canvas: Canvas, i: int, j: int, dx: int, dy: int) -> Color:
    """Pixel at (i + dx, j + dy); positions outside the image read as black."""
    x = i + dx
    y = j + dy
    if 0 <= x < canvas.width and 0 <= y < canvas.height:
        return canvas.rows[y][x]
    return OFF_IMAGE


def raster_scan(img: Union[Image, Canvas]) -> Iterator[Tuple[int, int]]:
    """All positions left to right within a row, rows top to bottom."""
    for j in range(img.height):
        for i in range(img.width):
            yield i, j


class SidePlanes:
    """
    Per-pixel bookkeeping written right after each pixel is coded.

    map_error holds the signed MAP prediction error of every component, for
    every pixel regardless of the stage that coded it. new_color is True when
    the pixel's color was absent from the palette at coding time.
    """

    ZERO_ERRORS = (0, 0, 0)

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.map_error: List[List[Tuple[int, int, int]]] = [[self.ZERO_ERRORS] * width for _ in range(height)]
        self.new_color: List[List[bool]] = [[False] * width for _ in range(height)]
        self._cursor = 0

    @property
    def written(self) -> int:
        return self._cursor

    def error(self, i: int, j: int, k: int) -> int:
        if 0 <= i < self.width and 0 <= j < self.height:
            return self.map_error[j][i][k]
        return 0

    def is_new(self, i: int, j: int) -> bool:
        if 0 <= i < self.width and 0 <= j < self.height:
            return self.new_color[j][i]
        return False

    def write(self, i: int, j: int, errors: Tuple[int, int, int], was_new: bool) -> None:
        # Both planes are written once per pixel, in raster order.
        assert j * self.width + i == self._cursor, f"side planes written out of order at ({i}, {j})"
        self.map_error[j][i] = errors
        self.new_color[j][i] = was_new
        self._cursor += 1

    def checksum(self) -> str:
        digest = hashlib.sha256()
        for j in range(self.height):
            digest.update(repr(self.map_error[j]).encode())
            digest.update(bytes(self.new_color[j]))
        return digest.hexdigest()


# --- PPM (P6) input/output ---

_PPM_TOKEN = re.compile(rb'(?:\s+|#[^\n]*\n?)*(\S+)')


def parse_ppm(data: bytes) -> Image:
    """
    Parse a binary PPM (P6, maxval 255) into an Image, bit-exact.

    Raises:
        ImageFormatError: If the header is malformed, maxval is not 255 or the
            raster is short.
    """
    if not data.startswith(b'P6'):
        raise ImageFormatError("Not a binary PPM (P6) file")
    pos = 2
    fields = []
    for _ in range(3):
        match = _PPM_TOKEN.match(data, pos)
        if match is None:
            raise ImageFormatError("Truncated PPM header")
        try:
            fields.append(int(match.group(1)))
        except ValueError:
            raise ImageFormatError(f"Invalid PPM header field: {match.group(1)!r}")
        pos = match.end()
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageFormatError(f"Invalid PPM dimensions {width}x{height}")
    if maxval != max_value(PPM_DEPTH):
        raise ImageFormatError(f"Only maxval 255 is supported, got {maxval}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise ImageFormatError("Missing whitespace after PPM header")
    pos += 1
    size = width * height * 3
    raster = data[pos:pos + size]
    if len(raster) != size:
        raise ImageFormatError(f"PPM raster too short: expected {size} bytes, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return Image(pixels.astype(np.uint16), PPM_DEPTH)


def format_ppm(img: Image) -> bytes:
    if img.depth != PPM_DEPTH:
        raise ImageFormatError(f"PPM output supports depth {PPM_DEPTH} only, got {img.depth}")
    header = f"P6\n{img.width} {img.height}\n{max_value(PPM_DEPTH)}\n".encode('ascii')
    return header + img.pixels.astype(np.uint8).tobytes()


def read_ppm(path: Union[str, Path]) -> Image:
    return parse_ppm(Path(path).read_bytes())


def write_ppm(path: Union[str, Path], img: Image) -> None:
    Path(path).write_bytes(format_ppm(img))
