"""
Synthetic screen-content corpus.

Every image follows one of four layouts, chosen by weight:

    screen  user interface only: a flat or text background, flat and text
            panels and small gradient bars, all built from a small palette
    window  a screen with one photo window covering 4.5% to 20% of the area
    photo   a full-frame photo with a few interface panels on top
    noise   uniform random colors

Photo content is a smooth two-axis gradient with a faint blurred texture, so
nearly every photo pixel carries a color of its own. The layout therefore
controls the unique-color bucket of an image: screens stay far below 3%,
windows spread over the middle buckets, photos and noise land above 17%.
Layouts and window areas follow a low-discrepancy sequence over the image
index, so even a small corpus matches the layout weights closely. The same
spec and seed always produce the same files.
"""

from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from ..core.image import Image, write_ppm
from ..core.logger import Logger

LAYOUTS = ('screen', 'window', 'photo', 'noise')
GLYPH_ROWS, GLYPH_COLS = 7, 5
MANIFEST_NAME = 'manifest.txt'

# Photo window area as a fraction of the image, spread log-uniformly.
WINDOW_AREA = (0.045, 0.2)
# Per-pixel slope range of the photo gradients.
PHOTO_SLOPE = (1.2, 2.0)
# Gradient bar length and height in pixels.
BAR_LENGTH = (6, 10)
BAR_HEIGHT = (2, 5)
# Weyl sequence steps for the layout choice and the window area of image n.
WEYL_STEPS = np.array([0.6180339887498949, 0.4142135623730951])


@dataclass(frozen=True)
class CorpusSpec:
    """
    Attributes:
        count: Number of images.
        min_size, max_size: Range of width and height in pixels.
        screen, window, photo, noise: Layout weights.
        flat, text: Weights of flat and text interface panels.
        palette_size: Colors available to interface content.
        color_levels: Levels per component for photo and noise content;
            lower values cap the number of unique colors.
        patches: Interface panels per image.
        gradient_bars: Gradient bars per screen.
        seed: Random seed.
    """

    count: int = 40
    min_size: int = 48
    max_size: int = 96
    screen: float = 1.0
    window: float = 1.0
    photo: float = 0.8
    noise: float = 0.0
    flat: float = 1.0
    text: float = 1.0
    palette_size: int = 8
    color_levels: int = 256
    patches: int = 5
    gradient_bars: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if not 1 <= self.min_size <= self.max_size:
            raise ValueError("sizes must satisfy 1 <= min_size <= max_size")
        if min(self.weights.values()) < 0 or sum(self.weights.values()) <= 0:
            raise ValueError("layout weights must be >= 0 with a positive sum")
        if min(self.flat, self.text) < 0 or self.flat + self.text <= 0:
            raise ValueError("panel weights must be >= 0 with a positive sum")
        if not 2 <= self.palette_size <= 256:
            raise ValueError("palette_size must be in [2, 256]")
        if not 2 <= self.color_levels <= 256:
            raise ValueError("color_levels must be in [2, 256]")
        if self.patches < 0 or self.gradient_bars < 0:
            raise ValueError("patches and gradient_bars must be >= 0")

    @property
    def weights(self) -> Dict[str, float]:
        return {'screen': self.screen, 'window': self.window, 'photo': self.photo, 'noise': self.noise}

    def probabilities(self) -> np.ndarray:
        w = np.array([self.weights[k] for k in LAYOUTS], dtype=np.float64)
        return w / w.sum()


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    width: int
    height: int
    unique_colors: int
    unique_fraction: float
    layout: str


def _quantize(values: np.ndarray, levels: int) -> np.ndarray:
    step = 256 // levels
    return (np.clip(np.rint(values), 0, 255).astype(np.int64) // step) * step


def _box_blur(values: np.ndarray, radius: int) -> np.ndarray:
    """Separable moving average over a (h, w, 3) array with edge padding."""
    if radius <= 0:
        return values
    size = 2 * radius + 1
    out = values.astype(np.float64)
    for axis in (0, 1):
        pad = [(0, 0)] * out.ndim
        pad[axis] = (radius + 1, radius)
        padded = np.pad(out, pad, mode='edge')
        csum = np.cumsum(padded, axis=axis)
        upper = np.take(csum, np.arange(size, size + out.shape[axis]), axis=axis)
        lower = np.take(csum, np.arange(0, out.shape[axis]), axis=axis)
        out = (upper - lower) / size
    return out


class _ImageSynthesizer:
    """Renders one image; all randomness comes from its own generator."""

    def __init__(self, spec: CorpusSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.palette = rng.integers(0, 256, size=(spec.palette_size, 3))
        self.glyphs = rng.random((8, GLYPH_ROWS, GLYPH_COLS)) < 0.45

    def _palette_color(self) -> np.ndarray:
        return self.palette[int(self.rng.integers(len(self.palette)))]

    def _flat(self, h: int, w: int) -> np.ndarray:
        return np.broadcast_to(self._palette_color(), (h, w, 3)).copy()

    def _text(self, h: int, w: int) -> np.ndarray:
        fg = self._palette_color()
        bg = self._palette_color()
        cell_h, cell_w = GLYPH_ROWS + 1, GLYPH_COLS + 1
        rows, cols = -(-h // cell_h), -(-w // cell_w)
        picks = self.rng.integers(len(self.glyphs), size=(rows, cols))
        cells = np.zeros((rows, cols, cell_h, cell_w), dtype=bool)
        cells[:, :, :GLYPH_ROWS, :GLYPH_COLS] = self.glyphs[picks]
        mask = cells.transpose(0, 2, 1, 3).reshape(rows * cell_h, cols * cell_w)[:h, :w]
        return np.where(mask[:, :, None], fg, bg)

    def _panel(self, h: int, w: int) -> np.ndarray:
        spec = self.spec
        if self.rng.random() < spec.flat / (spec.flat + spec.text):
            return self._flat(h, w)
        return self._text(h, w)

    def _ramp(self, n: int) -> np.ndarray:
        """Values 0..n-1 along one axis with a random slope, kept inside [10, 245]."""
        mag = min(self.rng.uniform(*PHOTO_SLOPE), 235.0 / max(n - 1, 1))
        span = mag * (n - 1)
        start = self.rng.uniform(10.0, 245.0 - span)
        if self.rng.random() < 0.5:
            return start + mag * np.arange(n)
        return start + span - mag * np.arange(n)

    def _photo(self, h: int, w: int) -> np.ndarray:
        """First component ramps along x, second along y, third is a shallow plane."""
        yy, xx = np.mgrid[0:h, 0:w]
        pixels = np.empty((h, w, 3), dtype=np.float64)
        pixels[:, :, 0] = self._ramp(w)[None, :]
        pixels[:, :, 1] = self._ramp(h)[:, None]
        tilt = self.rng.uniform(-0.6, 0.6, size=2)
        pixels[:, :, 2] = self.rng.uniform(70, 180) + tilt[0] * (xx - w / 2) + tilt[1] * (yy - h / 2)
        pixels += _box_blur(self.rng.normal(0, 5, size=(h, w, 3)), radius=2)
        return _quantize(pixels, self.spec.color_levels)

    def _noise(self, h: int, w: int) -> np.ndarray:
        return _quantize(self.rng.integers(0, 256, size=(h, w, 3)), self.spec.color_levels)

    def _place(self, pixels: np.ndarray, block: np.ndarray) -> None:
        height, width = pixels.shape[:2]
        ph, pw = block.shape[:2]
        y = int(self.rng.integers(0, height - ph + 1))
        x = int(self.rng.integers(0, width - pw + 1))
        pixels[y:y + ph, x:x + pw] = block

    def _panels(self, pixels: np.ndarray, n: int) -> None:
        height, width = pixels.shape[:2]
        for _ in range(n):
            ph = min(height, int(self.rng.integers(1, max(2, height // 2) + 1)))
            pw = min(width, int(self.rng.integers(1, max(2, width // 2) + 1)))
            self._place(pixels, self._panel(ph, pw))

    def _gradient_bar(self, pixels: np.ndarray) -> None:
        """A short horizontal color ramp repeated over a few rows, as on buttons and title bars."""
        height, width = pixels.shape[:2]
        length = min(int(self.rng.integers(BAR_LENGTH[0], BAR_LENGTH[1] + 1)), width)
        rows = min(int(self.rng.integers(BAR_HEIGHT[0], BAR_HEIGHT[1] + 1)), height)
        step = self.rng.integers(1, 4, size=3) * self.rng.choice([-1, 1], size=3)
        ramp = np.clip(self._palette_color() + np.arange(length)[:, None] * step, 0, 255)
        self._place(pixels, np.broadcast_to(ramp, (rows, length, 3)))

    def _screen(self, h: int, w: int) -> np.ndarray:
        pixels = self._panel(h, w).astype(np.int64)
        self._panels(pixels, self.spec.patches)
        for _ in range(self.spec.gradient_bars):
            self._gradient_bar(pixels)
        return pixels

    def image(self, layout: str, area: float) -> Image:
        spec = self.spec
        width = int(self.rng.integers(spec.min_size, spec.max_size + 1))
        height = int(self.rng.integers(spec.min_size, spec.max_size + 1))
        if layout == 'noise':
            pixels = self._noise(height, width)
        elif layout == 'photo':
            pixels = self._photo(height, width)
            self._panels(pixels, max(1, spec.patches // 2))
        else:
            pixels = self._screen(height, width)
            if layout == 'window':
                ph = min(height, max(2, int(round(height * np.sqrt(area)))))
                pw = min(width, max(2, int(round(width * np.sqrt(area)))))
                self._place(pixels, self._photo(ph, pw))
        return Image(pixels.astype(np.uint16), 8)


def _stratified(spec: CorpusSpec, index: int) -> Tuple[str, float]:
    """Layout and window area of image `index`."""
    offset = np.random.default_rng(spec.seed).random(2)
    u, v = np.modf(offset + (index + 1) * WEYL_STEPS)[0]
    live = [k for k, name in enumerate(LAYOUTS) if spec.weights[name] > 0]
    edges = np.cumsum(spec.probabilities()[live])
    layout = LAYOUTS[live[min(int(np.searchsorted(edges, u, side='right')), len(live) - 1)]]
    lo, hi = np.log(WINDOW_AREA)
    return layout, float(np.exp(lo + v * (hi - lo)))


def generate_image(spec: CorpusSpec, index: int) -> Tuple[Image, str]:
    """Image number `index` of the corpus and its layout."""
    layout, area = _stratified(spec, index)
    rng = np.random.default_rng([spec.seed, index])
    return _ImageSynthesizer(spec, rng).image(layout, area), layout


def generate_corpus(spec: CorpusSpec) -> List[Image]:
    return [generate_image(spec, n)[0] for n in range(spec.count)]


def write_corpus(spec: CorpusSpec, out_dir: Union[str, Path]) -> List[CorpusEntry]:
    """
    Write the corpus as PPM files plus a line-oriented manifest.

    Returns:
        One entry per image, in file order
    """
    logger = Logger()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for n in range(spec.count):
        img, layout = generate_image(spec, n)
        name = f'img_{n:04d}.ppm'
        write_ppm(out / name, img)
        unique = img.unique_colors()
        entries.append(CorpusEntry(name, img.width, img.height, unique, unique / img.pixel_count, layout))
        logger.debug(f"Generated {name}: {img.width}x{img.height}, {unique} colors, layout {layout}")

    lines = [f"# seed={spec.seed} " + ' '.join(f'{k}={v}' for k, v in asdict(spec).items() if k != 'seed')]
    lines.append('# name width height unique_colors unique_fraction layout')
    for e in entries:
        lines.append(f'{e.name} {e.width} {e.height} {e.unique_colors} {e.unique_fraction:.6f} {e.layout}')
    (out / MANIFEST_NAME).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    logger.info(f"Corpus written to {out}: {len(entries)} images")
    return entries


def read_manifest(corpus_dir: Union[str, Path]) -> List[CorpusEntry]:
    entries = []
    for line in (Path(corpus_dir) / MANIFEST_NAME).read_text(encoding='utf-8').splitlines():
        if not line.strip() or line.startswith('#'):
            continue
        name, width, height, unique, fraction, layout = line.split()
        entries.append(CorpusEntry(name, int(width), int(height), int(unique), float(fraction), layout))
    return entries
