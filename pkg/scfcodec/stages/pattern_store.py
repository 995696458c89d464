"""
Stage 1: soft context formation.

For every pixel the six causal template colors A..F form the pattern. The store
keeps, for each similarity level s in 2..6, a color histogram per sub-pattern
(the first s template colors). The best match is the longest stored
sub-pattern; its histogram becomes the color distribution, extended by an
escape symbol whose weight depends on how often Stage 1 failed at that level.
"""

from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ..core.base_model import BaseModel, DecisionCounter, escape_table
from ..core.config import CodecConfig
from ..core.entropy import CodingTable
from ..core.image import TEMPLATE, Canvas, Color, neighbor

MIN_LEVEL = 2
MAX_LEVEL = len(TEMPLATE)
LEVELS = tuple(range(MAX_LEVEL, MIN_LEVEL - 1, -1))


class Pattern(NamedTuple):
    """The six template colors around the current pixel X."""
    a: Color
    b: Color
    c: Color
    d: Color
    e: Color
    f: Color


class ColorHistogram:
    """Occurrence counts of the colors seen with one sub-pattern, in first-seen order."""

    __slots__ = ('colors', 'index', 'counts', 'total')

    def __init__(self):
        self.colors: List[Color] = []
        self.index: Dict[Color, int] = {}
        self.counts: List[int] = []
        self.total = 0

    def __contains__(self, c: Color) -> bool:
        return c in self.index

    def __len__(self) -> int:
        return len(self.colors)

    def add(self, c: Color, total_max: int) -> None:
        if self.total + 1 > total_max:
            self.counts = [(n + 1) // 2 for n in self.counts]
            self.total = sum(self.counts)
        slot = self.index.get(c)
        if slot is None:
            self.index[c] = len(self.colors)
            self.colors.append(c)
            self.counts.append(1)
        else:
            self.counts[slot] += 1
        self.total += 1

    def as_dict(self) -> Dict[Color, int]:
        return dict(zip(self.colors, self.counts))

    def weights(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)


def extract_pattern(canvas: Canvas, i: int, j: int) -> Pattern:
    return Pattern(*(neighbor(canvas, i, j, dx, dy) for dx, dy in TEMPLATE))


def stage1_distribution(hist: ColorHistogram, esc: DecisionCounter) -> CodingTable:
    """Coding table over the histogram's colors followed by ESC (last symbol)."""
    return escape_table(hist.weights(), esc.n_true, esc.n_total)


class PatternStore(BaseModel):
    """
    Sub-pattern histograms for similarity levels 2..6 and the Stage-1 escape
    counters per level 0..6.
    """

    def __init__(self, config: CodecConfig):
        super().__init__(config)
        self.levels: Dict[int, Dict[Tuple[Color, ...], ColorHistogram]] = {
            s: {} for s in range(MIN_LEVEL, MAX_LEVEL + 1)
        }
        self.escapes = [DecisionCounter(config.ctx_cap) for _ in range(MAX_LEVEL + 1)]
        self._quantum = config.similarity_tolerance + 1

    def _keyed(self, pat: Pattern) -> Tuple[Color, ...]:
        if self._quantum == 1:
            return pat
        q = self._quantum
        return tuple(Color(c.r // q, c.g // q, c.b // q) for c in pat)

    def find_best_similarity(self, pat: Pattern) -> Tuple[int, Optional[ColorHistogram]]:
        """
        Largest level s whose sub-pattern has been stored, with its histogram.

        Returns:
            (s, histogram), or (0, None) when not even the two nearest
            template colors have been seen together.
        """
        key = self._keyed(pat)
        for s in LEVELS:
            hist = self.levels[s].get(key[:s])
            if hist is not None:
                return s, hist
        return 0, None

    def distribution(self, hist: ColorHistogram, s: int) -> CodingTable:
        return stage1_distribution(hist, self.escapes[s])

    def record_escape(self, s: int, escaped: bool) -> None:
        self.escapes[s].update(escaped)

    def update(self, pat: Pattern, c: Color) -> None:
        """Count color c under every sub-pattern of pat (levels 2..6)."""
        key = self._keyed(pat)
        total_max = self.config.total_max
        for s in LEVELS:
            table = self.levels[s]
            sub = key[:s]
            hist = table.get(sub)
            if hist is None:
                hist = table[sub] = ColorHistogram()
            hist.add(c, total_max)

    def entries(self) -> int:
        return sum(len(table) for table in self.levels.values())

    def digest(self, h) -> None:
        for s in range(MIN_LEVEL, MAX_LEVEL + 1):
            for key, hist in self.levels[s].items():
                h.update(repr((s, key, hist.colors, hist.counts)).encode())
        h.update(repr([e.as_tuple() for e in self.escapes]).encode())

    def describe(self) -> Dict[str, Any]:
        return {
            'entries_per_level': {s: len(self.levels[s]) for s in range(MIN_LEVEL, MAX_LEVEL + 1)},
            'stage1_escapes_per_level': {s: self.escapes[s].as_tuple() for s in range(MAX_LEVEL + 1)},
        }
