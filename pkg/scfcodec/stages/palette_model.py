"""
Stage 2: palette coding and the escape to residual coding.

The palette counts every color coded so far. When Stage 1 could not code a
pixel, the palette distribution is offered together with an escape symbol. The
escape weight is estimated from counts of new-color events conditioned on one
of 64 contexts: which of the template positions A..F held a color that was new
when it was coded (bit 0 = A ... bit 5 = F). The baseline conditions on the
Stage-1 similarity s instead.
"""

from typing import Any, Dict, Iterable, Optional

import numpy as np

from ..core.base_model import BaseModel, DecisionCounter, escape_table
from ..core.config import CodecConfig
from ..core.entropy import CodingTable
from ..core.image import TEMPLATE, Color, SidePlanes
from .pattern_store import MAX_LEVEL

NUM_CONTEXTS = 1 << len(TEMPLATE)


def escape_context_index(side: SidePlanes, i: int, j: int) -> int:
    """Bit p is set when template position p held a new color; off-image reads as not new."""
    ctx = 0
    for bit, (dx, dy) in enumerate(TEMPLATE):
        if side.is_new(i + dx, j + dy):
            ctx |= 1 << bit
    return ctx


def stage2_escape_probability(counter: DecisionCounter) -> float:
    return counter.probability()


class Palette:
    """Global color occurrence counts with symbol numbers in first-seen order."""

    def __init__(self, total_max: int):
        self.index: Dict[Color, int] = {}
        self.colors = []
        self._counts = np.zeros(64, dtype=np.int64)
        self.total = 0
        self.total_max = total_max

    def __len__(self) -> int:
        return len(self.colors)

    def __contains__(self, c: Color) -> bool:
        return c in self.index

    @property
    def counts(self) -> np.ndarray:
        return self._counts[:len(self.colors)]

    def count(self, c: Color) -> int:
        slot = self.index.get(c)
        return 0 if slot is None else int(self._counts[slot])

    def add(self, c: Color) -> bool:
        """Count one occurrence of c. Returns True if c was not in the palette."""
        # Every color keeps count >= 1, so the cap has to leave room for all of them.
        if self.total + 1 > max(self.total_max, 2 * len(self.colors)):
            live = self.counts
            live += 1
            live //= 2
            self.total = int(live.sum())
        slot = self.index.get(c)
        was_new = slot is None
        if was_new:
            slot = len(self.colors)
            if slot == self._counts.shape[0]:
                self._counts = np.concatenate([self._counts, np.zeros_like(self._counts)])
            self.index[c] = slot
            self.colors.append(c)
        self._counts[slot] += 1
        self.total += 1
        return was_new


def stage2_distribution(palette: Palette, exclude: Iterable[Color], counter: DecisionCounter) -> CodingTable:
    """
    Coding table over the palette colors (minus the excluded ones) followed by ESC.

    The palette must not be empty; an empty palette means Stage 2 is skipped.
    """
    weights = palette.counts
    if exclude:
        weights = weights.copy()
        for c in exclude:
            slot = palette.index.get(c)
            if slot is not None:
                weights[slot] = 0
    return escape_table(weights, counter.n_true, counter.n_total)


class PaletteModel(BaseModel):
    """Palette plus the two escape models (64 neighborhood contexts, 7 similarity levels)."""

    def __init__(self, config: CodecConfig):
        super().__init__(config)
        self.palette = Palette(config.total_max)
        self.escape_contexts = [DecisionCounter(config.ctx_cap) for _ in range(NUM_CONTEXTS)]
        self.similarity_escapes = [DecisionCounter(config.ctx_cap) for _ in range(MAX_LEVEL + 1)]

    def escape_counter(self, ctx: int, s: int) -> DecisionCounter:
        if self.config.enable_escape_context_model:
            return self.escape_contexts[ctx]
        return self.similarity_escapes[s]

    def escape_probability(self, ctx: int, s: int) -> float:
        return stage2_escape_probability(self.escape_counter(ctx, s))

    def distribution(self, ctx: int, s: int, exclude: Optional[Iterable[Color]] = None) -> CodingTable:
        return stage2_distribution(self.palette, exclude or (), self.escape_counter(ctx, s))

    def update(self, c: Color, ctx: int, s: int, coded_in_stage1: bool) -> bool:
        """
        Count c in the palette and, for pixels Stage 1 did not code, the
        new-color outcome under ctx and s.

        Returns:
            True if c was new to the palette.
        """
        was_new = self.palette.add(c)
        if not coded_in_stage1:
            self.escape_contexts[ctx].update(was_new)
            self.similarity_escapes[s].update(was_new)
        return was_new

    def digest(self, h) -> None:
        h.update(repr(self.palette.colors).encode())
        h.update(self.palette.counts.tobytes())
        h.update(repr([e.as_tuple() for e in self.escape_contexts]).encode())
        h.update(repr([e.as_tuple() for e in self.similarity_escapes]).encode())

    def describe(self) -> Dict[str, Any]:
        return {
            'palette_size': len(self.palette),
            'palette_total': self.palette.total,
            'escape_contexts': {ctx: e.as_tuple() for ctx, e in enumerate(self.escape_contexts) if e.n_total},
            'similarity_escapes': {s: e.as_tuple() for s, e in enumerate(self.similarity_escapes)},
        }
