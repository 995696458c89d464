# file: tests/test_pattern_store.py
import os
import sys
import unittest

import numpy as np

# Add the parent directory to sys.path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from scfcodec.core.base_model import DecisionCounter
from scfcodec.core.config import CodecConfig
from scfcodec.core.image import OFF_IMAGE, Canvas, Color, Image
from scfcodec.stages.pattern_store import (
    MAX_LEVEL, MIN_LEVEL, ColorHistogram, Pattern, PatternStore, extract_pattern, stage1_distribution,
)

RED = Color(255, 0, 0)
GREEN = Color(0, 255, 0)
BLUE = Color(0, 0, 255)
WHITE = Color(255, 255, 255)


def make_pattern(*colors):
    return Pattern(*colors)


def counter(n_true, n_total):
    c = DecisionCounter(1 << 10)
    c.n_true, c.n_total = n_true, n_total
    return c


class TestExtractPattern(unittest.TestCase):
    """Template colors around the current pixel"""

    def test_first_pixel_is_all_off_image(self):
        canvas = Canvas.from_image(Image(np.full((3, 3, 3), 77)))
        self.assertEqual(tuple(extract_pattern(canvas, 0, 0)), (OFF_IMAGE,) * 6)

    def test_uniform_interior(self):
        canvas = Canvas.from_image(Image(np.full((5, 5, 3), 128)))
        self.assertEqual(set(extract_pattern(canvas, 2, 2)), {Color(128, 128, 128)})

    def test_checkerboard(self):
        pixels = np.zeros((5, 5, 3), dtype=np.uint16)
        for j in range(5):
            for i in range(5):
                pixels[j, i] = WHITE if (i + j) % 2 else (0, 0, 0)
        canvas = Canvas.from_image(Image(pixels))
        pat = extract_pattern(canvas, 2, 2)

        # A and B touch X along an edge; C, D, E and F share its parity.
        self.assertEqual((pat.a, pat.b), (WHITE, WHITE))
        self.assertEqual((pat.c, pat.d, pat.e, pat.f), (Color(0, 0, 0),) * 4)


class TestPatternStore(unittest.TestCase):
    """Sub-pattern histograms and best-similarity lookup"""

    def setUp(self):
        self.store = PatternStore(CodecConfig())
        self.pat = make_pattern(RED, GREEN, BLUE, WHITE, RED, GREEN)

    def test_empty_store(self):
        self.assertEqual(self.store.find_best_similarity(self.pat), (0, None))

    def test_full_match(self):
        self.store.update(self.pat, BLUE)
        s, hist = self.store.find_best_similarity(self.pat)
        self.assertEqual(s, 6)
        self.assertEqual(hist.as_dict(), {BLUE: 1})

    def test_partial_match(self):
        self.store.update(self.pat, BLUE)
        other = make_pattern(RED, GREEN, BLUE, WHITE, BLUE, BLUE)
        s, hist = self.store.find_best_similarity(other)
        self.assertEqual(s, 4)
        self.assertEqual(hist.as_dict(), {BLUE: 1})

    def test_no_match_below_level_two(self):
        self.store.update(self.pat, BLUE)
        self.assertEqual(self.store.find_best_similarity(make_pattern(RED, RED, BLUE, WHITE, RED, GREEN)), (0, None))

    def test_update_creates_five_entries(self):
        self.store.update(self.pat, BLUE)
        self.assertEqual(self.store.entries(), MAX_LEVEL - MIN_LEVEL + 1)
        for s in range(MIN_LEVEL, MAX_LEVEL + 1):
            self.assertEqual(self.store.levels[s][tuple(self.pat[:s])].as_dict(), {BLUE: 1})

    def test_update_same_color_twice(self):
        self.store.update(self.pat, BLUE)
        self.store.update(self.pat, BLUE)
        for s in range(MIN_LEVEL, MAX_LEVEL + 1):
            self.assertEqual(self.store.levels[s][tuple(self.pat[:s])].as_dict(), {BLUE: 2})

    def test_update_different_colors(self):
        self.store.update(self.pat, BLUE)
        self.store.update(self.pat, RED)
        for s in range(MIN_LEVEL, MAX_LEVEL + 1):
            self.assertEqual(self.store.levels[s][tuple(self.pat[:s])].as_dict(), {BLUE: 1, RED: 1})

    def test_tolerance_matches_nearby_colors(self):
        store = PatternStore(CodecConfig(similarity_tolerance=1))
        store.update(make_pattern(*[Color(10, 10, 10)] * 6), BLUE)
        s, hist = store.find_best_similarity(make_pattern(*[Color(11, 11, 11)] * 6))
        self.assertEqual(s, 6)
        self.assertIn(BLUE, hist)

    def test_exact_matching_by_default(self):
        self.store.update(make_pattern(*[Color(10, 10, 10)] * 6), BLUE)
        self.assertEqual(self.store.find_best_similarity(make_pattern(*[Color(11, 11, 11)] * 6)), (0, None))

    def test_best_similarity_matches_brute_force(self):
        rng = np.random.default_rng(5)
        palette = [RED, GREEN, BLUE]
        stored = []
        for _ in range(300):
            pat = make_pattern(*(palette[n] for n in rng.integers(0, 3, size=6)))
            expected = max(
                (s for s in range(MIN_LEVEL, MAX_LEVEL + 1) if any(p[:s] == pat[:s] for p in stored)),
                default=0,
            )
            s, hist = self.store.find_best_similarity(pat)
            self.assertEqual(s, expected)
            self.assertEqual(hist is None, expected == 0)

            self.store.update(pat, palette[int(rng.integers(0, 3))])
            stored.append(pat)

    def test_escape_counters(self):
        self.store.record_escape(6, True)
        self.store.record_escape(6, False)
        self.assertEqual(self.store.escapes[6].as_tuple(), (1, 2))
        self.assertEqual(self.store.describe()['stage1_escapes_per_level'][6], (1, 2))

    def test_checksum_tracks_state(self):
        other = PatternStore(CodecConfig())
        self.assertEqual(self.store.checksum(), other.checksum())
        self.store.update(self.pat, BLUE)
        self.assertNotEqual(self.store.checksum(), other.checksum())


class TestStage1Distribution(unittest.TestCase):
    """Histogram plus escape coding tables"""

    def test_fresh_escape_is_one_half(self):
        hist = ColorHistogram()
        for c in (RED, RED, RED, GREEN):
            hist.add(c, 1 << 16)
        table = stage1_distribution(hist, counter(0, 0))

        self.assertEqual(len(table), 3)
        self.assertAlmostEqual(table.probability(2), 0.5, places=3)
        self.assertEqual(table.frequency(0), 3 * table.frequency(1))

    def test_learned_escape(self):
        hist = ColorHistogram()
        hist.add(RED, 1 << 16)
        table = stage1_distribution(hist, counter(0, 8))

        self.assertAlmostEqual(table.probability(1), 1 / 10, places=3)
        self.assertAlmostEqual(table.probability(0), 9 / 10, places=3)

    def test_histogram_rescale(self):
        hist = ColorHistogram()
        for _ in range(5):
            hist.add(RED, 8)
        for _ in range(3):
            hist.add(GREEN, 8)
        hist.add(BLUE, 8)

        self.assertLessEqual(hist.total, 8)
        self.assertEqual(hist.as_dict(), {RED: 3, GREEN: 2, BLUE: 1})


if __name__ == '__main__':
    unittest.main()
