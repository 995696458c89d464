# file: tests/test_corpus.py
import os
import sys
import unittest

import pytest

# Add the parent directory to sys.path so we can import our modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from scfcodec.bench.corpus import (
    LAYOUTS, MANIFEST_NAME, CorpusSpec, generate_corpus, generate_image, read_manifest, write_corpus,
)
from scfcodec.core.image import read_ppm


class TestCorpusSpec(unittest.TestCase):
    """Validation of corpus parameters"""

    def test_probabilities(self):
        spec = CorpusSpec(screen=1.0, window=1.0, photo=2.0, noise=0.0)
        self.assertEqual(spec.probabilities().tolist(), [0.25, 0.25, 0.5, 0.0])
        self.assertEqual(list(spec.weights), list(LAYOUTS))

    def test_invalid_sizes(self):
        with self.assertRaises(ValueError):
            CorpusSpec(min_size=10, max_size=5)

    def test_invalid_weights(self):
        with self.assertRaises(ValueError):
            CorpusSpec(screen=0, window=0, photo=0, noise=0)
        with self.assertRaises(ValueError):
            CorpusSpec(noise=-1.0)
        with self.assertRaises(ValueError):
            CorpusSpec(flat=0, text=0)

    def test_invalid_counts(self):
        with self.assertRaises(ValueError):
            CorpusSpec(palette_size=1)
        with self.assertRaises(ValueError):
            CorpusSpec(gradient_bars=-1)


SCREEN_ONLY = dict(screen=1.0, window=0.0, photo=0.0, noise=0.0)


class TestGeneratedImages(unittest.TestCase):
    """Content of generated images"""

    def test_flat_only_stays_in_palette(self):
        spec = CorpusSpec(count=6, flat=1.0, text=0.0, gradient_bars=0, palette_size=8, **SCREEN_ONLY)
        for img in generate_corpus(spec):
            self.assertLessEqual(img.unique_colors(), 8)

    def test_text_only_stays_in_palette(self):
        spec = CorpusSpec(count=4, flat=0.0, text=1.0, gradient_bars=0, palette_size=4, **SCREEN_ONLY)
        for img in generate_corpus(spec):
            self.assertLessEqual(img.unique_colors(), 4)

    def test_gradient_bars_add_few_colors(self):
        spec = CorpusSpec(count=6, gradient_bars=2, palette_size=8, **SCREEN_ONLY)
        for img in generate_corpus(spec):
            self.assertLessEqual(img.unique_colors(), 8 + 2 * 10)

    def test_screens_are_low_unique(self):
        spec = CorpusSpec(count=8, **SCREEN_ONLY)
        for img in generate_corpus(spec):
            self.assertLessEqual(img.unique_fraction(), 0.03)

    def test_photos_are_high_unique(self):
        spec = CorpusSpec(count=6, screen=0.0, window=0.0, photo=1.0, noise=0.0)
        for img in generate_corpus(spec):
            self.assertGreater(img.unique_fraction(), 0.17)

    def test_noise_only_is_high_unique(self):
        spec = CorpusSpec(count=4, screen=0.0, window=0.0, photo=0.0, noise=1.0)
        for img in generate_corpus(spec):
            self.assertGreater(img.unique_fraction(), 0.17)

    def test_windows_sit_between_screens_and_photos(self):
        spec = CorpusSpec(count=8, screen=0.0, window=1.0, photo=0.0, noise=0.0)
        for n in range(spec.count):
            img, layout = generate_image(spec, n)
            self.assertEqual(layout, 'window')
            self.assertGreater(img.unique_fraction(), 0.03)
            self.assertLess(img.unique_fraction(), 0.3)

    def test_tiny_images(self):
        spec = CorpusSpec(count=12, min_size=1, max_size=3, screen=1.0, window=1.0, photo=1.0, noise=1.0)
        for img in generate_corpus(spec):
            self.assertTrue(1 <= img.width <= 3 and 1 <= img.height <= 3)

    def test_sizes_in_range(self):
        spec = CorpusSpec(count=8, min_size=10, max_size=20)
        for img in generate_corpus(spec):
            self.assertTrue(10 <= img.width <= 20 and 10 <= img.height <= 20)

    def test_same_seed_same_image(self):
        spec = CorpusSpec(seed=42)
        self.assertEqual(generate_image(spec, 3)[0], generate_image(spec, 3)[0])

    def test_different_seed_different_image(self):
        self.assertNotEqual(generate_image(CorpusSpec(seed=1), 0)[0], generate_image(CorpusSpec(seed=2), 0)[0])


class TestWriteCorpus:
    """Corpus files on disk"""

    @pytest.fixture
    def spec(self):
        return CorpusSpec(count=5, min_size=12, max_size=24, seed=7)

    def test_files_and_manifest(self, spec, tmp_path):
        entries = write_corpus(spec, tmp_path)

        assert len(entries) == 5
        assert (tmp_path / MANIFEST_NAME).exists()
        manifest = read_manifest(tmp_path)
        assert [m.name for m in manifest] == [e.name for e in entries]
        assert [m.unique_colors for m in manifest] == [e.unique_colors for e in entries]
        assert [m.layout for m in manifest] == [e.layout for e in entries]
        assert set(m.layout for m in manifest) <= set(LAYOUTS)
        assert [m.unique_fraction for m in manifest] == pytest.approx([e.unique_fraction for e in entries], abs=1e-6)
        for e in entries:
            img = read_ppm(tmp_path / e.name)
            assert (img.width, img.height) == (e.width, e.height)
            assert img.unique_colors() == e.unique_colors

    def test_byte_identical_with_fixed_seed(self, spec, tmp_path):
        write_corpus(spec, tmp_path / 'a')
        write_corpus(spec, tmp_path / 'b')

        names = sorted(p.name for p in (tmp_path / 'a').iterdir())
        assert names == sorted(p.name for p in (tmp_path / 'b').iterdir())
        for name in names:
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()


if __name__ == '__main__':
    unittest.main()
