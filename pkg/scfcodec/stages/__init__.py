"""
Stage models.

- PatternStore: Stage 1, sub-pattern color histograms
- PaletteModel: Stage 2, palette and escape-to-residual models
- ResidualModel: Stage 3, adaptive-range residual coding
"""

from .palette_model import PaletteModel
from .pattern_store import PatternStore
from .residual_coder import ResidualModel

__all__ = ["PatternStore", "PaletteModel", "ResidualModel"]
