"""
SCF Screen-Content Codec Package

A lossless image codec for screen content built from three coding stages:
- Stage 1: soft context formation over a six-pixel causal pattern
- Stage 2: global color palette with a neighborhood-conditioned escape model
- Stage 3: residual coding with adaptive-range histogram pruning

Encode and decode images with encode()/decode(), or use SCFEncoder and
SCFDecoder directly to keep the models around for inspection.
"""

from .codec import SCFDecoder, SCFEncoder, StageStats, decode, encode, encode_with_stats
from .core.config import CodecConfig
from .core.image import Color, Image, read_ppm, write_ppm
from .core.logger import Logger

__version__ = "1.0.0"
__all__ = [
    "SCFEncoder", "SCFDecoder", "StageStats", "encode", "decode", "encode_with_stats",
    "CodecConfig", "Color", "Image", "read_ppm", "write_ppm", "Logger",
]
