"""
Core modules for the SCF codec.

Contains the building blocks every stage uses:
- Image, Canvas, SidePlanes: pixel planes and PPM input/output
- ArithmeticEncoder/ArithmeticDecoder: adaptive arithmetic coding
- BitstreamHeader: container format
- BaseModel: abstract base class for stage models
- Logger: Singleton logger for centralized logging
"""

from .base_model import BaseModel, DecisionCounter
from .bitstream import BitstreamHeader
from .config import CodecConfig
from .entropy import ArithmeticDecoder, ArithmeticEncoder, CodingTable, FrequencyTable
from .errors import BitstreamError, CodecError, CorruptStreamError, ImageFormatError, ModelContractError
from .image import Canvas, Color, Image, SidePlanes
from .logger import Logger

__all__ = [
    "BaseModel", "DecisionCounter", "BitstreamHeader", "CodecConfig",
    "ArithmeticEncoder", "ArithmeticDecoder", "CodingTable", "FrequencyTable",
    "CodecError", "ImageFormatError", "BitstreamError", "CorruptStreamError", "ModelContractError",
    "Canvas", "Color", "Image", "SidePlanes", "Logger",
]
