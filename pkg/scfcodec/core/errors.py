"""
Exception hierarchy for the codec.

The CLI maps these onto exit codes (see run.py).
"""


class CodecError(Exception):
    """Base class for every error raised by the codec."""


class ImageFormatError(CodecError):
    """The input image is malformed or uses an unsupported format or depth."""


class BitstreamError(CodecError):
    """The container header is invalid: bad magic, version or field values."""


class CorruptStreamError(CodecError):
    """The payload cannot be decoded: truncated, overrun or out-of-range values."""


class ModelContractError(CodecError):
    """A model or coder precondition was violated. Always a programming error."""
