"""
Bitstream container: a fixed-size little-endian header followed by a single
arithmetic-coded payload.

    offset  size  field
    0       4     magic b"SCF1"
    4       1     version
    5       4     width
    9       4     height
    13      1     depth
    14      1     config flags (bit0 stage-3 pruning, bit1 escape contexts,
                  bit2 stage-1 color exclusion)
    15      2     similarity tolerance
    17      1     log2 of the frequency-table cap
    18      1     log2 of the decision-counter cap
    19      4     payload length in bytes
    23      ...   payload
"""

import struct
from dataclasses import dataclass
from typing import Tuple

from .config import CodecConfig
from .errors import BitstreamError, CorruptStreamError, ImageFormatError
from .image import check_depth

MAGIC = b'SCF1'
VERSION = 1
HEADER_FORMAT = struct.Struct('<4sBIIBBHBBI')
HEADER_SIZE = HEADER_FORMAT.size


@dataclass(frozen=True)
class BitstreamHeader:
    width: int
    height: int
    depth: int
    config: CodecConfig
    payload_length: int
    version: int = VERSION

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    def pack(self) -> bytes:
        cfg = self.config
        return HEADER_FORMAT.pack(
            MAGIC, self.version, self.width, self.height, self.depth,
            cfg.flags, cfg.similarity_tolerance, cfg.total_max_log2,
            cfg.ctx_cap_log2, self.payload_length,
        )

    @classmethod
    def unpack(cls, data: bytes) -> 'BitstreamHeader':
        if len(data) < HEADER_SIZE:
            if data[:len(MAGIC)] != MAGIC[:len(data)]:
                raise BitstreamError("Not an SCF bitstream (bad magic)")
            raise BitstreamError(f"Header truncated: {len(data)} of {HEADER_SIZE} bytes")
        (magic, version, width, height, depth, flags, tolerance,
         total_max_log2, ctx_cap_log2, payload_length) = HEADER_FORMAT.unpack_from(data)
        if magic != MAGIC:
            raise BitstreamError("Not an SCF bitstream (bad magic)")
        if version != VERSION:
            raise BitstreamError(f"Unsupported bitstream version {version}; this decoder reads {VERSION}")
        if width * height == 0:
            raise BitstreamError(f"Invalid image size {width}x{height}")
        try:
            check_depth(depth)
        except ImageFormatError as e:
            raise BitstreamError(str(e))
        config = CodecConfig.from_flags(
            flags,
            similarity_tolerance=tolerance,
            total_max_log2=total_max_log2,
            ctx_cap_log2=ctx_cap_log2,
        )
        return cls(width, height, depth, config, payload_length, version)


def pack_bitstream(header: BitstreamHeader, payload: bytes) -> bytes:
    if header.payload_length != len(payload):
        raise ValueError("Header payload length does not match the payload")
    return header.pack() + payload


def unpack_bitstream(data: bytes) -> Tuple[BitstreamHeader, bytes]:
    """
    Split a container into header and payload.

    Raises:
        BitstreamError: On an invalid header.
        CorruptStreamError: If the payload is shorter than the header declares.
    """
    header = BitstreamHeader.unpack(data)
    payload = data[HEADER_SIZE:HEADER_SIZE + header.payload_length]
    if len(payload) != header.payload_length:
        raise CorruptStreamError(
            f"Payload truncated: expected {header.payload_length} bytes, got {len(payload)}"
        )
    return header, payload


def is_bitstream(data: bytes) -> bool:
    return data[:len(MAGIC)] == MAGIC
