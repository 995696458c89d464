"""
Adaptive multi-symbol arithmetic coding.

Integer-only binary arithmetic coder with a 32-bit state (low/high registers,
bitwise renormalization with underflow counting), plus the frequency tables the
models keep and the cumulative coding tables built from them for each event.

The end of the payload is implicit: the decoder is told how many symbols to
read by the container, and bits past the end of the payload read as zero.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CorruptStreamError, ModelContractError

STATE_SIZE = 32
MAX_RANGE = 1 << STATE_SIZE
MIN_RANGE = (MAX_RANGE >> 2) + 2
# Largest cumulative total a coding table may have.
MAX_TOTAL = MIN_RANGE
MASK = MAX_RANGE - 1
TOP_MASK = MAX_RANGE >> 1
SECOND_MASK = TOP_MASK >> 1

# Default cap for adaptive frequency tables.
TOTAL_MAX = 1 << 16

# Reading more than this many bits past the end of the payload means the
# stream is corrupt (a valid stream needs at most STATE_SIZE plus a few).
OVERRUN_LIMIT_BITS = 1024


class FrequencyTable:
    """
    Adaptive occurrence counts over a fixed alphabet 0..size-1.

    Symbols with count 0 are not codable from the raw counts; the models decide
    whether a coding table applies a floor weight.
    """

    def __init__(self, size: int, initial: Union[int, Sequence[int], np.ndarray] = 0,
                 total_max: int = TOTAL_MAX):
        if np.isscalar(initial):
            self.counts = np.full(size, int(initial), dtype=np.int64)
        else:
            self.counts = np.array(initial, dtype=np.int64)
            if self.counts.shape != (size,):
                raise ModelContractError(f"Initial counts must have length {size}")
        if (self.counts < 0).any():
            raise ModelContractError("Counts must be nonnegative")
        self.total = int(self.counts.sum())
        self.total_max = total_max

    @property
    def size(self) -> int:
        return int(self.counts.shape[0])

    def get(self, symbol: int) -> int:
        return int(self.counts[symbol])

    def increment(self, symbol: int) -> None:
        if self.total + 1 > self.total_max:
            rescale(self)
        self.counts[symbol] += 1
        self.total += 1

    def coding_table(self, lo: int = 0, hi: Optional[int] = None, floor: int = 0) -> 'CodingTable':
        """
        Coding table over symbols lo..hi (inclusive), indexed from 0.

        Args:
            floor: Minimum weight for every symbol in the window, so that
                symbols never seen so far stay codable.
        """
        if hi is None:
            hi = self.size - 1
        window = self.counts[lo:hi + 1]
        if floor:
            window = np.maximum(window, floor)
        return CodingTable(window)

    def __repr__(self) -> str:
        return f"FrequencyTable(size={self.size}, total={self.total})"


def rescale(tbl: FrequencyTable) -> FrequencyTable:
    """Halve every nonzero count, rounding up, so live symbols keep count >= 1."""
    tbl.counts = (tbl.counts + 1) // 2
    tbl.total = int(tbl.counts.sum())
    return tbl


class CodingTable:
    """Cumulative frequencies for one coding event: cumul[s]..cumul[s+1] is symbol s."""

    __slots__ = ('cumul', 'total')

    def __init__(self, weights: Union[Sequence[int], np.ndarray]):
        weights = np.asarray(weights, dtype=np.int64)
        self.cumul = np.zeros(weights.shape[0] + 1, dtype=np.int64)
        np.cumsum(weights, out=self.cumul[1:])
        self.total = int(self.cumul[-1])
        if self.total < 1:
            raise ModelContractError("Coding table has zero total")
        if self.total > MAX_TOTAL:
            raise ModelContractError(f"Coding table total {self.total} exceeds {MAX_TOTAL}")

    @classmethod
    def binary(cls, n_true: int, n_total: int) -> 'CodingTable':
        """Two-symbol table (0 = false, 1 = true) with the add-one prior."""
        return cls((n_total - n_true + 1, n_true + 1))

    def __len__(self) -> int:
        return int(self.cumul.shape[0]) - 1

    def frequency(self, symbol: int) -> int:
        return int(self.cumul[symbol + 1] - self.cumul[symbol])

    def probability(self, symbol: int) -> float:
        return self.frequency(symbol) / self.total

    def information(self, symbol: int) -> float:
        """Ideal code length -log2 p(symbol) in bits."""
        return -math.log2(self.probability(symbol))


class BitOutputStream:
    """Big-endian bit writer into a growing byte buffer."""

    def __init__(self):
        self.buffer = bytearray()
        self.current = 0
        self.filled = 0
        self.bits_written = 0

    def write(self, bit: int) -> None:
        self.current = (self.current << 1) | bit
        self.filled += 1
        self.bits_written += 1
        if self.filled == 8:
            self.buffer.append(self.current)
            self.current = 0
            self.filled = 0

    def close(self) -> bytes:
        while self.filled != 0:
            self.write(0)
        return bytes(self.buffer)


class BitInputStream:
    """Big-endian bit reader; the end of the data reads as an endless run of zeros."""

    def __init__(self, data: bytes):
        self.data = data
        self.position = 0
        self.bits_past_end = 0

    def read(self) -> int:
        byte_index = self.position >> 3
        if byte_index >= len(self.data):
            self.bits_past_end += 1
            if self.bits_past_end > OVERRUN_LIMIT_BITS:
                raise CorruptStreamError("Payload exhausted before all symbols were decoded")
            return 0
        bit = (self.data[byte_index] >> (7 - (self.position & 7))) & 1
        self.position += 1
        return bit


class _ArithmeticCoderBase:
    """State and interval update shared by encoder and decoder."""

    def __init__(self):
        self.low = 0
        self.high = MASK

    def _narrow(self, table: CodingTable, symbol: int) -> float:
        low = self.low
        rng = self.high - low + 1
        total = table.total
        sym_low = int(table.cumul[symbol])
        sym_high = int(table.cumul[symbol + 1])
        if sym_low == sym_high:
            raise ModelContractError(f"Symbol {symbol} has zero frequency")
        new_low = low + sym_low * rng // total
        new_high = low + sym_high * rng // total - 1
        cost = math.log2(rng) - math.log2(new_high - new_low + 1)

        # While the highest bits are equal
        while ((new_low ^ new_high) & TOP_MASK) == 0:
            self._shift(new_low >> (STATE_SIZE - 1))
            new_low = (new_low << 1) & MASK
            new_high = ((new_high << 1) & MASK) | 1
        # While low = 01... and high = 10...
        while (new_low & ~new_high & SECOND_MASK) != 0:
            self._underflow()
            new_low = (new_low << 1) & (MASK >> 1)
            new_high = ((new_high << 1) & (MASK >> 1)) | TOP_MASK | 1
        self.low = new_low
        self.high = new_high
        return cost

    def _shift(self, bit: int) -> None:
        raise NotImplementedError()

    def _underflow(self) -> None:
        raise NotImplementedError()


class ArithmeticEncoder(_ArithmeticCoderBase):
    """
    Encodes symbols into a byte payload.

    Every encode call returns the information it consumed (the log2 shrink of
    the coding interval), so callers can attribute exact costs per event.
    """

    def __init__(self):
        super().__init__()
        self.output = BitOutputStream()
        self.num_underflow = 0
        self.bits_consumed = 0.0
        self._finished = False

    def encode_symbol(self, table: CodingTable, symbol: int) -> float:
        cost = self._narrow(table, symbol)
        self.bits_consumed += cost
        return cost

    def encode_binary(self, n_true: int, n_total: int, value: bool) -> float:
        return self.encode_symbol(CodingTable.binary(n_true, n_total), 1 if value else 0)

    @property
    def bits_emitted(self) -> int:
        """Renormalization bits so far: written ones plus underflow bits still pending."""
        return self.output.bits_written + self.num_underflow

    @property
    def register_bits(self) -> float:
        """
        Information held in the state registers and not yet emitted.

        Every renormalization step doubles the interval, so this is
        32 - log2(high - low + 1) and stays in [0, 2) between symbols.
        """
        return self.bits_emitted - self.bits_consumed

    def finish(self) -> bytes:
        """Terminate the code and return the payload. Must be called exactly once."""
        if self._finished:
            raise ModelContractError("Encoder already finished")
        self._finished = True
        self.output.write(1)
        return self.output.close()

    def _shift(self, bit: int) -> None:
        self.output.write(bit)
        for _ in range(self.num_underflow):
            self.output.write(bit ^ 1)
        self.num_underflow = 0

    def _underflow(self) -> None:
        self.num_underflow += 1


class ArithmeticDecoder(_ArithmeticCoderBase):
    """Decodes symbols from a payload produced by ArithmeticEncoder."""

    def __init__(self, data: bytes):
        super().__init__()
        self.input = BitInputStream(data)
        self.code = 0
        for _ in range(STATE_SIZE):
            self.code = (self.code << 1) | self.input.read()

    def decode_symbol(self, table: CodingTable) -> int:
        total = table.total
        rng = self.high - self.low + 1
        offset = self.code - self.low
        value = ((offset + 1) * total - 1) // rng
        symbol = int(np.searchsorted(table.cumul, value, side='right')) - 1
        if not 0 <= symbol < len(table):
            raise CorruptStreamError("Decoded value outside the coding table")
        self._narrow(table, symbol)
        if not self.low <= self.code <= self.high:
            raise CorruptStreamError("Code register left the coding interval")
        return symbol

    def decode_binary(self, n_true: int, n_total: int) -> bool:
        return self.decode_symbol(CodingTable.binary(n_true, n_total)) == 1

    def _shift(self, bit: int) -> None:
        self.code = ((self.code << 1) & MASK) | self.input.read()

    def _underflow(self) -> None:
        self.code = (self.code & TOP_MASK) | ((self.code << 1) & (MASK >> 1)) | self.input.read()
