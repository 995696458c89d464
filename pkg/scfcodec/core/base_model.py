"""
Base model interface shared by the three coding stages.
Every stage model inherits from BaseModel and implements the state digest and
the inspection summary; encoder and decoder each own one instance per stage.
"""

import hashlib
from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from .config import CodecConfig
from .entropy import CodingTable
from .logger import Logger

# Target total of the color + escape tables built for Stages 1 and 2.
ESC_TABLE_TOTAL = 1 << 12


class BaseModel(ABC):
    """
    Abstract base class for all stage models.

    Provides the logger, the configuration and the state checksum used by the
    lockstep debug mode. Subclasses implement digest() and describe().
    """

    def __init__(self, config: CodecConfig):
        """
        Initialize the base model.

        Args:
            config: Codec configuration shared by encoder and decoder
        """
        self.config = config
        self.logger = Logger()

    @abstractmethod
    def digest(self, h: 'hashlib._Hash') -> None:
        """Feed the complete model state into a hash object."""
        pass

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """
        Summary of the model state for the inspect command.

        Returns:
            Dictionary of printable statistics
        """
        pass

    def checksum(self) -> str:
        h = hashlib.sha256()
        self.digest(h)
        return h.hexdigest()


class DecisionCounter:
    """
    Counts of a binary event: how often it was true out of all occurrences.

    Both counts are halved (rounding up) once the total would pass the cap.
    """

    __slots__ = ('n_true', 'n_total', 'cap')

    def __init__(self, cap: int):
        self.n_true = 0
        self.n_total = 0
        self.cap = cap

    def update(self, value: bool) -> None:
        if self.n_total + 1 > self.cap:
            self.n_true = (self.n_true + 1) // 2
            self.n_total = (self.n_total + 1) // 2
        self.n_total += 1
        if value:
            self.n_true += 1

    def probability(self) -> float:
        """Smoothed estimate (n_true + 1) / (n_total + 2)."""
        return (self.n_true + 1) / (self.n_total + 2)

    def as_tuple(self):
        return self.n_true, self.n_total

    def __repr__(self) -> str:
        return f"DecisionCounter({self.n_true}/{self.n_total})"


def escape_table(weights: np.ndarray, n_escape: int, n_total: int) -> CodingTable:
    """
    Coding table over the given color weights plus a trailing escape symbol.

    The escape weight approximates (n_escape + 1) / (n_total + 2) of a table
    scaled to about ESC_TABLE_TOTAL; colors share the rest in proportion to
    their weights, each live color keeping at least 1. Colors with weight 0
    (excluded) stay uncodable. The scale doubles as needed so that every live
    color still gets a usable share.
    """
    weights = np.asarray(weights, dtype=np.int64)
    live = int(np.count_nonzero(weights))
    scale = ESC_TABLE_TOTAL
    while live * 2 > scale:
        scale <<= 1

    den = n_total + 2
    esc = max(1, (scale * (n_escape + 1) + den // 2) // den)
    if live:
        esc = min(esc, scale - live)
        mass = scale - esc
        total = int(weights.sum())
        scaled = np.where(weights > 0, np.maximum(1, weights * mass // total), 0)
    else:
        scaled = weights
    return CodingTable(np.append(scaled, esc))
