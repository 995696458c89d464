"""
Codec configuration.

Values come from (lowest to highest priority) built-in defaults, environment
variables (optionally loaded from a .env file), and explicit overrides such as
CLI flags. On decode the configuration stored in the bitstream header wins.
"""

import os
from dataclasses import dataclass, replace
from typing import Optional

from .errors import BitstreamError

TOTAL_MAX_LOG2_RANGE = (8, 24)
CTX_CAP_LOG2_RANGE = (4, 62)


def _env_flag(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")


@dataclass(frozen=True)
class CodecConfig:
    """
    Switches and constants shared by encoder and decoder.

    Attributes:
        enable_stage3_pruning: Adaptive-range residual coding (in-range /
            out-of-range / case-3 histograms). Off = every residual uses MAPc
            with a single histogram.
        enable_escape_context_model: Condition the palette escape on the 64
            neighborhood new-color contexts. Off = condition on similarity s.
        similarity_tolerance: Component tolerance for pattern matching; 0 means
            exact matching.
        exclude_stage1_colors: Drop colors already offered in Stage 1 from the
            palette distribution.
        total_max_log2: Adaptive frequency tables are halved when their total
            would exceed 2**total_max_log2.
        ctx_cap_log2: Binary decision counters are halved when their total
            would exceed 2**ctx_cap_log2.
        debug_checksums: Record model-state checksums at every row boundary.
            Runtime only; never written to the bitstream.
    """

    enable_stage3_pruning: bool = True
    enable_escape_context_model: bool = True
    similarity_tolerance: int = 0
    exclude_stage1_colors: bool = False
    total_max_log2: int = 16
    ctx_cap_log2: int = 10
    debug_checksums: bool = False

    def __post_init__(self):
        self.validate()

    @property
    def total_max(self) -> int:
        return 1 << self.total_max_log2

    @property
    def ctx_cap(self) -> int:
        return 1 << self.ctx_cap_log2

    @property
    def flags(self) -> int:
        """Feature switches packed the way the header stores them."""
        return (
            (1 if self.enable_stage3_pruning else 0)
            | (2 if self.enable_escape_context_model else 0)
            | (4 if self.exclude_stage1_colors else 0)
        )

    @property
    def label(self) -> str:
        """Short name used by the bench for the four-way comparison."""
        if self.enable_stage3_pruning and self.enable_escape_context_model:
            return 'both'
        if self.enable_escape_context_model:
            return 'stage2_only'
        if self.enable_stage3_pruning:
            return 'stage3_only'
        return 'baseline'

    def validate(self) -> None:
        if not 0 <= self.similarity_tolerance <= 0xFFFF:
            raise BitstreamError(f"similarity_tolerance out of range: {self.similarity_tolerance}")
        lo, hi = TOTAL_MAX_LOG2_RANGE
        if not lo <= self.total_max_log2 <= hi:
            raise BitstreamError(f"total_max_log2 must be in [{lo}, {hi}], got {self.total_max_log2}")
        lo, hi = CTX_CAP_LOG2_RANGE
        if not lo <= self.ctx_cap_log2 <= hi:
            raise BitstreamError(f"ctx_cap_log2 must be in [{lo}, {hi}], got {self.ctx_cap_log2}")

    @classmethod
    def from_flags(cls, flags: int, **fields) -> 'CodecConfig':
        if flags & ~0x07:
            raise BitstreamError(f"Unknown config flag bits: {flags:#04x}")
        return cls(
            enable_stage3_pruning=bool(flags & 1),
            enable_escape_context_model=bool(flags & 2),
            exclude_stage1_colors=bool(flags & 4),
            **fields,
        )

    @classmethod
    def from_env(cls, **overrides) -> 'CodecConfig':
        """
        Build a config from SCF_* environment variables.

        Args:
            **overrides: Explicit values (e.g. from CLI flags); None values are ignored.
        """
        base = cls(
            enable_stage3_pruning=_env_flag('SCF_STAGE3_PRUNING', True),
            enable_escape_context_model=_env_flag('SCF_ESCAPE_CTX', True),
            similarity_tolerance=_env_int('SCF_TOLERANCE', 0),
            exclude_stage1_colors=_env_flag('SCF_EXCLUDE_STAGE1', False),
            debug_checksums=_env_flag('SCF_DEBUG_CHECKSUMS', False),
        )
        return base.with_overrides(**overrides)

    def with_overrides(self, **overrides: Optional[object]) -> 'CodecConfig':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def matrix(cls, **fields) -> list:
        """The four feature-flag combinations, baseline first and both last."""
        return [
            cls(enable_stage3_pruning=False, enable_escape_context_model=False, **fields),
            cls(enable_stage3_pruning=False, enable_escape_context_model=True, **fields),
            cls(enable_stage3_pruning=True, enable_escape_context_model=False, **fields),
            cls(enable_stage3_pruning=True, enable_escape_context_model=True, **fields),
        ]
