"""Shared domain types and the fixed-point numeric contract.

All engines agree on two conversions defined here: :func:`zscore_normalize`
(population statistics) and :func:`quantize` (round half away from zero,
then clamp to the signed sample width).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import InvalidParams, ZeroVariance

OverflowMode = Literal["wrap", "saturate"]
Strand = Literal["forward", "reverse"]
EngineName = Literal["float_full", "float_banded", "fixed_banded", "pe_sim"]

ENGINES = ("float_full", "float_banded", "fixed_banded", "pe_sim")

#: Infinity sentinel of the default 32-bit accumulator.
INF_FIXED = 1 << 30


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FixedPointParams:
    """Quantization and accumulator parameters of the fixed-point engines.

    ``accum_bits`` defaults to 32. Narrower accumulators are accepted so that
    genuine accumulator overflow can be provoked: with 16-bit samples and a
    32-bit accumulator a cell cost never exceeds ``M * (2**16 - 1)``.
    """

    scale_factor: int = 32
    sample_bits: int = 16
    accum_bits: int = 32
    overflow_mode: OverflowMode = "wrap"

    def __post_init__(self):
        sf = self.scale_factor
        if not isinstance(sf, (int, np.integer)) or sf < 2 or sf > 2**14 or sf & (sf - 1):
            raise InvalidParams(f"scale_factor must be a power of two in [2, 2^14], got {sf!r}")
        if not 2 <= self.sample_bits <= 16:
            raise InvalidParams(f"sample_bits must be in [2, 16], got {self.sample_bits}")
        if not 8 <= self.accum_bits <= 32:
            raise InvalidParams(f"accum_bits must be in [8, 32], got {self.accum_bits}")
        if self.overflow_mode not in ("wrap", "saturate"):
            raise InvalidParams(f"overflow_mode must be 'wrap' or 'saturate', got {self.overflow_mode!r}")

    @property
    def sample_min(self) -> int:
        return -(1 << (self.sample_bits - 1))

    @property
    def sample_max(self) -> int:
        return (1 << (self.sample_bits - 1)) - 1

    @property
    def accum_min(self) -> int:
        return -(1 << (self.accum_bits - 1))

    @property
    def accum_max(self) -> int:
        return (1 << (self.accum_bits - 1)) - 1

    @property
    def inf(self) -> int:
        """Infinity sentinel: ``2**(accum_bits - 2)``, i.e. ``INF_FIXED`` at 32 bits."""
        return 1 << (self.accum_bits - 2)


@dataclass(frozen=True, eq=False)
class RawRead:
    """One raw nanopore read in DAC units, as stored in a SLOW5 record."""

    read_id: str
    raw: np.ndarray
    digitisation: float
    offset: float
    range_pa: float
    sampling_rate: float
    read_group: int = 0
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        raw = np.asarray(self.raw)
        if raw.ndim != 1 or raw.size == 0:
            raise InvalidParams(f"read {self.read_id}: raw signal must be a non-empty 1-D array")
        if not np.issubdtype(raw.dtype, np.integer):
            raise InvalidParams(f"read {self.read_id}: raw signal must be integer DAC values")
        if not self.digitisation > 0:
            raise InvalidParams(f"read {self.read_id}: digitisation must be > 0")
        if not self.sampling_rate > 0:
            raise InvalidParams(f"read {self.read_id}: sampling_rate must be > 0")
        object.__setattr__(self, "raw", _readonly(raw.astype(np.int16, copy=True)))


@dataclass(frozen=True, eq=False)
class EventQuery:
    read_id: str
    events_normalized: np.ndarray
    events_fixed: np.ndarray
    params: FixedPointParams
    trimmed_prefix: int = 0

    def __post_init__(self):
        norm = _readonly(np.asarray(self.events_normalized, dtype=np.float64).copy())
        fixed = _readonly(np.asarray(self.events_fixed, dtype=np.int16).copy())
        if norm.shape != fixed.shape or norm.ndim != 1:
            raise InvalidParams("events_normalized and events_fixed must be 1-D and equally long")
        object.__setattr__(self, "events_normalized", norm)
        object.__setattr__(self, "events_fixed", fixed)

    @property
    def n_events(self) -> int:
        return int(self.events_fixed.size)

    @classmethod
    def from_normalized(cls, read_id, events_normalized, params, trimmed_prefix=0):
        norm = np.asarray(events_normalized, dtype=np.float64)
        return cls(read_id, norm, quantize(norm, params), params, trimmed_prefix)


@dataclass(frozen=True, eq=False)
class SdtwResult:
    """Outcome of aligning one query against one reference signal.

    ``score`` is a float for the float engines and the raw accumulator value
    (a Python int) for the fixed-point engines. ``start`` and ``path`` are
    only filled in by the full-matrix engine when backtracking is requested.
    """

    position: int
    score: float | int
    engine: EngineName
    strand: Optional[Strand] = None
    overflow: bool = False
    cycles: Optional[int] = None
    start: Optional[int] = None
    path: Optional[np.ndarray] = None


def quantize(value, params: FixedPointParams = FixedPointParams()):
    """Scale by ``params.scale_factor``, round half away from zero, clamp.

    Accepts a scalar (returns ``int``) or an array (returns ``int16`` array).
    """
    scaled = np.abs(np.asarray(value, dtype=np.float64)) * params.scale_factor
    whole = np.floor(scaled)
    # scaled - floor(scaled) is exact, so no double rounding at x.5
    rounded = whole + (scaled - whole >= 0.5)
    out = np.clip(np.copysign(rounded, value), params.sample_min, params.sample_max)
    if np.ndim(out) == 0:
        return int(out)
    return out.astype(np.int16)


def dequantize(values, params: FixedPointParams = FixedPointParams()) -> np.ndarray:
    return np.asarray(values, dtype=np.float64) / params.scale_factor


def zscore_normalize(samples) -> np.ndarray:
    """Return ``(x - mean) / std`` using the population standard deviation.

    Raises :class:`ZeroVariance` for flat input; such a read carries no
    usable signal and has to be discarded by the caller.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise InvalidParams("z-score normalization needs a 1-D sequence of length >= 2")
    mean = x.mean()
    std = x.std()
    # flat input can still give std ~1e-17 from the rounded mean
    if not std > 0 or np.all(x == x[0]):
        raise ZeroVariance("cannot z-score a sequence with zero variance")
    return (x - mean) / std
