"""Raw signal to event-level query.

Segmentation uses the two-window t-statistic detector common in nanopore
tooling: for each window length ``w`` a Welch-style statistic compares the
``w`` samples before and after every position, and two peak detectors (short
and long window) turn local maxima above their thresholds into event
boundaries. The short detector masks the long one while it is tracking a
peak that already exceeds its threshold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence

import numpy as np
from numba import njit

from .core import EventQuery, FixedPointParams, RawRead, quantize, zscore_normalize
from .errors import InvalidParams, NotEnoughEvents, SignalTooShort

# smallest positive normal float32; floors the pooled variance
_ETA = float(np.finfo(np.float32).tiny)


@dataclass(frozen=True)
class EventDetectionParams:
    window1: int = 3
    window2: int = 6
    threshold1: float = 1.4
    threshold2: float = 9.0
    peak_height: float = 0.2
    prefix_trim: int = 50
    query_events: int = 250

    def __post_init__(self):
        if not 0 < self.window1 < self.window2:
            raise InvalidParams("need 0 < window1 < window2")
        if not (self.threshold1 > 0 and self.threshold2 > 0 and self.peak_height > 0):
            raise InvalidParams("thresholds and peak_height must be > 0")
        if self.prefix_trim < 0 or self.query_events < 1:
            raise InvalidParams("need prefix_trim >= 0 and query_events >= 1")


class Event(NamedTuple):
    start: int
    length: int
    mean: float
    stdv: float


def dac_to_pa(read: RawRead) -> np.ndarray:
    """Convert DAC counts to picoamperes: ``(raw + offset) * range / digitisation``."""
    return (read.raw.astype(np.float64) + read.offset) * (read.range_pa / read.digitisation)


def _window_sums(x: np.ndarray, w: int) -> np.ndarray:
    # explicit left-to-right sums: identical windows give bit-identical sums,
    # which keeps the statistic exactly 0 on flat stretches
    n = x.size - w + 1
    s = x[:n].copy()
    for o in range(1, w):
        s += x[o : o + n]
    return s


def tstat(signal, w: int) -> np.ndarray:
    """Two-sample t-statistic between ``signal[i-w:i]`` and ``signal[i:i+w]``.

    Defined for ``w <= i <= len - w``; zero elsewhere.
    """
    x = np.asarray(signal, dtype=np.float64)
    n = x.size
    out = np.zeros(n)
    if n < 2 * w or w < 2:
        return out
    s = _window_sums(x, w)
    sq = _window_sums(x * x, w)
    i = np.arange(w, n - w + 1)
    mean1 = s[i - w] / w
    mean2 = s[i] / w
    var = sq[i - w] / w - mean1 * mean1 + sq[i] / w - mean2 * mean2
    var = np.maximum(var, _ETA)
    out[i] = np.abs(mean2 - mean1) / np.sqrt(var / w)
    return out


@njit(cache=True, nogil=True)
def _short_long_peaks(t_short, t_long, w_short, w_long, thr_short, thr_long, peak_height):
    n = t_short.size
    large = 1e300
    sig = (t_short, t_long)
    window = (w_short, w_long)
    threshold = (thr_short, thr_long)
    masked_to = np.zeros(2, np.int64)
    peak_pos = np.full(2, -1, np.int64)
    peak_val = np.full(2, large)
    valid = np.zeros(2, np.bool_)
    peaks = np.empty(n, np.int64)
    count = 0
    for i in range(n):
        for k in range(2):
            if masked_to[k] >= i:
                continue
            current = sig[k][i]
            if peak_pos[k] == -1:
                # no candidate yet: follow the signal down, open a peak on a clear rise
                if current < peak_val[k]:
                    peak_val[k] = current
                elif current - peak_val[k] > peak_height:
                    peak_val[k] = current
                    peak_pos[k] = i
            else:
                if current > peak_val[k]:
                    peak_val[k] = current
                    peak_pos[k] = i
                if k == 0 and peak_val[0] > threshold[0]:
                    masked_to[1] = peak_pos[0] + window[0]
                    peak_pos[1] = -1
                    peak_val[1] = large
                    valid[1] = False
                if peak_val[k] - current > peak_height and peak_val[k] > threshold[k]:
                    valid[k] = True
                if valid[k] and (i - peak_pos[k]) > window[k] // 2:
                    peaks[count] = peak_pos[k]
                    count += 1
                    peak_pos[k] = -1
                    peak_val[k] = current
                    valid[k] = False
    return peaks[:count]


def event_boundaries(pa, params: EventDetectionParams = EventDetectionParams()) -> np.ndarray:
    """Sorted sample indices (excluding 0) where a new event starts."""
    x = np.asarray(pa, dtype=np.float64)
    if x.size <= 2 * params.window2:
        raise SignalTooShort(f"signal of {x.size} samples needs more than {2 * params.window2}")
    peaks = _short_long_peaks(
        tstat(x, params.window1), tstat(x, params.window2),
        params.window1, params.window2, params.threshold1, params.threshold2, params.peak_height,
    )
    peaks = np.unique(peaks)
    return peaks[(peaks > 0) & (peaks < x.size)]


def detect_events(pa, params: EventDetectionParams = EventDetectionParams()) -> List[Event]:
    """Segment a pA signal into consecutive, non-overlapping events covering it."""
    x = np.asarray(pa, dtype=np.float64)
    starts = np.concatenate(([0], event_boundaries(x, params)))
    lengths = np.diff(np.append(starts, x.size))
    means = np.add.reduceat(x, starts) / lengths
    sq = np.add.reduceat(x * x, starts) / lengths
    stdvs = np.sqrt(np.maximum(sq - means * means, 0.0))
    return [Event(int(s), int(n), float(m), float(sd))
            for s, n, m, sd in zip(starts, lengths, means, stdvs)]


def extract_query(events: Sequence[Event], params: EventDetectionParams = EventDetectionParams(),
                  fp: FixedPointParams = FixedPointParams(), read_id: str = "") -> EventQuery:
    """Drop the adaptor prefix, keep the next ``query_events`` event means, z-score, quantize.

    Raises :class:`NotEnoughEvents` when the read is still too short; in a
    streaming setting the caller would wait for more signal.
    """
    need = params.prefix_trim + params.query_events
    if len(events) < need:
        raise NotEnoughEvents(f"read {read_id!r}: {len(events)} events, need {need}")
    means = np.array([e.mean for e in events[params.prefix_trim : need]])
    norm = zscore_normalize(means)
    return EventQuery(read_id, norm, quantize(norm, fp), fp, params.prefix_trim)


def preprocess_read(read: RawRead, params: EventDetectionParams = EventDetectionParams(),
                    fp: FixedPointParams = FixedPointParams()) -> EventQuery:
    """Full software pre-processing of one read: pA conversion, events, query."""
    return extract_query(detect_events(dac_to_pa(read), params), params, fp, read.read_id)
