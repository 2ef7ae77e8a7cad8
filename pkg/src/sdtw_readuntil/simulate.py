"""Synthetic reads with known origin, and the scaling-factor accuracy sweep.

Reads are built at event level: a random stretch of one strand's model
levels, optionally with duplicated events (time warping) and Gaussian level
noise, behind a run of random adaptor events. Each event is then held for a
few samples and written as DAC counts. Adjacent events are kept at least one
DAC unit apart so that every synthesized event is recoverable by the
segmenter, which makes the recorded truth exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, TextIO, Tuple

import numpy as np

from .core import EventQuery, FixedPointParams, RawRead
from .errors import FormatError, InvalidParams, SdtwError
from .events import EventDetectionParams, preprocess_read
from .mapping import map_read
from .refindex import PoreModel, SignalIndex, reverse_complement, synthesize_signal

# R9.4-like acquisition constants
DIGITISATION = 8192.0
RANGE_PA = 1443.030273
OFFSET = 13.0
SAMPLING_RATE = 4000.0


class TruthRecord(NamedTuple):
    read_id: str
    ref_name: str
    strand: str
    position: int  # end of the query in the strand's signal coordinates

    def position_bases(self, k: int) -> int:
        return self.position + k - 1


@dataclass(frozen=True)
class SimParams:
    n_reads: int = 100
    noise_sigma: float = 0.0  # level noise, in units of the pore model's level std
    dup_prob: float = 0.0  # chance that a reference event is seen twice
    min_event_samples: int = 6
    max_event_samples: int = 14
    extra_events: Tuple[int, int] = (50, 200)  # genomic events beyond the query, uniform range
    sample_noise: float = 0.0  # per-sample Gaussian noise in pA

    def __post_init__(self):
        if self.n_reads < 0 or self.noise_sigma < 0 or self.sample_noise < 0:
            raise InvalidParams("n_reads, noise_sigma and sample_noise must be >= 0")
        if not 0 <= self.dup_prob < 1:
            raise InvalidParams("dup_prob must be in [0, 1)")
        if not 3 <= self.min_event_samples <= self.max_event_samples:
            raise InvalidParams("need 3 <= min_event_samples <= max_event_samples")


def _to_dac(pa: np.ndarray) -> np.ndarray:
    return np.rint(pa * DIGITISATION / RANGE_PA - OFFSET).astype(np.int64)


def simulate_reads(references: Sequence[Tuple[str, str]], model: PoreModel, seed: int = 0,
                   sim: SimParams = SimParams(),
                   events: EventDetectionParams = EventDetectionParams()):
    """Generate ``sim.n_reads`` reads from ``references`` (``[(name, bases)]``).

    Returns ``(reads, truth)``. The truth position is the reference signal
    index of the last event of the query window (events
    ``[prefix_trim, prefix_trim + query_events)`` of the read).
    """
    rng = np.random.default_rng(seed)
    strands = []
    for name, bases in references:
        strands.append((name, "forward", synthesize_signal(bases, model)))
        strands.append((name, "reverse", synthesize_signal(reverse_complement(bases), model)))
    level_mean = float(model.level_mean.mean())
    level_sd = float(model.level_mean.std())
    lo_extra, hi_extra = sim.extra_events
    need = events.query_events + lo_extra
    if min(s[2].size for s in strands) < need:
        raise InvalidParams(f"every reference must yield at least {need} k-mers")
    weights = np.array([s[2].size for s in strands], dtype=np.float64)
    weights /= weights.sum()

    reads, truth = [], []
    for n in range(sim.n_reads):
        name, strand, signal = strands[rng.choice(len(strands), p=weights)]
        length = min(signal.size, events.query_events + int(rng.integers(lo_extra, hi_extra + 1)))
        start = int(rng.integers(0, signal.size - length + 1))
        positions = np.arange(start, start + length)
        repeats = 1 + (rng.random(length) < sim.dup_prob)
        positions = np.repeat(positions, repeats)
        levels = signal[positions] + rng.normal(0.0, sim.noise_sigma * level_sd, positions.size)
        adaptor = rng.normal(level_mean, level_sd, events.prefix_trim)
        dac = _to_dac(np.concatenate((adaptor, levels)))
        for i in range(1, dac.size):
            if dac[i] == dac[i - 1]:
                dac[i] += 1
        widths = rng.integers(sim.min_event_samples, sim.max_event_samples + 1, dac.size)
        raw = np.repeat(dac, widths)
        if sim.sample_noise > 0:
            raw = raw + np.rint(rng.normal(0.0, sim.sample_noise * DIGITISATION / RANGE_PA, raw.size)).astype(np.int64)
        read_id = f"sim_{n:07d}"
        reads.append(RawRead(read_id, np.clip(raw, -32768, 32767), DIGITISATION, OFFSET, RANGE_PA, SAMPLING_RATE))
        truth.append(TruthRecord(read_id, name, strand, int(positions[events.query_events - 1])))
    return reads, truth


def write_truth(truth: Iterable[TruthRecord], sink: TextIO):
    sink.write("#read_id\tref\tstrand\tposition\n")
    for t in truth:
        sink.write(f"{t.read_id}\t{t.ref_name}\t{'+' if t.strand == 'forward' else '-'}\t{t.position}\n")


def read_truth(stream: TextIO) -> List[TruthRecord]:
    out = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 4 or fields[2] not in "+-":
            raise FormatError("expected read_id, ref, strand, position", lineno)
        out.append(TruthRecord(fields[0], fields[1], "forward" if fields[2] == "+" else "reverse", int(fields[3])))
    return out


@dataclass(frozen=True)
class ScalingRow:
    scale_factor: int
    agreement_pct: float
    n_reads: int
    n_overflow: int


def _agree(a, b, tolerance):
    return a.ref_name == b.ref_name and a.strand == b.strand and abs(a.position - b.position) <= tolerance


def eval_scaling(reads: Iterable[RawRead], indexes: Sequence[SignalIndex], sf_list: Sequence[int],
                 accum_bits: int = 32, overflow_mode: str = "wrap", tolerance: int = 5,
                 events: EventDetectionParams = EventDetectionParams()) -> List[ScalingRow]:
    """Agreement of the fixed-point engine with the float engine per scale factor.

    A read agrees when the fixed-point mapping lands on the same reference
    and strand within ``tolerance`` signal samples of the float mapping.
    Reads that fail pre-processing are left out.
    """
    queries = []
    for read in reads:
        try:
            queries.append(preprocess_read(read, events))
        except SdtwError:
            continue
    truth = [map_read(q, indexes, "float_banded") for q in queries]
    rows = []
    for sf in sf_list:
        fp = FixedPointParams(int(sf), accum_bits=accum_bits, overflow_mode=overflow_mode)
        fixed_idx = [i.with_params(fp) for i in indexes]
        agree = overflow = 0
        for q, t in zip(queries, truth):
            rec = map_read(EventQuery.from_normalized(q.read_id, q.events_normalized, fp, q.trimmed_prefix),
                           fixed_idx, "fixed_banded")
            agree += _agree(rec, t, tolerance)
            overflow += rec.overflow
        pct = 100.0 * agree / len(queries) if queries else 0.0
        rows.append(ScalingRow(int(sf), pct, len(queries), overflow))
    return rows


def position_accuracy(records, truth: Sequence[TruthRecord], tolerance: int = 5) -> float:
    """Percent of reads mapped to the true reference/strand within ``tolerance`` samples."""
    by_id = {t.read_id: t for t in truth}
    hits = 0
    for r in records:
        t = by_id.get(r.read_id)
        hits += t is not None and r.mapped and _agree(r, t, tolerance)
    return 100.0 * hits / len(truth) if truth else 0.0
