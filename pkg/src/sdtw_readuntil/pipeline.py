"""Batch scheduler: one reader, a pool of workers, one ordered writer.

Reads are pulled from the input iterator one batch at a time, mapped on a
thread pool and handed back in input order before the next batch is read,
so at most ``batch_size`` reads are resident and the output never depends on
worker scheduling. The numba kernels release the GIL, so alignment runs in
parallel across threads.
"""
from __future__ import annotations

import itertools
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence

from .core import FixedPointParams, RawRead
from .errors import InvalidParams, NotEnoughEvents, SdtwError, SignalTooShort
from .events import EventDetectionParams, preprocess_read
from .mapping import MappingRecord, SelectionPolicy, engine_name, map_read
from .pechain import DEFAULT_CHAIN_LENGTH
from .refindex import SignalIndex


@dataclass
class RunSummary:
    reads: int = 0
    errors: int = 0
    too_short: int = 0
    decisions: Counter = field(default_factory=Counter)
    t_preprocess: float = 0.0
    t_sdtw: float = 0.0
    t_other: float = 0.0
    wall: float = 0.0

    def stage_percentages(self) -> dict:
        total = self.t_preprocess + self.t_sdtw + self.t_other
        if total <= 0:
            return {"preprocess": 0.0, "sdtw": 0.0, "other": 0.0}
        return {
            "preprocess": 100.0 * self.t_preprocess / total,
            "sdtw": 100.0 * self.t_sdtw / total,
            "other": 100.0 * self.t_other / total,
        }

    @property
    def reads_per_second(self) -> float:
        return self.reads / self.wall if self.wall > 0 else 0.0

    def lines(self) -> List[str]:
        pct = self.stage_percentages()
        out = [
            f"reads\t{self.reads}",
            f"reads_per_second\t{self.reads_per_second:.2f}",
            f"errors\t{self.errors}",
            f"too_short\t{self.too_short}",
        ]
        out += [f"decision_{d}\t{self.decisions.get(d, 0)}" for d in ("accept", "reject", "unmapped")]
        out += [f"time_pct_{k}\t{v:.2f}" for k, v in pct.items()]
        return out


class BatchMapper:
    """Map raw reads against shared, read-only indexes.

    Parameters
    ----------
    indexes
        Reference indexes; when a fixed-point engine is selected they are
        re-quantized to ``fixed_point`` if their parameters differ.
    engine
        ``float-full``, ``float-banded``, ``fixed`` or ``pe-sim`` (or the
        internal engine names).
    """

    def __init__(self, indexes: Sequence[SignalIndex], engine: str = "fixed",
                 fixed_point: Optional[FixedPointParams] = None,
                 events: EventDetectionParams = EventDetectionParams(),
                 policy: SelectionPolicy = SelectionPolicy(), threads: int = 1,
                 batch_size: int = 512, chain_length: int = DEFAULT_CHAIN_LENGTH):
        if threads < 1 or batch_size < 1:
            raise InvalidParams("threads and batch_size must be >= 1")
        if not indexes:
            raise InvalidParams("at least one index is required")
        self.engine = engine_name(engine)
        fp = fixed_point or indexes[0].params
        self.indexes = [i if i.params == fp else i.with_params(fp) for i in indexes]
        self.fixed_point = fp
        self.events = events
        self.policy = policy
        policy.validate_against(self.indexes)
        self.threads = threads
        self.batch_size = batch_size
        self.chain_length = chain_length
        self.summary = RunSummary()

    def map_one(self, read: RawRead):
        """Map a single read; returns ``(record, t_preprocess, t_sdtw, status)``."""
        t0 = time.perf_counter()
        try:
            query = preprocess_read(read, self.events, self.fixed_point)
        except (SignalTooShort, NotEnoughEvents):
            return MappingRecord(read.read_id, self.engine, note="too_short"), time.perf_counter() - t0, 0.0, "too_short"
        except SdtwError as exc:
            return MappingRecord(read.read_id, self.engine, note=f"error: {exc}"), time.perf_counter() - t0, 0.0, "error"
        t1 = time.perf_counter()
        try:
            record = map_read(query, self.indexes, self.engine, self.policy, self.chain_length)
            status = "ok"
        except SdtwError as exc:
            record = MappingRecord(read.read_id, self.engine, note=f"error: {exc}")
            status = "error"
        return record, t1 - t0, time.perf_counter() - t1, status

    def _account(self, results):
        s = self.summary
        for record, t_pre, t_dtw, status in results:
            s.reads += 1
            s.t_preprocess += t_pre
            s.t_sdtw += t_dtw
            s.errors += status == "error"
            s.too_short += status == "too_short"
            s.decisions[record.decision] += 1
            yield record

    def run(self, reads: Iterable[RawRead]) -> Iterator[MappingRecord]:
        """Yield one record per input read, in input order.

        Time spent pulling reads from ``reads`` and in the consumer between
        yields is booked as "other" in :attr:`summary`.
        """
        start = time.perf_counter()
        it = iter(reads)
        pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None
        try:
            while True:
                t0 = time.perf_counter()
                batch = list(itertools.islice(it, self.batch_size))
                self.summary.t_other += time.perf_counter() - t0
                if not batch:
                    break
                results = pool.map(self.map_one, batch) if pool else map(self.map_one, batch)
                for record in self._account(list(results)):
                    t0 = time.perf_counter()
                    yield record
                    self.summary.t_other += time.perf_counter() - t0
        finally:
            if pool:
                pool.shutdown()
            self.summary.wall += time.perf_counter() - start
