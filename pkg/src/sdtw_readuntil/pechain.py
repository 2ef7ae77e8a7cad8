"""Cycle-stepped model of a systolic processing-element chain for sDTW.

PE ``i`` (1-based) holds query sample ``x_i``. Reference samples enter PE 1
one per cycle and move one PE down the chain every cycle, so at cycle ``t``
PE ``i`` sees ``y_j`` with ``j = t - i + 1`` and computes cell ``(i, j)``. The
cells computed in one cycle form an anti-diagonal of the cost matrix.

Two register arrays feed the recurrence::

    L1[i] = output of PE i in the previous cycle       -> w  for PE i,   n  for PE i+1
    L2[i] = output of PE i two cycles ago              -> nw for PE i+1

Each cycle ``L1`` moves into ``L2`` and the new outputs into ``L1``. When the
query is shorter than the chain, the trailing PEs only forward their
predecessor's output (one cycle of delay each), so the best-score comparator
always sits at the end of the chain and a full search takes
``N + chain_length - 1`` cycles regardless of the query length.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from .core import FixedPointParams, SdtwResult
from .errors import EmptyReference, InvalidParams, QueryTooLong, SimulationFinished

DEFAULT_CHAIN_LENGTH = 250
DEFAULT_CLOCK_HZ = 100e6


@dataclass
class PeChainTrace:
    """Per-cycle observations; one entry per simulated cycle."""

    cycle: list = field(default_factory=list)
    active_pes: list = field(default_factory=list)
    wavefront_head: list = field(default_factory=list)
    best_score: list = field(default_factory=list)
    best_position: list = field(default_factory=list)

    def __len__(self):
        return len(self.cycle)

    def record(self, state: "ChainState"):
        lo, hi = state.computed_rows
        self.cycle.append(state.cycle)
        self.active_pes.append(max(0, hi - lo + 1))
        self.wavefront_head.append(hi if hi >= lo else 0)
        self.best_score.append(state.best_score if state.best_position >= 0 else None)
        self.best_position.append(state.best_position)

    def write_tsv(self, sink: TextIO):
        sink.write("#cycle\tactive_pes\tbest_score\tbest_position\n")
        for t, a, s, p in zip(self.cycle, self.active_pes, self.best_score, self.best_position):
            sink.write(f"{t}\t{a}\t{'*' if s is None else s}\t{p}\n")


@dataclass(eq=False)
class ChainState:
    query: np.ndarray  # latched query samples, padded with zeros to chain length
    reference: np.ndarray
    query_length: int
    params: FixedPointParams
    ref_regs: np.ndarray  # reference sample held by each PE
    L1: np.ndarray
    L2: np.ndarray
    cycle: int = 0
    best_score: int = 0
    best_position: int = -1
    overflow: bool = False
    computed_rows: tuple = (1, 0)  # 1-based PE range computed in the last cycle (empty if lo > hi)

    @property
    def chain_length(self) -> int:
        return self.query.size

    @property
    def total_cycles(self) -> int:
        return self.reference.size + self.chain_length - 1

    @property
    def finished(self) -> bool:
        return self.cycle >= self.total_cycles

    def active(self, t: Optional[int] = None) -> np.ndarray:
        """Mask of PEs computing a real cell at cycle ``t`` (default: the last cycle)."""
        t = self.cycle if t is None else t
        i = np.arange(1, self.chain_length + 1)
        return (i <= self.query_length) & (i <= t) & (t <= self.reference.size + i - 1)

    def computed_cells(self):
        """``(i, j)`` pairs (1-based) computed in the last cycle."""
        lo, hi = self.computed_rows
        return [(i, self.cycle - i + 1) for i in range(lo, hi + 1)]


def load(query, reference, params: FixedPointParams = FixedPointParams(),
         chain_length: int = DEFAULT_CHAIN_LENGTH) -> ChainState:
    """Latch ``query`` into the chain and position the reference stream at sample 0."""
    q = np.asarray(query)
    r = np.asarray(reference)
    if chain_length < 1:
        raise InvalidParams("chain_length must be >= 1")
    if r.size == 0:
        raise EmptyReference("reference must be non-empty")
    if q.size == 0:
        raise InvalidParams("query must be non-empty")
    if q.size > chain_length:
        raise QueryTooLong(f"query has {q.size} samples but the chain has {chain_length} PEs")
    for name, a in (("query", q), ("reference", r)):
        if not np.issubdtype(a.dtype, np.integer):
            raise InvalidParams(f"{name} must hold quantized integer samples")
        if a.min() < params.sample_min or a.max() > params.sample_max:
            raise InvalidParams(f"{name} samples exceed the signed {params.sample_bits}-bit range")
    latched = np.zeros(chain_length, dtype=np.int64)
    latched[: q.size] = q
    return ChainState(
        query=latched,
        reference=r.astype(np.int64),
        query_length=int(q.size),
        params=params,
        ref_regs=np.zeros(chain_length, dtype=np.int64),
        L1=np.full(chain_length, params.inf, dtype=np.int64),
        L2=np.full(chain_length, params.inf, dtype=np.int64),
        best_score=params.accum_max + 1,
    )


def step(state: ChainState) -> ChainState:
    """Advance the chain by one clock cycle (in place) and return the state."""
    if state.finished:
        raise SimulationFinished(f"all {state.total_cycles} cycles already simulated")
    p = state.params
    M = state.query_length
    N = state.reference.size
    t = state.cycle + 1

    # reference stream moves one PE down the chain
    state.ref_regs[1:] = state.ref_regs[:-1]
    state.ref_regs[0] = state.reference[t - 1] if t <= N else 0

    new = np.full(state.chain_length, p.inf, dtype=np.int64)
    lo = max(1, t - N + 1)
    hi = min(M, t)
    if lo <= hi:
        rows = np.arange(lo - 1, hi)  # 0-based PE indices
        prev = rows - 1
        first = rows == 0
        n = np.where(first, 0, state.L1[np.maximum(prev, 0)])
        nw = np.where(first, 0, state.L2[np.maximum(prev, 0)])
        w = state.L1[rows]
        c = np.abs(state.query[rows] - state.ref_regs[rows]) + np.minimum(np.minimum(n, nw), w)
        out_of_range = (c > p.accum_max) | (c < p.accum_min)
        if out_of_range.any():
            state.overflow = True
            if p.overflow_mode == "saturate":
                c = np.clip(c, p.accum_min, p.accum_max)
            else:
                span = p.accum_max - p.accum_min + 1
                c = (c - p.accum_min) % span + p.accum_min
        new[rows] = c
    # padded PEs are pure delay stages
    if M < state.chain_length:
        new[M:] = state.L1[M - 1 : state.chain_length - 1]

    state.L2 = state.L1
    state.L1 = new
    state.cycle = t
    state.computed_rows = (lo, hi)

    column = t - state.chain_length + 1  # 1-based column leaving the chain this cycle
    if 1 <= column <= N:
        tail = int(new[-1])
        if tail < state.best_score:
            state.best_score = tail
            state.best_position = column - 1
    return state


def run_to_completion(state: ChainState, trace: bool = False):
    """Step until the last column has left the chain.

    Returns ``(result, trace)``; ``trace`` is ``None`` unless requested.
    """
    log = PeChainTrace() if trace else None
    while not state.finished:
        step(state)
        if log is not None:
            log.record(state)
    result = SdtwResult(
        position=state.best_position,
        score=state.best_score,
        engine="pe_sim",
        overflow=state.overflow,
        cycles=state.cycle,
    )
    return result, log


def simulate(query, reference, params: FixedPointParams = FixedPointParams(),
             chain_length: int = DEFAULT_CHAIN_LENGTH, trace: bool = False):
    """Convenience wrapper: :func:`load` followed by :func:`run_to_completion`."""
    return run_to_completion(load(query, reference, params, chain_length), trace=trace)


def estimate_latency(cycles: int, clock_hz: float = DEFAULT_CLOCK_HZ, setup_s: float = 0.0) -> float:
    """Seconds needed for ``cycles`` at ``clock_hz`` plus a fixed per-query setup time."""
    if not clock_hz > 0:
        raise InvalidParams("clock_hz must be > 0")
    if cycles < 0 or setup_s < 0:
        raise InvalidParams("cycles and setup_s must be non-negative")
    return cycles / clock_hz + setup_s
