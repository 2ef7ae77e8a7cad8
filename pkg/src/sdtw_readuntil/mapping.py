"""Per-read mapping against both strands, MAPQ and the selection decision."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Union

from .core import EventQuery, SdtwResult
from .errors import InvalidParams, NegativeScore, ParamsMismatch
from .pechain import DEFAULT_CHAIN_LENGTH, simulate
from .refindex import SignalIndex
from .sdtw import sdtw_banded_fixed, sdtw_banded_float, sdtw_full

MAX_MAPQ = 60
DECISIONS = ("accept", "reject", "unmapped")

#: command-line spelling -> engine name
ENGINE_ALIASES = {
    "float-full": "float_full",
    "float-banded": "float_banded",
    "fixed": "fixed_banded",
    "pe-sim": "pe_sim",
}
FIXED_ENGINES = ("fixed_banded", "pe_sim")


def engine_name(engine: str) -> str:
    name = ENGINE_ALIASES.get(engine, engine)
    if name not in ENGINE_ALIASES.values():
        raise InvalidParams(f"unknown engine {engine!r}")
    return name


@dataclass(frozen=True)
class MappingRecord:
    read_id: str
    engine: str
    strand: Optional[str] = None
    position: Optional[int] = None  # end index in the strand's signal coordinates
    position_bases: Optional[int] = None  # position + k - 1, strand base coordinates
    score: Optional[float] = None
    second_best_score: Optional[float] = None
    mapq: int = 0
    decision: str = "unmapped"
    overflow: bool = False
    ref_name: Optional[str] = None
    ref_bases: Optional[int] = None
    note: str = ""

    @property
    def mapped(self) -> bool:
        return self.strand is not None

    @property
    def forward_position_bases(self) -> Optional[int]:
        """End position translated to forward-strand base coordinates."""
        if not self.mapped:
            return None
        if self.strand == "forward":
            return self.position_bases
        return self.ref_bases - 1 - self.position_bases


@dataclass(frozen=True)
class SelectionPolicy:
    """Read Until selection rule.

    ``target_regions`` maps a reference name to half-open ``(start, end)``
    base intervals in forward coordinates. ``None`` treats every reference as
    entirely on target.
    """

    mode: str = "target_enrichment"
    target_regions: Optional[dict] = None
    mapq_threshold: int = 20

    def __post_init__(self):
        if self.mode not in ("target_enrichment", "target_depletion"):
            raise InvalidParams(f"unknown selection mode {self.mode!r}")
        if not 0 <= self.mapq_threshold <= MAX_MAPQ:
            raise InvalidParams("mapq_threshold must be within [0, 60]")
        for name, intervals in (self.target_regions or {}).items():
            for start, end in intervals:
                if not 0 <= start < end:
                    raise InvalidParams(f"bad target interval {name}:{start}-{end}")

    def validate_against(self, indexes: Iterable[SignalIndex]):
        lengths = {i.name: i.base_length for i in indexes}
        for name, intervals in (self.target_regions or {}).items():
            if name not in lengths:
                raise InvalidParams(f"target reference {name!r} is not in the index")
            for start, end in intervals:
                if end > lengths[name]:
                    raise InvalidParams(f"target {name}:{start}-{end} exceeds reference length {lengths[name]}")

    def on_target(self, ref_name: str, base_position: int) -> bool:
        if self.target_regions is None:
            return True
        return any(s <= base_position < e for s, e in self.target_regions.get(ref_name, ()))


def parse_targets(text: str) -> dict:
    """Parse ``name:start-end[,name:start-end...]`` into ``{name: [(start, end)]}``."""
    regions: dict = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, span = item.rpartition(":")
        start, dash, end = span.partition("-")
        if not sep or not dash or not name:
            raise InvalidParams(f"bad target {item!r}, expected name:start-end")
        try:
            regions.setdefault(name, []).append((int(start), int(end)))
        except ValueError:
            raise InvalidParams(f"bad target {item!r}, expected integer coordinates") from None
    return regions


def compute_mapq(best: float, second: float) -> int:
    """``round(60 * (second - best) / second)`` clamped to ``[0, 60]``.

    Scores must share units (fixed-point scores divided by the scale factor)
    and satisfy ``0 <= best <= second``.
    """
    if best < 0 or second < 0:
        raise NegativeScore(f"scores must be >= 0, got best={best}, second={second}")
    if best > second:
        raise InvalidParams(f"best score {best} exceeds second-best {second}")
    if second == 0:
        return 0
    q = math.floor(MAX_MAPQ * (second - best) / second + 0.5)
    return max(0, min(MAX_MAPQ, q))


def decide(record: MappingRecord, policy: SelectionPolicy = SelectionPolicy()) -> str:
    """Three-way decision: ``accept``, ``reject`` (eject the read) or ``unmapped``."""
    if not record.mapped or record.overflow or record.mapq < policy.mapq_threshold:
        return "unmapped"
    inside = policy.on_target(record.ref_name, record.forward_position_bases)
    if policy.mode == "target_enrichment":
        return "accept" if inside else "reject"
    return "reject" if inside else "accept"


def align(query: EventQuery, index: SignalIndex, strand: str, engine: str,
          chain_length: int = DEFAULT_CHAIN_LENGTH) -> SdtwResult:
    """Run one engine on one strand of ``index``."""
    engine = engine_name(engine)
    if engine == "float_full":
        res = sdtw_full(query.events_normalized, index.strand_signal(strand, fixed=False))
    elif engine == "float_banded":
        res = sdtw_banded_float(query.events_normalized, index.strand_signal(strand, fixed=False))
    else:
        if query.params != index.params:
            raise ParamsMismatch(f"query params {query.params} differ from index params {index.params}")
        ref = index.strand_signal(strand, fixed=True)
        if engine == "fixed_banded":
            res = sdtw_banded_fixed(query.events_fixed, ref, index.params)
        else:
            res, _ = simulate(query.events_fixed, ref, index.params, chain_length)
    return replace(res, strand=strand)


def map_read(query: EventQuery, indexes: Union[SignalIndex, Sequence[SignalIndex]],
             engine: str = "float_banded", policy: Optional[SelectionPolicy] = None,
             chain_length: int = DEFAULT_CHAIN_LENGTH) -> MappingRecord:
    """Map ``query`` against both strands of every index and decide.

    The best candidate is the lowest score (first one wins ties, forward
    before reverse); the second-best score is the lowest among the others.
    """
    if isinstance(indexes, SignalIndex):
        indexes = [indexes]
    engine = engine_name(engine)
    candidates = []
    for idx in indexes:
        for strand in ("forward", "reverse"):
            candidates.append((align(query, idx, strand, engine, chain_length), idx))
    best_i = min(range(len(candidates)), key=lambda i: candidates[i][0].score)
    best, idx = candidates[best_i]
    others = [c[0].score for i, c in enumerate(candidates) if i != best_i]
    second = min(others)
    overflow = any(c[0].overflow for c in candidates)
    scale = idx.params.scale_factor if engine in FIXED_ENGINES else 1
    mapq = 0 if overflow else compute_mapq(best.score / scale, second / scale)
    record = MappingRecord(
        read_id=query.read_id,
        engine=engine,
        strand=best.strand,
        position=best.position,
        position_bases=best.position + idx.k - 1,
        score=best.score,
        second_best_score=second,
        mapq=mapq,
        overflow=overflow,
        ref_name=idx.name,
        ref_bases=idx.base_length,
    )
    return replace(record, decision=decide(record, policy or SelectionPolicy()))
