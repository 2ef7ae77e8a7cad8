"""Signal-domain selective-sequencing read mapping with subsequence DTW.

Synthetic reference construction from a k-mer pore model, event-based query
extraction, floating- and fixed-point subsequence DTW engines, and a
cycle-stepped model of a systolic PE-chain accelerator that is bit-exact with
the fixed-point engine.
"""
from .core import (
    INF_FIXED,
    EventQuery,
    FixedPointParams,
    RawRead,
    SdtwResult,
    dequantize,
    quantize,
    zscore_normalize,
)
from .events import (
    Event,
    EventDetectionParams,
    dac_to_pa,
    detect_events,
    extract_query,
    preprocess_read,
)
from .formats import read_fasta, read_mappings, read_slow5, write_fasta, write_mappings, write_slow5
from .mapping import MappingRecord, SelectionPolicy, compute_mapq, decide, map_read
from .pechain import ChainState, PeChainTrace, estimate_latency, load, run_to_completion, simulate, step
from .pipeline import BatchMapper, RunSummary
from .refindex import (
    PoreModel,
    SignalIndex,
    build_index,
    parse_pore_model,
    read_index,
    reverse_complement,
    synthesize_signal,
    synthetic_pore_model,
    write_index,
)
from .sdtw import backtrack, cost_matrix, sdtw_banded_fixed, sdtw_banded_float, sdtw_full

__version__ = "0.1.0"

__all__ = [
    "BatchMapper",
    "ChainState",
    "Event",
    "EventDetectionParams",
    "EventQuery",
    "FixedPointParams",
    "INF_FIXED",
    "MappingRecord",
    "PeChainTrace",
    "PoreModel",
    "RawRead",
    "RunSummary",
    "SdtwResult",
    "SelectionPolicy",
    "SignalIndex",
    "backtrack",
    "build_index",
    "compute_mapq",
    "cost_matrix",
    "dac_to_pa",
    "decide",
    "dequantize",
    "detect_events",
    "estimate_latency",
    "extract_query",
    "load",
    "map_read",
    "parse_pore_model",
    "preprocess_read",
    "quantize",
    "read_fasta",
    "read_index",
    "read_mappings",
    "read_slow5",
    "reverse_complement",
    "run_to_completion",
    "sdtw_banded_fixed",
    "sdtw_banded_float",
    "sdtw_full",
    "simulate",
    "step",
    "synthesize_signal",
    "synthetic_pore_model",
    "write_fasta",
    "write_index",
    "write_mappings",
    "write_slow5",
    "zscore_normalize",
]
