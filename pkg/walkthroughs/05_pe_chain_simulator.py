"""
The PE-chain accelerator, one clock at a time
=============================================

Each processing element owns one query sample; reference samples stream
through the chain, so one anti-diagonal of the cost matrix is computed per
cycle. The result is bit-exact with the software fixed-point engine.
"""
import io

import numpy as np

from sdtw_readuntil import estimate_latency, load, run_to_completion, sdtw_banded_fixed, step

rng = np.random.default_rng(2)
query = rng.integers(-64, 64, 4).astype(np.int16)
ref = rng.integers(-64, 64, 6).astype(np.int16)

state = load(query, ref, chain_length=4)
while not state.finished:
    step(state)
    print(f"cycle {state.cycle}: cells {state.computed_cells()}")

res, _ = run_to_completion(load(query, ref, chain_length=4))
sw = sdtw_banded_fixed(query, ref)
print("pe_sim  :", res.position, res.score, "in", res.cycles, "cycles")
print("software:", sw.position, sw.score)

# a realistic query on a genome-sized strand: N + 250 - 1 cycles
query = rng.integers(-3000, 3000, 250).astype(np.int16)
ref = rng.integers(-3000, 3000, 29_898).astype(np.int16)
res, trace = run_to_completion(load(query, ref), trace=True)
print(res.cycles, "cycles ->", round(estimate_latency(res.cycles) * 1e6, 2), "us at 100 MHz")
buf = io.StringIO()
trace.write_tsv(buf)
print("trace head:\n" + "".join(buf.getvalue().splitlines(keepends=True)[:4]))
print("peak occupancy:", max(trace.active_pes), "PEs")
