"""
How much precision does the hardware need?
==========================================

Map the same simulated reads with the float engine (taken as truth) and with
the fixed-point engine at several scale factors.
"""
import numpy as np

from sdtw_readuntil import build_index, synthetic_pore_model
from sdtw_readuntil.simulate import SimParams, eval_scaling, simulate_reads

model = synthetic_pore_model(k=6, seed=1)
rng = np.random.default_rng(5)
ref = ("toy", "".join(rng.choice(list("ACGT"), 8000)))
reads, _ = simulate_reads([ref], model, seed=5, sim=SimParams(n_reads=150, noise_sigma=0.6, dup_prob=0.1))
index = [build_index(ref[1], model, name="toy")]

print("scale_factor  agreement   (32-bit accumulator)")
for row in eval_scaling(reads, index, [2, 4, 8, 16, 32, 64]):
    print(f"{row.scale_factor:>12}  {row.agreement_pct:6.1f}%")

print("\nscale_factor  agreement   overflowed   (16-bit accumulator)")
for row in eval_scaling(reads, index, [32, 128, 256], accum_bits=16):
    print(f"{row.scale_factor:>12}  {row.agreement_pct:6.1f}%   {row.n_overflow:>10}")
