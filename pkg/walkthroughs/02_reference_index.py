"""
From bases to a reference signal
================================

A pore model maps every k-mer to an expected current. Sliding a k-base
window over the reference gives the signal that raw reads are compared to.
"""
import tempfile
from pathlib import Path

import numpy as np

from sdtw_readuntil import build_index, read_index, synthesize_signal, synthetic_pore_model, write_index

model = synthetic_pore_model(k=6, seed=1)
print("k =", model.k, "| levels:", len(model.levels), "| AAAAAA ->", round(model.level("AAAAAA"), 2), "pA")

rng = np.random.default_rng(0)
bases = "".join(rng.choice(list("ACGT"), 29_903))  # same length as a SARS-CoV-2 genome
signal = synthesize_signal(bases, model)
print("bases", len(bases), "-> signal samples", signal.size)

# both strands, z-scored and quantized with scale factor 32
index = build_index(bases, model, name="toy_genome")
print(index.stats())
print("first forward samples (fixed point):", index.forward_fixed[:8].tolist())
print("search space (both strands):", index.search_space)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "toy.sqix"
    write_index(path, [index])
    (back,) = read_index(path)
    print("index file:", path.stat().st_size, "bytes; sidecar:", path.with_suffix(".sqix.json").exists())
    assert np.array_equal(back.forward_fixed, index.forward_fixed)
