"""
Subsequence DTW in a few lines
==============================

Find where a short query sits inside a long reference, first with the
full cost matrix, then with the O(M) column-sweep engine.
"""
import numpy as np

from sdtw_readuntil import sdtw_banded_float, sdtw_full

# a toy case: the query is an exact piece of the reference
ref = np.array([9, 9, 1, 2, 3, 9], dtype=float)
query = np.array([1, 2, 3], dtype=float)
res = sdtw_full(query, ref, backtrack_path=True)
print("position", res.position, "score", res.score, "start", res.start)
print("warp path (query, reference):", res.path.tolist())

# the start is free: the query may begin anywhere, and stretching is allowed
stretched = np.repeat(query, [2, 1, 3])
print("stretched query still scores", sdtw_full(stretched, ref).score)

# the memory-efficient engine gives the same answer on random data
rng = np.random.default_rng(0)
ref = rng.normal(size=5000)
query = ref[3000:3100] + rng.normal(0, 0.1, 100)
a, b = sdtw_full(query, ref), sdtw_banded_float(query, ref)
print(f"full   : pos={a.position} score={a.score:.4f}")
print(f"banded : pos={b.position} score={b.score:.4f}")
assert (a.position, a.score) == (b.position, b.score)
