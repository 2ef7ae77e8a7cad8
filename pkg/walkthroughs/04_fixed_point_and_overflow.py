"""
Fixed point: scale factors and accumulator overflow
===================================================

Quantization error per cell is at most 1/SF, so the total score error is
bounded by the path length. Small scale factors lose resolution; with a
narrow accumulator, large ones overflow and the answer falls apart.
"""
import numpy as np

from sdtw_readuntil import FixedPointParams, quantize, sdtw_banded_fixed, sdtw_banded_float

rng = np.random.default_rng(1)
ref = rng.normal(size=3000)
query = ref[1200:1450] + rng.normal(0, 0.4, 250)
exact = sdtw_banded_float(query, ref)
print(f"float: pos={exact.position} score={exact.score:.3f}")

for sf in (2, 8, 32, 256):
    fp = FixedPointParams(sf)
    res = sdtw_banded_fixed(quantize(query, fp), quantize(ref, fp), fp)
    bound = (query.size + ref.size - 1) / sf
    print(f"SF={sf:<4} pos={res.position} score/SF={res.score / sf:.3f} "
          f"error={abs(res.score / sf - exact.score):.3f} (bound {bound:.1f})")

# a 32-bit accumulator never overflows with 16-bit samples and 250 rows;
# a 16-bit one does as soon as costs get large
for bits in (32, 16):
    fp = FixedPointParams(256, accum_bits=bits)
    res = sdtw_banded_fixed(quantize(query, fp), quantize(ref, fp), fp)
    print(f"{bits}-bit accumulator at SF=256: pos={res.position} overflow={res.overflow}")
