"""Slow, obviously-correct reference implementations used only by the tests."""
import itertools
import math
from decimal import ROUND_HALF_UP, Decimal


def quantize_decimal(value, scale_factor, bits=16):
    # Decimal's ROUND_HALF_UP rounds half away from zero
    q = int((Decimal(repr(float(value))) * scale_factor).to_integral_value(rounding=ROUND_HALF_UP))
    lo, hi = -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    return max(lo, min(hi, q))


def sdtw_python(query, reference):
    """Row-by-row dynamic program with plain floats; returns (position, score)."""
    inf = math.inf
    prev = [0.0] * (len(reference) + 1)
    for x in query:
        cur = [inf] * (len(reference) + 1)
        for j, y in enumerate(reference, start=1):
            cur[j] = abs(x - y) + min(prev[j], prev[j - 1], cur[j - 1])
        prev = cur
    last = prev[1:]
    best = min(last)
    return last.index(best), best


def sdtw_enumerate(query, reference):
    """Minimum over every monotone warp path that starts anywhere in row 0.

    A path is a sequence of cells (i, j) from (0, s) to (M-1, e) with steps
    (1, 0), (0, 1) or (1, 1). Returns ``(end, score)`` with the smallest end
    among optimal scores.
    """
    M, N = len(query), len(reference)
    best = {}

    def walk(i, j, cost):
        cost += abs(query[i] - reference[j])
        if i == M - 1:
            if cost < best.get(j, math.inf):
                best[j] = cost
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < M and nj < N:
                walk(ni, nj, cost)

    for s in range(N):
        walk(0, s, 0)
    score = min(best.values())
    end = min(j for j, c in best.items() if c == score)
    return end, score


def tstat_scalar(x, w):
    """Two-window Welch statistic at every boundary, one index at a time."""
    n = len(x)
    eta = 1.1754943508222875e-38
    out = [0.0] * n
    for i in range(w, n - w + 1):
        a, b = x[i - w:i], x[i:i + w]
        ma, mb = sum(a) / w, sum(b) / w
        va = sum(v * v for v in a) / w - ma * ma
        vb = sum(v * v for v in b) / w - mb * mb
        combined = max(va + vb, eta)
        out[i] = abs(mb - ma) / math.sqrt(combined / w)
    return out

