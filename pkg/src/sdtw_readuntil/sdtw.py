"""Subsequence DTW engines.

Three implementations of the same recurrence with Manhattan distance::

    C(i, j) = |x_i - y_j| + min(C(i-1, j), C(i-1, j-1), C(i, j-1))
    C(0, j) = 0,  C(i, 0) = inf

* :func:`sdtw_full` keeps the whole ``(M+1) x (N+1)`` matrix, evaluated row by
  row, and can backtrack a warp path. It is the oracle for the other two.
* :func:`sdtw_banded_float` keeps a single cost column of length ``M + 1`` and
  walks the reference column by column.
* :func:`sdtw_banded_fixed` is the same column walk on quantized samples with
  integer accumulators that wrap (or saturate) at ``accum_bits``.

All engines report the 0-based reference index where the best alignment ends;
ties keep the first (smallest) index.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .core import FixedPointParams, SdtwResult
from .errors import EmptyInput, InvalidParams, QueryLongerThanReference

__all__ = [
    "cost_matrix",
    "backtrack",
    "sdtw_full",
    "sdtw_banded_float",
    "sdtw_banded_fixed",
]


def _check_float_inputs(query, reference):
    q = np.ascontiguousarray(query, dtype=np.float64)
    r = np.ascontiguousarray(reference, dtype=np.float64)
    if q.ndim != 1 or r.ndim != 1:
        raise InvalidParams("query and reference must be 1-D")
    if q.size == 0 or r.size == 0:
        raise EmptyInput("query and reference must be non-empty")
    if q.size > r.size:
        raise QueryLongerThanReference(f"query length {q.size} exceeds reference length {r.size}")
    if not (np.isfinite(q).all() and np.isfinite(r).all()):
        raise InvalidParams("query and reference must be finite")
    return q, r


def _check_fixed_inputs(query, reference, params):
    q = np.asarray(query)
    r = np.asarray(reference)
    if q.ndim != 1 or r.ndim != 1:
        raise InvalidParams("query and reference must be 1-D")
    if q.size == 0 or r.size == 0:
        raise EmptyInput("query and reference must be non-empty")
    if q.size > r.size:
        raise QueryLongerThanReference(f"query length {q.size} exceeds reference length {r.size}")
    for name, a in (("query", q), ("reference", r)):
        if not np.issubdtype(a.dtype, np.integer):
            raise InvalidParams(f"{name} must hold quantized integer samples")
        if a.min() < params.sample_min or a.max() > params.sample_max:
            raise InvalidParams(f"{name} samples exceed the signed {params.sample_bits}-bit range")
    return np.ascontiguousarray(q, dtype=np.int64), np.ascontiguousarray(r, dtype=np.int64)


@njit(cache=True, nogil=True)
def _cost_matrix(q, r):
    M = q.size
    N = r.size
    C = np.empty((M + 1, N + 1), dtype=np.float64)
    C[0, :] = 0.0
    C[1:, 0] = np.inf
    for i in range(1, M + 1):
        x = q[i - 1]
        for j in range(1, N + 1):
            up = C[i - 1, j]
            diag = C[i - 1, j - 1]
            left = C[i, j - 1]
            m = up
            if diag < m:
                m = diag
            if left < m:
                m = left
            C[i, j] = abs(x - r[j - 1]) + m
    return C


def cost_matrix(query, reference) -> np.ndarray:
    """Accumulated cost matrix including the boundary row and column.

    ``C[i, j]`` (1-based ``i``, ``j``) is the cost of the best warp path that
    aligns ``query[:i]`` to a subsequence of the reference ending at sample
    ``j``. Row 0 is zero and column 0 is infinite.
    """
    q, r = _check_float_inputs(query, reference)
    return _cost_matrix(q, r)


def backtrack(C: np.ndarray, position: int):
    """Recover a warp path ending at reference index ``position`` (0-based).

    Returns ``(start, path)`` where ``path`` is an ``(L, 2)`` array of 0-based
    ``(query_index, reference_index)`` pairs ordered from start to end. Ties
    prefer the diagonal, then the cell above, then the cell to the left.
    """
    i = C.shape[0] - 1
    j = position + 1
    path = [(i - 1, j - 1)]
    while i > 1:
        moves = [(C[i - 1, j - 1], i - 1, j - 1), (C[i - 1, j], i - 1, j)]
        if j > 1:
            moves.append((C[i, j - 1], i, j - 1))
        # min() keeps the first of equal keys, giving the documented tie order
        _, i, j = min(moves, key=lambda m: m[0])
        path.append((i - 1, j - 1))
    path.reverse()
    return j - 1, np.array(path, dtype=np.int64)


def sdtw_full(query, reference, backtrack_path: bool = False) -> SdtwResult:
    """Full-matrix subsequence DTW.

    Parameters
    ----------
    query, reference
        1-D real sequences with ``1 <= len(query) <= len(reference)``.
    backtrack_path
        Also recover the start position and an optimal warp path.
    """
    C = cost_matrix(query, reference)
    last = C[-1, 1:]
    position = int(np.argmin(last))
    result = SdtwResult(position=position, score=float(last[position]), engine="float_full")
    if backtrack_path:
        start, path = backtrack(C, position)
        result = SdtwResult(
            position=position,
            score=result.score,
            engine="float_full",
            start=start,
            path=path,
        )
    return result


@njit(cache=True, nogil=True)
def _banded_float(q, r):
    M = q.size
    N = r.size
    C = np.full(M + 1, np.inf)
    C[0] = 0.0
    best = np.inf
    position = -1
    for j in range(N):
        y = r[j]
        n = 0.0
        nw = 0.0
        for i in range(1, M + 1):
            w = C[i]
            m = n
            if nw < m:
                m = nw
            if w < m:
                m = w
            c = abs(q[i - 1] - y) + m
            nw = w
            C[i] = c
            n = c
        if C[M] < best:
            best = C[M]
            position = j
    return position, best


def sdtw_banded_float(query, reference) -> SdtwResult:
    """Memory-efficient subsequence DTW with a single cost column.

    Returns the same ``(position, score)`` as :func:`sdtw_full` using
    ``O(len(query))`` working memory.
    """
    q, r = _check_float_inputs(query, reference)
    position, score = _banded_float(q, r)
    return SdtwResult(position=int(position), score=float(score), engine="float_banded")


@njit(cache=True, nogil=True)
def _banded_fixed(q, r, inf, lo, hi, saturate):
    M = q.size
    N = r.size
    span = hi - lo + 1
    C = np.full(M + 1, inf, dtype=np.int64)
    C[0] = 0
    best = hi + 1
    position = -1
    overflow = False
    for j in range(N):
        y = r[j]
        n = 0
        nw = 0
        for i in range(1, M + 1):
            w = C[i]
            m = n
            if nw < m:
                m = nw
            if w < m:
                m = w
            c = abs(q[i - 1] - y) + m
            if c > hi or c < lo:
                overflow = True
                if saturate:
                    c = hi if c > hi else lo
                else:
                    c = (c - lo) % span + lo
            nw = w
            C[i] = c
            n = c
        if C[M] < best:
            best = C[M]
            position = j
    return position, best, overflow


def sdtw_banded_fixed(query, reference, params: FixedPointParams = FixedPointParams()) -> SdtwResult:
    """Memory-efficient subsequence DTW on quantized samples.

    Distances are exact absolute differences of the sample values; every cell
    sum is reduced to a signed ``params.accum_bits`` integer by two's-complement
    wrap-around or saturation. ``overflow`` is set if any cell sum left the
    accumulator range, in which case the score is whatever the hardware would
    have produced and should not be trusted.
    """
    q, r = _check_fixed_inputs(query, reference, params)
    position, score, overflow = _banded_fixed(
        q, r, params.inf, params.accum_min, params.accum_max, params.overflow_mode == "saturate"
    )
    return SdtwResult(
        position=int(position), score=int(score), engine="fixed_banded", overflow=bool(overflow)
    )
