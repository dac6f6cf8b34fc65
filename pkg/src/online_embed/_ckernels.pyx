# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled branch-extension kernel over int64 values.

Same contract as ``_pykernels.extend_branches``; callers guarantee that every
magnitude involved stays below 2**61.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport free, malloc, qsort

ctypedef long long i64

cnp.import_array()


cdef int _cmp(const void* a, const void* b) noexcept nogil:
    cdef i64 x = (<i64*>a)[0]
    cdef i64 y = (<i64*>b)[0]
    return (x > y) - (x < y)


cdef inline i64 _floordiv(i64 a, i64 b) noexcept nogil:
    cdef i64 q = a / b
    if (a % b != 0) and (a < 0):
        q -= 1
    return q


cdef inline i64 _ceildiv(i64 a, i64 b) noexcept nogil:
    return -_floordiv(-a, b)


def extend_branches(i64[:, ::1] values, i64[::1] dist, i64[::1] step, cap=None):
    cdef Py_ssize_t B = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    cdef Py_ssize_t b, i, j, cnt, total = 0, maxcnt = 0, pos = 0, nuniq
    cdef i64 lo, hi, v, k0, k1, k, s, limit
    cdef Py_ssize_t odd = 0
    cdef bint capped = False
    limit = -1 if cap is None else <i64>cap

    lows_arr = np.empty(B, dtype=np.int64)
    highs_arr = np.empty(B, dtype=np.int64)
    cdef i64[::1] lows = lows_arr
    cdef i64[::1] highs = highs_arr

    with nogil:
        for b in range(B):
            lo = values[b, 0] - dist[0]
            hi = values[b, 0] + dist[0]
            for i in range(1, m):
                v = values[b, i] - dist[i]
                if v > lo:
                    lo = v
                v = values[b, i] + dist[i]
                if v < hi:
                    hi = v
            lows[b] = lo
            highs[b] = hi
            cnt = m + 1
            for i in range(m):
                k0 = _ceildiv(lo, step[i])
                k1 = _floordiv(hi, step[i])
                if k1 >= k0:
                    cnt += k1 - k0 + 1
            total += cnt
            if cnt > maxcnt:
                maxcnt = cnt

    if limit >= 0 and total > limit + maxcnt:
        total = limit + maxcnt
    parents_arr = np.empty(total, dtype=np.int64)
    children_arr = np.empty(total, dtype=np.int64)
    cdef i64[::1] parents = parents_arr
    cdef i64[::1] children = children_arr
    cdef i64* buf = <i64*>malloc(max(maxcnt, 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(B):
                lo = lows[b]
                hi = highs[b]
                cnt = 0
                for i in range(m):
                    s = step[i]
                    k0 = _ceildiv(lo, s)
                    k1 = _floordiv(hi, s)
                    k = k0
                    while k <= k1:
                        buf[cnt] = k * s
                        cnt += 1
                        k += 1
                    v = values[b, i]
                    if lo <= v and v <= hi:
                        buf[cnt] = v
                        cnt += 1
                if cnt == 0:
                    if (lo + hi) % 2 != 0:
                        odd += 1
                        continue
                    buf[0] = _floordiv(lo + hi, 2)
                    cnt = 1
                qsort(buf, cnt, sizeof(i64), _cmp)
                nuniq = 0
                for j in range(cnt):
                    if nuniq == 0 or buf[j] != buf[nuniq - 1]:
                        buf[nuniq] = buf[j]
                        nuniq += 1
                if limit >= 0 and pos + nuniq > limit:
                    capped = True
                    break
                for j in range(nuniq):
                    parents[pos] = b
                    children[pos] = buf[j]
                    pos += 1
    finally:
        free(buf)
    if capped:
        return parents_arr[:pos], None, odd
    return parents_arr[:pos], children_arr[:pos], odd
