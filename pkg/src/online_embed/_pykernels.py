"""Pure-Python branch-extension kernel (arbitrary-precision integers)."""
from __future__ import annotations

import numpy as np


def extend_branches(values, dist, step, cap=None):
    """Children of every branch for a newly exposed point.

    All quantities are integers over a common denominator. ``values`` is
    ``(B, m)``: the branch values of the ``m`` earlier points. ``dist[i]`` is
    the distance from point ``i`` to the new point and ``step[i]`` the
    lattice spacing attached to it.

    Returns ``(parents, children, odd)``. A branch whose feasible set is
    empty gets the midpoint of its feasible interval; ``odd`` counts branches
    where that midpoint is not an integer (the caller then doubles the
    denominator and retries). ``children`` is None when ``cap`` is exceeded.
    """
    rows = values.tolist()
    dist = [int(v) for v in dist]
    step = [int(v) for v in step]
    parents: list[int] = []
    children: list[int] = []
    odd = 0
    for b, row in enumerate(rows):
        lo = max(v - d for v, d in zip(row, dist))
        hi = min(v + d for v, d in zip(row, dist))
        cand = set()
        for s in step:
            k0 = -((-lo) // s)
            k1 = hi // s
            if k1 >= k0:
                cand.update(range(k0 * s, k1 * s + 1, s))
        cand.update(v for v in row if lo <= v <= hi)
        if not cand:
            if (lo + hi) % 2:
                odd += 1
                continue
            cand = {(lo + hi) // 2}
        ordered = sorted(cand)
        parents.extend([b] * len(ordered))
        children.extend(ordered)
        if cap is not None and len(children) > cap:
            return np.asarray(parents, dtype=np.int64), None, odd
    out = np.array(children, dtype=object)
    if values.dtype == np.int64:
        out = out.astype(np.int64)
    return np.asarray(parents, dtype=np.int64), out, odd
