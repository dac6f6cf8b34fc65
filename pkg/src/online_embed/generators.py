"""Random metric generators.

Every generator draws points in a space whose distance is already a metric
(a cycle, a normed space, a weighted tree), so the output always passes
validation. ``rng`` is a :class:`numpy.random.Generator`.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from .metric import MetricSpace

GENERATORS = ("cycle", "l2", "tree", "l1")


def cycle_metric(n: int, rng: np.random.Generator, bits: int = 12) -> MetricSpace:
    """``n`` distinct dyadic points on the cycle of circumference one, shorter-arc distance."""
    if n > 2**bits:
        raise ValueError("not enough grid points for distinct positions")
    ticks = rng.choice(2**bits, size=n, replace=False)
    pos = [Fraction(int(t), 2**bits) for t in ticks]
    space = MetricSpace("rational")
    for k, p in enumerate(pos):
        row = []
        for q in pos[:k]:
            diff = abs(p - q)
            row.append(min(diff, 1 - diff))
        space.expose(row)
    return space


def l2_metric(n: int, rng: np.random.Generator, dim: int = 3) -> MetricSpace:
    """Gaussian points in l2^dim on the float backend."""
    pts = rng.normal(size=(n, dim))
    space = MetricSpace("float")
    for k in range(n):
        space.expose([float(np.linalg.norm(pts[k] - pts[j])) for j in range(k)])
    return space


def l1_metric(n: int, rng: np.random.Generator, dim: int = 3, high: int = 16) -> MetricSpace:
    """Distinct integer points in l1^dim, exact."""
    seen: set[tuple] = set()
    pts = []
    while len(pts) < n:
        p = tuple(int(v) for v in rng.integers(0, high, size=dim))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    space = MetricSpace("rational")
    for k, p in enumerate(pts):
        space.expose([Fraction(sum(abs(a - b) for a, b in zip(p, q))) for q in pts[:k]])
    return space


def random_weighted_tree(n: int, rng: np.random.Generator, extra: int | None = None, max_weight: int = 8):
    """A random tree on ``n + extra`` vertices with positive rational weights.

    Returns ``(adjacency, marked)``: ``marked`` lists the ``n`` vertices that
    become metric points, in a random exposure order; the rest act as Steiner
    points that the realizer has to rediscover.
    """
    if extra is None:
        extra = int(rng.integers(0, n + 1))
    m = n + extra
    adj: dict[int, dict[int, Fraction]] = {v: {} for v in range(m)}
    for v in range(1, m):
        u = int(rng.integers(0, v))
        w = Fraction(int(rng.integers(1, max_weight + 1)), int(rng.choice([1, 2, 4])))
        adj[u][v] = adj[v][u] = w
    marked = [int(v) for v in rng.permutation(m)[:n]]
    return adj, marked


def _tree_distances(adj, src) -> dict[int, Fraction]:
    dist = {src: Fraction(0)}
    stack = [src]
    while stack:
        u = stack.pop()
        for v, w in adj[u].items():
            if v not in dist:
                dist[v] = dist[u] + w
                stack.append(v)
    return dist


def tree_metric(n: int, rng: np.random.Generator, extra: int | None = None) -> MetricSpace:
    """Shortest-path metric of ``n`` marked vertices of a random weighted tree."""
    adj, marked = random_weighted_tree(n, rng, extra)
    rows = {v: _tree_distances(adj, v) for v in marked}
    space = MetricSpace("rational")
    for k, v in enumerate(marked):
        space.expose([rows[v][u] for u in marked[:k]])
    return space


def random_metric(n: int, rng: np.random.Generator, kind: str | None = None) -> MetricSpace:
    """One metric from the named generator, or a uniformly chosen one."""
    if kind is None:
        kind = GENERATORS[int(rng.integers(len(GENERATORS)))]
    if kind == "cycle":
        return cycle_metric(n, rng)
    if kind == "l2":
        return l2_metric(n, rng)
    if kind == "tree":
        return tree_metric(n, rng)
    if kind == "l1":
        return l1_metric(n, rng)
    raise ValueError(f"unknown generator {kind!r}; expected one of {GENERATORS}")


def is_valid(space: MetricSpace) -> bool:
    """Post-hoc validation: positive off-diagonal distances and no triangle violations."""
    positive = all(space.d(i, j) > 0 for i, j in combinations(range(space.n), 2))
    return positive and not space.violations()
