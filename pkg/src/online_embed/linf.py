"""Online (1+eps)-distortion embedding into linf as a branching family of line maps.

Every coordinate of the host is one 1-Lipschitz map of the exposed points
into the line (a *branch*). When a point arrives, each branch splits into one
child per feasible value: lattice multiples of ``delta * d(x_i, x_t)`` and
earlier branch values, restricted to the interval that keeps the branch
1-Lipschitz.

Branch values are stored as integers over a shared denominator ``scale`` so
that the hot extension loop runs on int64 (compiled kernel) or Python ints.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import kernels
from .errors import BranchCapExceeded, CertificateFailure, ConfigError, LipschitzBreach
from .metric import HostPointSet, MetricSpace
from .numeric import encode


def delta_for_epsilon(n: int, epsilon) -> Fraction:
    """Scale parameter ``eps / (20 n^2)`` for a declared point budget ``n``."""
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(str(epsilon))
    if not 0 < eps <= 1:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    if n < 2:
        raise ConfigError("n must be at least 2")
    return eps / (20 * n * n)


def _as_delta(delta) -> Fraction:
    d = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    if not 0 < d <= 1:
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    return d


def children_bound(t: int, delta) -> int:
    """Children per branch when the ``t``-th point (1-based) arrives: (t-1)(2/delta + 2)."""
    return math.floor((t - 1) * (2 / _as_delta(delta) + 2))


def dimension_bound(n: int, delta) -> int:
    """(n-1)! * (2/delta + 2)^(n-1), floored to an integer."""
    return math.floor(math.factorial(n - 1) * (2 / _as_delta(delta) + 2) ** (n - 1))


def guarantee_factor(n: int, delta) -> Fraction:
    """Lower-bound factor ``1 - 20 n^2 delta`` on the best per-pair stretch."""
    return 1 - 20 * n * n * _as_delta(delta)


def feasible_interval(values: Sequence, space: MetricSpace, t: int) -> tuple:
    """Closed interval of values for point ``t`` that keep a branch 1-Lipschitz.

    ``values`` are the branch values of points ``0..t-1``.
    """
    d = space.d
    lo = max(values[i] - d(i, t) for i in range(t))
    hi = min(values[i] + d(i, t) for i in range(t))
    if lo > hi:
        raise LipschitzBreach(f"empty feasible interval [{lo}, {hi}]: branch is not 1-Lipschitz")
    return lo, hi


def admissible_points(space: MetricSpace, t: int, delta, values: Sequence) -> list:
    """Feasible values for point ``t`` on one branch, ascending and deduplicated.

    Lattices ``delta * d(x_i, x_t) * Z`` plus the branch's earlier values,
    intersected with the feasible interval. The first point only admits 0.
    """
    if t == 0:
        return [Fraction(0)]
    delta = _as_delta(delta)
    lo, hi = feasible_interval(values, space, t)
    out = set()
    for i in range(t):
        s = delta * space.d(i, t)
        out.update(k * s for k in range(math.ceil(lo / s), math.floor(hi / s) + 1))
    out.update(v for v in values[:t] if lo <= v <= hi)
    return sorted(out)


@dataclass
class StepStats:
    point: int
    parents: int
    children: int
    max_children: int
    children_bound: int
    removed_by_dedup: int
    fallback_branches: int
    scale: int
    kernel: str


@dataclass
class PairCertificate:
    x: int
    y: int
    best_gap: Fraction
    required: Fraction

    @property
    def slack(self) -> Fraction:
        return self.best_gap - self.required

    @property
    def ok(self) -> bool:
        return self.best_gap >= self.required


@dataclass
class CertificateReport:
    factor: Fraction
    pairs: list[PairCertificate] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.ok for p in self.pairs)

    def failures(self) -> list[PairCertificate]:
        return [p for p in self.pairs if not p.ok]


class LinfEmbedder:
    """The branching-family embedder.

    Pass ``epsilon`` together with the point budget ``n`` for guarantee mode
    (``delta = eps / 20n^2``), or ``delta`` alone for empirical mode.
    """

    name = "linf"
    host_kind = "linf"

    def __init__(
        self,
        *,
        epsilon=None,
        delta=None,
        n: int | None = None,
        dedup: bool = True,
        max_branches: int | None = None,
        kernel: str | None = None,
        backend: str = "rational",
    ):
        if (epsilon is None) == (delta is None):
            raise ConfigError("give exactly one of epsilon and delta")
        if epsilon is not None:
            if n is None:
                raise ConfigError("guarantee mode needs the number of points declared up front")
            self.delta = delta_for_epsilon(n, epsilon)
            self.epsilon = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
        else:
            self.delta = _as_delta(delta)
            self.epsilon = None
        self.n_declared = n
        self.dedup = dedup
        self.max_branches = max_branches
        self.kernel = kernel
        self.space = MetricSpace(backend)
        self.values = np.zeros((0, 0), dtype=np.int64)
        self.scale = 1
        self.parents: np.ndarray | None = None
        self.stats: list[StepStats] = []

    @property
    def guarantee_mode(self) -> bool:
        return self.epsilon is not None

    @property
    def num_branches(self) -> int:
        return self.values.shape[0]

    def expose(self, dists: Sequence) -> int:
        if self.n_declared is not None and self.space.n >= self.n_declared:
            raise ConfigError(f"more than the declared {self.n_declared} points")
        x = self.space.expose(dists)
        self.extend(x)
        return self.num_branches

    def extend(self, t: int) -> None:
        if t != self.values.shape[1] or t >= self.space.n:
            raise ValueError(f"point {t} is not the newest exposed point")
        if t == 0:
            self.values = np.zeros((1, 1), dtype=np.int64)
            self.parents = np.zeros(1, dtype=np.int64)
            self.stats.append(StepStats(0, 0, 1, 1, 1, 0, 0, 1, "none"))
            return
        row = [Fraction(v) for v in self.space.row(t)]
        steps = [self.delta * v for v in row]
        need = 1
        for q in (*row, *steps):
            need = math.lcm(need, q.denominator)
        self._rescale(math.lcm(self.scale, need))
        while True:
            dist = [int(v * self.scale) for v in row]
            step = [int(v * self.scale) for v in steps]
            self._fit_dtype(max(dist))
            kname = kernels.DEFAULT if self.kernel is None else self.kernel
            if self.values.dtype != np.int64:
                kname = "python"
            dist_arr = np.array(dist, dtype=self.values.dtype)
            step_arr = np.array(step, dtype=self.values.dtype)
            parents, children, odd = kernels.extend_branches(
                self.values, dist_arr, step_arr, cap=self.max_branches, kernel=kname
            )
            if children is None:
                raise BranchCapExceeded(
                    f"point {t}: more than {self.max_branches} branches; raise --max-branches or coarsen delta"
                )
            if odd == 0:
                break
            self._rescale(self.scale * 2)
        counts = np.bincount(parents, minlength=self.num_branches) if len(parents) else np.zeros(1, int)
        fallback = self._count_fallbacks(parents, children, dist, step)
        new_values = np.empty((len(children), t + 1), dtype=self.values.dtype)
        new_values[:, :t] = self.values[parents]
        new_values[:, t] = children
        removed = 0
        if self.dedup:
            new_values, parents, removed = _dedup_rows(new_values, parents)
        self.stats.append(
            StepStats(
                t,
                self.num_branches,
                len(new_values),
                int(counts.max()),
                children_bound(t + 1, self.delta),
                removed,
                fallback,
                self.scale,
                kname,
            )
        )
        self.values = new_values
        self.parents = parents

    def _count_fallbacks(self, parents, children, dist, step) -> int:
        """Children that are neither lattice points nor earlier values (empty feasible set)."""
        n = 0
        if len(children) == 0:
            return 0
        single = np.bincount(parents) == 1
        for b in np.nonzero(single)[0]:
            c = int(children[np.searchsorted(parents, b)])
            row = [int(v) for v in self.values[b]]
            if c not in row and all(c % s for s in step):
                n += 1
        return n

    def _rescale(self, new_scale: int) -> None:
        factor = new_scale // self.scale
        if factor == 1:
            return
        if self.values.dtype == np.int64:
            top = int(np.abs(self.values).max()) if self.values.size else 0
            if top * factor >= kernels.INT64_LIMIT // 4:
                self.values = self.values.astype(object)
        self.values = self.values * factor
        self.scale = new_scale

    def _fit_dtype(self, max_dist: int) -> None:
        if self.values.dtype != np.int64:
            return
        top = int(np.abs(self.values).max()) if self.values.size else 0
        if top + max_dist >= kernels.INT64_LIMIT // 4:
            self.values = self.values.astype(object)

    # -- inspection -------------------------------------------------------

    def branch(self, b: int) -> tuple:
        return tuple(Fraction(int(v), self.scale) for v in self.values[b])

    def branches(self) -> list[tuple]:
        return [self.branch(b) for b in range(self.num_branches)]

    def lipschitz_violations(self, limit: int = 10) -> list[tuple[int, int, int]]:
        """Branches that expand some pair; exact integer comparison."""
        bad = []
        n = self.space.n
        for i in range(n):
            for j in range(i + 1, n):
                bound = int(Fraction(self.space.d(i, j)) * self.scale)
                diff = np.abs(self.values[:, i] - self.values[:, j])
                hits = np.nonzero(diff > bound)[0]
                bad.extend((int(b), i, j) for b in hits[:limit])
        return bad

    def finalize(self) -> HostPointSet:
        """One linf coordinate per branch."""
        coords = np.ascontiguousarray(self.values.T)
        return HostPointSet("linf", coords, self.scale)

    def pair_certificate(self, strict: bool = False) -> CertificateReport:
        """Best stretch over branches for every ordered pair vs ``(1 - 20 n^2 delta) d``."""
        n = self.space.n
        factor = guarantee_factor(n, self.delta)
        report = CertificateReport(factor)
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                gap = self.values[:, y] - self.values[:, x]
                best = Fraction(int(gap.max()), self.scale)
                report.pairs.append(PairCertificate(x, y, best, factor * self.space.d(x, y)))
        if strict and not report.passed:
            f = report.failures()[0]
            raise CertificateFailure("linf-pair", f"pair ({f.x},{f.y}): best {f.best_gap} < {f.required}")
        return report

    def response(self, x: int) -> dict[str, Any]:
        return {"branches": self.num_branches}

    def host(self) -> HostPointSet:
        return self.finalize()

    def to_json(self) -> dict[str, Any]:
        return self.finalize().to_json()


def _dedup_rows(values: np.ndarray, parents: np.ndarray):
    if values.dtype == np.int64:
        _, idx = np.unique(values, axis=0, return_index=True)
    else:
        seen = {}
        for b, row in enumerate(map(tuple, values.tolist())):
            seen.setdefault(row, b)
        idx = np.array(sorted(seen.values()), dtype=np.int64)
    idx = np.sort(idx)
    removed = len(values) - len(idx)
    if removed == 0:
        return values, parents, 0
    return values[idx], parents[idx], removed


class LinfLineageEmbedder:
    """Keep ``k`` lineages of the branching family as the k coordinates of linf^k.

    Each lineage picks one child per step among its branch's feasible values;
    lineages that share a branch pick distinct children when possible. With
    ``seed=None`` the picks are evenly spaced through the sorted candidates.
    """

    name = "linf-lineage"
    host_kind = "linf"

    def __init__(self, k: int, delta=Fraction(1, 8), seed: int | None = 0, backend: str = "rational"):
        if k < 1:
            raise ConfigError("k must be positive")
        self.k = k
        self.delta = _as_delta(delta)
        self.seed = seed
        self.rng = random.Random(seed)
        self.space = MetricSpace(backend)
        self.lineages: list[list[Fraction]] = [[] for _ in range(k)]

    def expose(self, dists: Sequence) -> tuple:
        t = self.space.expose(dists)
        groups: dict[tuple, list[int]] = {}
        for i, lin in enumerate(self.lineages):
            groups.setdefault(tuple(lin), []).append(i)
        for members in groups.values():
            values = self.lineages[members[0]]
            cand = admissible_points(self.space, t, self.delta, values)
            if not cand:
                lo, hi = feasible_interval(values, self.space, t)
                cand = [(lo + hi) / 2]
            picks = self._pick(cand, len(members))
            for i, p in zip(members, picks):
                self.lineages[i].append(p)
        return self.image(t)

    def _pick(self, cand: list, m: int) -> list:
        if self.seed is None:
            if m == 1:
                return [cand[len(cand) // 2]]
            return [cand[round(j * (len(cand) - 1) / (m - 1))] for j in range(m)]
        if len(cand) >= m:
            return self.rng.sample(cand, m)
        return [self.rng.choice(cand) for _ in range(m)]

    def image(self, x: int) -> tuple:
        return tuple(lin[x] for lin in self.lineages)

    def response(self, x: int) -> dict[str, Any]:
        return {"coords": [encode(v) for v in self.image(x)]}

    def host(self) -> HostPointSet:
        return HostPointSet("linf", [self.image(x) for x in range(self.space.n)])
