"""Baseline opponents for the adversaries: a random 1-Lipschitz linf^k embedder
and a numerically optimized non-contracting l2 placer."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy.optimize import minimize

from ..errors import ConfigError, PlacementInfeasible
from ..linf import feasible_interval
from ..metric import HostPointSet, MetricSpace
from ..numeric import encode


class RandomFeasibleEmbedder:
    """Each coordinate puts a new point uniformly (on a 2^-30 grid) in its 1-Lipschitz interval.

    Values are exact rationals, so the embedding is 1-Lipschitz without any
    tolerance and reproducible from the seed.
    """

    name = "random-feasible"
    host_kind = "linf"
    RESOLUTION = 2**30

    def __init__(self, k: int, seed: int = 0, backend: str = "rational"):
        if k < 1:
            raise ConfigError("k must be positive")
        self.k = k
        self.seed = seed
        self.rng = random.Random(seed)
        self.space = MetricSpace(backend)
        self.coords: list[list[Fraction]] = [[] for _ in range(k)]

    def expose(self, dists: Sequence) -> tuple:
        t = self.space.expose(dists)
        for col in self.coords:
            if t == 0:
                col.append(Fraction(0))
                continue
            lo, hi = feasible_interval(col, self.space, t)
            u = Fraction(self.rng.randrange(self.RESOLUTION + 1), self.RESOLUTION)
            col.append(Fraction(lo) + (Fraction(hi) - Fraction(lo)) * u)
        return self.image(t)

    def image(self, x: int) -> tuple:
        return tuple(col[x] for col in self.coords)

    def response(self, x: int) -> dict[str, Any]:
        return {"coords": [encode(v) for v in self.image(x)]}

    def host(self) -> HostPointSet:
        return HostPointSet("linf", [self.image(x) for x in range(self.space.n)])


class L2Placer:
    """Greedy non-contracting placement in l2^dim.

    Each new point minimizes its worst expansion towards the earlier points
    subject to never contracting, by multi-start SLSQP. Infeasible local
    optima are repaired by an orthogonal lift; the final placement is
    re-verified.
    """

    name = "l2-placer"
    host_kind = "l2"
    MARGIN = 1e-9
    TOL = 1e-7

    def __init__(self, dim: int = 12, restarts: int = 8, seed: int = 0, backend: str = "rational"):
        self.dim = dim
        self.restarts = restarts
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.space = MetricSpace(backend)
        self.points: list[np.ndarray] = []

    def expose(self, dists: Sequence) -> tuple:
        if self.space.n >= self.dim:
            raise ConfigError(f"l2 placer in dimension {self.dim} takes at most {self.dim} points")
        x = self.space.expose(dists)
        self.points.append(self._place(x))
        return self.image(x)

    def image(self, x: int) -> np.ndarray:
        return self.points[x]

    def _place(self, x: int) -> np.ndarray:
        p = np.zeros(self.dim)
        if x == 0:
            return p
        d = np.array([float(v) for v in self.space.row(x)])
        if x == 1:
            p[0] = d[0]
            return p
        anchors = np.array(self.points)
        best, best_val = None, np.inf
        for _ in range(self.restarts):
            cand = self._solve(anchors, d, self._start(anchors, d))
            dist = np.linalg.norm(anchors - cand, axis=1)
            if np.any(dist < d * (1 - self.TOL)):
                continue
            val = float(np.max(dist / d))
            if val < best_val:
                best, best_val = cand, val
        if best is None:
            raise PlacementInfeasible(f"no non-contracting placement found for point {x}")
        return best

    def _start(self, anchors, d):
        j = int(self.rng.integers(len(anchors)))
        u = self.rng.normal(size=self.dim)
        u /= np.linalg.norm(u)
        return anchors[j] + u * d[j] * (1 + self.rng.random())

    def _solve(self, anchors, d, p0):
        def ratio2(z):
            return np.sum((anchors - z[:-1]) ** 2, axis=1) / d**2

        def grad(z):
            return -2 * (anchors - z[:-1]) / (d**2)[:, None]

        m = len(anchors)
        cons = [
            {
                "type": "ineq",
                "fun": lambda z: z[-1] ** 2 - ratio2(z),
                "jac": lambda z: np.hstack([-grad(z), np.full((m, 1), 2 * z[-1])]),
            },
            {"type": "ineq", "fun": lambda z: ratio2(z) - 1.0, "jac": lambda z: np.hstack([grad(z), np.zeros((m, 1))])},
        ]
        s0 = float(np.sqrt(np.max(np.sum((anchors - p0) ** 2, axis=1) / d**2)))
        res = minimize(
            lambda z: z[-1],
            np.append(p0, s0),
            jac=lambda z: np.append(np.zeros(self.dim), 1.0),
            constraints=cons,
            method="SLSQP",
            options={"maxiter": 300, "ftol": 1e-12},
        )
        p = res.x[:-1] if np.all(np.isfinite(res.x)) else p0
        return self._repair(anchors, d, p)

    def _repair(self, anchors, d, p):
        """Lift ``p`` orthogonally to every ``anchor - p`` just far enough to stop contracting.

        An orthogonal offset ``h`` adds ``h^2`` to every squared distance, so
        one lift fixes all short pairs at once. A direction exists because
        there are fewer anchors than ``dim``.
        """
        diff = anchors - p
        need = (d * (1 + self.MARGIN)) ** 2 - np.sum(diff**2, axis=1)
        if np.max(need) <= 0:
            return p
        u = np.linalg.svd(diff)[2][-1]
        return p + u * np.sqrt(np.max(need))

    def response(self, x: int) -> dict[str, Any]:
        return {"coords": [float(v) for v in self.points[x]]}

    def host(self) -> HostPointSet:
        return HostPointSet("l2", np.array(self.points, dtype=float))
