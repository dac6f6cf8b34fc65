"""Incremental finite metric spaces, host-space distances and distortion accounting."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonPositiveDistance, TriangleViolation
from .numeric import (
    Number,
    check_backend,
    convert,
    decode,
    encode,
    exact_sqrt,
    leq,
)

NORMS = ("l1", "l2", "linf", "line", "tree")


class MetricSpace:
    """A finite metric whose points are exposed one at a time.

    Point ids are assigned densely in exposure order. Every exposure is
    validated against all existing triples, so an accepted space always
    satisfies the metric axioms (exactly on the rational backend, within a
    relative tolerance of 1e-9 on the float backend).
    """

    def __init__(self, backend: str = "rational"):
        self.backend = check_backend(backend)
        self._rows: list[list[Number]] = []

    @property
    def exact(self) -> bool:
        return self.backend == "rational"

    @property
    def n(self) -> int:
        return len(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def d(self, i: int, j: int) -> Number:
        if i == j:
            return convert(0, self.backend)
        if i < j:
            i, j = j, i
        return self._rows[i][j]

    def row(self, i: int) -> list[Number]:
        """Distances from point ``i`` to every earlier point."""
        return list(self._rows[i])

    def distances_from(self, i: int) -> list[Number]:
        return [self.d(i, j) for j in range(self.n)]

    def expose(self, dists: Sequence) -> int:
        """Append a point given its distances to all existing points; returns its id."""
        n = self.n
        if len(dists) != n:
            raise DimensionMismatch(f"expected {n} distances, got {len(dists)}")
        row = [convert(x, self.backend) for x in dists]
        for j, v in enumerate(row):
            if not v > 0:
                raise NonPositiveDistance(n, j, v)
        exact = self.exact
        for i, j in combinations(range(n), 2):
            dij, dix, djx = self.d(i, j), row[i], row[j]
            if not leq(dij, dix + djx, exact):
                raise TriangleViolation(i, n, j)
            if not leq(dix, dij + djx, exact):
                raise TriangleViolation(i, j, n)
            if not leq(djx, dij + dix, exact):
                raise TriangleViolation(j, i, n)
        self._rows.append(row)
        return n

    def violations(self) -> list[tuple[int, int, int]]:
        """Re-check every triple post hoc; returns the failing (i, j, k) triples."""
        bad = []
        for i in range(self.n):
            for j in range(self.n):
                for k in range(self.n):
                    if len({i, j, k}) == 3 and not leq(
                        self.d(i, k), self.d(i, j) + self.d(j, k), self.exact
                    ):
                        bad.append((i, j, k))
        return bad

    def matrix(self) -> list[list[Number]]:
        return [[self.d(i, j) for j in range(self.n)] for i in range(self.n)]

    def copy(self) -> "MetricSpace":
        out = MetricSpace(self.backend)
        out._rows = [list(r) for r in self._rows]
        return out

    def subspace(self, order: Sequence[int]) -> "MetricSpace":
        """The metric induced on ``order``, re-exposed in that order."""
        out = MetricSpace(self.backend)
        for k, p in enumerate(order):
            out._rows.append([self.d(p, q) for q in order[:k]])
        return out

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], backend: str = "rational") -> "MetricSpace":
        space = cls(backend)
        for i, row in enumerate(matrix):
            if len(row) != len(matrix):
                raise DimensionMismatch("distance matrix must be square")
            for j in range(i):
                if convert(row[j], backend) != convert(matrix[j][i], backend):
                    raise ValueError(f"distance matrix is not symmetric at ({i},{j})")
            space.expose(row[:i])
        return space

    def to_json(self) -> dict[str, Any]:
        return {"backend": self.backend, "dist": [[encode(x) for x in r] for r in self.matrix()]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "MetricSpace":
        backend = obj.get("backend", "rational")
        rows = [[decode(x, backend) for x in r] for r in obj["dist"]]
        return cls.from_matrix(rows, backend)

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricSpace) and self.backend == other.backend and self._rows == other._rows

    def __repr__(self) -> str:
        return f"MetricSpace(n={self.n}, backend={self.backend!r})"


def host_distance(a: Sequence, b: Sequence, norm: str) -> Number:
    """Distance between two coordinate tuples under ``l1``, ``l2``, ``linf`` or ``line``."""
    if len(a) != len(b):
        raise DimensionMismatch(f"dimensions differ: {len(a)} vs {len(b)}")
    diffs = [abs(x - y) for x, y in zip(a, b)]
    if not diffs:
        return 0
    if norm in ("l1", "line"):
        return sum(diffs[1:], diffs[0])
    if norm == "linf":
        return max(diffs)
    if norm == "l2":
        sq = sum((x * x for x in diffs[1:]), diffs[0] * diffs[0])
        if isinstance(sq, (Fraction, int)):
            return exact_sqrt(Fraction(sq))
        return math.sqrt(sq)
    raise ValueError(f"unknown norm {norm!r}")


@dataclass
class HostPointSet:
    """Images of the exposed points in a host space.

    ``coords`` is an ``(n, D)`` array. Integer arrays carry a ``scale`` and
    stand for the exact rationals ``coords / scale``; object arrays hold
    Fractions; float arrays are plain floats. Tree-tagged sets instead hold a
    tree exposing ``point_distance(i, j)``.
    """

    norm: str
    coords: np.ndarray | None = None
    scale: int = 1
    tree: Any = None

    def __post_init__(self):
        if self.norm not in NORMS:
            raise ValueError(f"unknown norm {self.norm!r}")
        if self.norm == "tree":
            if self.tree is None:
                raise ValueError("tree-tagged host sets need a tree")
        else:
            arr = self.coords
            if not isinstance(arr, np.ndarray):
                rows = [tuple(r) for r in arr]
                if len({len(r) for r in rows}) > 1:
                    raise DimensionMismatch("coordinate tuples have different dimensions")
                kinds = {type(x) for r in rows for x in r}
                dtype = float if kinds <= {float} and kinds else object
                arr = np.array(rows, dtype=dtype) if rows else np.zeros((0, 0), dtype=object)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            self.coords = arr

    def __len__(self) -> int:
        if self.norm == "tree":
            return self.tree.num_points
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return 0 if self.norm == "tree" else self.coords.shape[1]

    @property
    def exact(self) -> bool:
        return self.norm == "tree" or self.coords.dtype != np.float64

    def point(self, i: int) -> tuple:
        row = self.coords[i]
        if row.dtype.kind == "i":
            return tuple(Fraction(int(v), self.scale) for v in row)
        if row.dtype == object:
            return tuple(Fraction(v) if isinstance(v, int) else v for v in row)
        return tuple(float(v) for v in row)

    def distance(self, i: int, j: int) -> Number:
        if self.norm == "tree":
            return self.tree.point_distance(i, j)
        a, b = self.coords[i], self.coords[j]
        if a.dtype.kind in "iO":
            diff = np.abs(a - b)
            if diff.size == 0:
                return Fraction(0)
            if self.norm in ("l1", "line"):
                raw = diff.sum()
            elif self.norm == "linf":
                raw = diff.max()
            else:
                raw = None
            if raw is not None:
                raw = int(raw) if a.dtype.kind == "i" else raw
                return Fraction(raw) / self.scale
            if a.dtype.kind == "i":
                sq = sum(int(v) * int(v) for v in diff)
                return exact_sqrt(Fraction(sq, self.scale * self.scale))
            return host_distance(self.point(i), self.point(j), "l2")
        diff = np.abs(a - b)
        if diff.size == 0:
            return 0.0
        if self.norm in ("l1", "line"):
            return float(diff.sum())
        if self.norm == "linf":
            return float(diff.max())
        return float(np.sqrt(np.dot(diff, diff)))

    def scaled(self, c) -> "HostPointSet":
        """Every coordinate multiplied by ``c``."""
        if self.norm == "tree":
            raise ValueError("scaling a tree host is not supported")
        if self.coords.dtype.kind == "i":
            c = Fraction(c)
            arr = self.coords.astype(object) * c.numerator
            return HostPointSet(self.norm, _narrow(arr), self.scale * c.denominator)
        return HostPointSet(self.norm, self.coords * c, self.scale)

    def to_json(self) -> dict[str, Any]:
        if self.norm == "tree":
            return {"norm": "tree", "tree": self.tree.to_json()}
        return {"norm": self.norm, "coords": [[encode(x) for x in self.point(i)] for i in range(len(self))]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "HostPointSet":
        norm = obj["norm"]
        if norm == "tree":
            from .tree import WeightedTree

            return cls("tree", tree=WeightedTree.from_json(obj["tree"]))
        rows = [[decode(x) for x in r] for r in obj["coords"]]
        if all(isinstance(x, float) for r in rows for x in r) and any(rows):
            return cls(norm, np.array(rows, dtype=float))
        return cls(norm, [[Fraction(x) if not isinstance(x, Fraction) else x for x in r] for r in rows])


def _narrow(arr: np.ndarray) -> np.ndarray:
    """Back to int64 when every entry fits comfortably."""
    if arr.size and max(abs(int(v)) for v in arr.flat) < 2**62:
        return arr.astype(np.int64)
    return arr


@dataclass
class DistortionReport:
    expansion: Number
    contraction: Number
    distortion: Number
    expansion_pair: tuple[int, int] | None = None
    contraction_pair: tuple[int, int] | None = None
    zero_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        """True when two distinct points coincide in the host."""
        return bool(self.zero_pairs)

    def to_json(self) -> dict[str, Any]:
        return {
            "expansion": encode(self.expansion),
            "contraction": encode(self.contraction),
            "distortion": encode(self.distortion),
            "expansion_pair": list(self.expansion_pair) if self.expansion_pair else None,
            "contraction_pair": list(self.contraction_pair) if self.contraction_pair else None,
            "zero_pairs": [list(p) for p in self.zero_pairs],
        }


def pair_ratios(space: MetricSpace, host: HostPointSet, pairs: Iterable[tuple[int, int]] | None = None):
    """Yield ``(i, j, d(i,j), d_H(i,j))`` over the given (default: all) pairs."""
    if pairs is None:
        pairs = combinations(range(space.n), 2)
    for i, j in pairs:
        yield i, j, space.d(i, j), host.distance(i, j)


def distortion_report(space: MetricSpace, host: HostPointSet, pairs=None) -> DistortionReport:
    """Expansion, contraction and their product, with the witnessing pairs.

    Coinciding images give an infinite contraction (``math.inf``) and are
    listed in ``zero_pairs`` instead of raising.
    """
    if len(host) != space.n:
        raise DimensionMismatch(f"host has {len(host)} points, metric has {space.n}")
    if space.n < 2:
        raise ValueError("distortion needs at least two points")
    expansion = contraction = None
    exp_pair = con_pair = None
    zero = []
    for i, j, d, dh in pair_ratios(space, host, pairs):
        e = dh / d
        if expansion is None or e > expansion:
            expansion, exp_pair = e, (i, j)
        if dh == 0:
            zero.append((i, j))
            if contraction != math.inf:
                contraction, con_pair = math.inf, (i, j)
            continue
        c = d / dh
        if contraction is None or c > contraction:
            contraction, con_pair = c, (i, j)
    if zero:
        distortion = math.inf
    else:
        distortion = expansion * contraction
    return DistortionReport(expansion, contraction, distortion, exp_pair, con_pair, zero)


def load_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def dump_json(obj: Any, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
