"""Online embeddings whose host is a weighted tree, and the isometric l1 / linf lifts."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Iterator, Sequence

import numpy as np

from .errors import DimensionUnknown, NotATreeMetric
from .metric import HostPointSet, MetricSpace
from .numeric import Number, close, convert, decode, encode

EXPOSED = "exposed"
STEINER = "steiner"


class WeightedTree:
    """Tree with exposed and Steiner vertices and strictly positive edge weights.

    Vertices are integers; ``vertex_of[pid]`` maps an exposed point to its
    vertex and ``point_of`` is the inverse.
    """

    def __init__(self, exact: bool = True):
        self.exact = exact
        self.adj: dict[int, dict[int, Number]] = {}
        self.kind: dict[int, str] = {}
        self.point_of: dict[int, int] = {}
        self.vertex_of: list[int] = []
        self._next = 0

    @property
    def num_points(self) -> int:
        return len(self.vertex_of)

    @property
    def root(self) -> int | None:
        return self.vertex_of[0] if self.vertex_of else None

    @property
    def vertices(self) -> list[int]:
        return list(self.adj)

    def steiner_vertices(self) -> list[int]:
        return [v for v, k in self.kind.items() if k == STEINER]

    def edges(self) -> Iterator[tuple[int, int, Number]]:
        for u, nbrs in self.adj.items():
            for v, w in nbrs.items():
                if u < v:
                    yield u, v, w

    def add_vertex(self, point: int | None = None) -> int:
        v = self._next
        self._next += 1
        self.adj[v] = {}
        if point is None:
            self.kind[v] = STEINER
        else:
            self._bind(v, point)
        return v

    def _bind(self, v: int, point: int) -> None:
        if point != len(self.vertex_of):
            raise ValueError(f"points must be bound in exposure order (got {point})")
        self.kind[v] = EXPOSED
        self.point_of[v] = point
        self.vertex_of.append(v)

    def promote(self, v: int, point: int) -> None:
        """Turn a Steiner vertex into the vertex of a newly exposed point."""
        if self.kind[v] != STEINER:
            raise ValueError(f"vertex {v} is not a Steiner vertex")
        self._bind(v, point)

    def add_edge(self, u: int, v: int, w: Number) -> None:
        if not w > 0:
            raise ValueError(f"edge weight must be positive, got {w}")
        self.adj[u][v] = w
        self.adj[v][u] = w

    def remove_edge(self, u: int, v: int) -> Number:
        w = self.adj[u].pop(v)
        del self.adj[v][u]
        return w

    def split_edge(self, a: int, b: int, t: Number, point: int | None = None) -> int:
        """Insert a new vertex on edge a-b at distance ``t`` from ``a`` (0 < t < w)."""
        w = self.remove_edge(a, b)
        s = self.add_vertex(point)
        self.add_edge(a, s, t)
        self.add_edge(s, b, w - t)
        return s

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the unique u-v path, endpoints included."""
        if u == v:
            return [u]
        parent = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y in self.adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        if v not in parent:
            raise KeyError(f"vertices {u} and {v} are not connected")
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]

    def distance(self, u: int, v: int) -> Number:
        p = self.path(u, v)
        total = 0 if self.exact else 0.0
        for a, b in zip(p, p[1:]):
            total = total + self.adj[a][b]
        return Fraction(total) if self.exact else total

    def distances_from(self, u: int) -> dict[int, Number]:
        """Single-source distances by one traversal."""
        dist = {u: Fraction(0) if self.exact else 0.0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y, w in self.adj[x].items():
                if y not in dist:
                    dist[y] = dist[x] + w
                    queue.append(y)
        return dist

    def point_distance(self, i: int, j: int) -> Number:
        return self.distance(self.vertex_of[i], self.vertex_of[j])

    def locate(self, u: int, v: int, t: Number):
        """The point at distance ``t`` from ``u`` along the u-v path.

        Returns ``("vertex", x)`` or ``("edge", a, b, offset_from_a)``.
        """
        p = self.path(u, v)
        walked = 0
        for a, b in zip(p, p[1:]):
            if close(t, walked, self.exact) or t < walked:
                return ("vertex", a)
            w = self.adj[a][b]
            if t < walked + w and not close(t, walked + w, self.exact):
                return ("edge", a, b, t - walked)
            walked = walked + w
        return ("vertex", p[-1])

    def to_json(self) -> dict[str, Any]:
        verts = []
        for v in sorted(self.adj):
            item = {"id": v, "kind": self.kind[v]}
            if v in self.point_of:
                item["point"] = self.point_of[v]
            verts.append(item)
        return {"vertices": verts, "edges": [[u, v, encode(w)] for u, v, w in self.edges()]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "WeightedTree":
        edges = [(u, v, decode(w)) for u, v, w in obj["edges"]]
        tree = cls(exact=all(not isinstance(w, float) for _, _, w in edges))
        points = sorted((item["point"], item["id"]) for item in obj["vertices"] if item["kind"] == EXPOSED)
        for item in obj["vertices"]:
            tree.adj[item["id"]] = {}
            tree.kind[item["id"]] = item["kind"]
        for pid, v in points:
            tree.point_of[v] = pid
            tree.vertex_of.append(v)
        for u, v, w in edges:
            tree.add_edge(u, v, w)
        tree._next = max(tree.adj, default=-1) + 1
        return tree

    def copy(self) -> "WeightedTree":
        out = WeightedTree(self.exact)
        out.adj = {u: dict(n) for u, n in self.adj.items()}
        out.kind = dict(self.kind)
        out.point_of = dict(self.point_of)
        out.vertex_of = list(self.vertex_of)
        out._next = self._next
        return out


def tree_distance(tree: WeightedTree, u: int, v: int) -> Number:
    return tree.distance(u, v)


def paths_intersect(tree: WeightedTree, first: tuple[int, int], second: tuple[int, int]) -> bool:
    """True iff the tree paths between the two vertex pairs share a vertex.

    Two tree paths that share an interior point of an edge contain the whole
    edge, so a shared vertex is equivalent to a shared point.
    """
    return not set(tree.path(*first)).isdisjoint(tree.path(*second))


# ---------------------------------------------------------------------------
# four-point condition


def four_point_sums(space: MetricSpace, a: int, b: int, c: int, e: int) -> tuple:
    d = space.d
    return (d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c))


def _violates(space: MetricSpace, quad) -> bool:
    s = sorted(four_point_sums(space, *quad))
    return not close(s[1], s[2], space.exact)


def four_point_check(space: MetricSpace):
    """None when every quadruple satisfies the four-point condition, else a violating quadruple."""
    for quad in combinations(range(space.n), 4):
        if _violates(space, quad):
            return quad
    return None


def four_point_check_newest(space: MetricSpace):
    """Check only the quadruples that contain the newest point."""
    x = space.n - 1
    for triple in combinations(range(x), 3):
        quad = (*triple, x)
        if _violates(space, quad):
            return quad
    return None


# ---------------------------------------------------------------------------
# greedy embedding (no Steiner points)


class GreedyTreeEmbedder:
    """Attach every new point to its closest predecessor by an edge of that length.

    The tree metric dominates the input and its expansion after ``k`` points
    is at most ``2**(k-1) - 1``. Ties go to the smallest point id.
    """

    name = "greedy-tree"
    host_kind = "tree"

    def __init__(self, backend: str = "rational"):
        self.space = MetricSpace(backend)
        self.tree = WeightedTree(exact=self.space.exact)
        self.father: dict[int, int] = {}

    def expose(self, dists: Sequence) -> int:
        x = self.space.expose(dists)
        return self.extend(x)

    def extend(self, x: int) -> int:
        if x != self.tree.num_points or x >= self.space.n:
            raise ValueError(f"point {x} is not the newest exposed point")
        v = self.tree.add_vertex(x)
        if x > 0:
            row = self.space.row(x)
            y = min(range(x), key=lambda j: (row[j], j))
            self.father[x] = y
            self.tree.add_edge(self.tree.vertex_of[y], v, row[y])
        return v

    def response(self, x: int) -> dict[str, Any]:
        if x == 0:
            return {"vertex": self.tree.vertex_of[0]}
        y = self.father[x]
        return {"vertex": self.tree.vertex_of[x], "father": y, "weight": encode(self.space.d(x, y))}

    def host(self) -> HostPointSet:
        return HostPointSet("tree", tree=self.tree)


def greedy_expansion_bound(k: int) -> int:
    """Worst-case expansion after ``k`` points: alpha_2 = 1, alpha_{k+1} = 2 alpha_k + 1."""
    return 2 ** (k - 1) - 1


# ---------------------------------------------------------------------------
# exact Steiner realization of tree metrics


@dataclass
class Attachment:
    """How the newest point entered the tree.

    ``foot`` is the vertex the point hangs from (``None`` for the first point
    or when the point itself landed on the tree), ``weight`` the length of the
    new edge (0 when the point landed on the tree), ``split`` the edge that was
    subdivided and ``split_vertex`` the vertex created by that subdivision.
    """

    point: int
    vertex: int
    foot: int | None
    weight: Number
    split: tuple[int, int] | None = None
    split_vertex: int | None = None
    promoted: bool = False


class SteinerTreeRealizer:
    """Isometric online realization of a tree metric in a weighted tree.

    The new point ``x`` is attached at the foot of the pair ``(u, v)`` with
    the smallest Gromov product ``g = (d(u,x) + d(v,x) - d(u,v)) / 2``
    (largest ``d(u,v)`` among those, then smallest ids), at distance
    ``d(u,x) - g`` from ``u`` along the u-v path, by an edge of weight ``g``.
    Zero-length attachments reuse the vertex instead of adding a zero edge.
    """

    name = "steiner-tree"
    host_kind = "tree"

    def __init__(self, backend: str = "rational"):
        self.space = MetricSpace(backend)
        self.tree = WeightedTree(exact=self.space.exact)
        self.attachments: list[Attachment] = []

    def expose(self, dists: Sequence) -> int:
        x = self.space.expose(dists)
        return self.extend(x).vertex

    def extend(self, x: int) -> Attachment:
        space, tree = self.space, self.tree
        if x != tree.num_points or x >= space.n:
            raise ValueError(f"point {x} is not the newest exposed point")
        quad = four_point_check_newest(space)
        if quad is not None:
            raise NotATreeMetric(quad)
        if x == 0:
            att = Attachment(0, tree.add_vertex(0), None, convert(0, space.backend))
        elif x == 1:
            w = space.d(0, 1)
            v = tree.add_vertex(1)
            tree.add_edge(tree.vertex_of[0], v, w)
            att = Attachment(1, v, tree.vertex_of[0], w)
        else:
            att = self._attach(x)
        self._verify(x)
        self.attachments.append(att)
        return att

    def _attach(self, x: int) -> Attachment:
        space, tree = self.space, self.tree
        d = space.d
        best = None
        for u, v in combinations(range(x), 2):
            g = (d(u, x) + d(v, x) - d(u, v)) / 2
            key = (g, -d(u, v), u, v)
            if best is None or key < best:
                best = key
        g, _, u, v = best
        if not space.exact and abs(g) <= 1e-12 * float(d(u, x)):
            g = 0.0
        t = d(u, x) - g
        loc = tree.locate(tree.vertex_of[u], tree.vertex_of[v], t)
        if loc[0] == "vertex":
            s = loc[1]
            if g == 0:
                if tree.kind[s] != STEINER:
                    raise NotATreeMetric((u, v, x), f"point {x} coincides with an exposed point")
                tree.promote(s, x)
                return Attachment(x, s, None, g, promoted=True)
            xv = tree.add_vertex(x)
            tree.add_edge(s, xv, g)
            return Attachment(x, xv, s, g)
        _, a, b, off = loc
        if g == 0:
            xv = tree.split_edge(a, b, off, point=x)
            return Attachment(x, xv, None, g, split=(a, b), split_vertex=xv)
        s = tree.split_edge(a, b, off)
        xv = tree.add_vertex(x)
        tree.add_edge(s, xv, g)
        return Attachment(x, xv, s, g, split=(a, b), split_vertex=s)

    def _verify(self, x: int) -> None:
        dist = self.tree.distances_from(self.tree.vertex_of[x])
        for y in range(x):
            if not close(dist[self.tree.vertex_of[y]], self.space.d(x, y), self.space.exact):
                quad = four_point_check(self.space)
                raise NotATreeMetric(quad or (y, x), f"tree distance mismatch between {y} and {x}")

    def response(self, x: int) -> dict[str, Any]:
        att = self.attachments[x]
        return {
            "vertex": att.vertex,
            "foot": att.foot,
            "weight": encode(att.weight),
            "split": list(att.split) if att.split else None,
        }

    def host(self) -> HostPointSet:
        return HostPointSet("tree", tree=self.tree)


def realize_tree_metric(space: MetricSpace) -> WeightedTree:
    """Replay the points of ``space`` in order through the Steiner realizer."""
    realizer = SteinerTreeRealizer(space.backend)
    for x in range(space.n):
        realizer.expose(space.row(x))
    return realizer.tree


class SteinerGreedyEmbedder:
    """Best-effort Steiner-point tree embedding for arbitrary metrics.

    Uses the same foot rule as :class:`SteinerTreeRealizer`, rescaled onto
    the current tree path, and lengthens the new edge as needed so that the
    tree metric never contracts ``d``.
    """

    name = "steiner-greedy"
    host_kind = "tree"

    def __init__(self, backend: str = "rational"):
        self.space = MetricSpace(backend)
        self.tree = WeightedTree(exact=self.space.exact)
        self.attachments: list[Attachment] = []

    def expose(self, dists: Sequence) -> int:
        x = self.space.expose(dists)
        return self.extend(x)

    def extend(self, x: int) -> int:
        space, tree = self.space, self.tree
        if x == 0:
            att = Attachment(0, tree.add_vertex(0), None, convert(0, space.backend))
            self.attachments.append(att)
            return att.vertex
        d = space.d
        if x == 1:
            u = v = 0
            g, t = d(0, 1), 0
        else:
            g, _, u, v = min(
                ((d(u, x) + d(v, x) - d(u, v)) / 2, -d(u, v), u, v) for u, v in combinations(range(x), 2)
            )
            path_len = tree.point_distance(u, v)
            t = (d(u, x) - g) / d(u, v) * path_len
        loc = tree.locate(tree.vertex_of[u], tree.vertex_of[v], t)
        split = None
        if loc[0] == "vertex":
            s = loc[1]
        else:
            _, a, b, off = loc
            s = tree.split_edge(a, b, off)
            split = (a, b)
        from_s = tree.distances_from(s)
        deficit = max(d(x, y) - from_s[tree.vertex_of[y]] for y in range(x))
        w = max(g, deficit)
        if w <= 0:
            tree.promote(s, x)
            att = Attachment(x, s, None, convert(0, space.backend), split, s if split else None, True)
        else:
            xv = tree.add_vertex(x)
            tree.add_edge(s, xv, w)
            att = Attachment(x, xv, s, w, split, s if split else None)
        self.attachments.append(att)
        return att.vertex

    response = SteinerTreeRealizer.response

    def host(self) -> HostPointSet:
        return HostPointSet("tree", tree=self.tree)


# ---------------------------------------------------------------------------
# l1 and linf lifts


class TreeL1Embedder:
    """Online isometric embedding of a tree metric into l1 with at most n-1 coordinates.

    Adjacent tree vertices differ in exactly one coordinate. A Steiner vertex
    created on edge a-b copies ``a`` and interpolates on that coordinate; a
    new point copies its foot and gets a fresh coordinate equal to the
    attaching weight.
    """

    name = "tree-l1"
    host_kind = "l1"

    def __init__(self, backend: str = "rational"):
        self.realizer = SteinerTreeRealizer(backend)
        self.vcoords: dict[int, dict[int, Number]] = {}
        self.dim = 0

    @property
    def space(self) -> MetricSpace:
        return self.realizer.space

    @property
    def tree(self) -> WeightedTree:
        return self.realizer.tree

    def expose(self, dists: Sequence) -> tuple:
        x = self.space.expose(dists)
        att = self.realizer.extend(x)
        self._apply(att)
        return self.coords(x)

    def _apply(self, att: Attachment) -> None:
        tree = self.tree
        if att.point == 0:
            self.vcoords[att.vertex] = {}
            return
        if att.split is not None:
            a, b = att.split
            s = att.split_vertex
            ca, cb = self.vcoords[a], self.vcoords[b]
            differing = [c for c in set(ca) | set(cb) if ca.get(c, 0) != cb.get(c, 0)]
            if len(differing) != 1:
                raise AssertionError(f"edge {a}-{b} differs in {len(differing)} coordinates")
            c = differing[0]
            step = tree.adj[a][s]
            sign = 1 if cb.get(c, 0) > ca.get(c, 0) else -1
            cs = dict(ca)
            cs[c] = ca.get(c, 0) + sign * step
            self.vcoords[s] = cs
        if att.foot is not None:
            cx = dict(self.vcoords[att.foot])
            cx[self.dim] = att.weight
            self.dim += 1
            self.vcoords[att.vertex] = cx

    def vertex_coords(self, v: int, dim: int | None = None) -> tuple:
        dim = self.dim if dim is None else dim
        zero = convert(0, self.space.backend)
        c = self.vcoords[v]
        return tuple(c.get(i, zero) for i in range(dim))

    def coords(self, x: int, dim: int | None = None) -> tuple:
        return self.vertex_coords(self.tree.vertex_of[x], dim)

    def response(self, x: int) -> dict[str, Any]:
        return {"coords": [encode(c) for c in self.coords(x)]}

    def host(self) -> HostPointSet:
        rows = [self.coords(x) for x in range(self.space.n)]
        return HostPointSet("l1", rows if self.dim else np.zeros((len(rows), 0), dtype=object))


def sign_vectors(dim: int) -> list[tuple[int, ...]]:
    """All +-1 vectors of length ``dim`` whose first entry is +1."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    return [(1, *rest) for rest in product((1, -1), repeat=dim - 1)]


class LinfLift:
    """Isometry from l1^D into linf^(2^(D-1)), applied one point at a time.

    ``D`` must be fixed before the first point; lifted images never change.
    """

    def __init__(self, dim: int | None):
        if dim is None:
            raise DimensionUnknown("the l1 dimension must be known before the first exposure")
        self.dim = dim
        self.signs = np.array(sign_vectors(dim), dtype=object)

    def lift(self, point: Sequence) -> tuple:
        if len(point) > self.dim:
            raise ValueError(f"point has {len(point)} coordinates, lift was built for {self.dim}")
        padded = list(point) + [0] * (self.dim - len(point))
        return tuple(self.signs.dot(np.array(padded, dtype=object)))


def l1_to_linf_lift(points: Sequence[Sequence], dim: int | None) -> HostPointSet:
    lift = LinfLift(dim)
    return HostPointSet("linf", [lift.lift(p) for p in points])


class TreeLinfEmbedder:
    """Tree metrics on at most ``n`` points into linf^(2^(n-2)), isometrically and online."""

    name = "tree-linf"
    host_kind = "linf"

    def __init__(self, n: int | None, backend: str = "rational"):
        if n is None:
            raise DimensionUnknown("the number of points must be declared up front")
        self.l1 = TreeL1Embedder(backend)
        self.lifter = LinfLift(max(n - 1, 1))
        self.images: list[tuple] = []

    @property
    def space(self) -> MetricSpace:
        return self.l1.space

    def expose(self, dists: Sequence) -> tuple:
        if self.space.n >= self.lifter.dim + 1:
            raise ValueError("more points than declared")
        self.l1.expose(dists)
        x = self.space.n - 1
        self.images.append(self.lifter.lift(self.l1.coords(x)))
        return self.images[-1]

    def response(self, x: int) -> dict[str, Any]:
        return {"coords": [encode(c) for c in self.images[x]]}

    def host(self) -> HostPointSet:
        return HostPointSet("linf", self.images)
