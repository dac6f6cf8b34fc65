"""Series-parallel doubling adversary against non-contracting embeddings into l2.

The hard metric is the shortest-path metric of a graph that starts as a unit
edge; each generation replaces the most-expanded edge of the previous
generation by a 4-cycle of half-weight edges, exposing its two new vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from ..errors import CertificateFailure, NonContractionBreach
from ..metric import MetricSpace, distortion_report
from .transcript import DuelTranscript


def edge_weight(generation: int) -> Fraction:
    """Weight of the edges created in ``generation`` (the initial edge is generation 1)."""
    return Fraction(1, 2 ** (generation - 1))


@dataclass(frozen=True)
class Edge:
    v: int
    u: int
    weight: Fraction
    generation: int


class SeriesParallelState:
    """Edge list with generation tags plus the metric of exposed vertices."""

    def __init__(self):
        self.space = MetricSpace("rational")
        self.edges: list[Edge] = []
        self.generation = 0

    def start(self) -> list[list[Fraction]]:
        """Generation 1: the unit-weighted K2. Returns the two exposure rows."""
        self.space.expose([])
        self.space.expose([Fraction(1)])
        self.edges = [Edge(0, 1, Fraction(1), 1)]
        self.generation = 1
        return [[], [Fraction(1)]]

    def candidates(self) -> list[Edge]:
        return [e for e in self.edges if e.generation == self.generation]

    def replace(self, edge: Edge) -> tuple[int, int, list, list]:
        """Replace ``edge`` by the 4-cycle v-x-u-y-v and expose x then y.

        The path v-x-u has the old edge's length, so distances among old
        vertices are unchanged and new rows follow from the endpoints' rows.
        """
        if edge not in self.edges:
            raise ValueError(f"{edge} is not an edge of the current graph")
        g = self.generation + 1
        w = edge_weight(g)
        if w * 2 != edge.weight:
            raise ValueError("only edges of the latest generation can be replaced")
        v, u = edge.v, edge.u
        n = self.space.n
        old = [min(w + self.space.d(v, z), w + self.space.d(u, z)) for z in range(n)]
        x = self.space.expose(old)
        y = self.space.expose(old + [2 * w])
        self.edges.remove(edge)
        self.edges += [Edge(v, x, w, g), Edge(x, u, w, g), Edge(u, y, w, g), Edge(y, v, w, g)]
        self.generation = g
        return x, y, old, old + [2 * w]

    def apsp(self) -> list[list[Fraction]]:
        """Independent Floyd-Warshall recomputation from the edge list."""
        n = self.space.n
        inf = None
        dist = [[Fraction(0) if i == j else inf for j in range(n)] for i in range(n)]
        for e in self.edges:
            dist[e.v][e.u] = dist[e.u][e.v] = e.weight
        for k in range(n):
            for i in range(n):
                dik = dist[i][k]
                if dik is None:
                    continue
                for j in range(n):
                    dkj = dist[k][j]
                    if dkj is None:
                        continue
                    if dist[i][j] is None or dik + dkj < dist[i][j]:
                        dist[i][j] = dik + dkj
        return dist


def _norm(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def parallelogram_certificate(phi_v, phi_u, phi_x, phi_y, generation: int, rel_tol: float = 1e-3):
    """Check the inductive step for ``generation`` and return the most expanded new edge.

    Premise: ``|phi_v - phi_u| >= sqrt(g-1) * 2^(2-g)``. By the parallelogram
    inequality the four new edges (of weight ``2^(1-g)``) then contain one
    expanded by at least ``sqrt(g)``. Returns ``((a, b), expansion)`` with
    ``a, b`` in ``{"v", "x", "u", "y"}``.
    """
    g = generation
    old_w = float(edge_weight(g - 1))
    new_w = float(edge_weight(g))
    vu = _norm(phi_v, phi_u)
    if vu < math.sqrt(g - 1) * old_w * (1 - rel_tol):
        raise CertificateFailure("l2-premise", f"|phi(v)-phi(u)| = {vu} < sqrt({g - 1}) * {old_w}")
    pts = {"v": phi_v, "u": phi_u, "x": phi_x, "y": phi_y}
    sides = {e: _norm(pts[e[0]], pts[e[1]]) for e in (("v", "x"), ("x", "u"), ("u", "y"), ("y", "v"))}
    lhs = sum(s * s for s in sides.values())
    rhs = vu**2 + _norm(phi_x, phi_y) ** 2
    if lhs < rhs * (1 - 1e-12) - 1e-300:
        raise CertificateFailure("parallelogram", f"{lhs} < {rhs}")
    edge, length = max(sides.items(), key=lambda kv: kv[1])
    expansion = length / new_w
    if expansion < math.sqrt(g) * (1 - rel_tol):
        raise CertificateFailure("l2-expansion", f"best new edge expands by {expansion} < sqrt({g})")
    return edge, expansion


def _check_noncontraction(emb, space: MetricSpace, x: int, tol: float) -> None:
    for z in range(x):
        dh = _norm(emb.image(x), emb.image(z))
        d = float(space.d(x, z))
        if dh < d * (1 - tol):
            raise NonContractionBreach(f"pair ({z},{x}): host distance {dh} < {d}")


def l2_adversary_run(
    embedder, generations: int, rel_tol: float = 1e-3, contraction_tol: float = 1e-7, transcript: DuelTranscript | None = None
):
    """Duel a self-declared non-contracting l2 embedder for ``generations`` generations (2n points)."""
    if generations < 1:
        raise ValueError("need at least one generation")
    tr = DuelTranscript.begin(transcript, "l2", embedder.name, {"n": generations, "rel_tol": rel_tol})
    state = SeriesParallelState()
    rows = state.start()
    for x, row in enumerate(rows):
        tr.expose(1, x, row)
        embedder.expose(row)
        tr.respond(1, x, embedder.response(x))
        _check_noncontraction(embedder, state.space, x, contraction_tol)
    tr.certify(1, "expansion", 1, _norm(embedder.image(0), embedder.image(1)), True)
    for g in range(2, generations + 1):
        def key(e):
            return (-_norm(embedder.image(e.v), embedder.image(e.u)) / float(e.weight), min(e.v, e.u), max(e.v, e.u))

        edge = min(state.candidates(), key=key)
        exp_vu = -key(edge)[0]
        tr.decide(g, edge=[edge.v, edge.u], expansion=exp_vu)
        x, y, row_x, row_y = state.replace(edge)
        for p, row in ((x, row_x), (y, row_y)):
            tr.expose(g, p, row)
            embedder.expose(row)
            tr.respond(g, p, embedder.response(p))
            _check_noncontraction(embedder, state.space, p, contraction_tol)
        apsp_ok = state.apsp() == state.space.matrix()
        tr.certify(g, "apsp", "exact", "exact" if apsp_ok else "mismatch", apsp_ok)
        if not apsp_ok:
            raise CertificateFailure("apsp", f"generation {g}")
        phis = [embedder.image(p) for p in (edge.v, edge.u, x, y)]
        (a, b), expansion = parallelogram_certificate(*phis, g, rel_tol)
        tr.certify(g, "parallelogram", math.sqrt(g), expansion, True, edge=[a, b])
    rep = distortion_report(state.space, embedder.host())
    bound = math.sqrt(generations) * (1 - rel_tol)
    ok = tr.certify(generations, "final-expansion", bound, rep.expansion, rep.expansion >= bound)
    tr.report = {"distortion": rep.to_json(), "points": state.space.n, "passed": tr.passed}
    if not ok:
        raise CertificateFailure("final-expansion", f"{rep.expansion} < {bound}")
    return tr


def grid_new_edge_expansions(phi_v: float, phi_u: float, xs, ys, generation: int = 2):
    """Best max-new-edge expansion over non-contracting 1-D placements of x and y.

    Helper for checking the inductive base numerically: returns the minimum
    over all grid placements of the largest new-edge expansion.
    """
    w_new = float(edge_weight(generation))
    w_old = float(edge_weight(generation - 1))
    best = math.inf
    for x, y in product(xs, ys):
        if min(abs(x - phi_v), abs(x - phi_u), abs(y - phi_v), abs(y - phi_u)) < w_new:
            continue
        if abs(x - y) < w_old:
            continue
        worst = max(abs(x - phi_v), abs(x - phi_u), abs(y - phi_u), abs(y - phi_v)) / w_new
        best = min(best, worst)
    return best
