"""Adaptive adversary on the unit-length cycle against online tree embeddings.

Each phase halves two arcs whose tree-path images intersect, so after ``t``
phases (``2t + 2`` points) the distortion is at least ``2**(t-1)``.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import CertificateFailure, NoIntersectingPairing
from ..metric import HostPointSet, MetricSpace, distortion_report
from ..tree import paths_intersect
from .transcript import DuelTranscript

QUARTERS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def cycle_distance(a, b):
    """Shorter-arc distance on the cycle of circumference one."""
    diff = abs(a - b) % 1
    return min(diff, 1 - diff)


def cycle_metric(positions) -> MetricSpace:
    space = MetricSpace("rational")
    for k, p in enumerate(positions):
        space.expose([cycle_distance(p, q) for q in positions[:k]])
    return space


def cut_embedding(positions, cut=Fraction(51, 100)) -> HostPointSet:
    """Reference offline map: cut the cycle at ``cut`` and unroll it onto the line."""
    return HostPointSet("line", [((Fraction(p) - cut) % 1,) for p in positions])


def _path_sums(tree, vp, vq, vr, vs):
    dt = tree.distance
    lhs = dt(vr, vp) + dt(vp, vs) + dt(vs, vq) + dt(vq, vr)
    rhs = 2 * dt(vr, vs) + 2 * dt(vp, vq)
    return lhs, rhs


def _offset(pos, start):
    return (pos - start) % 1


def tree_adversary_run(embedder, phases: int, transcript: DuelTranscript | None = None) -> DuelTranscript:
    """Duel an online tree embedder exposing ``embedder.tree`` for ``phases`` phases."""
    if phases < 1:
        raise ValueError("need at least one phase")
    tr = DuelTranscript.begin(transcript, "tree", embedder.name, {"n": phases})
    positions: list[Fraction] = []

    def expose(step, pos):
        row = [cycle_distance(pos, q) for q in positions]
        x = len(positions)
        positions.append(pos)
        tr.expose(step, x, row, label=str(pos))
        embedder.expose(row)
        tr.respond(step, x, embedder.response(x))
        return x

    def intersects(arc1, arc2):
        vo = embedder.tree.vertex_of
        return paths_intersect(embedder.tree, (vo[arc1[0]], vo[arc1[1]]), (vo[arc2[0]], vo[arc2[1]]))

    ids = [expose(1, p) for p in QUARTERS]
    if intersects((ids[0], ids[1]), (ids[2], ids[3])):
        quad = (ids[0], ids[1], ids[2], ids[3])
    elif intersects((ids[1], ids[2]), (ids[3], ids[0])):
        quad = (ids[1], ids[2], ids[3], ids[0])
    else:
        raise NoIntersectingPairing("neither pairing of the quarter points intersects")
    tr.decide(1, quadruple=list(quad))
    home = (positions[quad[0]], positions[quad[2]])
    length = Fraction(1, 4)
    _certify_phase(tr, embedder, positions, quad, home, length, 1, intersects)

    for t in range(2, phases + 1):
        p0, p1, p2, p3 = quad
        a = expose(t, (positions[p0] + length / 2) % 1)
        b = expose(t, (positions[p2] + length / 2) % 1)
        options = [((p0, a), (p2, b)), ((p0, a), (b, p3)), ((a, p1), (p2, b)), ((a, p1), (b, p3))]
        hits = [intersects(*o) for o in options]
        if not any(hits):
            raise NoIntersectingPairing(f"phase {t}: no sub-arc pairing intersects")
        first, second = options[hits.index(True)]
        quad = (*first, *second)
        length /= 2
        tr.decide(t, quadruple=list(quad), pairings=hits)
        _certify_phase(tr, embedder, positions, quad, home, length, t, intersects)

    space = cycle_metric(positions)
    rep = distortion_report(space, embedder.host())
    bound = Fraction(2) ** (phases - 1)
    ok = tr.certify(phases, "final-distortion", bound, rep.distortion, rep.distortion >= bound)
    tr.report = {"distortion": rep.to_json(), "points": len(positions), "passed": tr.passed}
    if not ok:
        raise CertificateFailure("tree-distortion", f"{rep.distortion} < {bound}")
    return tr


def _certify_phase(tr, embedder, positions, quad, home, length, t, intersects):
    p, q, r, s = quad
    inside = all(
        _offset(positions[a], h) <= Fraction(1, 4) and _offset(positions[b], h) <= Fraction(1, 4)
        for (a, b), h in (((p, q), home[0]), ((r, s), home[1]))
    )
    target = Fraction(1, 2 ** (t + 1))
    lengths_ok = length == target and cycle_distance(positions[p], positions[q]) == target
    lengths_ok = lengths_ok and cycle_distance(positions[r], positions[s]) == target
    meet = intersects((p, q), (r, s))
    ok = tr.certify(t, "quadruple", "invariant", "ok" if inside and lengths_ok and meet else "broken", inside and lengths_ok and meet)
    if not ok:
        raise CertificateFailure("tree-quadruple", f"phase {t}")
    vo = embedder.tree.vertex_of
    lhs, rhs = _path_sums(embedder.tree, vo[p], vo[q], vo[r], vo[s])
    if not tr.certify(t, "path-sum", rhs, lhs, lhs <= rhs):
        raise CertificateFailure("tree-path-sum", f"phase {t}: {lhs} > {rhs}")
    sub = [p, q, r, s]
    space = cycle_metric([positions[i] for i in sub])
    host = _SubTreeHost(embedder.tree, [vo[i] for i in sub])
    local = distortion_report(space, host).distortion
    bound = Fraction(2) ** (t - 1)
    if not tr.certify(t, "distortion", bound, local, local >= bound):
        raise CertificateFailure("tree-distortion", f"phase {t}: {local} < {bound}")


class _SubTreeHost:
    """Distances between a chosen list of tree vertices, in HostPointSet form."""

    norm = "tree"

    def __init__(self, tree, vertices):
        self.tree, self.vertices = tree, vertices

    def __len__(self):
        return len(self.vertices)

    def distance(self, i, j):
        return self.tree.distance(self.vertices[i], self.vertices[j])
