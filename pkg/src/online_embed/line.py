"""Online embedding of an arbitrary finite metric into the real line."""
from __future__ import annotations

from bisect import bisect_right, insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .metric import HostPointSet, MetricSpace, distortion_report
from .numeric import Number, encode


def leftmost_gap(sorted_positions: Sequence[Number], start: Number, length: Number) -> Number:
    """Smallest ``s >= start`` such that ``(s, s + length)`` holds no position.

    Only ``start`` itself and the positions to its right can be optimal, so
    they are scanned in ascending order.
    """
    if not length > 0:
        raise ValueError("length must be positive")
    k = bisect_right(sorted_positions, start)
    s = start
    while k < len(sorted_positions):
        nxt = sorted_positions[k]
        if nxt >= s + length:
            return s
        s = nxt
        k += 1
    return s


@dataclass
class LineState:
    pos: list[Number] = field(default_factory=list)
    father: list[int | None] = field(default_factory=list)
    # placement interval of every non-initial point as (left end, length)
    interval: list[tuple[Number, Number] | None] = field(default_factory=list)
    sorted_pos: list[Number] = field(default_factory=list)

    def ord(self, x: int) -> int:
        """1-based exposure index."""
        return x + 1


class LineEmbedder:
    """Place x_k at the middle of the leftmost empty open interval of length
    ``2**-k * d(z, x_k)`` starting at or to the right of its father ``z``.

    ``z`` is the closest earlier point (ties: smallest id). On the rational
    backend every position is an exact dyadic multiple of input distances.
    """

    name = "line"
    host_kind = "line"

    def __init__(self, backend: str = "rational"):
        self.space = MetricSpace(backend)
        self.state = LineState()

    def expose(self, dists: Sequence) -> Number:
        x = self.space.expose(dists)
        return self.place(x)

    def place(self, x: int) -> Number:
        st, space = self.state, self.space
        if x != len(st.pos) or x >= space.n:
            raise ValueError(f"point {x} is not the newest exposed point")
        if x == 0:
            p = Fraction(0) if space.exact else 0.0
            st.father.append(None)
            st.interval.append(None)
        else:
            k = st.ord(x)
            row = space.row(x)
            z = min(range(x), key=lambda j: (row[j], j))
            length = row[z] / 2**k
            s = leftmost_gap(st.sorted_pos, st.pos[z], length)
            p = s + length / 2
            st.father.append(z)
            st.interval.append((s, length))
        st.pos.append(p)
        insort(st.sorted_pos, p)
        return p

    def response(self, x: int) -> dict[str, Any]:
        return {"pos": encode(self.state.pos[x]), "father": self.state.father[x]}

    def host(self) -> HostPointSet:
        return HostPointSet("line", [(p,) for p in self.state.pos])

    def to_json(self) -> dict[str, Any]:
        return {"norm": "line", "pos": [encode(p) for p in self.state.pos], "father": self.state.father}


def expansion_bound(k: int) -> int:
    """Expansion after k points is at most 2**(k+1)."""
    return 2 ** (k + 1)


def contraction_bound(n: int) -> int:
    return n * 2 ** (n + 1)


def father_offset_bound(k: int, d: Number) -> Number:
    """Upper bound on pos(x_k) - pos(father(x_k)) for the k-th point."""
    return (Fraction(2 * k - 3, 2) if isinstance(d, Fraction) else k - 1.5) * d / 2**k


@dataclass
class GapCheck:
    point: int
    side: str
    hits: int
    required: Number
    found: Number

    @property
    def ok(self) -> bool:
        return self.found >= self.required


def gap_checks(state: LineState) -> list[GapCheck]:
    """Check the empty-subinterval guarantees for every placement interval.

    Left half: after ``p`` hits an empty open interval of length at least
    ``|I_L| / 2**p`` is adjacent to pos(x). Right half: after ``r`` hits some
    empty open subinterval has length at least ``|I_R| / (r + 1)``.
    """
    out = []
    for x, iv in enumerate(state.interval):
        if iv is None:
            continue
        s, length = iv
        half = length / 2
        px = state.pos[x]
        left_hits = [q for q in state.sorted_pos if s < q < px]
        right_hits = [q for q in state.sorted_pos if px < q < s + length]
        adjacent = px - (max(left_hits) if left_hits else s)
        out.append(GapCheck(x, "left", len(left_hits), half / 2 ** len(left_hits), adjacent))
        cuts = [px, *right_hits, s + length]
        widest = max(b - a for a, b in zip(cuts, cuts[1:]))
        out.append(GapCheck(x, "right", len(right_hits), half / (len(right_hits) + 1), widest))
    return out


def run_line_bounds(space: MetricSpace) -> dict[str, Any]:
    """Embed ``space`` point by point and check every per-step and final bound.

    Returns a dict with per-step expansion records, the final contraction
    and the failing checks (empty when all bounds hold).
    """
    emb = LineEmbedder(space.backend)
    failures = []
    steps = []
    for x in range(space.n):
        emb.expose(space.row(x))
        k = x + 1
        st = emb.state
        if x > 0:
            z = st.father[x]
            off = st.pos[x] - st.pos[z]
            if not (0 <= off <= father_offset_bound(k, space.d(x, z))):
                failures.append(("father-offset", x, off))
        if k >= 2:
            rep = distortion_report(emb.space, emb.host())
            steps.append({"k": k, "expansion": rep.expansion, "bound": expansion_bound(k)})
            if not rep.expansion <= expansion_bound(k):
                failures.append(("expansion", k, rep.expansion))
        for g in gap_checks(st):
            if not g.ok:
                failures.append(("gap", g.point, g.side, g.hits))
    final = distortion_report(emb.space, emb.host()) if space.n >= 2 else None
    if final is not None and not final.contraction <= contraction_bound(space.n):
        failures.append(("contraction", space.n, final.contraction))
    if len(set(emb.state.pos)) != len(emb.state.pos):
        failures.append(("distinct", None, None))
    return {"embedder": emb, "steps": steps, "final": final, "failures": failures}
