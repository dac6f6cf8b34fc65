"""Four-point adversary forcing contraction 1 + 1/(2k+1) on 1-Lipschitz maps into linf^k."""
from __future__ import annotations

from fractions import Fraction

from ..errors import CertificateFailure, LipschitzBreach
from ..metric import MetricSpace, distortion_report
from ..numeric import is_exact
from .transcript import DuelTranscript


def antipodal_rows(alpha) -> list[list]:
    """Exposure rows of d_alpha on (a, b, c, q): two antipodal pairs on a cycle of length 2."""
    one = Fraction(1)
    return [[], [one], [alpha, one - alpha], [one - alpha, alpha, one]]


def antipodal_metric(alpha) -> MetricSpace:
    alpha = Fraction(alpha)
    if not 0 < alpha <= Fraction(1, 2):
        raise ValueError("alpha must lie in (0, 1/2]")
    space = MetricSpace("rational")
    for row in antipodal_rows(alpha):
        space.expose(row)
    return space


def choose_alpha(b_offsets) -> tuple:
    """Midpoint ``p`` of the longest gap cut out of [0, 1] by the offsets (leftmost on ties).

    Returns ``(p, alpha, gap)`` with ``alpha = (1 - p) / 2``.
    """
    cuts = [Fraction(0), *sorted(Fraction(v) for v in b_offsets), Fraction(1)]
    gap = max(zip(cuts, cuts[1:]), key=lambda ab: (ab[1] - ab[0], -ab[0]))
    p = (gap[0] + gap[1]) / 2
    return p, (1 - p) / 2, gap


def _linf(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def linf_dim_adversary_run(embedder, k: int, transcript: DuelTranscript | None = None) -> DuelTranscript:
    """Duel a 1-Lipschitz online embedder into linf^k."""
    tr = DuelTranscript.begin(transcript, "linf-dim", embedder.name, {"n": k})
    space = MetricSpace("rational")
    images = []

    def expose(step, row, label):
        x = space.expose(row)
        tr.expose(step, x, row, label=label)
        img = tuple(embedder.expose(row))
        if len(img) != k:
            raise ValueError(f"embedder answered with {len(img)} coordinates, expected {k}")
        images.append(img)
        tr.respond(step, x, embedder.response(x))
        exact = all(is_exact(v) for v in img)
        for z in range(x):
            slack = 0 if exact else 1e-9
            if _linf(img, images[z]) > space.d(x, z) + slack:
                raise LipschitzBreach(f"pair ({z},{x}) is expanded")
        return x

    expose(1, [], "a")
    expose(1, [Fraction(1)], "b")
    offsets = [abs(Fraction(vb) - Fraction(va)) for va, vb in zip(images[0], images[1])]
    p, alpha, gap = choose_alpha(offsets)
    tr.decide(2, p=p, alpha=alpha, gap=list(gap))
    sep = min([abs(p - v) for v in offsets] + [p, 1 - p])
    need = Fraction(1, 2 * (k + 1))
    if not tr.certify(2, "pigeonhole", need, sep, sep >= need):
        raise CertificateFailure("linf-pigeonhole", f"{sep} < {need}")
    rows = antipodal_rows(alpha)
    expose(2, rows[2], "c")
    expose(2, rows[3], "q")
    exact = all(is_exact(v) for img in images for v in img)
    slack = 0 if exact else 1e-9
    cq = _linf(images[2], images[3])
    tr.certify(2, "cq-gap", 1 - need, cq, cq <= 1 - need + slack)
    rep = distortion_report(space, embedder.host())
    bound = 1 + Fraction(1, 2 * k + 1)
    ok = tr.certify(2, "contraction", bound, rep.contraction, rep.contraction >= bound - slack)
    tr.report = {"distortion": rep.to_json(), "alpha": str(alpha), "passed": tr.passed}
    if not ok:
        raise CertificateFailure("linf-contraction", f"{rep.contraction} < {bound}")
    return tr
