"""Property suites behind ``online-embed verify``.

Seed splitter: trial ``i`` of a suite run with master seed ``s`` uses
``np.random.SeedSequence(s).spawn(trials)[i]``. The child sequence drives a
``numpy.random.Generator`` for instance generation, and its first 32-bit
state word seeds randomized opponents. Results are ordered by trial index
whatever order the workers finish in.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import generators
from .adversaries import run_duel
from .line import run_line_bounds
from .linf import LinfEmbedder, dimension_bound
from .metric import distortion_report
from .numeric import REL_TOL, encode, leq
from .tree import (
    GreedyTreeEmbedder,
    SteinerTreeRealizer,
    TreeL1Embedder,
    TreeLinfEmbedder,
    four_point_check,
    greedy_expansion_bound,
)


class Checks:
    """Accumulates named bound checks for one trial."""

    def __init__(self):
        self.items: list[dict[str, Any]] = []

    def add(self, name: str, bound, measured, passed: bool) -> bool:
        self.items.append({"name": name, "bound": _enc(bound), "measured": _enc(measured), "pass": bool(passed)})
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.items)


def _enc(v):
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return encode(v)


def trial_seeds(master: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(master).spawn(trials)


def opponent_seed(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1)[0])


def tree_bounds_trial(rng, seq, n: int = 8, **_) -> dict[str, Any]:
    """Greedy tree embedding: per-step expansion recurrence and exact domination."""
    space = generators.random_metric(n, rng)
    emb = GreedyTreeEmbedder(space.backend)
    chk = Checks()
    for x in range(space.n):
        emb.expose(space.row(x))
        k = x + 1
        if k < 2:
            continue
        rep = distortion_report(emb.space, emb.host())
        bound = greedy_expansion_bound(k)
        chk.add(f"expansion@{k}", bound, rep.expansion, leq(rep.expansion, bound, space.exact))
        # domination: contraction <= 1
        chk.add(f"dominates@{k}", 1, rep.contraction, leq(rep.contraction, 1, space.exact))
    rep = distortion_report(emb.space, emb.host())
    bound = greedy_expansion_bound(n)
    chk.add("distortion", bound, rep.distortion, leq(rep.distortion, bound, space.exact))
    return {"backend": space.backend, "checks": chk}


def line_bounds_trial(rng, seq, n: int | None = None, **_) -> dict[str, Any]:
    """Line embedder on a rational metric with 4..10 points (or exactly ``n``)."""
    size = int(rng.integers(4, 11)) if n is None else n
    kind = ("cycle", "tree", "l1")[int(rng.integers(3))]
    space = generators.random_metric(size, rng, kind)
    out = run_line_bounds(space)
    chk = Checks()
    for step in out["steps"]:
        chk.add(f"expansion@{step['k']}", step["bound"], step["expansion"], step["expansion"] <= step["bound"])
    final = out["final"]
    chk.add("contraction", size * 2 ** (size + 1), final.contraction, final.contraction <= size * 2 ** (size + 1))
    gap_fail = [f for f in out["failures"] if f[0] == "gap"]
    chk.add("gap-check", 0, len(gap_fail), not gap_fail)
    other = [f for f in out["failures"] if f[0] in ("father-offset", "distinct")]
    chk.add("placement", 0, len(other), not other)
    return {"n": size, "generator": kind, "checks": chk}


def linf_certificates_trial(rng, seq, n: int = 3, epsilon=Fraction(1, 2), delta=None, max_branches=None, **_):
    """Guarantee (epsilon) or empirical (delta) linf family on a small rational metric."""
    kind = ("cycle", "tree", "l1")[int(rng.integers(3))]
    space = generators.random_metric(n, rng, kind)
    if delta is not None:
        emb = LinfEmbedder(delta=delta, max_branches=max_branches)
    else:
        emb = LinfEmbedder(epsilon=epsilon, n=n, max_branches=max_branches)
    t0 = time.perf_counter()
    for x in range(n):
        emb.expose(space.row(x))
    elapsed = time.perf_counter() - t0
    chk = Checks()
    bad = emb.lipschitz_violations()
    chk.add("lipschitz", 0, len(bad), not bad)
    for st in emb.stats[1:]:
        t = st.point + 1
        chk.add(f"children@{t}", st.children_bound, st.max_children, st.max_children <= st.children_bound)
        total = dimension_bound(t, emb.delta)
        chk.add(f"family@{t}", total, st.children, st.children <= total)
    rep = distortion_report(space, emb.finalize())
    if delta is None:
        eps = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(str(epsilon))
        bound = 1 / (1 - eps)
        chk.add("distortion", bound, rep.distortion, rep.distortion <= bound)
        cert = emb.pair_certificate()
        chk.add("pair-certificate", cert.factor, min(p.slack for p in cert.pairs), cert.passed)
    return {
        "generator": kind,
        "branches": emb.num_branches,
        "distortion": encode(rep.distortion),
        "seconds": elapsed,
        "checks": chk,
    }


def isometry_trial(rng, seq, n: int | None = None, **_) -> dict[str, Any]:
    """Steiner realization, l1 embedding and (n <= 10) the linf lift are exact isometries."""
    size = int(rng.integers(2, 13)) if n is None else n
    space = generators.tree_metric(size, rng)
    chk = Checks()
    chk.add("four-point", None, "ok" if four_point_check(space) is None else "violated", four_point_check(space) is None)
    real = SteinerTreeRealizer()
    l1 = TreeL1Embedder()
    lift = TreeLinfEmbedder(size) if size <= 10 else None
    for x in range(size):
        row = space.row(x)
        real.expose(row)
        l1.expose(row)
        if lift is not None:
            lift.expose(row)
    hosts = [("steiner", real.host()), ("l1", l1.host())]
    if lift is not None:
        hosts.append(("linf-lift", lift.host()))
    for name, host in hosts:
        wrong = sum(
            1 for i in range(size) for j in range(i + 1, size) if host.distance(i, j) != space.d(i, j)
        )
        chk.add(f"isometry:{name}", 0, wrong, wrong == 0)
    chk.add("l1-dimension", max(size - 1, 0), l1.dim, l1.dim <= max(size - 1, 0))
    return {"n": size, "checks": chk}


def adversary_certificates_trial(rng, seq, n: int = 3, **_) -> dict[str, Any]:
    """linf-dim duels (k = 1..4, both opponents), tree duels (t = 2..4) and an l2 duel of ``n`` generations."""
    seed = opponent_seed(seq)
    chk = Checks()
    duels = [("linf-dim", opp, k, {"seed": seed}) for k in range(1, 5) for opp in ("random-feasible", "linf-lineage")]
    duels += [("tree", opp, t, {}) for t in range(2, 5) for opp in ("greedy-tree", "steiner-greedy")]
    duels.append(("l2", "l2-placer", n, {"seed": seed}))
    for adv, opp, size, params in duels:
        try:
            tr = run_duel(adv, opp, size, **params)
            chk.add(f"{adv}:{opp}:{size}", "all", "pass" if tr.passed else "fail", tr.passed)
        except Exception as exc:  # a failed certificate aborts the duel; record it
            chk.add(f"{adv}:{opp}:{size}", "all", f"{type(exc).__name__}: {exc}", False)
    return {"seed": seed, "checks": chk}


SUITES: dict[str, Callable[..., dict[str, Any]]] = {
    "tree-bounds": tree_bounds_trial,
    "line-bounds": line_bounds_trial,
    "linf-certificates": linf_certificates_trial,
    "isometry": isometry_trial,
    "adversary-certificates": adversary_certificates_trial,
}


def _run_trial(job) -> dict[str, Any]:
    name, index, seq, params = job
    rng = np.random.default_rng(seq)
    out = SUITES[name](rng, seq, **params)
    chk = out.pop("checks")
    return {"trial": index, **out, "passed": chk.passed, "checks": chk.items}


def run_suite(name: str, seed: int = 0, trials: int = 10, jobs: int = 1, **params) -> dict[str, Any]:
    """Run ``trials`` independent instances of a suite; the summary passes iff every check passed."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    params = {k: v for k, v in params.items() if v is not None}
    work = [(name, i, seq, params) for i, seq in enumerate(trial_seeds(seed, trials))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, work))
    else:
        results = [_run_trial(w) for w in work]
    failed = [r["trial"] for r in results if not r["passed"]]
    return {
        "suite": name,
        "seed": seed,
        "trials": trials,
        "params": {k: _enc(v) for k, v in params.items()},
        "passed": not failed,
        "failed_trials": failed,
        "results": results,
    }


__all__ = ["SUITES", "REL_TOL", "run_suite", "trial_seeds", "opponent_seed"]
