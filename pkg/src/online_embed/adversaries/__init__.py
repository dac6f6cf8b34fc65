"""Adaptive adversaries, baseline opponents, and the duel/replay plumbing."""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable

from ..errors import ConfigError, EmbeddingError
from ..linf import LinfEmbedder, LinfLineageEmbedder
from ..line import LineEmbedder
from ..tree import GreedyTreeEmbedder, SteinerGreedyEmbedder, SteinerTreeRealizer, TreeL1Embedder, TreeLinfEmbedder
from .baselines import L2Placer, RandomFeasibleEmbedder
from .cycle import cut_embedding, cycle_distance, cycle_metric, tree_adversary_run
from .l2 import SeriesParallelState, l2_adversary_run, parallelogram_certificate
from .linf_dim import antipodal_metric, choose_alpha, linf_dim_adversary_run
from .transcript import CSV_COLUMNS, DuelTranscript

EMBEDDERS: dict[str, Callable[..., Any]] = {
    "greedy-tree": GreedyTreeEmbedder,
    "steiner-greedy": SteinerGreedyEmbedder,
    "steiner-tree": SteinerTreeRealizer,
    "line": LineEmbedder,
    "linf": LinfEmbedder,
    "linf-lineage": LinfLineageEmbedder,
    "random-feasible": RandomFeasibleEmbedder,
    "l2-placer": L2Placer,
    "tree-l1": TreeL1Embedder,
    "tree-linf": TreeLinfEmbedder,
}

# adversary -> (runner, embedders able to play it)
ADVERSARIES: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "tree": (tree_adversary_run, ("greedy-tree", "steiner-greedy")),
    "l2": (l2_adversary_run, ("l2-placer",)),
    "linf-dim": (linf_dim_adversary_run, ("random-feasible", "linf-lineage")),
}


def _jsonable(v):
    return str(v) if isinstance(v, Fraction) else v


def build_embedder(name: str, **params):
    try:
        cls = EMBEDDERS[name]
    except KeyError:
        raise ConfigError(f"unknown embedder {name!r}; choose from {sorted(EMBEDDERS)}") from None
    return cls(**{k: v for k, v in params.items() if v is not None})


def run_duel(adversary: str, embedder_name: str, n: int, **params) -> DuelTranscript:
    """Play ``adversary`` against a freshly built embedder.

    ``n`` counts phases (tree), generations (l2) or the host dimension k
    (linf-dim); the linf-dim opponents receive ``k = n`` automatically.
    An aborted duel re-raises with the partial transcript attached as
    ``exc.transcript``.
    """
    if adversary not in ADVERSARIES:
        raise ConfigError(f"unknown adversary {adversary!r}; choose from {sorted(ADVERSARIES)}")
    runner, allowed = ADVERSARIES[adversary]
    if embedder_name not in allowed:
        raise ConfigError(f"adversary {adversary!r} cannot play {embedder_name!r}; compatible: {list(allowed)}")
    if adversary == "linf-dim":
        params = {"k": n, **params}
    emb = build_embedder(embedder_name, **params)
    tr = DuelTranscript(adversary, embedder_name)
    tr.embedder_params = {k: _jsonable(v) for k, v in params.items() if v is not None}
    try:
        runner(emb, n, transcript=tr)
    except EmbeddingError as exc:
        exc.transcript = tr
        raise
    return tr


def rerun(transcript: DuelTranscript) -> DuelTranscript:
    """Play the recorded duel again from its stored parameters and seeds."""
    return run_duel(
        transcript.adversary, transcript.embedder, transcript.params["n"], **transcript.embedder_params
    )


def replay(transcript: DuelTranscript) -> list[int]:
    """Feed the recorded exposures to a fresh embedder; return indices of mismatching responses.

    An empty list means every response was reproduced bit-exactly.
    """
    emb = build_embedder(transcript.embedder, **transcript.embedder_params)
    recorded = {e["point"]: e["response"] for e in transcript.responses()}
    bad = []
    for ev in transcript.exposures():
        emb.expose(ev["dists"])
        if emb.response(ev["point"]) != recorded.get(ev["point"]):
            bad.append(ev["point"])
    return bad


__all__ = [
    "ADVERSARIES",
    "CSV_COLUMNS",
    "EMBEDDERS",
    "DuelTranscript",
    "L2Placer",
    "RandomFeasibleEmbedder",
    "SeriesParallelState",
    "antipodal_metric",
    "build_embedder",
    "choose_alpha",
    "cut_embedding",
    "cycle_distance",
    "cycle_metric",
    "l2_adversary_run",
    "linf_dim_adversary_run",
    "parallelogram_certificate",
    "replay",
    "rerun",
    "run_duel",
    "tree_adversary_run",
]
