"""``online-embed``: embed metric files, run duels, verify suites, and print transcript reports.

Exit codes: 0 when every certificate/bound check passed, 1 when some check
failed, 2 for invalid configuration or input.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any

from .adversaries import ADVERSARIES, EMBEDDERS, DuelTranscript, rerun, run_duel
from .errors import BranchCapExceeded, ConfigError, EmbeddingError
from .line import contraction_bound, expansion_bound
from .linf import LinfEmbedder
from .metric import MetricSpace, distortion_report, dump_json, load_json
from .numeric import encode, leq
from .suites import SUITES, run_suite
from .tree import TreeLinfEmbedder, greedy_expansion_bound

# Hard point/generation limits; past these the run would not finish at desk scale.
POINT_LIMITS = {"greedy-tree": 64, "line": 64, "tree-linf": 16}
LINF_GUARANTEE_MAX_N = 3
LINF_EMPIRICAL_MAX_N = 6
BRANCH_CAP = 10**7
L2_MAX_GENERATIONS = 6

REPORT_COLUMNS = ("name", "bound", "measured", "pass")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="online-embed", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def scale_flags(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--epsilon", type=_fraction, help="target accuracy; linf guarantee mode")
        g.add_argument("--delta", type=_fraction, help="explicit scale parameter; linf empirical mode")

    e = sub.add_parser("embed", help="embed a metric file online, point by point")
    e.add_argument("metric", help="metric JSON file")
    e.add_argument("--algo", required=True, choices=["greedy-tree", "steiner-tree", "steiner-greedy", "line", "linf", "tree-l1", "tree-linf"])
    e.add_argument("--n", type=int, help="use only the first N points of the file")
    scale_flags(e)
    e.add_argument("--backend", choices=["rational", "float"], help="convert the metric to this backend")
    e.add_argument("--max-branches", type=int, default=None)
    e.add_argument("--dedup", type=_on_off, default=True, metavar="on|off")
    e.add_argument("--out", default="embedding.json", help="embedding JSON; the report goes next to it")

    d = sub.add_parser("duel", help="play an adversary against an embedder")
    d.add_argument("--adversary", required=True, choices=sorted(ADVERSARIES))
    d.add_argument("--algo", required=True, choices=sorted(EMBEDDERS))
    d.add_argument("--n", type=int, required=True, help="phases (tree), generations (l2) or dimension k (linf-dim)")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--delta", type=_fraction, help="scale for the linf-lineage opponent")
    d.add_argument("--out", default="transcript.json", help="transcript JSON; report JSON and CSV go next to it")

    v = sub.add_parser("verify", help="run a property suite over random instances")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--n", type=int)
    scale_flags(v)
    v.add_argument("--max-branches", type=int, default=None)
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    v.add_argument("--out", help="summary JSON path")

    r = sub.add_parser("report", help="print a transcript as a table and CSV")
    r.add_argument("transcript")
    r.add_argument("--csv", help="write the CSV here instead of stdout")
    r.add_argument("--replay", action="store_true", help="re-run the duel and require a bit-identical transcript")
    return p


def _siblings(out: str) -> tuple[Path, Path]:
    base = Path(out)
    stem = base.with_suffix("") if base.suffix == ".json" else base
    return Path(f"{stem}.report.json"), Path(f"{stem}.csv")


def _write_checks_csv(path: Path, checks: list[dict[str, Any]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows({k: c[k] for k in REPORT_COLUMNS} for c in checks)


def _check(checks, name, bound, measured, passed):
    checks.append({"name": name, "bound": encode(bound), "measured": encode(measured), "pass": bool(passed)})


def _load_metric(path: str, backend: str | None, n: int | None) -> MetricSpace:
    space = MetricSpace.from_json(load_json(path))
    if n is not None:
        if not 1 <= n <= space.n:
            raise ConfigError(f"--n {n} outside 1..{space.n}")
        space = space.subspace(range(n))
    if backend is not None and backend != space.backend:
        space = MetricSpace.from_matrix(space.matrix(), backend)
    return space


def _check_feasible(algo: str, n: int, args) -> None:
    limit = POINT_LIMITS.get(algo)
    if limit is not None and n > limit:
        raise ConfigError(f"{algo} is limited to {limit} points, got {n}")
    if algo == "linf":
        if args.epsilon is None and args.delta is None:
            raise ConfigError("linf needs --epsilon (guarantee mode) or --delta (empirical mode)")
        if args.epsilon is not None and n > LINF_GUARANTEE_MAX_N:
            raise ConfigError(f"linf guarantee mode is limited to {LINF_GUARANTEE_MAX_N} points, got {n}")
        if args.delta is not None and n > LINF_EMPIRICAL_MAX_N:
            raise ConfigError(f"linf empirical mode is limited to {LINF_EMPIRICAL_MAX_N} points, got {n}")
        if args.max_branches is not None and args.max_branches > BRANCH_CAP:
            raise ConfigError(f"--max-branches may not exceed {BRANCH_CAP}")


def cmd_embed(args) -> int:
    space = _load_metric(args.metric, args.backend, args.n)
    n = space.n
    _check_feasible(args.algo, n, args)
    if args.algo == "linf":
        cap = args.max_branches or BRANCH_CAP
        if args.epsilon is not None:
            emb = LinfEmbedder(epsilon=args.epsilon, n=n, dedup=args.dedup, max_branches=cap, backend=space.backend)
        else:
            emb = LinfEmbedder(delta=args.delta, dedup=args.dedup, max_branches=cap, backend=space.backend)
    elif args.algo == "tree-linf":
        emb = TreeLinfEmbedder(n, backend=space.backend)
    else:
        emb = EMBEDDERS[args.algo](backend=space.backend)
    t0 = time.perf_counter()
    for x in range(n):
        emb.expose(space.row(x))
    elapsed = time.perf_counter() - t0
    host = emb.host()
    checks: list[dict[str, Any]] = []
    rep = distortion_report(space, host) if n >= 2 else None
    exact = space.exact
    if rep is not None:
        if args.algo == "greedy-tree":
            b = greedy_expansion_bound(n)
            _check(checks, "expansion", b, rep.expansion, leq(rep.expansion, b, exact))
            _check(checks, "domination", 1, rep.contraction, leq(rep.contraction, 1, exact))
        elif args.algo == "line":
            _check(checks, "expansion", expansion_bound(n), rep.expansion, leq(rep.expansion, expansion_bound(n), exact))
            cb = contraction_bound(n)
            _check(checks, "contraction", cb, rep.contraction, leq(rep.contraction, cb, exact))
        elif args.algo in ("steiner-tree", "tree-l1", "tree-linf"):
            _check(checks, "isometry", 1, rep.distortion, rep.expansion == 1 and rep.contraction == 1)
        elif args.algo == "steiner-greedy":
            _check(checks, "domination", 1, rep.contraction, leq(rep.contraction, 1, exact))
        elif args.algo == "linf":
            bad = emb.lipschitz_violations()
            _check(checks, "lipschitz", 0, len(bad), not bad)
            if emb.guarantee_mode:
                bound = 1 / (1 - emb.epsilon)
                _check(checks, "distortion", bound, rep.distortion, rep.distortion <= bound)
                cert = emb.pair_certificate()
                _check(checks, "pair-certificate", cert.factor, min(p.slack for p in cert.pairs), cert.passed)
    embedding = emb.to_json() if hasattr(emb, "to_json") else host.to_json()
    dump_json(embedding, args.out)
    report = {
        "command": "embed",
        "algo": args.algo,
        "n": n,
        "backend": space.backend,
        "distortion": rep.to_json() if rep else None,
        "checks": checks,
        "seconds": elapsed,
        "embedding": str(args.out),
        "passed": all(c["pass"] for c in checks),
    }
    if args.algo == "linf":
        report["branches"] = emb.num_branches
        report["delta"] = str(emb.delta)
    rpath, cpath = _siblings(args.out)
    dump_json(report, rpath)
    _write_checks_csv(cpath, checks)
    print(json.dumps({k: report[k] for k in ("algo", "n", "distortion", "passed")}))
    return 0 if report["passed"] else 1


def _duel_report(tr: DuelTranscript, elapsed: float | None, out: str, error: str | None = None) -> dict[str, Any]:
    certs = tr.certificates()
    return {
        "command": "duel",
        "adversary": tr.adversary,
        "embedder": tr.embedder,
        "params": tr.params,
        "final": tr.report,
        "checks": [{k: c[k] for k in ("step", "name", "bound", "measured", "pass")} for c in certs],
        "seconds": elapsed,
        "transcript": str(out),
        "error": error,
        "passed": error is None and tr.passed,
    }


def cmd_duel(args) -> int:
    if args.n < 1:
        raise ConfigError("--n must be positive")
    if args.adversary == "l2" and args.n > L2_MAX_GENERATIONS:
        raise ConfigError(f"l2 duels are limited to {L2_MAX_GENERATIONS} generations, got {args.n}")
    if args.adversary == "tree" and 2 * args.n + 2 > POINT_LIMITS.get(args.algo, 64):
        raise ConfigError(f"tree duels are limited to {(POINT_LIMITS.get(args.algo, 64) - 2) // 2} phases")
    params: dict[str, Any] = {}
    if args.algo in ("random-feasible", "linf-lineage", "l2-placer"):
        params["seed"] = args.seed
    if args.delta is not None:
        if args.algo != "linf-lineage":
            raise ConfigError("--delta only applies to the linf-lineage opponent")
        params["delta"] = args.delta
    t0 = time.perf_counter()
    error = None
    try:
        tr = run_duel(args.adversary, args.algo, args.n, **params)
    except ConfigError:
        raise
    except EmbeddingError as exc:
        tr = getattr(exc, "transcript", None)
        if tr is None:
            raise
        error = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    tr.save(args.out)
    report = _duel_report(tr, elapsed, args.out, error)
    rpath, cpath = _siblings(args.out)
    dump_json(report, rpath)
    cpath.write_text(tr.to_csv())
    print(json.dumps({"adversary": tr.adversary, "embedder": tr.embedder, "n": args.n, "passed": report["passed"], "error": error}))
    return 0 if report["passed"] else 1


def cmd_verify(args) -> int:
    params: dict[str, Any] = {"n": args.n}
    if args.suite == "linf-certificates":
        params.update(epsilon=args.epsilon, delta=args.delta, max_branches=args.max_branches)
        n = args.n or 3
        if args.delta is None and n > LINF_GUARANTEE_MAX_N:
            raise ConfigError(f"linf guarantee mode is limited to {LINF_GUARANTEE_MAX_N} points")
        if args.delta is not None and n > LINF_EMPIRICAL_MAX_N:
            raise ConfigError(f"linf empirical mode is limited to {LINF_EMPIRICAL_MAX_N} points")
    elif args.epsilon is not None or args.delta is not None:
        raise ConfigError("--epsilon/--delta only apply to the linf-certificates suite")
    if args.suite == "adversary-certificates" and args.n and args.n > L2_MAX_GENERATIONS:
        raise ConfigError(f"l2 duels are limited to {L2_MAX_GENERATIONS} generations")
    if args.trials < 1:
        raise ConfigError("--trials must be positive")
    summary = run_suite(args.suite, seed=args.seed, trials=args.trials, jobs=args.jobs, **params)
    if args.out:
        dump_json(summary, args.out)
    for r in summary["results"]:
        print(f"trial {r['trial']:4d}  {'PASS' if r['passed'] else 'FAIL'}")
    print(json.dumps({k: summary[k] for k in ("suite", "seed", "trials", "passed", "failed_trials")}))
    return 0 if summary["passed"] else 1


def format_table(tr: DuelTranscript) -> str:
    """Per-step table: step, exposure, decision, bound, measured."""
    lines = [f"{tr.adversary} vs {tr.embedder}  params={json.dumps(tr.params, sort_keys=True)}"]
    lines.append(f"{'step':>4}  {'event':<22} {'detail':<40} {'bound':>14} {'measured':>22}  pass")
    for ev in tr.events:
        kind = ev["type"]
        bound = measured = ok = ""
        if kind == "expose":
            detail = f"point {ev['point']}" + (f" ({ev['label']})" if "label" in ev else "")
        elif kind == "respond":
            detail = f"point {ev['point']}: " + json.dumps(ev["response"], sort_keys=True)
        elif kind == "decide":
            detail = json.dumps({k: v for k, v in ev.items() if k not in ("type", "step")}, sort_keys=True)
        else:
            kind = f"certify:{ev['name']}"
            detail = ""
            bound, measured, ok = str(ev["bound"]), str(ev["measured"]), "yes" if ev["pass"] else "NO"
        if len(detail) > 40:
            detail = detail[:37] + "..."
        lines.append(f"{ev['step']:>4}  {kind:<22} {detail:<40} {bound:>14} {measured:>22}  {ok}")
    lines.append(f"all certificates passed: {tr.passed}")
    return "\n".join(lines)


def cmd_report(args) -> int:
    try:
        tr = DuelTranscript.load(args.transcript)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise ConfigError(f"malformed transcript: {exc}") from None
    print(format_table(tr))
    text = tr.to_csv()
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        print()
        print(text, end="")
    ok = tr.passed
    if args.replay:
        again = rerun(tr)
        same = again.dumps() == tr.dumps()
        print(f"replay identical: {same}")
        ok = ok and same
    return 0 if ok else 1


COMMANDS = {"embed": cmd_embed, "duel": cmd_duel, "verify": cmd_verify, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BranchCapExceeded as exc:
        print(f"error: branch cap exceeded: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, EmbeddingError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
