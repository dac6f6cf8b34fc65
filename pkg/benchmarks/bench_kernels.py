"""Time the compiled and pure-Python branch-extension kernels on the same input.

The input is the linf family right before the last point of an n=3,
epsilon=1/2 run, i.e. the largest extension step of the guarantee-mode
acceptance case. Both kernels must produce identical children.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from online_embed import kernels
from online_embed.linf import LinfEmbedder
from online_embed.metric import MetricSpace

ROWS = [[], [Fraction(1)], [Fraction(3, 4), Fraction(1, 2)]]


def last_step_input():
    space = MetricSpace.from_matrix(
        [[0, 1, Fraction(3, 4)], [1, 0, Fraction(1, 2)], [Fraction(3, 4), Fraction(1, 2), 0]]
    )
    emb = LinfEmbedder(epsilon=Fraction(1, 2), n=3)
    emb.expose(ROWS[0])
    emb.expose(ROWS[1])
    # the same scaling LinfEmbedder.extend applies before calling the kernel
    row = [Fraction(v) for v in space.row(2)]
    steps = [emb.delta * v for v in row]
    need = 1
    for q in (*row, *steps):
        need = need * q.denominator // np.gcd(need, q.denominator)
    scale = emb.scale * need // np.gcd(emb.scale, need)
    values = emb.values * (scale // emb.scale)
    dist = np.array([int(v * scale) for v in row], dtype=np.int64)
    step = np.array([int(s * scale) for s in steps], dtype=np.int64)
    return values.astype(np.int64), dist, step


def time_kernel(name, values, dist, step, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernels.extend_branches(values, dist, step, kernel=name)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    values, dist, step = last_step_input()
    print(f"parents: {values.shape[0]}  kernels available: {kernels.available()}")
    results = {}
    for name in kernels.available():
        secs, out = time_kernel(name, values, dist, step, args.repeat)
        results[name] = out
        print(f"{name:>9}: {secs * 1e3:9.1f} ms  children={len(out[1])}")
    if len(results) == 2:
        (pa, ca, oa), (pb, cb, ob) = results["compiled"], results["python"]
        same = np.array_equal(pa, pb) and np.array_equal(ca, cb) and oa == ob
        print(f"identical output: {same}")
    for name in kernels.available():
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            emb = LinfEmbedder(epsilon=Fraction(1, 2), n=3, kernel=name)
            for r in ROWS:
                emb.expose(r)
            best = min(best, time.perf_counter() - t0)
        print(f"end-to-end ({name}): {best:.3f} s, {emb.num_branches} branches")


if __name__ == "__main__":
    main()
