import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from online_embed.generators import GENERATORS, is_valid, random_metric, random_weighted_tree, tree_metric
from online_embed.suites import SUITES, opponent_seed, run_suite, trial_seeds
from online_embed.tree import four_point_check


@given(st.sampled_from(GENERATORS), st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_generators_produce_valid_metrics(kind, n, seed):
    space = random_metric(n, np.random.default_rng(seed), kind)
    assert space.n == n
    assert is_valid(space)


@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_tree_generator_satisfies_four_point(n, seed):
    assert four_point_check(tree_metric(n, np.random.default_rng(seed))) is None


def test_weighted_tree_is_connected():
    adj, marked = random_weighted_tree(6, np.random.default_rng(1))[:2]
    seen, todo = {0}, [0]
    while todo:
        for v in adj[todo.pop()]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    assert seen == set(adj)
    assert len(set(marked)) == 6


def test_generators_are_seeded():
    a = random_metric(6, np.random.default_rng(7), "l1")
    b = random_metric(6, np.random.default_rng(7), "l1")
    assert a == b


def test_unknown_generator():
    with pytest.raises(ValueError):
        random_metric(3, np.random.default_rng(0), "hyperbolic")


def test_seed_splitter_is_a_spawn():
    seqs = trial_seeds(42, 5)
    direct = np.random.SeedSequence(42).spawn(5)
    assert [s.generate_state(2).tolist() for s in seqs] == [s.generate_state(2).tolist() for s in direct]
    # a trial's stream does not depend on how many trials were requested
    assert trial_seeds(42, 9)[3].generate_state(1) == seqs[3].generate_state(1)
    assert len({opponent_seed(s) for s in seqs}) == 5


def test_suite_results_in_trial_order_regardless_of_jobs():
    serial = run_suite("line-bounds", seed=3, trials=4, jobs=1)
    parallel = run_suite("line-bounds", seed=3, trials=4, jobs=2)
    assert [r["trial"] for r in parallel["results"]] == [0, 1, 2, 3]
    assert json.dumps(serial, sort_keys=True, default=str) == json.dumps(parallel, sort_keys=True, default=str)


@pytest.mark.parametrize("name", sorted(set(SUITES) - {"linf-certificates"}))
def test_each_suite_passes_small(name):
    out = run_suite(name, seed=0, trials=2)
    assert out["passed"], out["failed_trials"]


def test_linf_suite_empirical_mode():
    out = run_suite("linf-certificates", seed=0, trials=2, n=3, delta="1/4", epsilon=None)
    assert out["passed"]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")
