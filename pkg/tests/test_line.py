from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import l1_spaces
from online_embed.line import (
    LineEmbedder,
    contraction_bound,
    expansion_bound,
    father_offset_bound,
    gap_checks,
    leftmost_gap,
    run_line_bounds,
)
from online_embed.metric import distortion_report

F = Fraction


def brute_gap(positions, start, length):
    """Smallest candidate s (start or a position right of it) with an empty (s, s+length)."""
    for s in sorted({start, *[p for p in positions if p > start]}):
        if not any(s < p < s + length for p in positions):
            return s
    raise AssertionError("the last candidate is always free")


def test_first_three_placements():
    emb = LineEmbedder()
    assert emb.expose([]) == 0
    assert emb.expose([1]) == F(1, 8)
    assert emb.state.interval[1] == (0, F(1, 4))
    assert emb.expose([1, 2]) == F(1, 16)
    assert emb.state.father[2] == 0
    assert emb.state.interval[2] == (0, F(1, 8))


def test_leftmost_gap_examples():
    assert leftmost_gap([], F(3), F(1)) == 3
    assert leftmost_gap([F(-1), F(2)], F(3), F(1)) == 3
    # a point in the middle of the first candidate blocks it
    assert leftmost_gap([F(0), F(1, 2)], F(0), F(1)) == F(1, 2)
    # dense prefix: the first position followed by a wide enough gap
    dense = [F(0), F(1, 10), F(2, 10), F(3, 10), F(2)]
    assert leftmost_gap(dense, F(0), F(1)) == F(3, 10)


def test_leftmost_gap_rejects_nonpositive_length():
    with pytest.raises(ValueError):
        leftmost_gap([], 0, 0)


@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=16), unique=True, max_size=12),
    st.fractions(min_value=-5, max_value=5, max_denominator=16),
    st.fractions(min_value=F(1, 32), max_value=3, max_denominator=32),
)
def test_leftmost_gap_matches_brute_force(positions, start, length):
    assert leftmost_gap(sorted(positions), start, length) == brute_gap(positions, start, length)


def test_bound_values():
    assert expansion_bound(2) == 8
    assert contraction_bound(4) == 128
    assert father_offset_bound(2, F(1)) == F(1, 8)


@given(l1_spaces(min_size=2, max_size=10))
def test_all_bounds_hold(space):
    out = run_line_bounds(space)
    assert out["failures"] == []
    n = space.n
    assert out["final"].contraction <= contraction_bound(n)
    for step in out["steps"]:
        assert step["expansion"] <= expansion_bound(step["k"])


@given(l1_spaces(min_size=2, max_size=9))
def test_father_offset_and_distinct_positions(space):
    emb = LineEmbedder()
    for x in range(space.n):
        emb.expose(space.row(x))
    st_ = emb.state
    assert st_.pos[0] == 0
    assert len(set(st_.pos)) == space.n
    for x in range(1, space.n):
        z = st_.father[x]
        assert 0 <= st_.pos[x] - st_.pos[z] <= father_offset_bound(x + 1, space.d(x, z))
    assert all(g.ok for g in gap_checks(st_))


@given(l1_spaces(min_size=2, max_size=8))
def test_deterministic(space):
    runs = []
    for _ in range(2):
        emb = LineEmbedder()
        for x in range(space.n):
            emb.expose(space.row(x))
        runs.append(emb.to_json())
    assert runs[0] == runs[1]


def test_embedding_json_shape():
    emb = LineEmbedder()
    emb.expose([])
    emb.expose([1])
    assert emb.to_json() == {"norm": "line", "pos": ["0", "1/8"], "father": [None, 0]}


def test_two_point_report():
    emb = LineEmbedder()
    emb.expose([])
    emb.expose([1])
    rep = distortion_report(emb.space, emb.host())
    assert rep.expansion == F(1, 8) and rep.distortion == 1
