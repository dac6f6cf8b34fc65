from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import l1_spaces, tree_space, weighted_trees
from online_embed.errors import DimensionUnknown, NotATreeMetric
from online_embed.metric import HostPointSet, MetricSpace, distortion_report
from online_embed.tree import (
    GreedyTreeEmbedder,
    LinfLift,
    SteinerGreedyEmbedder,
    SteinerTreeRealizer,
    TreeL1Embedder,
    TreeLinfEmbedder,
    WeightedTree,
    four_point_check,
    greedy_expansion_bound,
    l1_to_linf_lift,
    paths_intersect,
    realize_tree_metric,
    sign_vectors,
    tree_distance,
)

F = Fraction

STAR = [[], [2], [2, 2]]
CHAIN = [[], [1], [3, 2]]
CYCLE4 = [[], [1], [2, 1], [1, 2, 1]]


def space_of(rows, backend="rational"):
    s = MetricSpace(backend)
    for r in rows:
        s.expose(r)
    return s


def path_tree(weights):
    t = WeightedTree()
    vs = [t.add_vertex(i) for i in range(len(weights) + 1)]
    for (a, b), w in zip(zip(vs, vs[1:]), weights):
        t.add_edge(a, b, F(w))
    return t, vs


def to_nx(tree):
    g = nx.Graph()
    g.add_nodes_from(tree.adj)
    for u, v, w in tree.edges():
        g.add_edge(u, v, weight=w)
    return g


# greedy ---------------------------------------------------------------------


def test_greedy_chain():
    emb = GreedyTreeEmbedder()
    for r in CHAIN:
        emb.expose(r)
    assert emb.father == {1: 0, 2: 1}
    assert emb.tree.adj[emb.tree.vertex_of[1]][emb.tree.vertex_of[2]] == 2
    assert emb.tree.point_distance(0, 2) == 3
    assert distortion_report(emb.space, emb.host()).distortion == 1


def test_greedy_two_points():
    emb = GreedyTreeEmbedder()
    emb.expose([])
    emb.expose([F(7, 3)])
    assert list(emb.tree.edges()) == [(0, 1, F(7, 3))]
    assert distortion_report(emb.space, emb.host()).distortion == 1


def test_greedy_ties_go_to_smallest_id():
    emb = GreedyTreeEmbedder()
    for r in STAR:
        emb.expose(r)
    assert emb.father[2] == 0


def test_greedy_bound_values():
    assert [greedy_expansion_bound(k) for k in (2, 3, 4, 8)] == [1, 3, 7, 127]


@given(l1_spaces(min_size=2, max_size=8))
def test_greedy_dominates_and_obeys_recurrence(space):
    emb = GreedyTreeEmbedder()
    for x in range(space.n):
        emb.expose(space.row(x))
        if x >= 1:
            rep = distortion_report(emb.space, emb.host())
            assert rep.contraction <= 1
            assert rep.expansion <= greedy_expansion_bound(x + 1)


# tree queries -----------------------------------------------------------------


def test_tree_distance_basics():
    t, (a, b, c) = path_tree([1, 2])
    assert tree_distance(t, a, a) == 0
    assert tree_distance(t, a, b) == 1
    assert tree_distance(t, a, c) == 3


def test_paths_intersect_on_a_path():
    t, (a, b, c, d) = path_tree([1, 1, 1])
    assert not paths_intersect(t, (a, b), (c, d))
    assert paths_intersect(t, (a, c), (b, d))


@given(weighted_trees(min_points=4, max_points=8))
def test_one_pairing_always_intersects(data):
    adj, marked = data
    t = WeightedTree()
    for v in range(len(adj)):
        t.add_vertex()
    for u, nbrs in adj.items():
        for v, w in nbrs.items():
            if u < v:
                t.add_edge(u, v, w)
    g = to_nx(t)
    for a, b, c, d in combinations(marked, 4):
        first = paths_intersect(t, (a, b), (c, d))
        second = paths_intersect(t, (b, c), (a, d))
        assert first or second
        # oracle: networkx paths
        assert first == bool(set(nx.shortest_path(g, a, b)) & set(nx.shortest_path(g, c, d)))


def test_tree_json_roundtrip():
    r = SteinerTreeRealizer()
    for row in STAR:
        r.expose(row)
    obj = r.tree.to_json()
    assert {"id", "kind"} <= set(obj["vertices"][0])
    assert all(isinstance(w, str) for _, _, w in obj["edges"])
    back = WeightedTree.from_json(obj)
    assert back.to_json() == obj
    assert back.point_distance(1, 2) == 2


# four-point condition ----------------------------------------------------------


def test_four_point_vacuous_below_four():
    assert four_point_check(space_of([[], [1], [1, 1]])) is None


@pytest.mark.parametrize("rows", [STAR, CHAIN])
def test_four_point_accepts_tree_metrics(rows):
    assert four_point_check(space_of(rows)) is None


def test_four_point_rejects_unit_cycle():
    s = space_of(CYCLE4)
    d = s.d
    assert sorted([d(0, 1) + d(2, 3), d(0, 2) + d(1, 3), d(0, 3) + d(1, 2)]) == [2, 2, 4]
    assert four_point_check(s) == (0, 1, 2, 3)


# Steiner realization -----------------------------------------------------------


def test_star_gets_steiner_center():
    tree = realize_tree_metric(space_of(STAR))
    (s,) = tree.steiner_vertices()
    assert [tree.distance(s, tree.vertex_of[i]) for i in range(3)] == [1, 1, 1]


def test_collinear_needs_no_steiner():
    tree = realize_tree_metric(space_of(CHAIN))
    assert tree.steiner_vertices() == []
    assert len(list(tree.edges())) == 2


def test_unit_cycle_not_a_tree_metric():
    with pytest.raises(NotATreeMetric):
        realize_tree_metric(space_of(CYCLE4))


def test_point_landing_on_steiner_vertex_promotes_it():
    # leaves a, b, c around a centre, then the centre itself
    r = SteinerTreeRealizer()
    for row in STAR + [[1, 1, 1]]:
        r.expose(row)
    assert r.tree.steiner_vertices() == []
    assert r.attachments[-1].promoted


@given(weighted_trees(), st.randoms(use_true_random=False))
def test_realization_is_isometric_in_every_order(data, rnd):
    adj, marked = data
    space = tree_space(adj, marked)
    order = list(range(space.n))
    rnd.shuffle(order)
    for s in (space, space.subspace(order)):
        tree = realize_tree_metric(s)
        for i, j in combinations(range(s.n), 2):
            assert tree.point_distance(i, j) == s.d(i, j)
        assert all(w > 0 for _, _, w in tree.edges())
        assert nx.is_tree(to_nx(tree))


# l1 / linf lifts ------------------------------------------------------------------


def test_star_l1_coordinates():
    emb = TreeL1Embedder()
    for row in STAR:
        emb.expose(row)
    assert [emb.coords(x) for x in range(3)] == [(0, 0), (2, 0), (1, 1)]
    (s,) = emb.tree.steiner_vertices()
    assert emb.vertex_coords(s) == (1, 0)


def test_two_point_l1():
    emb = TreeL1Embedder()
    emb.expose([])
    emb.expose([F(5, 2)])
    assert emb.coords(0) == (0,) and emb.coords(1) == (F(5, 2),)


def test_chain_l1_exact():
    emb = TreeL1Embedder()
    for row in CHAIN:
        emb.expose(row)
    assert distortion_report(emb.space, emb.host()).distortion == 1
    assert emb.dim <= 2


def test_sign_vectors():
    assert sign_vectors(1) == [(1,)]
    assert sign_vectors(2) == [(1, 1), (1, -1)]
    assert len(sign_vectors(5)) == 16


def test_lift_examples():
    assert LinfLift(1).lift((F(3),)) == (3,)
    host = l1_to_linf_lift([(0, 0), (1, 1), (2, 0)], 2)
    assert [host.point(i) for i in range(3)] == [(0, 0), (2, 0), (2, 2)]
    assert host.distance(0, 1) == 2


def test_lift_needs_dimension():
    with pytest.raises(DimensionUnknown):
        LinfLift(None)
    with pytest.raises(DimensionUnknown):
        TreeLinfEmbedder(None)


@given(weighted_trees(max_points=8))
def test_l1_and_lift_are_isometric(data):
    adj, marked = data
    space = tree_space(adj, marked)
    n = space.n
    l1 = TreeL1Embedder()
    lift = TreeLinfEmbedder(n)
    for x in range(n):
        l1.expose(space.row(x))
        lift.expose(space.row(x))
    assert l1.dim <= n - 1
    h1, hinf = l1.host(), lift.host()
    assert hinf.dim == 2 ** max(n - 2, 0)
    for i, j in combinations(range(n), 2):
        assert h1.distance(i, j) == space.d(i, j)
        assert hinf.distance(i, j) == space.d(i, j)


@given(weighted_trees(min_points=3, max_points=7))
def test_l1_neighbours_differ_in_one_coordinate(data):
    adj, marked = data
    space = tree_space(adj, marked)
    emb = TreeL1Embedder()
    for x in range(space.n):
        emb.expose(space.row(x))
    for u, v, w in emb.tree.edges():
        a, b = np.array(emb.vertex_coords(u)), np.array(emb.vertex_coords(v))
        diff = [i for i in range(len(a)) if a[i] != b[i]]
        assert len(diff) == 1 and abs(a[diff[0]] - b[diff[0]]) == w


def test_lift_images_never_change():
    lift = TreeLinfEmbedder(4)
    first = [lift.expose(r) for r in STAR]
    lift.expose([1, 1, 1])
    assert lift.images[:3] == first


# Steiner-greedy --------------------------------------------------------------------


@given(l1_spaces(min_size=2, max_size=8))
def test_steiner_greedy_never_contracts(space):
    emb = SteinerGreedyEmbedder()
    for x in range(space.n):
        emb.expose(space.row(x))
    assert distortion_report(space, emb.host()).contraction <= 1


@given(weighted_trees(max_points=7))
def test_steiner_greedy_is_exact_on_tree_metrics(data):
    adj, marked = data
    space = tree_space(adj, marked)
    emb = SteinerGreedyEmbedder()
    for x in range(space.n):
        emb.expose(space.row(x))
    assert distortion_report(space, emb.host()).distortion == 1


def test_float_backend_greedy():
    s = space_of([[], [1.0], [3.0, 2.0]], "float")
    emb = GreedyTreeEmbedder("float")
    for x in range(3):
        emb.expose(s.row(x))
    rep = distortion_report(s, emb.host())
    assert rep.distortion == pytest.approx(1)
    assert isinstance(HostPointSet("tree", tree=emb.tree).distance(0, 2), float)
