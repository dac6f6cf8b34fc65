from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from online_embed.metric import MetricSpace

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def l1_space(points):
    space = MetricSpace("rational")
    for k, p in enumerate(points):
        space.expose([Fraction(sum(abs(a - b) for a, b in zip(p, q))) for q in points[:k]])
    return space


def distinct_points(min_size=2, max_size=7, dim=2, hi=12):
    return st.lists(
        st.tuples(*[st.integers(0, hi)] * dim), min_size=min_size, max_size=max_size, unique=True
    )


@st.composite
def l1_spaces(draw, min_size=2, max_size=7):
    return l1_space(draw(distinct_points(min_size, max_size)))


@st.composite
def weighted_trees(draw, min_points=2, max_points=9):
    """(adjacency, marked) for a random tree with positive rational weights."""
    n = draw(st.integers(min_points, max_points))
    extra = draw(st.integers(0, 4))
    m = n + extra
    adj = {v: {} for v in range(m)}
    for v in range(1, m):
        u = draw(st.integers(0, v - 1))
        w = Fraction(draw(st.integers(1, 9)), draw(st.sampled_from([1, 2, 3, 4])))
        adj[u][v] = adj[v][u] = w
    marked = draw(st.permutations(list(range(m))))[:n]
    return adj, marked


def tree_space(adj, marked):
    import networkx as nx

    g = nx.Graph()
    for u, nbrs in adj.items():
        g.add_node(u)
        for v, w in nbrs.items():
            g.add_edge(u, v, weight=w)
    dist = dict(nx.all_pairs_dijkstra_path_length(g))
    space = MetricSpace("rational")
    for k, v in enumerate(marked):
        space.expose([dist[v][u] for u in marked[:k]])
    return space


@pytest.fixture
def g4_rows():
    """v, u, x, y of the first doubling step."""
    h = Fraction(1, 2)
    return [[], [Fraction(1)], [h, h], [h, h, Fraction(1)]]
