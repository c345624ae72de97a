from itertools import permutations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cusped.cusped_graph import CayleyVertex, build_cusped
from cusped.errors import InputError, ResourceError
from cusped.graph import SpaceGraph, cycle_graph, path_graph
from cusped.groups import IDENTITY, Free, GroupPair
from cusped.hyperbolicity import (
    approximate_center,
    center_radius,
    equiradial_points,
    four_point_delta,
    gromov_defect,
    gromov_product,
    thin_triangle_delta,
    visual_estimate,
)
from cusped.sampling import make_rng, sample_distinct_tuples, set_threads

import oracle


def tree_ball(r):
    return build_cusped(GroupPair.elementary(Free(2)), r, 0)


def tripod(arm=3):
    edges = [(0, 1 + k * arm) for k in range(3)]
    edges += [(1 + k * arm + i, 2 + k * arm + i) for k in range(3) for i in range(arm - 1)]
    return SpaceGraph(list(range(1 + 3 * arm)), np.array(edges))


def from_nx(G):
    nodes = sorted(G.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    return SpaceGraph(nodes, np.array([(idx[u], idx[v]) for u, v in G.edges]).reshape(-1, 2))


def test_c4_values():
    C4 = cycle_graph(4)
    rep = four_point_delta(C4)
    assert rep.delta_fourpoint == 1
    x, u, v, w = rep.witness_index
    assert gromov_defect(C4, x, u, v, w) == 1
    assert gromov_product(C4, 0, 2, 3) == 1  # (v2|v3)_{v0} = (2 + 1 - 1) / 2
    assert thin_triangle_delta(C4, mode="exact")[0] == 2


def test_tree_delta_is_zero():
    assert four_point_delta(tree_ball(3)).delta_fourpoint == 0
    assert four_point_delta(path_graph(9)).delta_fourpoint == 0


def test_exact_refused_above_cap():
    with pytest.raises(ResourceError):
        four_point_delta(tree_ball(5), mode="exact")
    with pytest.raises(InputError):
        four_point_delta(tree_ball(5), mode="sampled", sample_size=100)


def test_sampled_is_a_lower_bound():
    G = cycle_graph(11)
    exact = four_point_delta(G).delta_fourpoint
    sampled = four_point_delta(G, mode="sampled", sample_size=300, seed=4).delta_fourpoint
    assert sampled <= exact


def test_results_do_not_depend_on_threads():
    G = cycle_graph(23)
    set_threads(1)
    one = four_point_delta(G, mode="sampled", sample_size=5000, seed=2).to_dict()
    ex1 = four_point_delta(G).to_dict()
    set_threads(4)
    assert four_point_delta(G, mode="sampled", sample_size=5000, seed=2).to_dict() == one
    assert four_point_delta(G).to_dict() == ex1


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 9), st.integers(0, 10_000))
def test_exact_delta_matches_brute_force(n, seed):
    G = nx.connected_watts_strogatz_graph(n, 2, 0.5, seed=seed)
    ref = oracle.all_pairs(G)
    assert four_point_delta(from_nx(G)).delta_fourpoint == oracle.four_point_brute(ref, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10), st.integers(0, 10))
def test_gromov_product_bounds(x, y, z):
    G = cycle_graph(11)
    p = gromov_product(G, x, y, z)
    assert 0 <= p <= min(G.distance(x, y), G.distance(x, z))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2000))
def test_sampled_delta_bounds_every_sampled_quadruple(seed):
    G = cycle_graph(9)
    rep = four_point_delta(G, mode="sampled", sample_size=60, seed=seed)
    quads = sample_distinct_tuples(make_rng(seed, 0), 9, 4, 60)
    for q in quads:
        for x, u, v, w in permutations(q.tolist()):
            assert gromov_defect(G, x, u, v, w) <= rep.delta_fourpoint


def test_centers_and_equiradial_points():
    T = tripod()
    assert approximate_center(T, 3, 6, 9, 0) == 0
    assert center_radius(T, 0, 3, 6, 9) == 0
    assert equiradial_points(T, 3, 6, 9) == (0, 0, 0)
    assert equiradial_points(T, 3, 3, 6) == (3, 3, 3)
    C4 = cycle_graph(4)
    assert approximate_center(C4, 0, 1, 2, 1) is not None


def test_visual_estimate_on_tree():
    X = tree_ball(4)
    F = X.pair.ambient
    v = lambda w: CayleyVertex(F.normal_form(w))
    est = visual_estimate(X, v("e"), 2.0, [v("a^4"), v("b^4")], horizon=3)
    assert est.products[0][1] == 0
    est = visual_estimate(X, v("e"), 2.0, [v("a^2 b^2"), v("a^2 b^-2")], horizon=3)
    assert est.products[0][1] == 2  # shared prefix a^2
    with pytest.raises(InputError):
        visual_estimate(X, v("e"), 2.0, [v("a"), v("b^4")], horizon=3)


def test_visual_basepoint_change_moves_exponents_by_at_most_one(free_pair):
    X = build_cusped(free_pair, 3, 3)
    deep = [v for v in X.graph.labels if X.graph.distances_from(0)[X.graph.vertex(v)] >= 4][:6]
    a = visual_estimate(X, CayleyVertex(IDENTITY), 2.0, deep)
    b = visual_estimate(X, CayleyVertex(free_pair.ambient.normal_form("b")), 2.0, deep)
    assert np.max(np.abs(np.array(a.products) - np.array(b.products))) <= 1
    assert a.c1 <= 1 <= a.c2
