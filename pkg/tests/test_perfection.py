import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cusped.cusped_graph import CayleyVertex, CuspVertex, build_cusped
from cusped.errors import InputError, ResourceError
from cusped.graph import SpaceGraph, path_graph
from cusped.groups import IDENTITY, Free, GroupPair
from cusped.hyperbolicity import gromov_product
from cusped.perfection import (
    PerfectionReport,
    PerfectionRow,
    center_criterion,
    equilateral_scan,
    perfection_threshold,
    scale_bound,
)

import oracle


def tree(r):
    return build_cusped(GroupPair.elementary(Free(2)), r, 0)


def from_nx(G):
    nodes = sorted(G.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    return SpaceGraph(nodes, np.array([(idx[u], idx[v]) for u, v in G.edges]).reshape(-1, 2))


def test_tree_scan_is_one_and_witness_checks_out():
    X = tree(3)
    rep = equilateral_scan(X, [CayleyVertex(IDENTITY)], [3])
    row = rep.rows[0]
    assert row.mode == "exact" and row.mu_best == 1
    x, y, z = (X.graph.vertex(next(v for v in X.graph.labels if str(v) == s)) for s in row.witness)
    least = min(gromov_product(X, x, y, z), gromov_product(X, y, x, z), gromov_product(X, z, x, y))
    assert least == row.min_product == 3


def test_path_has_no_equilateral_triples():
    P = path_graph(41)
    rep = equilateral_scan(P, [20], range(3, 11))
    assert all(r.mu_best == 0 for r in rep.rows)
    assert scale_bound(rep) <= 2


def test_three_collinear_points():
    rep = equilateral_scan(path_graph(3), [1], [2])
    assert rep.rows[0].mu_best == 0
    assert rep.rows[0].ball_size == 3


def test_small_ball_and_radius_are_rejected():
    with pytest.raises(InputError):
        equilateral_scan(path_graph(2), [0], [2])
    with pytest.raises(InputError):
        equilateral_scan(path_graph(9), [4], [1])


def test_exact_mode_is_capped_and_sampled_needs_seed():
    X = tree(5)
    with pytest.raises(ResourceError):
        equilateral_scan(X, [CayleyVertex(IDENTITY)], [5], mode="exact")
    with pytest.raises(InputError):
        equilateral_scan(X, [CayleyVertex(IDENTITY)], [5], mode="sampled")


def test_sampled_scan_is_seeded_and_finds_tree_triples():
    X = tree(6)
    a = equilateral_scan(X, [CayleyVertex(IDENTITY)], [5, 6], seed=3, sample_size=2000)
    b = equilateral_scan(X, [CayleyVertex(IDENTITY)], [5, 6], seed=3, sample_size=2000)
    assert [r.to_dict() for r in a.rows] == [r.to_dict() for r in b.rows]
    assert all(r.mode == "sampled" and r.mu_best == 1 for r in a.rows)


@settings(max_examples=25, deadline=None)
@given(st.integers(6, 14), st.integers(0, 10_000), st.integers(2, 4))
def test_exact_scan_matches_brute_force(n, seed, R):
    G = nx.connected_watts_strogatz_graph(n, 4, 0.4, seed=seed)
    ref = oracle.all_pairs(G)
    ball = [v for v in G.nodes if ref[0][v] <= R]
    if len(ball) < 3:
        return
    rep = equilateral_scan(from_nx(G), [0], [R], mode="exact")
    assert rep.rows[0].min_product == oracle.equilateral_brute(ref, ball)


def test_center_criterion_tree_and_path():
    X = tree(5)
    table = center_criterion(X, [CayleyVertex(IDENTITY)], far_horizon=3, L_max=3, seed=1)
    assert table.rows[0].L == 0 and table.K_hat == 0
    path = center_criterion(path_graph(21), [10], far_horizon=5, L_max=5)
    assert path.rows[0].L is None and path.rows[0].candidates == 2
    assert path.n_none == 1 and path.K_hat is None


def test_center_criterion_needs_seed_for_big_spheres():
    with pytest.raises(InputError):
        center_criterion(tree(5), [CayleyVertex(IDENTITY)], far_horizon=4, L_max=2)


def test_deep_horoball_vertices(free_pair):
    X = build_cusped(free_pair, 2, 4)
    deep = [v for v in X.graph.labels if isinstance(v, CuspVertex) and v.depth in (2, 4)
            and v.element == IDENTITY]
    assert len(deep) == 2
    rep = equilateral_scan(X, deep, [2, 3], seed=2, sample_size=500)
    assert len(rep.rows) == 2 * len(deep)
    for r in rep.rows:
        assert 0 <= r.mu_best <= 1
        assert r.escapes_certified  # depth from e plus R exceeds the Cayley radius 2


def test_escape_flag_uses_depth_from_root():
    X = tree(3)
    rows = equilateral_scan(X, [CayleyVertex(IDENTITY)], [2, 3]).rows
    assert [r.escapes_certified for r in rows] == [False, False]
    a = X.pair.ambient.normal_form("a")
    assert equilateral_scan(X, [CayleyVertex(a)], [3]).rows[0].escapes_certified


def _report(pairs):
    return PerfectionReport([PerfectionRow("w", R, mu, None, mu * R, "exact", None, 10, False)
                             for R, mu in pairs])


def test_threshold_vacuous_and_violations():
    out = perfection_threshold(_report([(3, 1.0), (6, 0.2)]), K_hat=3, delta_hat=2)
    assert out["R0"] == 138 and out["vacuous"] and out["passed"]
    out = perfection_threshold(_report([(3, 0.1), (5, 0.2)]), K_hat=0, delta_hat=0)
    assert out["tested"] == 2 and not out["passed"] and len(out["violations"]) == 2
    assert perfection_threshold(_report([(3, 1.0)]), None, 1.0)["vacuous"]
