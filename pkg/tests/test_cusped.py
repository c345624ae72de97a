import pytest

from cusped.cusped_graph import CayleyVertex, CuspVertex, build_cusped, cusped_distance, extract_geodesic
from cusped.errors import ResourceError
from cusped.groups import IDENTITY, GroupPair

import oracle


def oracle_node(label):
    if isinstance(label, CayleyVertex):
        return _word(label.element)
    return ("horo", _word(label.element), label.depth)


def _word(g):
    return "".join((s if k > 0 else s.upper()) * abs(k) for s, k in g.word)


def test_smallest_cusped_space(free_pair):
    X = build_cusped(free_pair, 1, 1, 0)
    s = X.summary()
    assert s["cosets"] == 3
    assert s["vertices"] == {"cayley": 5, "horoball": 5, "total": 10}


@pytest.mark.parametrize("R,N", [(1, 2), (2, 2), (2, 3)])
def test_free_cusped_matches_oracle(free_pair, R, N):
    X = build_cusped(free_pair, R, N)
    ref = oracle.all_pairs(oracle.free_cusped_graph(R, N))
    assert len(ref) == X.graph.n_vertices
    D = X.graph.distance_matrix()
    names = [oracle_node(v) for v in X.graph.labels]
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            assert D[i, j] == ref[a][b]


def test_margin_shortcut_through_horoball(free_pair):
    X = build_cusped(free_pair, 1, 4, 10)
    a10 = free_pair.ambient.normal_form("a^10")
    assert cusped_distance(X, CayleyVertex(a10), CayleyVertex(IDENTITY)) == 6


def test_margin_widens_cosets(z_z2_pair):
    X = build_cusped(z_z2_pair, 0, 2, 2)
    s = X.summary()
    assert s["cosets"] == 1
    assert s["vertices"]["cayley"] == 13  # the l1 ball of radius 2 in Z^2


def test_every_horoball_vertex_is_over_its_coset(z_z2_pair):
    X = build_cusped(z_z2_pair, 2, 2)
    for v in X.graph.labels:
        if isinstance(v, CuspVertex):
            c = X.cosets[v.coset]
            assert z_z2_pair.coset_key(c.peripheral, v.element) == c.rep
            assert 1 <= v.depth <= 2


def test_geodesic_extraction(z_z2_pair):
    X = build_cusped(z_z2_pair, 3, 3)
    labels = X.graph.labels
    u, v = labels[0], labels[-1]
    path = extract_geodesic(X, u, v)
    assert path[0] == u and path[-1] == v
    assert len(path) - 1 == X.distance(u, v)
    for a, b in zip(path, path[1:]):
        assert X.distance(a, b) == 1
    assert extract_geodesic(X, u, v) == path


def test_vertex_cap_from_environment(monkeypatch, free_pair):
    monkeypatch.setenv("CUSPED_MAX_VERTICES", "50")
    with pytest.raises(ResourceError):
        build_cusped(free_pair, 3, 3)


def test_labels_use_kind_element_depth(free_pair):
    X = build_cusped(free_pair, 1, 1)
    names = {str(v) for v in X.graph.labels}
    assert "cayley/e/0" in names
    assert "horoball0/e/1" in names
