import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cusped.cusped_graph import CayleyVertex, build_cusped
from cusped.errors import ConfigurationError, DependencyError, InsufficientTruncationError
from cusped.extension import (
    CuspExtension,
    compose,
    cusp_extend,
    fit_lambda_eps,
    make_pair_map,
    measure_extension,
)
from cusped.groups import FiniteCyclic, Free, FreeAbelian, GroupPair
from cusped.horoball import HoroVertex, build_horoball

import oracle

Z = FreeAbelian(1)
ZP = GroupPair.elementary(Z)


def zv(k, t):
    return HoroVertex(Z.from_exponents([k]), t)


@pytest.fixture(scope="module")
def doubling():
    return make_pair_map(ZP, ZP, {"kind": "scaling", "factor": 2})


def test_identity_extension_is_identity(free_pair):
    X = build_cusped(free_pair, 2, 2)
    phi = make_pair_map(free_pair, free_pair, {"kind": "identity"})
    ext = cusp_extend(phi, X, X)
    assert np.array_equal(ext.image, np.arange(X.graph.n_vertices))
    rep = measure_extension(phi, X, X, inverse=phi, group_sample=["a", "b^-1"])
    assert (rep.lambda_fit, rep.eps_fit, rep.roundtrip_sup, rep.nu_fit) == (1, 0, 0, 0)
    assert rep.R_observed == 0 and rep.nu_pairs > 0


def test_scaling_on_horoballs(doubling):
    X1, X2 = build_horoball(Z, 10, 3), build_horoball(Z, 20, 5)
    ext = CuspExtension(doubling, X1, X2)
    assert ext(zv(0, 3)) == zv(0, 3)
    assert ext(zv(5, 2)) == zv(10, 2)
    ref = oracle.all_pairs(oracle.horoball_graph(oracle.z_points(20), oracle.l1, 5))
    assert X2.distance(zv(0, 0), zv(20, 0)) == ref[(0, 0)][(20, 0)] == 7


def test_scaling_constants_are_stable(doubling):
    small = measure_extension(doubling, build_horoball(Z, 30, 5), build_horoball(Z, 60, 5))
    big = measure_extension(doubling, build_horoball(Z, 60, 6), build_horoball(Z, 120, 6))
    assert small.lambda_fit == big.lambda_fit == 1
    assert big.eps_fit <= small.eps_fit + 1


def test_functoriality_of_scalings(doubling):
    X1, X2, X3 = build_horoball(Z, 15, 4), build_horoball(Z, 30, 4), build_horoball(Z, 60, 4)
    rep = measure_extension(doubling, X1, X2, compose_with=(doubling, X3))
    assert rep.functoriality_sup == 0
    quad = compose(doubling, doubling)
    assert str(quad.images["a"]) == "a^4"


def test_automorphism_swapping_peripheral_generators(z_z2_pair):
    phi = make_pair_map(z_z2_pair, z_z2_pair,
                        {"kind": "automorphism", "images": {"a": "a^-1", "b": "c", "c": "b"}})
    assert phi.R_observed == 0
    X = build_cusped(z_z2_pair, 2, 2)
    rep = measure_extension(phi, X, X, inverse=phi, group_sample=["b", "c^-1"])
    assert rep.roundtrip_sup == 0
    assert rep.lambda_fit == 1 and rep.eps_fit == 0


def test_relations_are_checked():
    Z2 = GroupPair.elementary(FreeAbelian(2))
    F2 = GroupPair.elementary(Free(2))
    with pytest.raises(ConfigurationError, match="commute"):
        make_pair_map(Z2, F2, {"kind": "inclusion", "images": {"a": "a", "b": "b"}})
    C3, C2 = GroupPair.elementary(FiniteCyclic(3)), GroupPair.elementary(FiniteCyclic(2))
    with pytest.raises(ConfigurationError, match="order"):
        make_pair_map(C3, C2, {"kind": "inclusion", "images": {"a": "a"}})
    with pytest.raises(ConfigurationError, match="missing"):
        make_pair_map(Z2, Z2, {"kind": "automorphism", "images": {"a": "a"}})
    with pytest.raises(ConfigurationError, match="injective"):
        make_pair_map(Z2, Z2, {"kind": "automorphism", "images": {"a": "a", "b": "a"}})


def test_insufficient_target_reports_needed_width(doubling):
    with pytest.raises(InsufficientTruncationError) as info:
        cusp_extend(doubling, build_horoball(Z, 10, 3), build_horoball(Z, 12, 3))
    assert info.value.needed_width >= 14


def test_mismatched_spaces_are_rejected(doubling, free_pair):
    with pytest.raises(DependencyError):
        CuspExtension(doubling, build_cusped(free_pair, 1, 1), build_horoball(Z, 4, 2))


def test_depth_clamping_is_counted():
    phi = make_pair_map(ZP, ZP, {"kind": "identity"})
    ext = cusp_extend(phi, build_horoball(Z, 10, 5), build_horoball(Z, 20, 3))
    assert len(ext.clamped) == 21 * 2
    assert ext(zv(4, 5)) == zv(4, 3)


def test_extra_generators_identity():
    plain = GroupPair.build({"kind": "free", "rank": 2}, [("a",)])
    regen = GroupPair.build({"kind": "free", "rank": 2}, [("a",)], ["a b"])
    phi = make_pair_map(plain, regen, {"kind": "identity"})
    assert phi.R_observed == 0
    X1, X2 = build_cusped(plain, 2, 2), build_cusped(regen, 2, 2)
    ext = CuspExtension(phi, X1, X2)
    ab = plain.ambient.normal_form("a b")
    assert X2.distance(ext(CayleyVertex(ab)), ext(CayleyVertex(plain.ambient.normal_form("e")))) == 1


def _grid_cost(d1, d2, S):
    best = None
    for lam in np.linspace(1, 10, 9001):
        eps = max(0.0, float(np.max(np.concatenate([d2 - lam * d1, d1 - lam * d2]))))
        cost = lam * S + eps
        best = cost if best is None else min(best, cost)
    return best


pairs = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=12)


@settings(max_examples=40, deadline=None)
@given(pairs)
def test_fit_is_feasible_and_no_worse_than_grid(data):
    d1 = np.array([a for a, _ in data], dtype=float)
    d2 = np.array([b for _, b in data], dtype=float)
    lam, eps = fit_lambda_eps(d1, d2)
    assert lam >= 1 and eps >= 0
    assert np.all(d2 <= lam * d1 + eps + 1e-9) and np.all(d1 <= lam * d2 + eps + 1e-9)
    S = d1.max()
    assert lam * S + eps <= _grid_cost(d1, d2, S) + 1e-9


def test_fit_examples():
    assert fit_lambda_eps([1, 2, 3], [1, 2, 3]) == (1.0, 0.0)
    assert fit_lambda_eps([1, 2, 4], [2, 4, 8]) == (1.0, 4.0)
