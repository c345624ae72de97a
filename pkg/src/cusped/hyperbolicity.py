"""Gromov products, delta estimates, approximate centers and visual-metric samples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, ResourceError, default_limits
from .graph import SpaceGraph
from .sampling import chunked, make_rng, parallel_map, sample_distinct_tuples


def as_graph(X) -> SpaceGraph:
    return X if isinstance(X, SpaceGraph) else X.graph


def _idx(g: SpaceGraph, v) -> int:
    if isinstance(v, (int, np.integer)) and v not in g.index:
        return int(v)
    return g.vertex(v)


def gromov_product(X, x, y, z) -> Fraction:
    """(y|z)_x = (d(x,y) + d(x,z) - d(y,z)) / 2, exactly."""
    g = as_graph(X)
    x, y, z = _idx(g, x), _idx(g, y), _idx(g, z)
    return Fraction(g.distance(x, y) + g.distance(x, z) - g.distance(y, z), 2)


def _four_point(dxy, dzw, dxz, dyw, dxw, dyz):
    """Twice the four-point defect: largest minus middle of the three pair sums."""
    a = dxy + dzw
    b = dxz + dyw
    c = dxw + dyz
    hi = np.maximum(np.maximum(a, b), c)
    lo = np.minimum(np.minimum(a, b), c)
    return hi - (a + b + c - hi - lo)


def _orient(D, q) -> tuple[int, int, int, int]:
    """Order a quadruple as (x, u, v, w) so the Gromov-inequality defect equals the four-point value.

    min{(u|w)_x, (v|w)_x} - (u|v)_x = (d(x,w) + d(u,v) - max of the other two sums) / 2,
    so x and w must be the pair whose sum with the complementary pair is largest.
    """
    i, j, k, l = (int(t) for t in q)
    sums = [(D(i, j) + D(k, l), (i, k, l, j)), (D(i, k) + D(j, l), (i, j, l, k)), (D(i, l) + D(j, k), (i, j, k, l))]
    return max(sums, key=lambda s: s[0])[1]


def gromov_defect(X, x, u, v, w) -> Fraction:
    """min{(u|w)_x, (v|w)_x} - (u|v)_x."""
    return min(gromov_product(X, x, u, w), gromov_product(X, x, v, w)) - gromov_product(X, x, u, v)


@dataclass
class DeltaReport:
    mode: str
    delta_fourpoint: float
    n_vertices: int
    sample_size: int | None
    seed: int | None
    witness: tuple[str, str, str, str] | None
    witness_index: tuple[int, int, int, int] | None = field(default=None, repr=False)
    thin_triangle_delta: int | None = None
    thin_triangle_witness: tuple | None = None
    gromov_inequality_min_slack: float | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "delta_fourpoint": self.delta_fourpoint,
            "n_vertices": self.n_vertices,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "witness": list(self.witness) if self.witness else None,
            "thin_triangle_delta": self.thin_triangle_delta,
            "thin_triangle_witness": list(self.thin_triangle_witness) if self.thin_triangle_witness else None,
            "gromov_inequality_min_slack": self.gromov_inequality_min_slack,
        }


def _exact_rows(D: np.ndarray, i: int):
    """Best (value, j, k, l) over quadruples i < j < k, l (first occurrence in index order)."""
    n = D.shape[0]
    best, arg = -1, None
    for js in chunked(range(i + 1, n), 16):
        j = np.asarray(js)
        lo = int(j[0]) + 1
        if lo >= n:
            break
        K = D[lo:, lo:]
        vals = _four_point(
            D[i, j][:, None, None], K[None, :, :],
            D[i, lo:][None, :, None], D[j, lo:][:, None, :],
            D[i, lo:][None, None, :], D[j, lo:][:, :, None],
        )
        flat = int(np.argmax(vals))
        v = int(vals.flat[flat])
        if v > best:
            a, k, l = np.unravel_index(flat, vals.shape)
            best, arg = v, (int(j[a]), int(k) + lo, int(l) + lo)
    return best, arg


def four_point_delta(
    X,
    mode: str = "exact",
    sample_size: int | None = None,
    seed: int | None = None,
    max_exact: int | None = None,
) -> DeltaReport:
    """Four-point delta: the max over quadruples of min{(u|w)_x, (v|w)_x} - (u|v)_x.

    ``exact`` enumerates every quadruple (refused above ``max_exact``
    vertices); ``sampled`` evaluates seeded quadruples of distinct vertices
    and is a lower bound for the exact value.  ``auto`` picks exact when
    allowed.  Values are half-integers.
    """
    g = as_graph(X)
    n = g.n_vertices
    cap = default_limits().exact_delta_vertices if max_exact is None else max_exact
    if mode == "auto":
        mode = "exact" if n <= cap else "sampled"
    if mode == "exact":
        if n > cap:
            raise ResourceError(
                f"exact four-point delta refused for {n} vertices (cap {cap}); use sampled mode"
            )
        if n < 4:
            raise InputError("exact four-point delta needs at least 4 vertices")
        D = g.distance_matrix()
        results = parallel_map(lambda i: _exact_rows(D, i), list(range(n - 3)))
        best, quad = -1, None
        for i, (v, arg) in enumerate(results):
            if arg is not None and v > best:
                best, quad = v, (i,) + arg
        oriented = _orient(lambda a, b: int(D[a, b]), quad)
        return DeltaReport(
            "exact", best / 2, n, None, None, tuple(str(g.labels[t]) for t in oriented), oriented,
            gromov_inequality_min_slack=0.0,
        )
    if mode != "sampled":
        raise InputError(f"unknown delta mode {mode!r}")
    if seed is None:
        raise InputError("sampled four-point delta requires a seed")
    if not sample_size or sample_size < 1:
        raise InputError("sampled four-point delta requires a positive sample_size")
    if n < 4:
        raise InputError("four-point delta needs at least 4 vertices")
    quads = sample_distinct_tuples(make_rng(seed, 0), n, 4, sample_size)
    vals = _sample_values(g, quads)
    k = int(np.argmax(vals))
    best = int(vals[k])
    oriented = _orient(g.distance, quads[k])
    check = sample_distinct_tuples(make_rng(seed, 1), n, 4, sample_size)
    slack = best - int(np.max(_sample_values(g, check)))
    return DeltaReport(
        "sampled", best / 2, n, sample_size, seed, tuple(str(g.labels[t]) for t in oriented), oriented,
        gromov_inequality_min_slack=slack / 2,
    )


def _sample_values(g: SpaceGraph, quads: np.ndarray) -> np.ndarray:
    def run(chunk):
        q = np.asarray(chunk)
        cols = [(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)]
        pairs = np.concatenate([q[:, c] for c in cols])
        d = g.pair_distances(pairs).reshape(6, len(q)).astype(np.int64)
        return _four_point(*d)

    parts = parallel_map(run, chunked(quads, 4096))
    return np.concatenate(parts) if parts else np.zeros(0, np.int64)


def thin_triangle_delta(X, sample_size: int | None = None, seed: int | None = None, mode: str = "sampled"):
    """Max of d(y', z') over triangles and matched points y' in [x,y], z' in [x,z] with
    d(x,y') = d(x,z') <= (y|z)_x.  Geodesics come from the deterministic extractor.

    Returns (value, witness) with witness (x, y, z, t) as labels.
    """
    g = as_graph(X)
    n = g.n_vertices
    if mode == "exact":
        tri = np.array([(a, b, c) for a in range(n) for b in range(n) for c in range(n)], dtype=np.int64).reshape(-1, 3)
    else:
        if seed is None or not sample_size:
            raise InputError("sampled thin-triangle delta needs sample_size and seed")
        tri = make_rng(seed, 2).integers(0, n, size=(sample_size, 3))
    best, witness = 0, None
    for a, b, c in tri:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            x, y, z = int(x), int(y), int(z)
            reach = (g.distance(x, y) + g.distance(x, z) - g.distance(y, z)) // 2
            if reach == 0:
                continue
            py, pz = g.geodesic(x, y), g.geodesic(x, z)
            for t in range(1, reach + 1):
                d = g.distance(py[t], pz[t])
                if d > best:
                    best, witness = d, (str(g.labels[x]), str(g.labels[y]), str(g.labels[z]), t)
    return best, witness


def _sides(g: SpaceGraph, x: int, y: int, z: int):
    return g.geodesic(x, y), g.geodesic(y, z), g.geodesic(z, x)


def approximate_center(X, x, y, z, L: int):
    """Smallest-index vertex whose closed L-ball meets all three sides, or None."""
    g = as_graph(X)
    x, y, z = _idx(g, x), _idx(g, y), _idx(g, z)
    reach = np.max(np.stack([g.multi_source_distance(s) for s in _sides(g, x, y, z)]), axis=0)
    hits = np.flatnonzero(reach <= L)
    return g.labels[int(hits[0])] if len(hits) else None


def center_radius(X, w, x, y, z) -> int:
    """Least L for which w is an L-approximate center of the triangle xyz."""
    g = as_graph(X)
    w, x, y, z = _idx(g, w), _idx(g, x), _idx(g, y), _idx(g, z)
    row = g.distances_from(w)
    return max(int(row[s].min()) for s in _sides(g, x, y, z))


def equiradial_points(X, x, y, z):
    """Points on [x,y], [y,z], [z,x] at distance floor((y|z)_x), floor((z|x)_y), floor((x|y)_z)
    from x, y, z respectively."""
    g = as_graph(X)
    x, y, z = _idx(g, x), _idx(g, y), _idx(g, z)
    out = []
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        t = math.floor(gromov_product(g, a, b, c))
        out.append(g.labels[g.geodesic(a, b)[t]])
    return tuple(out)


@dataclass
class VisualEstimate:
    basepoint: str
    a: float
    directions: list[str]
    products: list[list[float]]
    c1: float
    c2: float

    @property
    def gauge_spread(self) -> float:
        return self.c2 / self.c1

    def to_dict(self) -> dict:
        return {
            "basepoint": self.basepoint,
            "a": self.a,
            "directions": self.directions,
            "products": self.products,
            "c1": self.c1,
            "c2": self.c2,
            "gauge_spread": self.gauge_spread,
        }


def visual_estimate(X, w, a: float, directions, horizon: int = 0) -> VisualEstimate:
    """Sample the visual quasi-metric a^-(xi|xi')_w on deep vertices.

    The estimated distance is the chain metric generated by the quasi-metric
    (shortest chains through the sampled directions); c1 and c2 are the
    extreme ratios of that metric to a^-(xi|xi')_w.
    """
    if a <= 1:
        raise InputError("visual parameter a must exceed 1")
    g = as_graph(X)
    w = _idx(g, w)
    dirs = [_idx(g, v) for v in directions]
    if len(set(dirs)) != len(dirs) or len(dirs) < 2:
        raise InputError("directions must be at least two distinct vertices")
    row = g.distances_from(w)
    short = [g.labels[v] for v in dirs if row[v] < horizon]
    if short:
        raise InputError(f"directions closer than the horizon {horizon} to the basepoint: {short}")
    k = len(dirs)
    P = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i != j:
                P[i, j] = float(gromov_product(g, w, dirs[i], dirs[j]))
    q = np.where(np.eye(k, dtype=bool), 0.0, float(a) ** (-P))
    rho = q.copy()
    for m in range(k):
        rho = np.minimum(rho, rho[:, m][:, None] + rho[m, :][None, :])
    off = ~np.eye(k, dtype=bool)
    ratio = rho[off] / q[off]
    return VisualEstimate(
        str(g.labels[w]), float(a), [str(g.labels[v]) for v in dirs], P.tolist(),
        float(ratio.min()), float(ratio.max()),
    )
