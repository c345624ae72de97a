"""Truncated combinatorial horoballs over a group's Cayley graph.

Vertices are pairs (element, depth) with the element in a metric ball W about
the identity and depth in 0..N.  Vertical edges join consecutive depths over
the same element; at depth n two elements are joined when their distance in
the base group lies in [1, floor(e**n)].  Horizontal adjacency always uses the
exact base metric, not the metric of the subgraph induced on W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, InsufficientDepthError, InvariantViolation, ResourceError, default_limits
from .graph import SpaceGraph
from .groups import IDENTITY, FreeAbelian, GroupElement, GroupModel
from .sampling import make_rng


@dataclass(frozen=True)
class HoroVertex:
    element: GroupElement
    depth: int = 0

    def __str__(self) -> str:
        return f"({self.element}, {self.depth})"


def level_threshold(n: int, rounding: str = "floor") -> int:
    """Largest base distance joined by a horizontal edge at depth n."""
    x = math.exp(n)
    return math.floor(x) if rounding == "floor" else math.ceil(x)


def base_distance_matrix(base: GroupModel, elements: Sequence[GroupElement]) -> np.ndarray:
    if isinstance(base, FreeAbelian):
        c = base.coords(elements)
        return np.abs(c[:, None, :] - c[None, :, :]).sum(axis=2).astype(np.int32)
    n = len(elements)
    inv = [base.invert(g) for g in elements]
    out = np.zeros((n, n), dtype=np.int32)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = base.length(base.multiply(inv[i], elements[j]))
    return out


def horizontal_edges(dist: np.ndarray, max_depth: int, rounding: str = "floor"):
    """Yield (depth, i, j) index arrays of horizontal edges, i < j, per level."""
    iu, ju = np.triu_indices(dist.shape[0], k=1)
    d = dist[iu, ju]
    for n in range(max_depth + 1):
        mask = (d >= 1) & (d <= level_threshold(n, rounding))
        yield n, iu[mask], ju[mask]


class HoroballTruncation:
    """The combinatorial horoball over ``base`` restricted to W x {0..N}."""

    def __init__(self, base: GroupModel, width_radius: int, max_depth: int, rounding: str = "floor"):
        if width_radius < 0 or max_depth < 0:
            raise InputError("width_radius and max_depth must be nonnegative")
        if rounding not in ("floor", "ceil"):
            raise InputError(f"rounding must be 'floor' or 'ceil', got {rounding!r}")
        limits = default_limits()
        self.base = base
        self.width_radius = width_radius
        self.max_depth = max_depth
        self.rounding = rounding
        self.width = base.ball(IDENTITY, width_radius)
        self.element_index = {g: i for i, g in enumerate(self.width)}
        self.norms = np.array([base.length(g) for g in self.width], dtype=np.int32)
        levels = max_depth + 1
        n_vertices = len(self.width) * levels
        if n_vertices > limits.max_vertices:
            raise ResourceError(
                f"horoball truncation would have {n_vertices} vertices, above the cap {limits.max_vertices}"
            )
        self.base_dist = base_distance_matrix(base, self.width)

        blocks = []
        idx = np.arange(len(self.width), dtype=np.int64) * levels
        for n in range(max_depth):
            blocks.append(np.stack([idx + n, idx + n + 1], axis=1))
        n_edges = sum(len(b) for b in blocks)
        for n, i, j in horizontal_edges(self.base_dist, max_depth, rounding):
            n_edges += len(i)
            if n_edges > limits.max_edges:
                raise ResourceError(f"horoball truncation exceeds the edge cap {limits.max_edges}")
            blocks.append(np.stack([i * levels + n, j * levels + n], axis=1))
        edges = np.concatenate(blocks) if blocks else np.zeros((0, 2), np.int64)
        labels = [HoroVertex(g, t) for g in self.width for t in range(levels)]
        self.graph = SpaceGraph(labels, edges)

    # -- indexing ----------------------------------------------------------
    def vertex_index(self, element: GroupElement, depth: int) -> int:
        i = self.element_index.get(element)
        if i is None or not 0 <= depth <= self.max_depth:
            raise InputError(f"({element}, {depth}) is not in the truncation")
        return i * (self.max_depth + 1) + depth

    def index_of(self, v: HoroVertex) -> int:
        return self.vertex_index(v.element, v.depth)

    def label(self, i: int) -> HoroVertex:
        return self.graph.labels[i]

    def level_vertices(self, depth: int) -> np.ndarray:
        return np.arange(len(self.width), dtype=np.int64) * (self.max_depth + 1) + depth

    # -- certification -----------------------------------------------------
    def required_depth(self, d_base: int) -> int:
        return (math.ceil(math.log(d_base)) if d_base >= 1 else 0) + 2

    def certified(self, p: GroupElement, q: GroupElement) -> bool:
        """Whether the level-0 distance between p and q is exact for the infinite horoball."""
        if p == q:
            return True
        d = self.base.distance(p, q)
        r = max(self.base.length(p), self.base.length(q))
        return self.width_radius >= r + d and self.max_depth >= self.required_depth(d)

    def certified_pairs(self) -> np.ndarray:
        """Indices (i, j), i < j, of distinct certified level-0 pairs of width elements."""
        iu, ju = np.triu_indices(len(self.width), k=1)
        d = self.base_dist[iu, ju]
        r = np.maximum(self.norms[iu], self.norms[ju])
        need = np.ceil(np.log(np.maximum(d, 1))).astype(np.int64) + 2
        ok = (self.width_radius >= r + d) & (self.max_depth >= need)
        return np.stack([iu[ok], ju[ok]], axis=1)

    # -- metric --------------------------------------------------------------
    def distance(self, u: HoroVertex, v: HoroVertex) -> int:
        return self.graph.distance(self.index_of(u), self.index_of(v))

    def level_distance(self, i: int, j: int, depth: int) -> int:
        """Distance between (width[i], depth) and (width[j], depth)."""
        levels = self.max_depth + 1
        return self.graph.distance(i * levels + depth, j * levels + depth)

    def summary(self) -> dict:
        return {
            "kind": "horoball",
            "base": self.base.describe(),
            "width_radius": self.width_radius,
            "max_depth": self.max_depth,
            "rounding": self.rounding,
            "width_size": len(self.width),
            "vertices": self.graph.n_vertices,
            "edges": self.graph.n_edges,
        }


def build_horoball(base: GroupModel, width_radius: int, max_depth: int, rounding: str = "floor") -> HoroballTruncation:
    return HoroballTruncation(base, width_radius, max_depth, rounding)


def horoball_distance(H: HoroballTruncation, u: HoroVertex, v: HoroVertex) -> int:
    return H.distance(u, v)


def depth_horofunction(H: HoroballTruncation, v: HoroVertex) -> int:
    H.index_of(v)
    return -v.depth


def vertical_ray(H: HoroballTruncation, p: GroupElement):
    """t -> (p, t) for t in 0..N."""
    if p not in H.element_index:
        raise InputError(f"{p} is not in the width set of the truncation")

    def ray(t: int) -> HoroVertex:
        if not 0 <= t <= H.max_depth:
            raise InputError(f"ray parameter {t} outside 0..{H.max_depth}")
        return HoroVertex(p, t)

    return ray


@dataclass
class HorofunctionCheckReport:
    D1_observed: int
    n_pairs: int
    delta_hat: float
    radius: float
    seed: int | None
    witness: tuple[str, str] | None

    def to_dict(self) -> dict:
        return {
            "D1_observed": self.D1_observed,
            "n_pairs": self.n_pairs,
            "delta_hat": self.delta_hat,
            "ray_radius": self.radius,
            "seed": self.seed,
            "witness": list(self.witness) if self.witness else None,
        }


def check_horofunction(
    H: HoroballTruncation,
    samples,
    seed: int | None = None,
    delta_hat: float = 1.0,
) -> HorofunctionCheckReport:
    """Largest |(depth(w) - depth(x)) - d(x, w)| over pairs with w near an upward ray from x.

    ``samples`` is either an explicit list of (x, w) HoroVertex pairs or a
    number of pairs to draw: x uniform, then w uniform among vertices within
    5*delta_hat of the vertical ray from x.
    """
    radius = 5 * delta_hat
    levels = H.max_depth + 1
    g = H.graph
    if isinstance(samples, int):
        if samples < 1:
            raise InputError("empty horofunction sample")
        if seed is None:
            raise InputError("a seed is required for sampled horofunction checks")
        rng = make_rng(seed)
        pairs = []
        for x in rng.integers(0, g.n_vertices, size=samples):
            x = int(x)
            base_i, depth = divmod(x, levels)
            ray = [base_i * levels + t for t in range(depth, levels)]
            near = np.flatnonzero(g.multi_source_distance(ray) <= radius)
            pairs.append((x, int(near[rng.integers(0, len(near))])))
    else:
        pairs = [(H.index_of(x), H.index_of(w)) for x, w in samples]
        if not pairs:
            raise InputError("empty horofunction sample")
    worst, witness = -1, None
    for x, w in pairs:
        dx = g.labels[x].depth
        dw = g.labels[w].depth
        dev = abs((dw - dx) - g.distance(x, w))
        if dev > worst:
            worst, witness = dev, (str(g.labels[x]), str(g.labels[w]))
    return HorofunctionCheckReport(worst, len(pairs), delta_hat, radius, seed, witness)


def measure_t0(H: HoroballTruncation, p: GroupElement, q: GroupElement, D: int) -> int:
    """Smallest depth t with d((p,t), (q,t)) <= D."""
    if D < 1:
        raise InputError("D must be a positive integer")
    if p == q:
        raise InputError("measure_t0 needs distinct elements")
    i, j = H.element_index.get(p), H.element_index.get(q)
    if i is None or j is None:
        raise InputError("both elements must lie in the width set")
    return _t0(H, i, j, D)


def _t0(H: HoroballTruncation, i: int, j: int, D: int) -> int:
    for t in range(H.max_depth + 1):
        if H.level_distance(i, j, t) <= D:
            return t
    d = int(H.base_dist[i, j])
    need = math.ceil(math.log(d)) if d > 1 else 0
    raise InsufficientDepthError(
        f"threshold D={D} not reached by depth {H.max_depth}; about depth {need} (ceil ln d_T) is required",
        required_depth=need,
    )


def calibrate_synch_constant(H: HoroballTruncation, ray_radius: float, pairs: np.ndarray) -> tuple[int, tuple | None]:
    """Smallest D for which ray points within ``ray_radius`` of another ray are within D of its synchronous point.

    Rays are the vertical rays from level 0.  For each pair (i, j) and depth t
    with d((i,t), ray_j) <= ray_radius, D must cover d((i,t), (j,t)).
    Returns (D, witness); D is at least 1.
    """
    levels = H.max_depth + 1
    g = H.graph
    best, witness = 1, None
    ray_dist: dict[int, np.ndarray] = {}
    for i, j in np.asarray(pairs).reshape(-1, 2):
        for a, b in ((int(i), int(j)), (int(j), int(i))):
            if b not in ray_dist:
                ray_dist[b] = g.multi_source_distance([b * levels + t for t in range(levels)])
            for t in range(levels):
                if ray_dist[b][a * levels + t] <= ray_radius:
                    d = g.distance(a * levels + t, b * levels + t)
                    if d > best:
                        best, witness = d, (str(H.width[a]), str(H.width[b]), t)
    return best, witness


@dataclass
class ApproxDistanceReport:
    D: int
    delta_hat: float
    F_hat: float
    max_deviation: int
    violations: int
    n_pairs: int
    witness: tuple | None

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "delta_hat": self.delta_hat,
            "F_hat": self.F_hat,
            "max_deviation": self.max_deviation,
            "violations": self.violations,
            "n_pairs": self.n_pairs,
            "witness": list(self.witness) if self.witness else None,
        }


def approx_distance_constant(D: int, delta_hat: float) -> float:
    return 4 + 20 * delta_hat + D


def check_approx_distance(H: HoroballTruncation, pairs: np.ndarray, D: int, delta_hat: float) -> ApproxDistanceReport:
    """Compare d((p,0),(q,0)) with 2*t0(p,q,D) against F = 4 + 20*delta + D."""
    F = approx_distance_constant(D, delta_hat)
    worst, violations, witness = -1, 0, None
    pairs = np.asarray(pairs).reshape(-1, 2)
    H.graph.prefetch(H.level_vertices(0)[np.unique(pairs)])
    for i, j in pairs:
        i, j = int(i), int(j)
        t0 = _t0(H, i, j, D)
        dev = abs(H.level_distance(i, j, 0) - 2 * t0)
        if dev > F:
            violations += 1
        if dev > worst:
            worst, witness = dev, (str(H.width[i]), str(H.width[j]), t0)
    return ApproxDistanceReport(D, delta_hat, F, worst, violations, len(pairs), witness)


@dataclass
class LowCentersReport:
    D: int
    delta_hat: float
    checked: int
    violations: int
    witness: tuple | None

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "delta_hat": self.delta_hat,
            "checked": self.checked,
            "violations": self.violations,
            "witness": list(self.witness) if self.witness else None,
        }


def check_low_centers(H: HoroballTruncation, pairs: np.ndarray, D: int, delta_hat: float) -> LowCentersReport:
    """If rays are D-close at depth t1 they stay D-close from depth t1 + D + 5*delta on."""
    checked = violations = 0
    witness = None
    lag = D + 5 * delta_hat
    for i, j in np.asarray(pairs).reshape(-1, 2):
        i, j = int(i), int(j)
        for t1 in range(H.max_depth + 1):
            if H.level_distance(i, j, t1) > D:
                continue
            for t in range(math.ceil(t1 + lag), H.max_depth + 1):
                checked += 1
                if H.level_distance(i, j, t) > D:
                    violations += 1
                    if witness is None:
                        witness = (str(H.width[i]), str(H.width[j]), t1, t)
            break
    return LowCentersReport(D, delta_hat, checked, violations, witness)


def sample_certified_pairs(H: HoroballTruncation, size: int | None, seed: int | None) -> np.ndarray:
    """Seeded sample (without replacement) of certified level-0 pairs; all of them when size is None."""
    pairs = H.certified_pairs()
    if size is None or size >= len(pairs):
        return pairs
    if seed is None:
        raise InputError("a seed is required when sampling pairs")
    rng = make_rng(seed)
    pick = np.sort(rng.choice(len(pairs), size=size, replace=False))
    return pairs[pick]


def check_level_zero_embedding(H: HoroballTruncation) -> None:
    """Depth-0 horizontal edges are exactly the Cayley edges inside W."""
    levels = H.max_depth + 1
    e = H.graph.edges
    flat = e[(e[:, 0] % levels == 0) & (e[:, 1] % levels == 0)]
    if np.any(H.base_dist[flat[:, 0] // levels, flat[:, 1] // levels] != 1):
        raise InvariantViolation("depth-0 level is not the induced Cayley subgraph")
