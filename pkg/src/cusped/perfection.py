"""Finite-scale signatures of a uniformly perfect boundary.

Two probes: the equilateral scan looks for triples in B(w, R) whose
pairwise Gromov products are all large compared with R, and the center
criterion measures how close a vertex sits to all three sides of a
triangle with far-away corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InputError, ResourceError, default_limits
from .hyperbolicity import _idx, as_graph
from .sampling import make_rng, sample_distinct_tuples

MU = 0.5


def _root(X) -> int | None:
    """Index of the basepoint that the certified radius is measured from."""
    from .cusped_graph import CuspedTruncation
    from .groups import IDENTITY
    from .horoball import HoroballTruncation

    if isinstance(X, CuspedTruncation):
        return X.find(IDENTITY)
    if isinstance(X, HoroballTruncation):
        return X.vertex_index(IDENTITY, 0)
    return None


def _certified_radius(X) -> int | None:
    from .cusped_graph import CuspedTruncation
    from .horoball import HoroballTruncation

    if isinstance(X, CuspedTruncation):
        return X.cayley_radius
    if isinstance(X, HoroballTruncation):
        return X.width_radius
    return None


@dataclass
class PerfectionRow:
    basepoint: str
    R: int
    mu_best: float
    witness: tuple[str, str, str] | None
    min_product: float
    mode: str
    seed: int | None
    ball_size: int
    escapes_certified: bool

    def to_dict(self) -> dict:
        return {
            "basepoint": self.basepoint,
            "R": self.R,
            "mu_best": self.mu_best,
            "min_product": self.min_product,
            "witness": list(self.witness) if self.witness else None,
            "mode": self.mode,
            "seed": self.seed,
            "ball_size": self.ball_size,
            "escapes_certified": self.escapes_certified,
        }


@dataclass
class CenterRow:
    vertex: str
    L: int | None
    witness: tuple[str, str, str] | None
    candidates: int

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "L": self.L,
            "witness": list(self.witness) if self.witness else None,
            "candidates": self.candidates,
        }


@dataclass
class CenterTable:
    far_horizon: int
    L_max: int
    seed: int | None
    rows: list[CenterRow]

    @property
    def K_hat(self) -> int | None:
        """Largest finite L over the sample; None when no row found a center."""
        found = [r.L for r in self.rows if r.L is not None]
        return max(found) if found else None

    @property
    def n_none(self) -> int:
        return sum(r.L is None for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "far_horizon": self.far_horizon,
            "L_max": self.L_max,
            "seed": self.seed,
            "K_hat": self.K_hat,
            "n_none": self.n_none,
            "rows": [r.to_dict() for r in self.rows],
        }


@dataclass
class PerfectionReport:
    rows: list[PerfectionRow]
    centers: CenterTable | None = None
    threshold: dict | None = None

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "centers": self.centers.to_dict() if self.centers else None,
            "threshold": self.threshold,
        }

    def csv_rows(self) -> list[list]:
        out = [["w", "R", "mu_best", "witness", "flags"]]
        for r in self.rows:
            flags = "escapes_certified" if r.escapes_certified else ""
            out.append([r.basepoint, r.R, repr(r.mu_best), " ".join(r.witness or ()), flags])
        return out


def _triple_min(D: np.ndarray, i, j, k) -> np.ndarray:
    """Twice the least of the three corner products of triangles (i, j, k)."""
    a = D[i, j] + D[i, k] - D[j, k]
    b = D[j, i] + D[j, k] - D[i, k]
    c = D[k, i] + D[k, j] - D[i, j]
    return np.minimum(np.minimum(a, b), c)


def _best_exact(D: np.ndarray):
    m = D.shape[0]
    best, arg = -1, None
    for i in range(m - 2):
        j, k = np.triu_indices(m - i - 1, 1)
        j, k = j + i + 1, k + i + 1
        vals = _triple_min(D, i, j, k)
        t = int(np.argmax(vals))
        if vals[t] > best:
            best, arg = int(vals[t]), (i, int(j[t]), int(k[t]))
    return best, arg


def _best_sampled(D: np.ndarray, sphere: np.ndarray, rng, size: int):
    m = D.shape[0]
    tri = sample_distinct_tuples(rng, m, 3, size)
    if len(sphere) >= 3:
        # half the budget on the outer sphere, where large products live
        s = sample_distinct_tuples(rng, len(sphere), 3, size)
        tri = np.concatenate([tri, sphere[s]])
    vals = _triple_min(D, tri[:, 0], tri[:, 1], tri[:, 2])
    t = int(np.argmax(vals))
    return int(vals[t]), tuple(int(v) for v in tri[t])


def equilateral_scan(
    X,
    basepoints,
    radii,
    mode: str = "auto",
    seed: int | None = None,
    sample_size: int | None = None,
    certified_radius: int | None = None,
) -> PerfectionReport:
    """mu_best(w, R) = max over triples in B(w, R) of min pairwise (x_i|x_j)_{x_k}, divided by R."""
    g = as_graph(X)
    cutoff = default_limits().exact_triple_ball
    cert = _certified_radius(X) if certified_radius is None else certified_radius
    root = _root(X)
    rows = []
    for b, w in enumerate(basepoints):
        wi = _idx(g, w)
        row_w = g.distances_from(wi)
        depth = int(g.distances_from(root)[wi]) if root is not None else 0
        for R in radii:
            if R < 2:
                raise InputError("radii must be at least 2")
            ball = np.flatnonzero(row_w <= R)
            if len(ball) < 3:
                raise InputError(f"B({g.labels[wi]}, {R}) has fewer than 3 vertices")
            use = mode
            if use == "auto":
                use = "exact" if len(ball) <= cutoff else "sampled"
            D = g.distance_matrix(ball).astype(np.int64)
            if use == "exact":
                if len(ball) > cutoff:
                    raise ResourceError(f"exact triple scan refused for a ball of {len(ball)} vertices (cap {cutoff})")
                best, arg = _best_exact(D)
            elif use == "sampled":
                if seed is None or not sample_size:
                    raise InputError("sampled equilateral scan requires seed and sample_size")
                sphere = np.flatnonzero(row_w[ball] == R)
                best, arg = _best_sampled(D, sphere, make_rng(seed, 1000 * b + R), sample_size)
            else:
                raise InputError(f"unknown scan mode {mode!r}")
            rows.append(PerfectionRow(
                basepoint=str(g.labels[wi]),
                R=int(R),
                mu_best=best / (2 * R),
                witness=tuple(str(g.labels[ball[t]]) for t in arg),
                min_product=best / 2,
                mode=use,
                seed=seed if use == "sampled" else None,
                ball_size=len(ball),
                escapes_certified=cert is not None and depth + R > cert,
            ))
    return PerfectionReport(rows)


def _side_reach(rows: dict[int, np.ndarray], x_row: np.ndarray, a: int, b: int) -> int:
    """Distance from x to the nearest vertex on any geodesic between a and b."""
    on = rows[a] + rows[b] == rows[a][b]
    return int(x_row[on].min())


def center_criterion(
    X,
    vertices,
    far_horizon: int,
    L_max: int,
    seed: int | None = None,
    max_candidates: int = 30,
) -> CenterTable:
    """Least L <= L_max such that a triangle with corners on the sphere S(x, far_horizon)
    has every side passing through B(x, L); None when no such triangle exists.

    Sides range over all geodesics between the corners, so the value does
    not depend on path choices.  Spheres larger than ``max_candidates`` are
    subsampled with the seed.
    """
    if far_horizon < 1 or L_max < 0:
        raise InputError("far_horizon must be positive and L_max nonnegative")
    g = as_graph(X)
    out = []
    for b, x in enumerate(vertices):
        xi = _idx(g, x)
        x_row = g.distances_from(xi)
        cand = np.flatnonzero(x_row == far_horizon)
        if len(cand) > max_candidates:
            if seed is None:
                raise InputError("center criterion needs a seed to subsample large spheres")
            cand = np.sort(make_rng(seed, b).choice(cand, size=max_candidates, replace=False))
        g.prefetch(cand)
        rows = {int(c): g.distances_from(int(c)) for c in cand}
        reach = {}
        for a, c in combinations(cand.tolist(), 2):
            reach[a, c] = _side_reach(rows, x_row, a, c)
        best, wit = None, None
        for p, q, r in combinations(cand.tolist(), 3):
            L = max(reach[p, q], reach[p, r], reach[q, r])
            if L <= L_max and (best is None or L < best):
                best, wit = L, (p, q, r)
        out.append(CenterRow(
            str(g.labels[xi]), best,
            tuple(str(g.labels[v]) for v in wit) if wit else None, len(cand),
        ))
    return CenterTable(far_horizon, L_max, seed, out)


def perfection_threshold(scan: PerfectionReport, K_hat: int | None, delta_hat: float) -> dict:
    """Check mu_best >= 1/2 on every row with R > 6 K_hat + 60 delta_hat.

    ``vacuous`` is set when no tested radius exceeds the threshold.
    """
    if K_hat is None:
        return {"R0": None, "K_hat": None, "delta_hat": delta_hat, "tested": 0, "violations": [],
                "vacuous": True, "passed": True, "note": "no bounded center constant was found"}
    R0 = 6 * K_hat + 60 * delta_hat
    tested = [r for r in scan.rows if r.R > R0]
    bad = [r.to_dict() for r in tested if r.mu_best < MU]
    return {
        "R0": R0,
        "K_hat": K_hat,
        "delta_hat": delta_hat,
        "tested": len(tested),
        "violations": bad,
        "vacuous": not tested,
        "passed": not bad,
        "max_tested_R": max((r.R for r in scan.rows), default=None),
    }


def scale_bound(scan: PerfectionReport) -> float:
    """max R * mu_best over the rows (bounded for a two-point boundary)."""
    return max(r.R * r.mu_best for r in scan.rows) if scan.rows else math.nan
