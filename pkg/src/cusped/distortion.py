"""Constant horospherical distortion and dilation measured on horoball truncations.

The reparametrization is fixed to g(s) = s/2 (dilation function f = identity,
as for combinatorial horoballs), so distortion reduces to a single constant
B.  All constants are minimax fits: the smallest value for which the
defining inequality holds on every sampled pair.  Only certified level-0
pairs enter the fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DependencyError, InputError
from .horoball import HoroballTruncation, sample_certified_pairs

G_SLOPE = 0.5  # g(s) = s / 2; also the Lipschitz constant used in constant transfers
NOTE = "g is fixed to s/2 (dilation f = identity); the bilipschitz family is not searched"


@dataclass
class DistortionReport:
    n_pairs: int
    uncertified_pairs: int
    seed: int | None
    B_fit: float
    B_upper: float
    B_lower: float
    max_residual: float
    monotone_defect: int
    rows: list[tuple[str, str, int, int, float]] = field(repr=False)
    witness: tuple[str, str] | None = None
    note: str = NOTE

    def to_dict(self, with_rows: bool = False) -> dict:
        out = {
            "n_pairs": self.n_pairs,
            "uncertified_pairs": self.uncertified_pairs,
            "seed": self.seed,
            "g": "s/2",
            "B_fit": self.B_fit,
            "B_upper": self.B_upper,
            "B_lower": self.B_lower,
            "max_residual": self.max_residual,
            "monotone_defect": self.monotone_defect,
            "witness": list(self.witness) if self.witness else None,
            "note": self.note,
        }
        if with_rows:
            out["rows"] = [list(r) for r in self.rows]
        return out


def _pairs(H: HoroballTruncation, sample_size, seed) -> np.ndarray:
    pairs = sample_certified_pairs(H, sample_size, seed)
    if not len(pairs):
        raise InputError(
            f"no certified pairs: width {H.width_radius} / depth {H.max_depth} too small; "
            "need width >= max(|p|,|q|) + d(p,q) and depth >= ceil(ln d) + 2"
        )
    return pairs


def measure_distortion(
    H: HoroballTruncation, sample_size: int | None = None, seed: int | None = None, pairs: np.ndarray | None = None
) -> DistortionReport:
    """Fit B in B^-1 exp(d_Y/2) <= d_T <= B exp(d_Y/2) over certified level-0 pairs."""
    pairs = _pairs(H, sample_size, seed) if pairs is None else np.asarray(pairs).reshape(-1, 2)
    n_total = len(H.width) * (len(H.width) - 1) // 2
    level0 = H.level_vertices(0)
    H.graph.prefetch(level0[np.unique(pairs[:, 0])])
    d_T = H.base_dist[pairs[:, 0], pairs[:, 1]].astype(np.float64)
    d_Y = H.graph.pair_distances(np.stack([level0[pairs[:, 0]], level0[pairs[:, 1]]], axis=1)).astype(np.float64)
    scale = np.exp(G_SLOPE * d_Y)
    upper = d_T / scale
    lower = scale / d_T
    resid = np.abs(d_Y - 2 * np.log(d_T))
    k = int(np.argmax(np.maximum(upper, lower)))
    rows = [
        (str(H.width[i]), str(H.width[j]), int(t), int(y), float(r))
        for (i, j), t, y, r in zip(pairs, d_T, d_Y, resid)
    ]
    return DistortionReport(
        n_pairs=len(pairs),
        uncertified_pairs=n_total - len(H.certified_pairs()),
        seed=seed,
        B_fit=float(max(upper.max(), lower.max())),
        B_upper=float(upper.max()),
        B_lower=float(lower.max()),
        max_residual=float(resid.max()),
        monotone_defect=_monotone_defect(d_T, d_Y),
        rows=rows,
        witness=(str(H.width[pairs[k, 0]]), str(H.width[pairs[k, 1]])),
    )


def _monotone_defect(d_T: np.ndarray, d_Y: np.ndarray) -> int:
    """max over pairs with d_T <= d_T' of d_Y - d_Y' (0 when d_Y is non-decreasing in d_T)."""
    worst = 0
    running = -math.inf
    for t in np.unique(d_T):
        sel = d_Y[d_T == t]
        if running > -math.inf:
            worst = max(worst, int(running - sel.min()))
        running = max(running, sel.max())
        worst = max(worst, int(sel.max() - sel.min()))
    return worst


@dataclass
class DilationReport:
    D_used: int
    A_prime_fit: float
    D_prime_fit: dict[float, int]
    n_pairs: int
    seed: int | None
    witness_a: tuple | None = None
    witness_b: dict = field(default_factory=dict)
    f: str = "identity"

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "D_used": self.D_used,
            "A_prime_fit": self.A_prime_fit,
            "D_prime_fit": {repr(float(a)): v for a, v in self.D_prime_fit.items()},
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "witness_a": list(self.witness_a) if self.witness_a else None,
            "witness_b": {repr(float(a)): list(w) for a, w in self.witness_b.items()},
        }


def check_dilation(
    H: HoroballTruncation,
    D: int,
    A_list=(1.0,),
    seed: int | None = None,
    sample_size: int | None = None,
    pairs: np.ndarray | None = None,
) -> DilationReport:
    """Fit the dilation constants with vertical rays and f = identity.

    (a) A' = max d_T / e^t over (p, q, t) with d((p,t),(q,t)) <= D.
    (b) D'(A) = max d((p,t),(q,t)) over (p, q, t) with d_T <= A e^t.
    """
    if D < 1:
        raise InputError("D must be at least 1")
    pairs = _pairs(H, sample_size, seed) if pairs is None else np.asarray(pairs).reshape(-1, 2)
    levels = H.max_depth + 1
    src = np.concatenate([pairs[:, 0] * levels + t for t in range(levels)])
    dst = np.concatenate([pairs[:, 1] * levels + t for t in range(levels)])
    dY = H.graph.pair_distances(np.stack([src, dst], axis=1)).reshape(levels, len(pairs))
    dT = H.base_dist[pairs[:, 0], pairs[:, 1]].astype(np.float64)
    et = np.exp(np.arange(levels, dtype=np.float64))[:, None]

    close = dY <= D
    if not close.any():
        raise InputError("no sampled (p, q, t) reaches the synchronous threshold D")
    ratio = np.where(close, dT[None, :] / et, -np.inf)
    t_a, k_a = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    A_prime = float(ratio[t_a, k_a])
    witness_a = (str(H.width[pairs[k_a, 0]]), str(H.width[pairs[k_a, 1]]), int(t_a))

    D_prime, witness_b = {}, {}
    for A in A_list:
        ok = dT[None, :] <= A * et
        if not ok.any():
            raise InputError(f"no sampled (p, q, t) satisfies d_T <= {A} e^t")
        masked = np.where(ok, dY, -1)
        t_b, k_b = np.unravel_index(int(np.argmax(masked)), masked.shape)
        D_prime[float(A)] = int(masked[t_b, k_b])
        witness_b[float(A)] = (str(H.width[pairs[k_b, 0]]), str(H.width[pairs[k_b, 1]]), int(t_b))
    return DilationReport(int(D), A_prime, D_prime, len(pairs), seed, witness_a, witness_b)


@dataclass
class EquivalenceCheck:
    F_hat: float
    delta_hat: float
    B_fit: float
    B_pred: float
    B_pred_upper: float
    B_pred_lower: float
    A_prime_fit: float
    A_prime_pred: float
    D_prime_fit: dict[float, int]
    D_prime_pred: dict[float, float]
    dilation_to_distortion: bool
    distortion_to_dilation: bool

    @property
    def passed(self) -> bool:
        return self.dilation_to_distortion and self.distortion_to_dilation

    def to_dict(self) -> dict:
        return {
            "F_hat": self.F_hat,
            "delta_hat": self.delta_hat,
            "B_fit": self.B_fit,
            "B_pred": self.B_pred,
            "B_pred_upper": self.B_pred_upper,
            "B_pred_lower": self.B_pred_lower,
            "A_prime_fit": self.A_prime_fit,
            "A_prime_pred": self.A_prime_pred,
            "D_prime_fit": {repr(float(a)): v for a, v in self.D_prime_fit.items()},
            "D_prime_pred": {repr(float(a)): v for a, v in self.D_prime_pred.items()},
            "dilation_to_distortion": self.dilation_to_distortion,
            "distortion_to_dilation": self.distortion_to_dilation,
            "passed": self.passed,
        }


def cross_check_equivalence(
    H: HoroballTruncation,
    distortion: DistortionReport,
    dilation: DilationReport,
    F_hat: float | None = None,
    delta_hat: float | None = None,
) -> EquivalenceCheck:
    """Push fitted constants through the distortion <-> dilation transfers and compare.

    Dilation -> distortion: B_pred = max(A' e^(F/2), e^((D'(1) + 1 + 2F)/2)).
    Distortion -> dilation: A'_pred = B e^(F/2) and, for each probed A,
    D'_pred(A) = D + max(2(D + 5 delta), 2 ln(A B e^(F/2))).
    """
    if F_hat is None or delta_hat is None:
        raise DependencyError("cross-check needs F_hat and delta_hat from the approximate-distance check")
    if 1.0 not in dilation.D_prime_fit:
        raise DependencyError("cross-check needs the dilation constant D'(1); include A = 1 in A_list")
    D = dilation.D_used
    F = float(F_hat)
    Dp1 = max(dilation.D_prime_fit[1.0], D)
    B_up = dilation.A_prime_fit * math.exp(G_SLOPE * F)
    B_lo = math.exp(G_SLOPE * (Dp1 + 1 + 2 * F))
    B_pred = max(B_up, B_lo)
    fwd = distortion.B_upper <= B_up and distortion.B_lower <= B_lo and distortion.B_fit <= B_pred

    A_pred = distortion.B_fit * math.exp(G_SLOPE * F)
    D_pred = {}
    for A, val in dilation.D_prime_fit.items():
        lag = 2 * (D + 5 * delta_hat)
        far = 2 * math.log(A * distortion.B_fit * math.exp(G_SLOPE * F))
        D_pred[A] = D + max(lag, far)
    back = dilation.A_prime_fit <= A_pred and all(dilation.D_prime_fit[A] <= D_pred[A] for A in D_pred)
    return EquivalenceCheck(
        F, float(delta_hat), distortion.B_fit, B_pred, B_up, B_lo,
        dilation.A_prime_fit, A_pred, dict(dilation.D_prime_fit), D_pred, fwd, back,
    )


def analyze_horoball(
    H: HoroballTruncation,
    seed: int,
    sample_size: int | None = None,
    delta_sample_size: int = 20000,
    A_list=(1.0, 2.0),
    horofunction_samples: int = 200,
) -> dict:
    """Full horoball pipeline: delta, synchronous constant, approximate distance,
    horofunction, distortion, dilation and the equivalence cross-check."""
    from .horoball import calibrate_synch_constant, check_approx_distance, check_horofunction
    from .hyperbolicity import four_point_delta

    delta = four_point_delta(H, "auto", sample_size=delta_sample_size, seed=seed)
    d = delta.delta_fourpoint
    pairs = _pairs(H, sample_size, seed)
    D, d_witness = calibrate_synch_constant(H, 5 * d, pairs)
    approx = check_approx_distance(H, pairs, D, d)
    out = {
        "truncation": H.summary(),
        "delta": delta.to_dict(),
        "synch_constant": {"D_hat": D, "ray_radius": 5 * d, "witness": list(d_witness) if d_witness else None},
        "approx_distance": approx.to_dict(),
    }
    if horofunction_samples:
        out["horofunction"] = check_horofunction(H, horofunction_samples, seed, d).to_dict()
    dist = measure_distortion(H, pairs=pairs, seed=seed)
    A_all = sorted({float(a) for a in A_list} | {1.0})  # the cross-check needs D'(1)
    dil = check_dilation(H, D, A_all, seed=seed, pairs=pairs)
    out["distortion"] = dist.to_dict()
    out["dilation"] = dil.to_dict()
    out["equivalence"] = cross_check_equivalence(H, dist, dil, approx.F_hat, d).to_dict()
    out["_rows"] = dist.rows
    return out
