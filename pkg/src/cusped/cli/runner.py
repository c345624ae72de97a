"""Build spaces and execute analyses described by a RunSpec."""

from __future__ import annotations

import time

import numpy as np

from .. import __version__
from ..cusped_graph import CayleyVertex, CuspedTruncation
from ..distortion import analyze_horoball
from ..errors import ConfigurationError, CuspedError, InputError
from ..extension import make_pair_map, measure_extension
from ..groups import GroupPair
from ..horoball import HoroballTruncation, HoroVertex
from ..hyperbolicity import four_point_delta, thin_triangle_delta
from ..perfection import center_criterion, equilateral_scan, perfection_threshold
from ..sampling import make_rng
from .spec import SCHEMA_VERSION, PairSpec, RunSpec, TruncationSpec

DEFAULT_HOROBALL = (30, 5)


def build_pair(ps: PairSpec) -> GroupPair:
    return GroupPair.build(ps.group, [tuple(p) for p in ps.peripherals], ps.extra_generators)


def build_space(pair: GroupPair, t: TruncationSpec):
    if t.kind == "horoball":
        return HoroballTruncation(pair.ambient, t.width_radius, t.max_depth, t.rounding)
    if t.kind == "cayley":
        return CuspedTruncation(GroupPair(pair.ambient, (), pair.extra_generators), t.cayley_radius, 0, 0)
    return CuspedTruncation(pair, t.cayley_radius, t.horoball_depth, t.margin)


def source_pair(pair: GroupPair, X) -> GroupPair:
    return GroupPair.elementary(pair.ambient) if isinstance(X, HoroballTruncation) else pair


def resolve_vertex(X, word: str):
    if isinstance(X, HoroballTruncation):
        return HoroVertex(X.base.normal_form(word), 0)
    g = X.pair.ambient.normal_form(word)
    if X.find(g) is None:
        raise InputError(f"basepoint {word!r} is not a vertex of the truncation")
    return CayleyVertex(g)


def certification(X) -> dict:
    if isinstance(X, HoroballTruncation):
        n = len(X.width)
        k = len(X.certified_pairs())
        return {"certified_level0_pairs": k, "uncertified_level0_pairs": n * (n - 1) // 2 - k}
    return {"certified_radius": X.cayley_radius}


# -- analyses -----------------------------------------------------------------
def _delta(X, a, pair, ctx):
    rep = four_point_delta(X, a.mode, a.sample_size, a.seed)
    if a.thin_triangles:
        size = a.thin_sample_size or a.sample_size or 1000
        rep.thin_triangle_delta, rep.thin_triangle_witness = thin_triangle_delta(X, size, a.seed)
    return rep.to_dict(), {}


def _distortion(X, a, pair, ctx):
    if isinstance(X, HoroballTruncation):
        targets = [("horoball", X)]
    else:
        if not pair.peripherals:
            raise InputError("distortion needs a horoball truncation or a pair with peripheral subgroups")
        w, n = a.width_radius or DEFAULT_HOROBALL[0], a.max_depth or DEFAULT_HOROBALL[1]
        targets = [
            (f"peripheral{i}", HoroballTruncation(pair.peripheral_model(i), w, n))
            for i in range(len(pair.peripherals))
        ]
    out, tables = {}, {}
    for name, H in targets:
        res = analyze_horoball(H, a.seed, a.sample_size, a.delta_sample_size, a.A_list, a.horofunction_samples)
        rows = res.pop("_rows")
        out[name] = res
        tables[f"distortion_{name}.csv"] = [["p", "q", "d_T", "d_Y", "residual"]] + [
            [p, q, t, y, repr(r)] for p, q, t, y, r in rows
        ]
    return out, tables


def _perfection(X, a, pair, ctx):
    bps = [resolve_vertex(X, w) for w in a.basepoints]
    rep = equilateral_scan(X, bps, a.radii, a.mode, a.seed, a.sample_size)
    if a.center is not None:
        g = X.graph
        k = min(a.center.vertices, g.n_vertices)
        picks = np.sort(make_rng(a.seed, 7).choice(g.n_vertices, size=k, replace=False))
        rep.centers = center_criterion(X, [g.labels[int(i)] for i in picks], a.center.far_horizon, a.center.L_max, a.seed)
        delta = four_point_delta(X, "auto", a.delta_sample_size, a.seed)
        rep.threshold = perfection_threshold(rep, rep.centers.K_hat, delta.delta_fourpoint)
        rep.threshold["delta_mode"] = delta.mode
    return rep.to_dict(), {"perfection.csv": rep.csv_rows()}


def _extension(X, a, pair, ctx):
    src = source_pair(pair, X)
    if a.target_pair is None and a.target_truncation is None:
        tgt_pair, Y = pair, X
    else:
        tgt_pair = build_pair(a.target_pair) if a.target_pair is not None else pair
        Y = build_space(tgt_pair, a.target_truncation or ctx["truncation"])
    tgt = source_pair(tgt_pair, Y)
    phi = make_pair_map(src, tgt, a.map.model_dump(exclude_none=True), a.check_radius)
    inv = make_pair_map(tgt, src, a.inverse.model_dump(exclude_none=True), a.check_radius) if a.inverse else None
    rep = measure_extension(phi, X, Y, a.sample_size, a.seed, inverse=inv, group_sample=a.group_sample)
    out = rep.to_dict()
    out["map"] = phi.to_dict()
    rows = [["d_source", "d_target"]] + [list(r) for r in rep.scatter]
    return out, {"extension_scatter.csv": rows}


ANALYSES = {
    "delta": _delta,
    "distortion": _distortion,
    "perfection": _perfection,
    "extension": _extension,
}


def run_spec(spec: RunSpec, only: str | None = None):
    """Execute the run spec's analyses in order.

    Returns (report, timings, tables, exit_code).  Spec-level problems raise
    ConfigurationError; analysis failures are recorded in the report and
    yield exit code 2.
    """
    try:
        pair = build_pair(spec.pair)
    except (ConfigurationError, InputError) as exc:
        raise ConfigurationError(f"pair: {exc}") from None
    analyses = [a for a in spec.analyses if only is None or a.type == only]
    if only is not None and not analyses:
        raise ConfigurationError(f"the run spec lists no {only!r} analysis")

    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "spec": spec.model_dump(mode="json"),
        "analyses": [],
    }
    timings: dict = {"analyses": []}
    tables: dict = {}
    t0 = time.perf_counter()
    try:
        X = build_space(pair, spec.truncation)
    except CuspedError as exc:
        report["build"] = {"status": "error", "error": _err(exc)}
        timings["build_seconds"] = time.perf_counter() - t0
        return report, timings, tables, 2
    timings["build_seconds"] = time.perf_counter() - t0
    report["build"] = {"status": "ok", "summary": X.summary()}
    report["certification"] = certification(X)

    code = 0
    ctx = {"truncation": spec.truncation}
    for k, a in enumerate(analyses):
        t1 = time.perf_counter()
        entry = {"type": a.type}
        try:
            result, tabs = ANALYSES[a.type](X, a, pair, ctx)
            entry.update(status="ok", result=result)
            for name, rows in tabs.items():
                tables[f"{k:02d}_{name}"] = rows
        except ConfigurationError:
            raise  # a malformed map or descriptor is a spec error, not an analysis failure
        except CuspedError as exc:
            entry.update(status="error", error=_err(exc))
            code = 2
        report["analyses"].append(entry)
        timings["analyses"].append({"type": a.type, "seconds": time.perf_counter() - t1})
    return report, timings, tables, code


def _err(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("required_depth", "needed_width", "needed_depth"):
        if getattr(exc, attr, None) is not None:
            out[attr] = getattr(exc, attr)
    return out
