"""Maps of group pairs, their extension over horoballs, and measured QI constants.

A map of pairs is given by generator images.  Its extension sends a
Cayley vertex g to phi(g) and a horoball vertex (coset, p, t) to
(matching coset, p', t), where p' is the closest point of the matching
target coset to phi(p).  Dilation functions are the identity on both sides,
so depth is preserved (clamped to the target truncation, with a count).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cusped_graph import CayleyVertex, CuspedTruncation, CuspVertex
from .errors import ConfigurationError, DependencyError, InputError, InsufficientTruncationError
from .groups import IDENTITY, FiniteCyclic, Free, FreeAbelian, FreeProduct, GroupElement, GroupModel, GroupPair
from .horoball import HoroballTruncation, HoroVertex
from .sampling import make_rng, sample_distinct_tuples

KINDS = ("identity", "automorphism", "scaling", "inclusion", "composite", "custom")


def _relators(model: GroupModel) -> list[tuple[str, object]]:
    """Relations a homomorphism out of ``model`` must respect: ("commute", (s, t)) or ("order", (s, m))."""
    if isinstance(model, FreeProduct):
        return [r for f in model.factors for r in _relators(f)]
    if isinstance(model, FreeAbelian):
        s = model.symbols
        return [("commute", (s[i], s[j])) for i in range(len(s)) for j in range(i + 1, len(s))]
    if isinstance(model, FiniteCyclic):
        return [("order", (model.symbols[0], model.order))]
    if isinstance(model, Free):
        return []
    raise ConfigurationError(f"no relator list for {type(model).__name__}")


@dataclass
class CosetMatch:
    target_peripheral: int
    target_rep: GroupElement
    radius: int


@dataclass
class PairMap:
    source: GroupPair
    target: GroupPair
    kind: str
    images: dict[str, GroupElement]
    function: Callable[[GroupElement], GroupElement] | None = None
    check_radius: int = 3
    R_observed: int = 0
    correspondence: dict[tuple[int, GroupElement], CosetMatch] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._cache: dict[GroupElement, GroupElement] = {}

    def __call__(self, g: GroupElement) -> GroupElement:
        out = self._cache.get(g)
        if out is None:
            if self.function is not None:
                out = self.target.ambient.normal_form(self.function(g))
            else:
                T = self.target.ambient
                out = IDENTITY
                for s, k in g.word:
                    out = T.multiply(out, T.power(self.images[s], k))
            self._cache[g] = out
        return out

    def match_coset(self, i: int, points) -> CosetMatch:
        """The target coset whose neighborhood best contains phi(points); ties go to discovery order."""
        T = self.target
        imgs = [self(p) for p in points]
        cands = []
        for x in imgs:
            for j in range(len(T.peripherals)):
                key = (j, T.coset_key(j, x))
                if key not in cands:
                    cands.append(key)
        if not cands:
            raise InputError("target pair has no peripheral subgroups to receive cosets")
        best = None
        for j, rep in cands:
            r = max(T.coset_distance(x, j, rep) for x in imgs)
            if best is None or r < best.radius:
                best = CosetMatch(j, rep, r)
        return best

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "images": {s: str(g) for s, g in sorted(self.images.items())},
            "R_observed": self.R_observed,
            "check_radius": self.check_radius,
            "cosets_checked": len(self.correspondence),
        }


def _validate(phi: PairMap) -> None:
    T = phi.target.ambient
    for rel, args in _relators(phi.source.ambient):
        if rel == "commute":
            s, t = args
            a, b = phi.images[s], phi.images[t]
            if T.multiply(a, b) != T.multiply(b, a):
                raise ConfigurationError(f"images of {s} and {t} do not commute ({a} and {b})")
        else:
            s, m = args
            if not T.power(phi.images[s], m).is_identity:
                raise ConfigurationError(f"image of {s} does not have order dividing {m}")


def _parse_images(source: GroupPair, target: GroupPair, raw: dict) -> dict[str, GroupElement]:
    missing = set(source.ambient.symbols) - set(raw)
    extra = set(raw) - set(source.ambient.symbols)
    if missing or extra:
        raise ConfigurationError(
            f"generator images must cover exactly {list(source.ambient.symbols)}; "
            f"missing {sorted(missing)}, unknown {sorted(extra)}"
        )
    return {s: target.ambient.normal_form(w) for s, w in raw.items()}


def make_pair_map(source: GroupPair, target: GroupPair, spec: dict, check_radius: int = 3) -> PairMap:
    """Build and validate a map of pairs.

    ``spec`` is one of ``{"kind": "identity"}``, ``{"kind": "automorphism" |
    "inclusion", "images": {symbol: word}}``, ``{"kind": "scaling", "factor": k,
    "symbols": [...]}`` (s -> s^k on the listed symbols, identity elsewhere) or
    ``{"kind": "custom", "function": callable}``.  Relations of the source
    are checked on the images, and the coset correspondence and R_observed are
    computed by brute force over cosets meeting the ball of ``check_radius``.
    """
    kind = spec.get("kind")
    if kind not in KINDS or kind == "composite":
        raise ConfigurationError(f"unknown pair-map kind {kind!r}")
    function = None
    if kind == "identity":
        if source.ambient != target.ambient:
            raise ConfigurationError("identity map needs the same ambient group on both sides")
        images = {s: GroupElement(((s, 1),)) for s in source.ambient.symbols}
    elif kind == "scaling":
        k = spec.get("factor")
        if not isinstance(k, int) or k == 0:
            raise ConfigurationError(f"scaling factor must be a nonzero integer, got {k!r}")
        which = set(spec.get("symbols") or source.ambient.symbols)
        images = _parse_images(source, target, {
            s: [(s, k if s in which else 1)] for s in source.ambient.symbols
        })
    elif kind == "custom":
        function = spec.get("function")
        if not callable(function):
            raise ConfigurationError("custom pair map needs a callable 'function'")
        images = {s: target.ambient.normal_form(function(GroupElement(((s, 1),)))) for s in source.ambient.symbols}
    else:
        images = _parse_images(source, target, spec.get("images") or {})
    phi = PairMap(source, target, kind, images, function, check_radius)
    if function is None:
        _validate(phi)
    if kind == "automorphism":
        _check_injective(phi, check_radius)
    _correspond(phi, check_radius)
    return phi


def _check_injective(phi: PairMap, radius: int) -> None:
    seen = {}
    for g in phi.source.ambient.ball(IDENTITY, radius):
        h = phi(g)
        if h in seen:
            raise ConfigurationError(f"automorphism is not injective: {seen[h]} and {g} both map to {h}")
        seen[h] = g


def _correspond(phi: PairMap, radius: int) -> None:
    S = phi.source
    from .groups import enumerate_peripheral_cosets

    worst = 0
    for i, rep in enumerate_peripheral_cosets(S, radius):
        step = S.ambient.ball(IDENTITY, radius, symbols=S.peripherals[i])
        pts = [S.ambient.multiply(rep, q) for q in step]
        m = phi.match_coset(i, pts)
        phi.correspondence[(i, rep)] = m
        worst = max(worst, m.radius)
    phi.R_observed = worst


def compose(outer: PairMap, inner: PairMap) -> PairMap:
    """outer after inner, defined by composing generator images."""
    if inner.target.ambient != outer.source.ambient:
        raise DependencyError("maps are not composable: inner target differs from outer source")
    if inner.function is not None or outer.function is not None:
        phi = PairMap(inner.source, outer.target, "composite", {}, lambda g: outer(inner(g)), inner.check_radius)
        phi.images = {s: phi(GroupElement(((s, 1),))) for s in inner.source.ambient.symbols}
    else:
        images = {s: outer(g) for s, g in inner.images.items()}
        phi = PairMap(inner.source, outer.target, "composite", images, None, inner.check_radius)
    _correspond(phi, inner.check_radius)
    return phi


def _pair_of(X) -> GroupPair:
    if isinstance(X, CuspedTruncation):
        return X.pair
    if isinstance(X, HoroballTruncation):
        return GroupPair.elementary(X.base)
    raise DependencyError(f"cannot extend over {type(X).__name__}; expected a cusped or horoball truncation")


class CuspExtension:
    """Vertex map X1 -> X2 induced by a pair map; images are computed on demand and cached."""

    def __init__(self, phi: PairMap, X1, X2):
        if _pair_of(X1).ambient != phi.source.ambient or _pair_of(X2).ambient != phi.target.ambient:
            raise DependencyError("truncations are not built over the map's source and target groups")
        if type(X1) is not type(X2):
            raise DependencyError("source and target truncations must be of the same kind")
        self.phi, self.X1, self.X2 = phi, X1, X2
        self._coset: dict[int, tuple[int, GroupElement]] = {}
        self._img: dict[int, int] = {}
        self.clamped: set[int] = set()

    def _target_coset(self, cid: int) -> tuple[int, GroupElement]:
        hit = self._coset.get(cid)
        if hit is None:
            c = self.X1.cosets[cid]
            m = self.phi.match_coset(c.peripheral, c.width)
            tid = self.X2.coset_id(m.target_peripheral, m.target_rep)
            if tid is None:
                raise InsufficientTruncationError(
                    f"target truncation has no coset over {m.target_rep} (peripheral {m.target_peripheral})",
                    needed_width=self.X2.pair.ambient.length(m.target_rep),
                )
            hit = (tid, m.target_rep)
            self._coset[cid] = hit
        return hit

    def _project(self, j: int, rep: GroupElement, x: GroupElement) -> GroupElement:
        T = self.phi.target
        k = T.coset_key(j, T.ambient.multiply(T.ambient.invert(x), rep))
        return T.ambient.multiply(x, k)

    def index(self, i: int) -> int:
        out = self._img.get(i)
        if out is not None:
            return out
        v = self.X1.graph.labels[i]
        X2 = self.X2
        if isinstance(v, HoroVertex):
            x = self.phi(v.element)
            t = min(v.depth, X2.max_depth)
            if x not in X2.element_index:
                raise InsufficientTruncationError(
                    f"image ({x}, {t}) of {v} lies outside the target width {X2.width_radius}",
                    needed_width=X2.base.length(x), needed_depth=v.depth,
                )
            out = X2.vertex_index(x, t)
            t_want = v.depth
        elif isinstance(v, CayleyVertex):
            x = self.phi(v.element)
            out = X2.find(x)
            t, t_want = 0, 0
            if out is None:
                raise InsufficientTruncationError(
                    f"image {x} of {v} lies outside the target Cayley part",
                    needed_width=X2.pair.ambient.length(x),
                )
        else:
            tid, rep = self._target_coset(v.coset)
            j = X2.cosets[tid].peripheral
            x = self._project(j, rep, self.phi(v.element))
            t_want = v.depth
            t = min(v.depth, X2.horoball_depth)
            out = X2.find(x, t, tid) if t > 0 else X2.find(x)
            if out is None:
                raise InsufficientTruncationError(
                    f"image of {v} at ({x}, {t}) lies outside the target horoball over {rep}",
                    needed_width=X2.pair.ambient.length(x), needed_depth=v.depth,
                )
        if t != t_want:
            self.clamped.add(i)
        self._img[i] = out
        return out

    def __call__(self, v):
        return self.X2.graph.labels[self.index(self.X1.graph.vertex(v))]

    def total(self) -> np.ndarray:
        return np.array([self.index(i) for i in range(self.X1.graph.n_vertices)], dtype=np.int64)


def cusp_extend(phi: PairMap, X1, X2) -> CuspExtension:
    """Extension of ``phi`` over the truncations; raises when some image is missing from X2."""
    ext = CuspExtension(phi, X1, X2)
    ext.image = ext.total()
    return ext


def translate(X, gamma: GroupElement, i: int) -> int | None:
    """Index of gamma . v for the vertex v = labels[i]; None when it leaves the truncation."""
    v = X.graph.labels[i]
    if isinstance(X, HoroballTruncation):
        g = X.base.multiply(gamma, v.element)
        return X.vertex_index(g, v.depth) if g in X.element_index else None
    G = X.pair.ambient
    g = G.multiply(gamma, v.element)
    if isinstance(v, CayleyVertex):
        return X.find(g)
    cid = X.coset_id(X.cosets[v.coset].peripheral, g)
    return None if cid is None else X.find(g, v.depth, cid)


def fit_lambda_eps(d1: np.ndarray, d2: np.ndarray) -> tuple[float, float]:
    """Least-cost (lambda >= 1, eps >= 0) with d2 <= lambda d1 + eps and d1 <= lambda d2 + eps.

    Cost is lambda * S + eps with S the largest source distance; the cost is
    convex piecewise linear in lambda, so its breakpoints are enumerated.  The
    smallest lambda wins ties.
    """
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    if not len(d1):
        return 1.0, 0.0
    a = np.concatenate([d2, d1])
    b = np.concatenate([d1, d2])
    # upper envelope only needs the largest intercept per slope
    uniq_b = np.unique(b)
    top = np.array([a[b == s].max() for s in uniq_b])
    S = float(d1.max())

    def eps(lam):
        return max(0.0, float(np.max(top - lam * uniq_b)))

    cands = {1.0}
    pos = uniq_b > 0
    cands.update((top[pos] / uniq_b[pos]).tolist())
    for p in range(len(uniq_b)):
        for q in range(p + 1, len(uniq_b)):
            cands.add(float((top[q] - top[p]) / (uniq_b[q] - uniq_b[p])))
    best = None
    for lam in sorted(c for c in cands if c >= 1.0 and np.isfinite(c)):
        cost = lam * S + eps(lam)
        if best is None or cost < best[0] - 1e-9:
            best = (cost, lam)
    lam = best[1]
    return lam, eps(lam)


@dataclass
class ExtensionReport:
    lambda_fit: float
    eps_fit: float
    n_pairs: int
    seed: int | None
    clamped: int
    R_observed: int
    roundtrip_sup: int | None = None
    nu_fit: int | None = None
    nu_pairs: int = 0
    functoriality_sup: int | None = None
    scatter: list[tuple[int, int]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "lambda_fit": self.lambda_fit,
            "eps_fit": self.eps_fit,
            "n_pairs": self.n_pairs,
            "seed": self.seed,
            "clamped": self.clamped,
            "R_observed": self.R_observed,
            "roundtrip_sup": self.roundtrip_sup,
            "nu_fit": self.nu_fit,
            "nu_pairs": self.nu_pairs,
            "functoriality_sup": self.functoriality_sup,
        }


_EXHAUSTIVE_PAIRS = 600_000


def _sample_pairs(n: int, sample_size: int | None, seed: int | None) -> np.ndarray:
    if sample_size is None:
        if n * (n - 1) // 2 > _EXHAUSTIVE_PAIRS:
            raise InputError(f"{n} vertices is too many for an exhaustive pair scan; give sample_size and seed")
        iu, ju = np.triu_indices(n, k=1)
        return np.stack([iu, ju], axis=1)
    if seed is None:
        raise InputError("sampled extension measurement requires a seed")
    return sample_distinct_tuples(make_rng(seed, 0), n, 2, sample_size)


def _certified_mask(X1: HoroballTruncation, X2: HoroballTruncation, phi: PairMap, pairs: np.ndarray) -> np.ndarray:
    """Keep pairs whose base points, and their images, form certified (or equal) pairs."""
    lv1 = X1.max_depth + 1
    lv2 = X2.max_depth + 1
    ok1 = np.eye(len(X1.width), dtype=bool)
    c = X1.certified_pairs()
    ok1[c[:, 0], c[:, 1]] = ok1[c[:, 1], c[:, 0]] = True
    ok2 = np.eye(len(X2.width), dtype=bool)
    c = X2.certified_pairs()
    ok2[c[:, 0], c[:, 1]] = ok2[c[:, 1], c[:, 0]] = True
    p, q = pairs[:, 0] // lv1, pairs[:, 1] // lv1
    img = np.array([X2.element_index[phi(g)] for g in X1.width], dtype=np.int64)
    return ok1[p, q] & ok2[img[p], img[q]]


def measure_extension(
    phi: PairMap,
    X1,
    X2,
    sample_size: int | None = None,
    seed: int | None = None,
    inverse: PairMap | None = None,
    compose_with: tuple[PairMap, object] | None = None,
    group_sample=None,
    certified_only: bool = True,
) -> ExtensionReport:
    """Coarse-Lipschitz, roundtrip, rough-equivariance and functoriality constants of phi-hat.

    Pairs are all vertex pairs of X1 (or a seeded sample).  On horoball
    truncations only pairs whose base points are certified in both X1 and X2
    are used unless ``certified_only`` is off.
    """
    ext = cusp_extend(phi, X1, X2)
    n = X1.graph.n_vertices
    pairs = _sample_pairs(n, sample_size, seed)
    if certified_only and isinstance(X1, HoroballTruncation):
        pairs = pairs[_certified_mask(X1, X2, phi, pairs)]
    if not len(pairs):
        raise InputError("no vertex pairs left to measure")
    d1 = X1.graph.pair_distances(pairs)
    d2 = X2.graph.pair_distances(ext.image[pairs])
    lam, eps = fit_lambda_eps(d1, d2)
    scatter = sorted(set(zip(d1.tolist(), d2.tolist())))
    report = ExtensionReport(lam, eps, len(pairs), seed, len(ext.clamped), phi.R_observed, scatter=scatter)

    verts = np.unique(pairs)
    if inverse is not None:
        back = CuspExtension(inverse, X2, X1)
        rt = np.array([back.index(int(ext.image[u])) for u in verts])
        report.roundtrip_sup = int(X1.graph.pair_distances(np.stack([rt, verts], axis=1)).max())

    if group_sample is not None:
        if phi.source.ambient != phi.target.ambient:
            raise DependencyError("rough equivariance needs source and target groups to agree")
        G = phi.source.ambient
        gammas = [G.normal_form(g) for g in group_sample]
        lhs, rhs = [], []
        for gamma in gammas:
            gi = phi(gamma)
            for u in verts:
                a = translate(X1, gamma, int(u))
                b = translate(X2, gi, int(ext.image[u]))
                if a is None or b is None:
                    continue
                lhs.append(int(ext.image[a]))
                rhs.append(b)
        if lhs:
            report.nu_fit = int(X2.graph.pair_distances(np.stack([lhs, rhs], axis=1)).max())
        else:
            report.nu_fit = None
        report.nu_pairs = len(lhs)

    if compose_with is not None:
        psi, X3 = compose_with
        outer = CuspExtension(psi, X2, X3)
        direct = CuspExtension(compose(psi, phi), X1, X3)
        two = np.array([outer.index(int(ext.image[u])) for u in verts])
        one = np.array([direct.index(int(u)) for u in verts])
        report.functoriality_sup = int(X3.graph.pair_distances(np.stack([two, one], axis=1)).max())
    return report
