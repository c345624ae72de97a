"""Truncated cusped Cayley graphs of group pairs.

The Cayley part is the ball of radius R about the identity, widened by the
margin: for every peripheral coset meeting the ball, its intersection with
the ball is expanded by M steps inside the coset (peripheral word metric),
and those elements join the Cayley part.  A combinatorial horoball of depth N
is attached over each such widened coset, its depth-0 level being the Cayley
vertices of the coset themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError, default_limits
from .graph import SpaceGraph
from .groups import IDENTITY, GroupElement, GroupPair, enumerate_peripheral_cosets
from .horoball import base_distance_matrix, horizontal_edges


@dataclass(frozen=True)
class CayleyVertex:
    element: GroupElement

    @property
    def depth(self) -> int:
        return 0

    def __str__(self) -> str:
        return f"cayley/{self.element}/0"


@dataclass(frozen=True)
class CuspVertex:
    coset: int
    element: GroupElement
    depth: int

    def __str__(self) -> str:
        return f"horoball{self.coset}/{self.element}/{self.depth}"


SpaceVertex = CayleyVertex | CuspVertex


@dataclass(frozen=True)
class Coset:
    id: int
    peripheral: int
    rep: GroupElement
    width: tuple[GroupElement, ...]


class CuspedTruncation:
    def __init__(self, pair: GroupPair, cayley_radius: int, horoball_depth: int, margin: int = 0):
        if min(cayley_radius, horoball_depth, margin) < 0:
            raise InputError("cayley_radius, horoball_depth and margin must be nonnegative")
        limits = default_limits()
        G = pair.ambient
        self.pair = pair
        self.cayley_radius = cayley_radius
        self.horoball_depth = horoball_depth
        self.margin = margin

        ball = G.ball(IDENTITY, cayley_radius)
        cayley = set(ball)
        cosets: list[Coset] = []
        self._coset_lookup: dict[tuple[int, GroupElement], int] = {}
        if horoball_depth > 0:
            members: dict[tuple[int, GroupElement], list[GroupElement]] = {}
            for g in ball:
                for i in range(len(pair.peripherals)):
                    members.setdefault((i, pair.coset_key(i, g)), []).append(g)
            for cid, (i, rep) in enumerate(enumerate_peripheral_cosets(pair, cayley_radius)):
                width = set(members[(i, rep)])
                if margin:
                    step = G.ball(IDENTITY, margin, symbols=pair.peripherals[i])
                    width = {G.multiply(g, q) for g in members[(i, rep)] for q in step}
                ordered = tuple(sorted(width, key=G.shortlex_key))
                cosets.append(Coset(cid, i, rep, ordered))
                self._coset_lookup[(i, rep)] = cid
                cayley.update(ordered)
        self.cosets = cosets

        cayley_elems = sorted(cayley, key=G.shortlex_key)
        n_horo = sum(len(c.width) for c in cosets) * horoball_depth
        if len(cayley_elems) + n_horo > limits.max_vertices:
            raise ResourceError(
                f"cusped truncation would have {len(cayley_elems) + n_horo} vertices, above the cap {limits.max_vertices}"
            )
        labels: list = [CayleyVertex(g) for g in cayley_elems]
        self.n_cayley = len(labels)
        cayley_index = {g: k for k, g in enumerate(cayley_elems)}

        edges = []
        for k, g in enumerate(cayley_elems):
            for s in pair.cayley_generators():
                j = cayley_index.get(G.multiply(g, s))
                if j is not None and j != k:
                    edges.append((min(k, j), max(k, j)))
        cayley_edges = np.array(sorted(set(edges)), dtype=np.int64).reshape(-1, 2)

        blocks = [cayley_edges]
        self._horo_offset: list[int] = []
        levels = horoball_depth
        for c in cosets:
            off = len(labels)
            self._horo_offset.append(off)
            labels.extend(CuspVertex(c.id, g, t) for g in c.width for t in range(1, levels + 1))
            w = len(c.width)
            local = np.arange(w, dtype=np.int64) * levels + off
            zero = np.array([cayley_index[g] for g in c.width], dtype=np.int64)
            blocks.append(np.stack([zero, local], axis=1))
            for t in range(1, levels):
                blocks.append(np.stack([local + t - 1, local + t], axis=1))
            dist = base_distance_matrix(pair.ambient, c.width)
            for n, i, j in horizontal_edges(dist, levels):
                if n == 0:
                    continue  # depth 0 is the Cayley subgraph of the coset
                blocks.append(np.stack([local[i] + n - 1, local[j] + n - 1], axis=1))
        edges_all = np.concatenate(blocks) if blocks else np.zeros((0, 2), np.int64)
        if len(edges_all) > limits.max_edges:
            raise ResourceError(f"cusped truncation exceeds the edge cap {limits.max_edges}")
        self.graph = SpaceGraph(labels, edges_all)
        self.cayley_index = cayley_index

    # -- lookups -------------------------------------------------------------
    def coset_id(self, peripheral: int, element: GroupElement) -> int | None:
        return self._coset_lookup.get((peripheral, self.pair.coset_key(peripheral, element)))

    def find(self, element: GroupElement, depth: int = 0, coset: int | None = None) -> int | None:
        """Index of the vertex (element, depth) over ``coset``; None when absent."""
        if depth == 0:
            return self.cayley_index.get(element)
        if coset is None or not 1 <= depth <= self.horoball_depth:
            return None
        return self.graph.index.get(CuspVertex(coset, element, depth))

    def index_of(self, v) -> int:
        return self.graph.vertex(v)

    def is_cayley(self, i: int) -> bool:
        return i < self.n_cayley

    def coset_depth0(self, cid: int) -> np.ndarray:
        return np.array([self.cayley_index[g] for g in self.cosets[cid].width], dtype=np.int64)

    def horoball_vertices(self, cid: int) -> np.ndarray:
        w = len(self.cosets[cid].width)
        off = self._horo_offset[cid]
        return np.arange(off, off + w * self.horoball_depth, dtype=np.int64)

    def distance(self, u, v) -> int:
        return self.graph.distance(self.index_of(u), self.index_of(v))

    def summary(self) -> dict:
        e = self.graph.edges
        cayley_edges = int(np.sum((e[:, 0] < self.n_cayley) & (e[:, 1] < self.n_cayley)))
        return {
            "kind": "cusped",
            "pair": self.pair.describe(),
            "cayley_radius": self.cayley_radius,
            "horoball_depth": self.horoball_depth,
            "margin": self.margin,
            "cosets": len(self.cosets),
            "vertices": {"cayley": self.n_cayley, "horoball": self.graph.n_vertices - self.n_cayley,
                         "total": self.graph.n_vertices},
            "edges": {"cayley": cayley_edges, "horoball": self.graph.n_edges - cayley_edges,
                      "total": self.graph.n_edges},
        }


def build_cusped(pair: GroupPair, R: int, N: int, M: int = 0) -> CuspedTruncation:
    return CuspedTruncation(pair, R, N, M)


def cusped_distance(X: CuspedTruncation, u, v) -> int:
    return X.distance(u, v)


def extract_geodesic(X, u, v) -> list:
    """Vertex labels of the deterministic shortest path from u to v."""
    g = X.graph
    return [g.labels[i] for i in g.geodesic(g.vertex(u), g.vertex(v))]
