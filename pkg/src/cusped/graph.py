"""Finite unweighted graphs with labeled vertices and an exact BFS engine."""

from __future__ import annotations

import threading
from typing import Hashable, Sequence

import numpy as np
from scipy.sparse import csr_matrix

from .errors import InputError, InvariantViolation, ResourceError, default_limits

_BATCH = 128
_DENSE_BUDGET = 4_000_000  # cells of the (n, k) frontier matrix per batch


class SpaceGraph:
    """Undirected simple graph on ``labels[0..n-1]``.

    Distances come from breadth-first search, run for a batch of sources at
    once as repeated sparse products with scipy, and are cached per source
    row.  Rows are immutable once
    computed, so concurrent readers are safe.
    """

    def __init__(self, labels: Sequence[Hashable], edges: np.ndarray, check_caps: bool = True):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise InvariantViolation("duplicate vertex labels")
        n = len(self.labels)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise InvariantViolation("self-loop in edge list")
            edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
        limits = default_limits()
        if check_caps and n > limits.max_vertices:
            raise ResourceError(
                f"graph has {n} vertices, above the cap {limits.max_vertices} (set CUSPED_MAX_VERTICES to raise it)"
            )
        self.edges = edges
        rows = np.concatenate([edges[:, 0], edges[:, 1]]) if len(edges) else np.zeros(0, np.int64)
        cols = np.concatenate([edges[:, 1], edges[:, 0]]) if len(edges) else np.zeros(0, np.int64)
        adj = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
        adj.sort_indices()
        self.adjacency = adj
        self._adj_f = adj.astype(np.float32)
        self._rows: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex(self, label) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise InputError(f"vertex {label!r} is not in the graph") from None

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i] : a.indptr[i + 1]]

    def degree(self, i: int) -> int:
        a = self.adjacency
        return int(a.indptr[i + 1] - a.indptr[i])

    # -- distances -------------------------------------------------------
    def _expand(self, frontier: np.ndarray) -> np.ndarray:
        """Level-synchronous BFS from the columns of a boolean (n, k) seed matrix.

        Each level is one sparse-by-dense product, so k sources advance together.
        Returns (k, n) hop counts; raises if some vertex is unreachable.
        """
        n, k = frontier.shape
        dist = np.full((n, k), -1, dtype=np.int32)
        dist[frontier] = 0
        level = 0
        current = frontier.astype(np.float32)
        while True:
            level += 1
            reach = self._adj_f @ current
            new = (reach > 0) & (dist < 0)
            if not new.any():
                break
            dist[new] = level
            current = new.astype(np.float32)
        if (dist < 0).any():
            raise InvariantViolation("graph is disconnected; truncations must be connected")
        return np.ascontiguousarray(dist.T)

    def _bfs(self, sources: Sequence[int]) -> np.ndarray:
        sources = np.asarray(sources, dtype=np.int64)
        n = self.n_vertices
        out = np.empty((len(sources), n), dtype=np.int32)
        step = max(1, min(_BATCH, _DENSE_BUDGET // max(n, 1)))
        for b in range(0, len(sources), step):
            chunk = sources[b : b + step]
            seed = np.zeros((n, len(chunk)), dtype=bool)
            seed[chunk, np.arange(len(chunk))] = True
            out[b : b + len(chunk)] = self._expand(seed)
        return out

    def distances_from(self, i: int) -> np.ndarray:
        row = self._rows.get(i)
        if row is None:
            row = self._bfs([i])[0]
            row.setflags(write=False)
            with self._lock:
                self._rows.setdefault(i, row)
        return row

    def prefetch(self, sources: Sequence[int]) -> None:
        """Compute and cache BFS rows for many sources in batches."""
        todo = sorted({int(s) for s in sources} - set(self._rows))
        for start in range(0, len(todo), _BATCH):
            chunk = todo[start : start + _BATCH]
            block = self._bfs(chunk)
            with self._lock:
                for s, row in zip(chunk, block):
                    row = row.copy()
                    row.setflags(write=False)
                    self._rows.setdefault(s, row)

    def distance(self, i: int, j: int) -> int:
        if i == j:
            return 0
        if j in self._rows and i not in self._rows:
            i, j = j, i
        return int(self.distances_from(i)[j])

    def distance_matrix(self, vertices: Sequence[int] | None = None) -> np.ndarray:
        """Pairwise distances among ``vertices`` (all vertices when omitted)."""
        idx = np.arange(self.n_vertices) if vertices is None else np.asarray(vertices, dtype=np.int64)
        if vertices is None:
            return self._bfs(list(range(self.n_vertices)))
        self.prefetch(idx)
        return np.stack([self._rows[int(i)][idx] for i in idx]) if len(idx) else np.zeros((0, 0), np.int32)

    def pair_distances(self, pairs: np.ndarray) -> np.ndarray:
        """Distances for an (k, 2) array of vertex pairs, grouped by source to bound memory."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        out = np.zeros(len(pairs), dtype=np.int32)
        if not len(pairs):
            return out
        order = np.argsort(pairs[:, 0], kind="stable")
        sources = pairs[order, 0]
        uniq, starts = np.unique(sources, return_index=True)
        bounds = list(starts) + [len(order)]
        for b in range(0, len(uniq), _BATCH):
            chunk = uniq[b : b + _BATCH]
            missing = [int(s) for s in chunk if int(s) not in self._rows]
            fresh = dict(zip(missing, self._bfs(missing))) if missing else {}
            for k, s in enumerate(chunk):
                row = self._rows.get(int(s))
                if row is None:
                    row = fresh[int(s)]
                sel = order[bounds[b + k] : bounds[b + k + 1]]
                out[sel] = row[pairs[sel, 1]]
        return out

    def multi_source_distance(self, sources: Sequence[int]) -> np.ndarray:
        """Distance from every vertex to the nearest of ``sources``."""
        seed = np.zeros((self.n_vertices, 1), dtype=bool)
        seed[np.asarray(list(sources), dtype=np.int64), 0] = True
        return self._expand(seed)[0]

    def geodesic(self, u: int, v: int) -> list[int]:
        """Shortest path u -> v; at each step the smallest-index neighbor one step closer to v."""
        to_v = self.distances_from(v)
        path = [u]
        cur = u
        while cur != v:
            nbrs = self.neighbors(cur)
            step = nbrs[to_v[nbrs] == to_v[cur] - 1]
            if not len(step):
                raise InvariantViolation("BFS distances are inconsistent with adjacency")
            cur = int(step[0])
            path.append(cur)
        return path


def cycle_graph(n: int) -> SpaceGraph:
    edges = np.array([(i, (i + 1) % n) for i in range(n)])
    return SpaceGraph(list(range(n)), edges)


def path_graph(n: int) -> SpaceGraph:
    edges = np.array([(i, i + 1) for i in range(n - 1)])
    return SpaceGraph(list(range(n)), edges)
