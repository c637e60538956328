"""Immutable undirected graph snapshots.

The snapshot stores compressed (CSR-style) sorted neighbor lists plus a
constant-time edge-membership set.  Node identity is two-layered: external
labels (whatever the edge list used) and dense internal indices 0..t-1.
All algorithms work on indices; labels only matter at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["AdjacencySnapshot"]


@dataclass(frozen=True)
class AdjacencySnapshot:
    """Symmetric, loop-free adjacency over t nodes.

    node_ids : external labels, position = internal index
    indptr, indices : CSR neighbor structure (indices sorted per row)
    degrees : per-node degree, consistent with the neighbor lists
    """

    node_ids: tuple
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    _edge_set: frozenset = field(repr=False)

    @classmethod
    def from_edges(cls, edges, node_ids=None) -> "AdjacencySnapshot":
        """Build a snapshot from (u, v) index pairs.

        Self-loops and duplicate edges are dropped silently here; the edge
        list reader counts them and warns.  ``node_ids`` defaults to the
        indices themselves; isolated nodes exist only if node_ids says so.
        """
        edges = [(int(u), int(v)) for u, v in edges]
        if node_ids is None:
            n = max((max(u, v) for u, v in edges), default=-1) + 1
            node_ids = tuple(range(n))
        else:
            node_ids = tuple(node_ids)
            n = len(node_ids)
        canon = set()
        for u, v in edges:
            if u == v:
                continue
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            canon.add((u, v) if u < v else (v, u))
        deg = np.zeros(n, dtype=np.int64)
        for u, v in canon:
            deg[u] += 1
            deg[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        cursor = indptr[:-1].copy()
        for u, v in canon:
            indices[cursor[u]] = v
            cursor[u] += 1
            indices[cursor[v]] = u
            cursor[v] += 1
        for u in range(n):
            indices[indptr[u] : indptr[u + 1]].sort()
        return cls(
            node_ids=node_ids,
            indptr=indptr,
            indices=indices,
            degrees=deg,
            _edge_set=frozenset(canon),
        )

    @property
    def t(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self._edge_set)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def edge_array(self) -> np.ndarray:
        """All edges as a (n_edges, 2) array with u < v, sorted."""
        if not self._edge_set:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self._edge_set), dtype=np.int64)

    def index_of(self) -> dict:
        """Label -> internal index mapping."""
        return {lab: k for k, lab in enumerate(self.node_ids)}

    def subgraph(self, keep: np.ndarray) -> "AdjacencySnapshot":
        """Induced subgraph on the given node indices (order preserved)."""
        keep = np.asarray(keep, dtype=np.int64)
        remap = {int(old): new for new, old in enumerate(keep)}
        kept = set(remap)
        edges = [
            (remap[u], remap[v])
            for u, v in self._edge_set
            if u in kept and v in kept
        ]
        return AdjacencySnapshot.from_edges(
            edges, node_ids=tuple(self.node_ids[int(k)] for k in keep)
        )

    def components(self) -> list[np.ndarray]:
        """Connected components as index arrays, largest first."""
        seen = np.zeros(self.t, dtype=bool)
        comps = []
        for start in range(self.t):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.neighbors(u):
                    if not seen[v]:
                        seen[v] = True
                        stack.append(int(v))
            comps.append(np.array(sorted(comp), dtype=np.int64))
        comps.sort(key=lambda c: (-len(c), c[0] if len(c) else 0))
        return comps

    def giant_component(self) -> np.ndarray:
        comps = self.components()
        return comps[0] if comps else np.empty(0, dtype=np.int64)

    def is_connected(self) -> bool:
        return self.t <= 1 or len(self.giant_component()) == self.t

    def to_scipy_sparse(self):
        """CSR adjacency matrix with unit weights (float64)."""
        from scipy.sparse import csr_matrix

        data = np.ones(len(self.indices), dtype=np.float64)
        return csr_matrix(
            (data, self.indices.copy(), self.indptr.copy()), shape=(self.t, self.t)
        )
