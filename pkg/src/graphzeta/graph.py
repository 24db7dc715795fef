"""Finite simple connected graphs with dense integer vertices."""

from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ConnectivityError, SimplicityError


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple connected graph.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.  ``labels``
    keeps the original vertex names when the graph was built from a labelled
    edge list; it is ``None`` for graphs already on ``0..n-1``.
    """

    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[Hashable, ...] | None = field(default=None)

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    def __len__(self) -> int:
        return len(self.adjacency)

    def __repr__(self) -> str:
        return f"Graph(n={self.vertex_count}, edges={self.edge_count}, d={self.max_degree})"

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.adjacency], dtype=np.int64)

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @cached_property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, nb in enumerate(self.adjacency) for w in nb if v < w]

    def is_regular(self) -> bool:
        return bool((self.degrees == self.max_degree).all())

    def adjacent(self, v: int, w: int) -> bool:
        nb = self.adjacency[v]
        i = np.searchsorted(nb, w)
        return i < len(nb) and nb[i] == w

    def adjacency_matrix(self, dtype=np.int64, sparse: bool = True):
        rows = np.repeat(np.arange(self.vertex_count), self.degrees)
        cols = np.fromiter((w for nb in self.adjacency for w in nb), dtype=np.int64,
                           count=int(self.degrees.sum()))
        mat = sp.csr_matrix((np.ones(len(rows), dtype=dtype), (rows, cols)),
                            shape=(self.vertex_count,) * 2)
        return mat if sparse else mat.toarray()

    def distances_from(self, v: int) -> np.ndarray:
        """BFS distances from ``v`` (all finite, the graph is connected)."""
        dist = np.full(self.vertex_count, -1, dtype=np.int64)
        dist[v] = 0
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        return np.stack([self.distances_from(v) for v in range(self.vertex_count)])


def _check_connected(adjacency: Sequence[Sequence[int]]) -> None:
    n = len(adjacency)
    if n == 0:
        raise ConnectivityError("empty graph")
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adjacency[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    if not seen.all():
        raise ConnectivityError(
            f"graph is disconnected: {int(n - seen.sum())} of {n} vertices unreachable from 0")


def from_adjacency(adjacency: Sequence[Iterable[int]],
                   labels: Sequence[Hashable] | None = None) -> Graph:
    n = len(adjacency)
    adj: list[tuple[int, ...]] = []
    for v, nb in enumerate(adjacency):
        row = sorted(nb)
        if len(set(row)) != len(row):
            raise SimplicityError(f"repeated neighbour at vertex {v}")
        if v in row:
            raise SimplicityError(f"self-loop at vertex {v}")
        if row and (row[0] < 0 or row[-1] >= n):
            raise SimplicityError(f"neighbour of {v} out of range")
        adj.append(tuple(row))
    for v, nb in enumerate(adj):
        for w in nb:
            if v not in adj[w]:
                raise SimplicityError(f"asymmetric adjacency between {v} and {w}")
    _check_connected(adj)
    return Graph(tuple(adj), None if labels is None else tuple(labels))


def build_graph(edges: Iterable[tuple[Hashable, Hashable]],
                vertex_count: int | None = None) -> Graph:
    """Build a graph from an edge list.

    Integer endpoints are used as vertex indices directly (vertices are
    ``0..max``, or ``0..vertex_count-1`` if given).  Any other labels are
    mapped to indices in order of first appearance.

    Raises ``SimplicityError`` for loops or repeated edges and
    ``ConnectivityError`` if the result is disconnected.
    """
    edges = list(edges)
    ints = all(isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer))
               for a, b in edges)
    labels = None
    if ints:
        top = max((max(a, b) for a, b in edges), default=-1)
        n = top + 1 if vertex_count is None else vertex_count
        if any(min(a, b) < 0 for a, b in edges) or top >= n:
            raise SimplicityError("edge endpoint outside 0..n-1")
        index = None
    else:
        index = {}
        for a, b in edges:
            for x in (a, b):
                index.setdefault(x, len(index))
        n = len(index)
        labels = list(index)
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for a, b in edges:
        v, w = (int(a), int(b)) if index is None else (index[a], index[b])
        if v == w:
            raise SimplicityError(f"self-loop at {a!r}")
        key = (min(v, w), max(v, w))
        if key in seen:
            raise SimplicityError(f"repeated edge {a!r}-{b!r}")
        seen.add(key)
        adj[v].append(w)
        adj[w].append(v)
    return from_adjacency(adj, labels)


def ball(g: Graph, v: int, r: int) -> list[int]:
    """Vertices at combinatorial distance at most ``r`` from ``v``."""
    return sorted(int(x) for x in np.flatnonzero(g.distances_from(v) <= r))


def frontier(g: Graph, K: Iterable[int]) -> list[int]:
    """Vertices of ``K`` with a neighbour outside ``K``."""
    inside = set(K)
    return sorted(v for v in inside if any(w not in inside for w in g.adjacency[v]))


def read_edge_list(path) -> Graph:
    """Parse the ``u v`` per line text format; ``#`` starts a comment."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SimplicityError(f"{path}:{lineno}: expected two vertex indices")
            edges.append((int(parts[0]), int(parts[1])))
    return build_graph(edges)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {g.vertex_count} vertices, {g.edge_count} edges\n")
        fh.writelines(f"{v} {w}\n" for v, w in g.edges())
