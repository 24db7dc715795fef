"""Fixture constructors: finite families, periodic lattices, the Sierpinski gasket."""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from .errors import (
    BadParameter,
    BudgetExceeded,
    CycleTooLarge,
    FreenessViolation,
    SimplicityError,
)
from .graph import Graph, build_graph, from_adjacency, frontier
from .operators import PeriodicContext, SelfSimilarContext


def finite_family(name: str, n: int | None = None) -> Graph:
    """cycle C_n, complete K_n, path P_n (n vertices) or the Petersen graph."""
    if name == "cycle":
        if n is None or n < 3:
            raise BadParameter("cycle needs n >= 3")
        return build_graph([(i, (i + 1) % n) for i in range(n)])
    if name == "complete":
        if n is None or n < 2:
            raise BadParameter("complete needs n >= 2")
        return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)])
    if name == "path":
        if n is None or n < 2:
            raise BadParameter("path needs n >= 2")
        return build_graph([(i, i + 1) for i in range(n - 1)])
    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return build_graph(outer + spokes + inner)
    raise BadParameter(f"unknown family {name!r}")


FIXTURES = {
    "C4": lambda: finite_family("cycle", 4),
    "C5": lambda: finite_family("cycle", 5),
    "K4": lambda: finite_family("complete", 4),
    "petersen": lambda: finite_family("petersen"),
}


# --- periodic graphs -------------------------------------------------------

@dataclass(frozen=True)
class PeriodicSpec:
    """Quotient data of a graph with a free ``Z^rank`` translation action.

    Each edge ``(a, b, offset)`` joins label ``a`` in cell ``c`` to label
    ``b`` in cell ``c + offset``.
    """

    domain: tuple[str, ...]
    edges: tuple[tuple[str, str, tuple[int, ...]], ...]
    rank: int

    def __post_init__(self):
        if len(set(self.domain)) != len(self.domain):
            raise FreenessViolation("fundamental domain labels must be distinct")
        if self.rank not in (1, 2):
            raise BadParameter("only rank 1 and 2 lattices are supported")
        seen = set()
        for a, b, off in self.edges:
            if a not in self.domain or b not in self.domain:
                raise BadParameter(f"edge references unknown label in {(a, b, off)}")
            if len(off) != self.rank:
                raise FreenessViolation(f"offset {off} does not match rank {self.rank}")
            if a == b and not any(off):
                raise SimplicityError(f"self-loop at label {a}")
            key = (a, b, off)
            rev = (b, a, tuple(-x for x in off))
            if key in seen or rev in seen:
                raise SimplicityError(f"repeated edge {key}")
            seen.add(key)

    def neighbours(self, cell: tuple[int, ...], label: str):
        for a, b, off in self.edges:
            if a == label:
                yield tuple(c + o for c, o in zip(cell, off)), b
            if b == label:
                yield tuple(c - o for c, o in zip(cell, off)), a

    def degrees(self) -> dict[str, int]:
        deg = {x: 0 for x in self.domain}
        for a, b, _ in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def fiber(self, theta: Sequence[float]) -> np.ndarray:
        """Bloch fibre ``A(theta)``: Hermitian ``|F| x |F|`` matrix."""
        idx = {x: i for i, x in enumerate(self.domain)}
        k = len(self.domain)
        mat = np.zeros((k, k), dtype=complex)
        theta = np.asarray(theta, dtype=float)
        for a, b, off in self.edges:
            phase = np.exp(1j * float(np.dot(theta, off)))
            mat[idx[a], idx[b]] += phase
            mat[idx[b], idx[a]] += np.conj(phase)
        return mat

    def to_json(self) -> str:
        return json.dumps({"domain": list(self.domain),
                           "edges": [[a, b, list(o)] for a, b, o in self.edges],
                           "rank": self.rank})

    @classmethod
    def from_json(cls, text: str) -> PeriodicSpec:
        data = json.loads(text)
        return cls(tuple(str(x) for x in data["domain"]),
                   tuple((str(a), str(b), tuple(int(x) for x in o)) for a, b, o in data["edges"]),
                   int(data["rank"]))


LATTICES = {
    "Z": PeriodicSpec(("a",), (("a", "a", (1,)),), 1),
    "ladder": PeriodicSpec(("a", "b"), (("a", "b", (0,)), ("a", "a", (1,)), ("b", "b", (1,))), 1),
    "Z2": PeriodicSpec(("a",), (("a", "a", (1, 0)), ("a", "a", (0, 1))), 2),
}


def periodic_lattice(spec: PeriodicSpec, window_radius: int) -> PeriodicContext:
    """Materialise the ball of radius ``window_radius`` around cell zero."""
    if window_radius < 1:
        raise BadParameter("window radius must be >= 1")
    zero = (0,) * spec.rank
    start = [(zero, x) for x in spec.domain]
    index = {v: i for i, v in enumerate(start)}
    dist = {v: 0 for v in start}
    queue = deque(start)
    while queue:
        v = queue.popleft()
        if dist[v] == window_radius:
            continue
        for w in spec.neighbours(*v):
            if w not in dist:
                dist[w] = dist[v] + 1
                index[w] = len(index)
                queue.append(w)
    coords = list(index)
    adj = [set() for _ in coords]
    for v, i in index.items():
        for w in spec.neighbours(*v):
            j = index.get(w)
            if j is not None:
                if j == i:
                    raise SimplicityError("translation maps a vertex to a neighbour of itself")
                adj[i].add(j)
    for i, v in enumerate(coords):
        nbrs = list(spec.neighbours(*v))
        if len(set(nbrs)) != len(nbrs):
            raise SimplicityError(f"multi-edge at {v}")
    graph = from_adjacency(adj, labels=coords)
    true_deg = spec.degrees()
    degrees = np.array([true_deg[x] for _, x in coords], dtype=np.int64)
    return PeriodicContext(graph, degrees, list(range(len(spec.domain))), window_radius,
                           spec=spec, coords=coords)


# --- self-similar exhaustion: Sierpinski gasket -----------------------------

class ExhaustionScheme:
    """Substitution scheme of the one-sided Sierpinski gasket.

    Level 1 is a triangle.  Level ``n+1`` is three copies of level ``n``,
    translated by ``(0,0)``, ``(L,0)``, ``(0,L)`` with ``L = 2**(n-1)`` and
    glued at shared corners.  Vertices are lattice points ``(i, j)``; the
    vertices of level ``n`` are the first ``|K_n|`` indices of every later
    level, so the exhaustion is nested.
    """

    name = "gasket"
    copy_count = 3
    degree_bound = 4
    max_level = 10

    @staticmethod
    def side(level: int) -> int:
        return 2 ** (level - 1)

    @staticmethod
    def vertex_count(level: int) -> int:
        return 3 * (3 ** (level - 1) + 1) // 2

    @staticmethod
    def edge_count(level: int) -> int:
        return 3 ** level

    def copy_offsets(self, level: int) -> list[tuple[int, int]]:
        """Translations of the copies of ``K_level`` making up ``K_{level+1}``."""
        L = self.side(level)
        return [(0, 0), (L, 0), (0, L)]

    def copy_origins(self, s: int, n: int) -> list[tuple[int, int]]:
        """Origins of all level-``s`` copies inside ``K_n``."""
        L = self.side(s)
        k = 2 ** (n - s)
        return [(a * L, b * L) for a in range(k) for b in range(k - a) if a & b == 0]

    @cache
    def coords(self, level: int) -> tuple[tuple[int, int], ...]:
        if level < 1:
            raise BadParameter("gasket levels start at 1")
        if level > self.max_level:
            raise BudgetExceeded(f"gasket level {level} exceeds {self.max_level}")
        if level == 1:
            return ((0, 0), (1, 0), (0, 1))
        prev = self.coords(level - 1)
        out = list(prev)
        seen = set(prev)
        for dx, dy in self.copy_offsets(level - 1)[1:]:
            for i, j in prev:
                p = (i + dx, j + dy)
                if p not in seen:
                    seen.add(p)
                    out.append(p)
        return tuple(out)

    @cache
    def index(self, level: int) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(self.coords(level))}

    @cache
    def graph(self, level: int) -> Graph:
        idx = self.index(level)
        adj = [set() for _ in idx]
        for a, b in self.copy_origins(1, level):
            tri = [idx[(a, b)], idx[(a + 1, b)], idx[(a, b + 1)]]
            for x in tri:
                adj[x].update(y for y in tri if y != x)
        return from_adjacency(adj)

    def corners(self, level: int) -> list[int]:
        L = self.side(level)
        idx = self.index(level)
        return sorted(idx[p] for p in [(0, 0), (L, 0), (0, L)])

    def invariant_frontier(self, level: int) -> list[int]:
        """G-invariant frontier of ``K_level``, by pulling back copy frontiers.

        Every copy of ``K_level`` inside ``K_{level+2}`` has its frontier
        computed there and translated back to ``K_level`` coordinates.
        """
        big = self.graph(level + 2)
        bidx = self.index(level + 2)
        home = self.coords(level)
        out: set[int] = set()
        for ox, oy in self.copy_origins(level, level + 2):
            members = [bidx[(i + ox, j + oy)] for i, j in home]
            back = {m: k for k, m in enumerate(members)}
            out.update(back[v] for v in frontier(big, members))
        return sorted(out)

    def amenability_ratio(self, level: int) -> float:
        return len(self.invariant_frontier(level)) / self.vertex_count(level)

    def cycle_size(self, coords: Sequence[tuple[int, int]]) -> tuple[int, tuple[int, int]]:
        """Least ``s`` with the vertex set inside one level-``s`` copy, and its origin."""
        s = 1
        while True:
            if s > 64:
                raise CycleTooLarge("cycle not contained in any copy")
            L = self.side(s)
            i0, j0 = coords[0]
            for a in {i0 // L * L, i0 // L * L - L}:
                for b in {j0 // L * L, j0 // L * L - L}:
                    if a < 0 or b < 0 or (a // L) & (b // L):
                        continue
                    if all(i >= a and j >= b and (i - a) + (j - b) <= L for i, j in coords):
                        return s, (a, b)
            s += 1

    def multiplicity(self, s: int, level: int | None = None) -> float:
        """Copies of a size-``s`` cycle per vertex: ``3**(n-s)/|K_n|``.

        With ``level=None`` the ``n -> infinity`` limit ``2 * 3**-s`` is
        returned.
        """
        if level is not None:
            if s > level:
                raise CycleTooLarge(f"size {s} exceeds level {level}")
            return self.copy_count ** (level - s) / self.vertex_count(level)
        return 2.0 / 3 ** s


GASKET = ExhaustionScheme()


def gasket_exhaustion(level: int) -> SelfSimilarContext:
    if level > 8:
        raise BudgetExceeded(f"gasket level {level} > 8 is beyond desk scale")
    return SelfSimilarContext(GASKET, level)


def average_multiplicity(scheme, cycle, level: int | None = None) -> float:
    """Average multiplicity of a cycle.

    For a ``PeriodicSpec`` (free action) the stabiliser of a finite cycle is
    trivial and the result is 1.  For the gasket ``cycle`` is a sequence of
    vertex indices of ``K_level``; the size is found from coordinates and
    the limiting multiplicity ``lim 3**(n-s) / |K_n|`` is returned.
    """
    if isinstance(scheme, PeriodicSpec):
        return 1.0
    if level is None:
        raise BadParameter("level of the graph holding the cycle is required")
    verts = getattr(cycle, "vertices", cycle)
    coords = scheme.coords(level)
    s, _ = scheme.cycle_size([coords[v] for v in verts])
    return scheme.multiplicity(s)


def gasket_cycle_classes(m: int, level: int = 4, scheme: ExhaustionScheme = GASKET,
                         budget: int | None = None) -> dict:
    """Equivalence classes of length-``m`` cycles of the gasket seen inside ``K_level``.

    Two rotation classes are equivalent when they are translates of each
    other between copies of the same size ``s``.  Keys are ``(s, shape)``
    with ``shape`` the least rotation of coordinates relative to the copy
    origin; values are ``CycleClass`` records carrying the limiting
    multiplicity.
    """
    from .cycles import CycleClass, cycle_classes, least_rotation

    g = scheme.graph(level)
    coords = scheme.coords(level)
    out = {}
    for c in cycle_classes(g, m, budget):
        pts = [coords[v] for v in c.vertices]
        s, (a, b) = scheme.cycle_size(pts)
        key = (s, least_rotation(tuple((i - a, j - b) for i, j in pts)))
        if key not in out:
            out[key] = CycleClass(c.vertices, c.length, c.ell, c.cbc, scheme.multiplicity(s))
    return out


def gasket_class_sum(m: int, u: complex, level: int = 4, scheme: ExhaustionScheme = GASKET,
                     tail: bool = True) -> tuple[complex, dict[int, complex]]:
    """``sum mu(C) ell(C) u**cbc(C)`` over gasket classes of length ``m``.

    Classes of size ``s = level`` sit across the junctions of the ``level-1``
    copies; every larger junction carries the same local pattern with a
    third of the multiplicity, so with ``tail`` their geometric series
    (factor ``3/2`` on the top size) is added.  Returns the total and the
    contributions per size.
    """
    by_size: dict[int, complex] = {}
    for (s, _), c in gasket_cycle_classes(m, level, scheme).items():
        by_size[s] = by_size.get(s, 0j) + c.mu * c.ell * complex(u) ** c.cbc
    total = sum(by_size.values(), 0j)
    if tail and level in by_size:
        total += by_size[level] / (scheme.copy_count - 1)
    return total, dict(sorted(by_size.items()))


def limit_multiplicity(scheme: ExhaustionScheme, s: int, horizon: int = 400) -> float:
    """Numerical limit of ``c**(n-s)/|K_n|`` from exact integers at large ``n``."""
    n = s + horizon
    return float(Fraction(scheme.copy_count ** (n - s), scheme.vertex_count(n)))
