"""Brute-force ground truth on small finite graphs.

Everything here enumerates closed paths explicitly and is exponential in
the path length; it exists to check the operator recursions, not to be
fast.  In the finite context the mean over vertices is normalised, so each
rotation class of cycles carries multiplicity ``1/|V|``.
"""

from __future__ import annotations

import cmath
import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import BudgetExceeded, DomainError
from .graph import Graph
from .operators import alpha_bound

DEFAULT_BUDGET = 10 ** 7


def default_budget() -> int:
    return int(os.environ.get("ZETA_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class ClosedPath:
    """Closed path ``(v_0, ..., v_m = v_0)``; ``vertices`` stores all m+1 entries."""

    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def cyclic(self) -> tuple[int, ...]:
        return self.vertices[:-1]


class PathStats(NamedTuple):
    bc: int
    cbc: int
    has_tail: bool
    primitive: bool
    ell: int


@dataclass(frozen=True)
class CycleClass:
    """Rotation class of closed paths, stored by its least rotation."""

    vertices: tuple[int, ...]
    length: int
    ell: int
    cbc: int
    mu: float


def _period(seq: tuple[int, ...]) -> int:
    m = len(seq)
    for p in range(1, m + 1):
        if m % p == 0 and all(seq[i] == seq[(i + p) % m] for i in range(m)):
            return p
    return m


def least_rotation(seq: tuple[int, ...]) -> tuple[int, ...]:
    return min(seq[k:] + seq[:k] for k in range(len(seq)))


def path_stats(p: ClosedPath | tuple[int, ...]) -> PathStats:
    """Bump counts, tail flag and primitivity of a closed path.

    ``has_tail`` means the first step is retraced by the last one
    (``v_1 == v_{m-1}``), which is exactly when the seam carries a bump.
    This includes the length-2 paths ``(x, y, x)``.
    """
    verts = p.vertices if isinstance(p, ClosedPath) else tuple(p)
    m = len(verts) - 1
    bc = sum(1 for i in range(1, m) if verts[i - 1] == verts[i + 1])
    cyc = verts[:-1]
    cbc = sum(1 for i in range(m) if cyc[i - 1] == cyc[(i + 1) % m])
    tail = m >= 2 and verts[1] == verts[m - 1]
    ell = _period(cyc)
    return PathStats(bc, cbc, tail, ell == m, ell)


class _Budget:
    def __init__(self, limit):
        self.limit = default_budget() if limit is None else limit
        self.used = 0

    def spend(self, k=1):
        self.used += k
        if self.used > self.limit:
            raise BudgetExceeded(f"enumeration budget of {self.limit} partial paths exceeded")


def _walks(g: Graph, x: int, m: int, budget: _Budget, floor: int | None = None):
    """Yield closed walks of length m at x as (m+1)-tuples.

    With ``floor`` set, only vertices >= floor are visited.
    """
    dist = g.distance_matrix[x]
    adj = g.adjacency
    path = [x]

    def rec(v, left):
        if left == 0:
            if v == x:
                yield tuple(path)
            return
        for w in adj[v]:
            if dist[w] > left - 1 or (floor is not None and w < floor):
                continue
            budget.spend()
            path.append(w)
            yield from rec(w, left - 1)
            path.pop()

    yield from rec(x, m)


def closed_paths(g: Graph, x: int, m: int, budget: int | None = None) -> list[ClosedPath]:
    """Every closed path of length ``m`` based at ``x``, each once."""
    if m < 1:
        raise DomainError("path length must be >= 1")
    return [ClosedPath(w) for w in _walks(g, x, m, _Budget(budget))]


@lru_cache(maxsize=256)
def _census(g: Graph, m: int, budget: int | None) -> Counter:
    """Counter of (cbc, bc, has_tail) over closed paths of length m, all bases."""
    b = _Budget(budget)
    out: Counter = Counter()
    for x in range(g.vertex_count):
        for w in _walks(g, x, m, b):
            s = path_stats(w)
            out[(s.cbc, s.bc, s.has_tail)] += 1
    return out


def brute_counts(g: Graph, m: int, u: complex, budget: int | None = None) -> tuple[complex, complex]:
    """``(N_m(u), t_m(u))`` by enumeration, with the normalised vertex mean."""
    census = _census(g, m, budget)
    n = g.vertex_count
    N = sum(c * complex(u) ** cbc for (cbc, _, _), c in census.items()) / n
    t = sum(c * complex(u) ** bc for (_, bc, tail), c in census.items() if tail) / n
    return N, t


@lru_cache(maxsize=64)
def _classes(g: Graph, m: int, budget: int | None) -> tuple[CycleClass, ...]:
    b = _Budget(budget)
    mu = 1.0 / g.vertex_count
    found: dict[tuple[int, ...], CycleClass] = {}
    for x in range(g.vertex_count):
        # the least rotation starts at the minimum vertex, so restrict to >= x
        for w in _walks(g, x, m, b, floor=x):
            key = least_rotation(w[:-1])
            if key not in found:
                s = path_stats(w)
                found[key] = CycleClass(key, m, s.ell, s.cbc, mu)
    return tuple(sorted(found.values(), key=lambda c: c.vertices))


def cycle_classes(g: Graph, m: int, budget: int | None = None) -> list[CycleClass]:
    """All rotation classes of closed paths of length exactly ``m``."""
    return list(_classes(g, m, budget))


def primitive_cycle_classes(g: Graph, L: int, budget: int | None = None) -> list[CycleClass]:
    """Primitive rotation classes with length at most ``L``."""
    out = []
    for m in range(2, L + 1):
        out.extend(c for c in _classes(g, m, budget) if c.ell == m)
    return out


def class_sum(classes, u: complex) -> complex:
    """``sum mu * ell * u**cbc`` over the given classes."""
    return sum(c.mu * c.ell * complex(u) ** c.cbc for c in classes)


def euler_product(g: Graph, L: int, z: complex, u: complex, budget: int | None = None) -> complex:
    """Truncated Euler product over primitive classes of length <= ``L``.

    The omitted factors contribute ``O(z**(L+1))``.
    """
    bound = alpha_bound(g.max_degree, u)
    if abs(z) >= 1 / bound.alpha:
        raise DomainError(f"|z| = {abs(z):.4g} outside the convergence disc 1/alpha = "
                          f"{1 / bound.alpha:.4g}")
    log_z = 0j
    for c in primitive_cycle_classes(g, L, budget):
        w = complex(z) ** c.length * complex(u) ** c.cbc
        if w != 0:
            log_z -= c.mu * cmath.log(1 - w)
    return cmath.exp(log_z)
