"""Trace contexts and the path-counting operator recursions.

``A_m(u)(x, y)`` sums ``u**bc(P)`` over paths of length ``m`` from ``x`` to
``y``; it satisfies a three-term recursion in ``A`` and ``Q = D - I`` that
is realised here with sparse matrices.  The tail sums ``t_m`` and cyclic
counts ``N_m`` are traces of these operators.

Three contexts supply the trace:

* ``FiniteContext`` -- normalised trace ``(1/|V|) Tr``.
* ``PeriodicContext`` -- sum of diagonal entries over a fundamental domain,
  evaluated on a finite window of the infinite graph.  Finite propagation
  makes these entries exact when the window is large enough.
* ``SelfSimilarContext`` -- normalised trace on the level-``n`` finite
  section of an exhaustion.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from numbers import Integral
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import WindowTooSmall, ZetaError
from .graph import Graph


class UBound(NamedTuple):
    u: complex
    M: float
    alpha: float


def alpha_bound(d: int, u: complex | Iterable[complex]) -> UBound:
    """Growth bound ``alpha`` with ``||A_m(u)|| <= alpha**m``.

    ``u`` may be a single value or a collection (the sup is taken).
    """
    if d < 1:
        raise ZetaError("degree bound must be >= 1")
    us = [complex(u)] if np.isscalar(u) else [complex(x) for x in u]
    M = max(1.0, *(max(abs(x), abs(1 - x)) for x in us))
    alpha = (d + math.sqrt(d * d + 4 * M * (d - 1 + M))) / 2
    return UBound(us[0] if len(us) == 1 else complex("nan"), M, alpha)


@dataclass(frozen=True)
class OperatorWindow:
    """A matrix over a context's window, tagged with its propagation radius."""

    matrix: sp.csr_matrix
    radius: int

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


class TraceContext:
    """Common surface of the three trace contexts.

    ``graph`` is the finite window the operators live on, ``degrees`` the
    true degrees of its vertices in the (possibly infinite) graph, and
    ``diag_index`` the window vertices whose diagonal entries are summed.
    ``scale`` is the trace of the identity before normalisation.
    """

    kind = "abstract"
    graph: Graph
    degrees: np.ndarray
    diag_index: np.ndarray
    scale: int
    d: int

    @property
    def size(self) -> int:
        return self.graph.vertex_count

    def adjacency(self, dtype=complex) -> sp.csr_matrix:
        return self.graph.adjacency_matrix(dtype=dtype).tocsr()

    def q_diag(self) -> np.ndarray:
        return self.degrees - 1

    def check_radius(self, m: int) -> None:
        """Raise ``WindowTooSmall`` if propagation ``m`` is not exact here."""

    def trace_diag(self, diag: np.ndarray, normalized: bool = True) -> complex:
        s = diag[self.diag_index].sum()
        return s / self.scale if normalized else s

    def describe(self) -> dict:
        return {"kind": self.kind, "vertices": self.size, "d": self.d, "scale": self.scale}


class FiniteContext(TraceContext):
    kind = "finite"

    def __init__(self, graph: Graph):
        self.graph = graph
        self.degrees = graph.degrees
        self.diag_index = np.arange(graph.vertex_count)
        self.scale = graph.vertex_count
        self.d = graph.max_degree

    def describe(self) -> dict:
        return {"kind": self.kind, "vertices": self.size, "edges": self.graph.edge_count,
                "d": self.d}


class PeriodicContext(TraceContext):
    """Window realisation of a periodic graph.

    ``domain`` holds window indices of the fundamental-domain vertices (cell
    zero), ``radius`` the window's radius around them.  ``spec`` is the
    originating ``PeriodicSpec`` (used for Floquet fibres).
    """

    kind = "periodic"

    def __init__(self, graph: Graph, degrees: np.ndarray, domain: Sequence[int],
                 radius: int, spec=None, coords=None):
        self.graph = graph
        self.degrees = np.asarray(degrees, dtype=np.int64)
        self.diag_index = np.asarray(domain, dtype=np.int64)
        self.radius = radius
        self.scale = len(domain)
        self.d = int(self.degrees.max())
        self.spec = spec
        self.coords = coords

    def check_radius(self, m: int) -> None:
        if self.radius < m + 1:
            raise WindowTooSmall(
                f"window radius {self.radius} cannot hold propagation {m} exactly "
                f"(need >= {m + 1})")

    def describe(self) -> dict:
        return {"kind": self.kind, "fundamental_domain": self.scale,
                "window_radius": self.radius, "window_vertices": self.size, "d": self.d}


class SelfSimilarContext(TraceContext):
    """Level-``n`` finite section of a self-similar exhaustion."""

    kind = "self_similar"

    def __init__(self, scheme, level: int):
        self.scheme = scheme
        self.level = level
        self.graph = scheme.graph(level)
        self.degrees = self.graph.degrees
        self.diag_index = np.arange(self.graph.vertex_count)
        self.scale = self.graph.vertex_count
        self.d = scheme.degree_bound

    def coarser(self) -> SelfSimilarContext:
        if self.level <= 1:
            raise ZetaError("no coarser level than 1")
        return SelfSimilarContext(self.scheme, self.level - 1)

    def describe(self) -> dict:
        return {"kind": self.kind, "scheme": self.scheme.name, "level": self.level,
                "vertices": self.size, "d": self.d}


def trace(ctx: TraceContext, T, normalized: bool = False) -> complex:
    """Trace of an operator window in ``ctx``.

    Finite and self-similar contexts always use the normalised trace.  For a
    periodic context the default is the fundamental-domain sum
    (``trace(I) = |F|``); ``normalized=True`` divides by ``|F|``.
    """
    if isinstance(T, OperatorWindow):
        ctx.check_radius(T.radius)
        diag = T.diagonal()
    elif sp.issparse(T):
        diag = T.diagonal()
    else:
        diag = np.diagonal(np.asarray(T))
    if ctx.kind != "periodic":
        normalized = True
    return complex(ctx.trace_diag(diag, normalized))


def self_similar_estimate(ctx: SelfSimilarContext, fn) -> tuple[complex, complex]:
    """Evaluate ``fn(ctx)`` and report its change from level ``n-1``."""
    value = fn(ctx)
    if ctx.level <= 1:
        return value, complex("nan")
    return value, value - fn(ctx.coarser())


def richardson_limit(values: Sequence, ratio: float, order: int = 1):
    """Limit of a sequence whose error shrinks by ``1/ratio`` per step.

    ``values`` are consecutive levels, coarsest first; ``order`` rounds of
    Richardson elimination assume errors ``c_1 r^-n + c_2 r^-2n + ...``.
    """
    vals = [np.asarray(v) for v in values]
    if len(vals) < order + 1:
        raise ZetaError(f"need {order + 1} levels for order {order}")
    for k in range(1, order + 1):
        f = ratio ** k
        vals = [(f * b - a) / (f - 1) for a, b in zip(vals[:-1], vals[1:])]
    return vals[-1]


def self_similar_limit(ctx: SelfSimilarContext, fn, order: int = 2):
    """Richardson estimate of ``lim fn(K_n)`` from levels ``n-order .. n``."""
    levels = [ctx]
    for _ in range(order):
        levels.insert(0, levels[0].coarser())
    return richardson_limit([fn(c) for c in levels], ctx.scheme.copy_count, order)


def _is_integer(u) -> bool:
    return isinstance(u, Integral) and not isinstance(u, bool)


def _dtype_for(u):
    return np.int64 if _is_integer(u) else np.complex128


def _iter_a(ctx: TraceContext, u, M: int) -> Iterator[sp.csr_matrix]:
    """Yield ``A_0(u) .. A_M(u)`` as sparse matrices on the window."""
    dtype = _dtype_for(u)
    u = int(u) if _is_integer(u) else complex(u)
    n = ctx.size
    A = ctx.adjacency(dtype=dtype)
    eye = sp.identity(n, dtype=dtype, format="csr")
    qdiag = ctx.q_diag().astype(dtype)
    q_plus_u = sp.diags(qdiag + u, format="csr", dtype=dtype)
    prev = eye
    yield prev
    if M == 0:
        return
    cur = A.copy()
    yield cur
    if M == 1:
        return
    nxt = (A @ A - (1 - u) * sp.diags(qdiag + 1, format="csr", dtype=dtype)).tocsr()
    prev, cur = cur, nxt
    yield cur
    for _ in range(3, M + 1):
        nxt = (cur @ A - (1 - u) * (prev @ q_plus_u)).tocsr()
        nxt.eliminate_zeros()
        prev, cur = cur, nxt
        yield cur


def a_sequence(ctx: TraceContext, u, M: int) -> list[OperatorWindow]:
    """``A_0(u), ..., A_M(u)`` on the context's window.

    An integer ``u`` (typically 0 or 1) keeps the computation in exact
    integer arithmetic.
    """
    ctx.check_radius(M)
    return [OperatorWindow(mat, m) for m, mat in enumerate(_iter_a(ctx, u, M))]


class TNSequence(NamedTuple):
    """Tail sums ``t[m]`` and cyclic counts ``N[m]`` for ``m = 0..M``.

    Index 0 is a placeholder (zero).  ``t_closed`` is the closed-form
    evaluation of the tail sums, kept for auditing.
    """

    t: np.ndarray
    N: np.ndarray
    t_closed: np.ndarray


def _diag_traces(ctx, u, M, normalized):
    """``tau(A_m)`` and ``tau((Q - (1-2u)) A_m)`` for m = 0..M."""
    w = (ctx.q_diag() - (1 - 2 * complex(u)))
    trA = np.zeros(M + 1, dtype=complex)
    trWA = np.zeros(M + 1, dtype=complex)
    for m, mat in enumerate(_iter_a(ctx, u, M)):
        diag = mat.diagonal().astype(complex)
        trA[m] = ctx.trace_diag(diag, normalized)
        trWA[m] = ctx.trace_diag(w * diag, normalized)
    return trA, trWA


def tail_closed_form(trWA: np.ndarray, tau_q_plus_i: complex, u, M: int) -> np.ndarray:
    """Tail sums from the explicit finite sum over ``A_{m-2j}`` traces."""
    u = complex(u)
    out = np.zeros(M + 1, dtype=complex)
    for m in range(1, M + 1):
        s = sum((1 - u) ** (2 * j - 2) * trWA[m - 2 * j] for j in range(1, (m - 1) // 2 + 1))
        if m % 2 == 0:
            s += u * (1 - u) ** (m - 2) * tau_q_plus_i
        out[m] = s
    return out


def tn_sequence(ctx: TraceContext, u, M: int, normalized: bool = True,
                tol: float = 1e-10) -> TNSequence:
    """Tail sums and cyclic bump-weighted closed path counts up to order ``M``.

    ``t`` follows the two-step recursion seeded by ``t_1 = t_3 = 0`` and
    ``t_2 = u tau(Q + I)``; ``N_m = tau(A_m) - (1-u) t_m``.  The explicit
    finite-sum form of ``t`` is evaluated too, and a mismatch beyond ``tol``
    (relative to ``max(1, |t_m|)``) raises ``ArithmeticError``.
    """
    if M < 1:
        raise ZetaError("M must be >= 1")
    ctx.check_radius(M)
    u = complex(u)
    trA, trWA = _diag_traces(ctx, u, M, normalized)
    tau_q_plus_i = ctx.trace_diag(ctx.degrees.astype(complex), normalized)
    t = np.zeros(M + 1, dtype=complex)
    if M >= 2:
        t[2] = u * tau_q_plus_i
    for m in range(4, M + 1):
        t[m] = trWA[m - 2] + (1 - u) ** 2 * t[m - 2]
    N = trA - (1 - u) * t
    N[0] = 0
    t_closed = tail_closed_form(trWA, tau_q_plus_i, u, M)
    err = np.abs(t - t_closed) / np.maximum(1.0, np.abs(t))
    if err.max() > tol:
        m = int(err.argmax())
        raise ArithmeticError(f"tail recursion and closed form disagree at m={m}: {err[m]:.3e}")
    return TNSequence(t, N, t_closed)


def b_sequence(ctx: TraceContext, u, M: int, check: bool = True,
               tol: float = 1e-9) -> list[OperatorWindow]:
    """``B_0(u), ..., B_M(u)`` from their defining finite sums.

    No division by ``1 - u`` occurs, so ``u = 1`` is fine.  With ``check``
    the trace identity linking ``tau(B_m)`` to ``N_m`` is verified.
    """
    ctx.check_radius(M)
    u = complex(u)
    A = [w.matrix.astype(complex) for w in a_sequence(ctx, u, M)]
    W = sp.diags(ctx.q_diag() - (1 - 2 * u), format="csr", dtype=complex)
    out = [OperatorWindow(A[0], 0)]
    if M >= 1:
        out.append(OperatorWindow(A[1], 1))
    for m in range(2, M + 1):
        acc = sp.csr_matrix(A[0].shape, dtype=complex)
        for k in range(1, m // 2 + 1):
            acc = acc + (1 - u) ** (2 * k - 1) * A[m - 2 * k]
        out.append(OperatorWindow((A[m] - W @ acc).tocsr(), m))
    if check:
        seq = tn_sequence(ctx, u, M)
        tau_q_minus_i = ctx.trace_diag((ctx.degrees - 2).astype(complex))
        for m in range(1, M + 1):
            expected = seq.N[m] - ((1 - u) ** m * tau_q_minus_i if m % 2 == 0 else 0)
            got = trace(ctx, out[m], normalized=True)
            if abs(got - expected) > tol * max(1.0, abs(expected)):
                raise ArithmeticError(f"trace of B_{m} off by {abs(got - expected):.3e}")
    return out
