"""Zeta values by power series and by the determinant formula.

The determinant ``det_tau(T) = exp tau log T`` is evaluated with the
logarithm continued along an explicit path from the identity, never by a
principal-branch shortcut.  Two routes are provided: continuation of the
log-determinant itself, and the integral of ``tau(T' T^{-1})`` along the
same path.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConvexHullViolation, DomainError, SingularPencil, ZetaError
from .operators import TraceContext, alpha_bound, tn_sequence

# --- pencils ---------------------------------------------------------------

@dataclass(frozen=True)
class Pencil:
    """Operator polynomial ``p_I(z) I + p_A(z) A + p_Q(z) Q``.

    Each tuple holds polynomial coefficients in increasing powers of ``z``.
    """

    identity: tuple = (1,)
    adjacency: tuple = ()
    q: tuple = ()

    @staticmethod
    def _ev(coeffs, z):
        return sum(c * z ** k for k, c in enumerate(coeffs))

    @staticmethod
    def _dev(coeffs, z):
        return sum(k * c * z ** (k - 1) for k, c in enumerate(coeffs) if k)

    def scalars(self, z):
        return self._ev(self.identity, z), self._ev(self.adjacency, z), self._ev(self.q, z)

    def dscalars(self, z):
        return self._dev(self.identity, z), self._dev(self.adjacency, z), self._dev(self.q, z)

    def matrix(self, A: np.ndarray, qdiag: np.ndarray, z) -> np.ndarray:
        a, b, c = self.scalars(z)
        out = b * A.astype(complex)
        out[np.diag_indices_from(out)] += a + c * qdiag
        return out

    def dmatrix(self, A: np.ndarray, qdiag: np.ndarray, z) -> np.ndarray:
        a, b, c = self.dscalars(z)
        out = b * A.astype(complex)
        out[np.diag_indices_from(out)] += a + c * qdiag
        return out


def bartholdi_pencil(u: complex) -> Pencil:
    """``I - A z + (1-u)(Q + u I) z**2``."""
    u = complex(u)
    return Pencil(identity=(1, 0, (1 - u) * u), adjacency=(0, -1), q=(0, 0, 1 - u))


def regular_pencil(u: complex, q: int) -> Pencil:
    """``(1 + (1-u)(q+u) z**2) I - z A`` (the Bartholdi pencil when ``Q = qI``)."""
    u = complex(u)
    return Pencil(identity=(1, 0, (1 - u) * (q + u)), adjacency=(0, -1))


# --- path-continued logarithms ---------------------------------------------

_MAX_STEP_ARG = math.pi / 4


def continue_log(fn: Callable[[float], tuple[np.ndarray, np.ndarray]], nodes: int = 16,
                 max_depth: int = 40) -> np.ndarray:
    """Continue ``log f`` along ``t in [0, 1]`` from ``log f(0)``.

    ``fn(t)`` returns ``(log|f|, arg f)`` as arrays (vectorised over
    independent scalar functions).  Steps are bisected until the phase
    change over every step is below ``pi/4``, so each step stays on one
    sheet.
    """
    def phase_jump(a0, a1):
        return (a1 - a0 + np.pi) % (2 * np.pi) - np.pi

    ts = list(np.linspace(0.0, 1.0, nodes + 1))
    vals = [fn(t) for t in ts]
    acc = np.asarray(vals[0][1], dtype=float).copy()
    i = 0
    while i < len(ts) - 1:
        (_, a0), (m1, a1) = vals[i], vals[i + 1]
        jump = phase_jump(np.asarray(a0), np.asarray(a1))
        if np.any(np.abs(jump) > _MAX_STEP_ARG) or not np.all(np.isfinite(m1)):
            if ts[i + 1] - ts[i] < 2.0 ** -max_depth:
                raise SingularPencil(f"log continuation failed near t={ts[i]:.6g}")
            mid = 0.5 * (ts[i] + ts[i + 1])
            ts.insert(i + 1, mid)
            vals.insert(i + 1, fn(mid))
            continue
        acc = acc + jump
        i += 1
    mag1, _ = vals[-1]
    return np.asarray(mag1) + 1j * acc


def _slog(mat: np.ndarray):
    sign, logabs = np.linalg.slogdet(mat)
    return np.array([logabs]), np.array([np.angle(sign)])


def _hull_contains_zero(eigs: np.ndarray, tol: float = 1e-12) -> bool:
    if np.any(np.abs(eigs) < tol):
        return True
    ang = np.sort(np.angle(eigs))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    return bool(gaps.max() <= np.pi + tol)


class LogDet(NamedTuple):
    log: complex
    hull_contains_zero: bool
    min_singular_value: float


def _dense_ops(ctx: TraceContext):
    if ctx.kind == "periodic":
        raise ZetaError("dense operator route is for finite windows; use the Floquet route")
    A = ctx.adjacency(dtype=float).toarray()
    return A, ctx.q_diag().astype(float)


def _as_path(ctx, T, z):
    """Normalise the ``T`` argument of ``det_tau`` to (path, dpath)."""
    if isinstance(T, Pencil):
        if z is None:
            raise ZetaError("a pencil needs the endpoint z")
        A, qd = _dense_ops(ctx)
        zc = complex(z)
        return (lambda t: T.matrix(A, qd, t * zc)), (lambda t: zc * T.dmatrix(A, qd, t * zc))
    if callable(T):
        return T, None
    mat = np.asarray(T.toarray() if hasattr(T, "toarray") else T, dtype=complex)
    eye = np.eye(mat.shape[0])
    if _hull_contains_zero(np.linalg.eigvals(mat)):
        raise ConvexHullViolation("0 lies in the convex hull of the spectrum and no path was given")
    return (lambda t: (1 - t) * eye + t * mat), (lambda t: mat - eye)


def log_det_tau(ctx: TraceContext, T, z=None, method: str = "continuation",
                svd_tol: float = 1e-10) -> LogDet:
    """``tau log T`` with the branch fixed by continuation from ``T(0) = I``.

    ``T`` is a ``Pencil`` (path ``t -> T(t z)``), a callable path
    ``t -> matrix`` on ``[0, 1]``, or a fixed matrix (straight segment from
    the identity; requires ``0`` outside the convex hull of its spectrum).
    ``method`` is ``"continuation"`` (log-determinant unwrapping) or
    ``"integral"`` (quadrature of ``tau(T' T^{-1})``).
    """
    path, dpath = _as_path(ctx, T, z)
    end = path(1.0)
    n = end.shape[0]
    smin = float(np.linalg.svd(end, compute_uv=False).min())
    if smin < svd_tol:
        raise SingularPencil(f"operator is singular at the endpoint (s_min={smin:.3e})")
    hull = _hull_contains_zero(np.linalg.eigvals(end))
    if method == "continuation":
        val = continue_log(lambda t: _slog(path(t)))[0]
    elif method == "integral":
        if dpath is None:
            raise ZetaError("integral route needs a pencil or fixed matrix")
        val = _integrate_trace_log_derivative(path, dpath)
    else:
        raise ZetaError(f"unknown method {method!r}")
    return LogDet(complex(val) / n, hull, smin)


def _integrate_trace_log_derivative(path, dpath, tol: float = 1e-13) -> complex:
    nodes, weights = np.polynomial.legendre.leggauss(24)

    def integrand(t):
        P = path(t)
        return np.trace(np.linalg.solve(P, dpath(t)))

    def composite(panels):
        edges = np.linspace(0.0, 1.0, panels + 1)
        total = 0j
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            mid = 0.5 * (a + b)
            total += half * sum(w * integrand(mid + half * x) for x, w in zip(nodes, weights))
        return total

    panels = 4
    prev = composite(panels)
    while panels < 1024:
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def det_tau(ctx: TraceContext, T, z=None, method: str = "continuation") -> complex:
    """Analytic determinant ``exp tau log T`` (normalised trace)."""
    if ctx.kind == "periodic":
        if not isinstance(T, Pencil):
            raise ZetaError("periodic determinants need a Pencil")
        return cmath.exp(floquet_log_det(ctx, T, z))
    return cmath.exp(log_det_tau(ctx, T, z, method).log)


def floquet_log_det(ctx, pencil: Pencil, z, grid: int | None = None) -> complex:
    """Normalised ``tau log T(z)`` on a periodic graph via Bloch fibres.

    Trapezoid rule on a uniform torus grid; the log of every fibre
    determinant is continued along ``[0, z]``.
    """
    spec = ctx.spec
    if grid is None:
        grid = 2048 if spec.rank == 1 else 96
    thetas = 2 * np.pi * np.arange(grid) / grid
    if spec.rank == 1:
        pts = thetas[:, None]
    else:
        pts = np.stack(np.meshgrid(thetas, thetas, indexing="ij"), -1).reshape(-1, 2)
    fibers = np.stack([spec.fiber(p) for p in pts])
    deg = spec.degrees()
    qd = np.array([deg[x] - 1 for x in spec.domain], dtype=float)
    zc = complex(z)

    def fn(t):
        a, b, c = pencil.scalars(t * zc)
        mats = b * fibers
        k = mats.shape[-1]
        idx = np.arange(k)
        mats[:, idx, idx] += a + c * qd
        sign, logabs = np.linalg.slogdet(mats)
        return logabs, np.angle(sign)

    logs = continue_log(fn)
    return complex(logs.mean() / len(spec.domain))


# --- series ----------------------------------------------------------------

@dataclass(frozen=True)
class SeriesTruncation:
    """Coefficients ``c[m] = N_m(u)/m`` of ``log Z`` for ``m = 1..M``.

    ``c[0]`` is zero.  ``K`` is an empirical constant with
    ``|c_m| <= K alpha**m`` over the computed range, used for the tail bound.
    """

    u: complex
    coeffs: np.ndarray
    alpha: float
    K: float
    context: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return len(self.coeffs) - 1

    @property
    def radius(self) -> float:
        return 1.0 / self.alpha


class ZetaValue(NamedTuple):
    value: complex
    error_bound: float


def log_zeta_series(ctx: TraceContext, u: complex, M: int) -> SeriesTruncation:
    seq = tn_sequence(ctx, u, M)
    m = np.arange(M + 1)
    c = np.zeros(M + 1, dtype=complex)
    c[1:] = seq.N[1:] / m[1:]
    alpha = alpha_bound(ctx.d, u).alpha
    K = float(np.max(np.abs(c[1:]) / alpha ** m[1:]))
    return SeriesTruncation(complex(u), c, alpha, K, dict(ctx.describe(), M=M))


def zeta_eval(s: SeriesTruncation, z: complex) -> ZetaValue:
    """``exp(sum c_m z**m)`` with a bound on the omitted tail of the exponent."""
    z = complex(z)
    if abs(z) >= s.radius:
        raise DomainError(f"|z|={abs(z):.4g} outside series radius {s.radius:.4g}")
    log_val = np.polynomial.polynomial.polyval(z, s.coeffs)
    x = s.alpha * abs(z)
    tail = s.K * x ** (s.M + 1) / (1 - x)
    val = cmath.exp(log_val)
    return ZetaValue(val, abs(val) * (math.exp(tail) - 1))


# --- Euler characteristic --------------------------------------------------

class EulerChar(NamedTuple):
    value: float
    kind: str
    direct: float | None = None
    unnormalized: float | None = None


def euler_characteristic(ctx: TraceContext) -> EulerChar:
    """``-1/2 tau(Q - I)`` in the context's normalised trace."""
    q_minus_i = (ctx.degrees - 2).astype(float)
    value = -0.5 * float(ctx.trace_diag(q_minus_i, normalized=True))
    if ctx.kind == "periodic":
        return EulerChar(value, "L2", None, -0.5 * float(ctx.trace_diag(q_minus_i, False)))
    g = ctx.graph
    direct = (g.vertex_count - g.edge_count) / g.vertex_count
    kind = "average" if ctx.kind == "self_similar" else "finite-normalized"
    return EulerChar(value, kind, direct)


# --- determinant formula ---------------------------------------------------

def det_formula_rhs(ctx: TraceContext, u: complex, z: complex, method: str = "continuation") -> complex:
    """``(1 - (1-u)^2 z^2)^(-chi) det_tau(I - Az + (1-u)(Q+uI) z^2)``."""
    u, z = complex(u), complex(z)
    chi = euler_characteristic(ctx).value
    pencil = bartholdi_pencil(u)
    if ctx.kind == "periodic":
        log_det = floquet_log_det(ctx, pencil, z)
    else:
        log_det = log_det_tau(ctx, pencil, z, method).log
    pref = -chi * continued_log1p(-(1 - u) ** 2 * z ** 2)
    return cmath.exp(pref + log_det)


def continued_log1p(w: complex) -> complex:
    """``log(1 + w)`` continued along the segment from 0 to ``w``."""
    w = complex(w)
    val = continue_log(lambda t: (np.array([math.log(abs(1 + t * w)) if 1 + t * w else -np.inf]),
                                  np.array([cmath.phase(1 + t * w)])))
    return complex(val[0])


def verify_det_formula(ctx: TraceContext, u: complex, z: complex, M: int = 30) -> float:
    """``|1/Z_series(z,u) - determinant side|`` for ``|z| < 1/(2 alpha)``."""
    z = complex(z)
    s = log_zeta_series(ctx, u, M)
    if abs(z) >= s.radius / 2:
        raise DomainError(f"|z|={abs(z):.4g} not inside 1/(2 alpha) = {s.radius / 2:.4g}")
    inv_z = cmath.exp(-np.polynomial.polynomial.polyval(z, s.coeffs))
    return abs(inv_z - det_formula_rhs(ctx, u, z))


def nearest_pencil_zero(ctx: TraceContext, pencil: Pencil) -> float:
    """Smallest ``|z|`` where a quadratic pencil becomes singular (finite windows)."""
    A, qd = _dense_ops(ctx)
    n = A.shape[0]
    coeff = [np.zeros((n, n), dtype=complex) for _ in range(3)]
    for k in range(3):
        a = pencil.identity[k] if k < len(pencil.identity) else 0
        b = pencil.adjacency[k] if k < len(pencil.adjacency) else 0
        c = pencil.q[k] if k < len(pencil.q) else 0
        coeff[k] = b * A + np.diag(a + c * qd)
    # det(C0 + C1 z + C2 z^2) = 0 with z = 1/mu: det(C0 mu^2 + C1 mu + C2) = 0
    if not np.allclose(coeff[0], np.eye(n)):
        raise ZetaError("pencil must equal I at z = 0")
    comp = np.block([[-coeff[1], -coeff[2]], [np.eye(n), np.zeros((n, n))]])
    mu = np.linalg.eigvals(comp)
    big = np.abs(mu).max()
    return math.inf if big == 0 else 1.0 / big


def taylor_coefficients(fn: Callable[[complex], complex], M: int, r: float,
                        points: int = 256) -> np.ndarray:
    """Taylor coefficients ``a_0..a_M`` of ``fn`` by a discrete Cauchy integral on ``|z| = r``."""
    w = np.exp(2j * np.pi * np.arange(points) / points)
    vals = np.array([fn(r * x) for x in w])
    coef = np.fft.fft(vals) / points
    return coef[:M + 1] / r ** np.arange(M + 1)


def log_zeta_from_determinant(ctx: TraceContext, u: complex, M: int,
                              points: int = 256) -> np.ndarray:
    """Taylor coefficients of ``-log det_tau(pencil) + chi log(1-(1-u)^2 z^2)``.

    Independent of the path-counting recursion; comparable with ``N_m/m``.
    """
    u = complex(u)
    pencil = bartholdi_pencil(u)
    chi = euler_characteristic(ctx).value
    rho = nearest_pencil_zero(ctx, pencil)
    if abs(1 - u) > 0:
        rho = min(rho, 1 / abs(1 - u))
    r = 0.6 * min(rho, 1.0)

    def fn(zz):
        return (-log_det_tau(ctx, pencil, zz).log
                + chi * continued_log1p(-(1 - u) ** 2 * zz ** 2))

    return taylor_coefficients(fn, M, r, points)
