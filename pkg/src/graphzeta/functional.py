"""Completed zeta functions, the involution ``psi`` and singularity regions.

For an essentially ``(q+1)``-regular graph everything depends on ``(z, u)``
through ``g(z, u) = (1 + (1-u)(q+u) z**2) / z``: the completed function is
``xi = (g - (q+1)) / det_tau(g I - A)``, so ``xi`` is invariant under every
map preserving ``g``.  The singular set is ``Omega = {g in [-d, d]}``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, ndimage

from .errors import AnalyticityViolation, DomainError, SingularIntegrand, ZetaError
from .operators import TraceContext, alpha_bound
from .spectral import SpectralCDF, log_resolvent_det, spectral_measure
from .zeta import continued_log1p, log_zeta_series

DEFAULT_BAND = 1e-9


# --- g, psi and membership -------------------------------------------------

def g_and_psi(z: complex, u: complex, q: int) -> tuple[complex, complex]:
    """``g(z, u)`` and the ``z``-component of ``psi(z, u)``."""
    z, u = complex(z), complex(u)
    if z == 0:
        raise DomainError("g is undefined at z = 0")
    w = (1 - u) * (q + u)
    if w == 0:
        raise DomainError(f"psi is undefined for u = {u} (need u != 1 and u != -q)")
    return (1 + w * z * z) / z, 1 / (w * z)


def psi(z: complex, u: complex, q: int) -> tuple[complex, complex]:
    return g_and_psi(z, u, q)[1], complex(u)


@dataclass(frozen=True)
class RegionParams:
    """``(d, q, u)`` together with the tolerance band used for membership in ``Omega``."""

    d: float
    q: int
    u: complex = 0j
    band: float = DEFAULT_BAND

    def __post_init__(self):
        if self.band <= 0:
            raise ZetaError("band must be positive")

    @property
    def w(self) -> complex:
        u = complex(self.u)
        return (1 - u) * (self.q + u)

    def g(self, z: complex) -> complex:
        z = complex(z)
        if z == 0:
            raise DomainError("g is undefined at z = 0")
        return (1 + self.w * z * z) / z

    def __contains__(self, z) -> bool:
        return omega_membership(z, self.u, self)


def omega_membership(z: complex, u: complex, params: RegionParams) -> bool:
    """Whether ``(z, u)`` lies in the band around ``Omega``; ``z = 0`` never does."""
    z = complex(z)
    if z == 0:
        return False
    p = params if complex(params.u) == complex(u) else RegionParams(params.d, params.q, u, params.band)
    g = p.g(z)
    return abs(g.imag) <= p.band and -p.d - p.band <= g.real <= p.d + p.band


def omega_w_disconnects(w: complex, d: float) -> bool:
    """``Omega_w = {(1 + w z^2)/z in [-d, d]}`` separates the plane iff ``0 < w <= d^2/4``."""
    if d <= 0:
        raise ZetaError("d must be positive")
    w = complex(w)
    return w.imag == 0 and 0 < w.real <= d * d / 4


# --- curves ----------------------------------------------------------------

def roots_for_g(g: np.ndarray, w: complex) -> np.ndarray:
    """Both solutions of ``w z^2 - g z + 1 = 0`` for each ``g`` (shape ``(2, n)``)."""
    g = np.asarray(g, dtype=complex)
    w = complex(w)
    if w == 0:
        with np.errstate(divide="ignore"):
            z = 1 / g
        return np.stack([z, z])
    disc = np.sqrt(g * g - 4 * w)
    plus, minus = (g + disc) / (2 * w), (g - disc) / (2 * w)
    # keep each branch continuous along g (the principal root can swap sides)
    for i in range(1, g.size):
        stay = abs(plus[i] - plus[i - 1]) + abs(minus[i] - minus[i - 1])
        swap = abs(minus[i] - plus[i - 1]) + abs(plus[i] - minus[i - 1])
        if swap < stay:
            plus[i], minus[i] = minus[i], plus[i]
    return np.stack([plus, minus])


def omega_w_curve(w: complex, d: float, samples: int = 4001) -> np.ndarray:
    """Points of ``Omega_w`` as two branch arrays, ordered along the parameter ``g``.

    For ``w = 0`` the two half lines are unbounded; the points with
    ``g`` close to zero are dropped and the rest is returned.
    """
    g = np.linspace(-d, d, samples)
    if complex(w) == 0:
        g = g[np.abs(g) > 1e-3]
    return roots_for_g(g, w)


def omega_q_curve(q: int, d: float, u: complex = 0, samples: int = 4001) -> np.ndarray:
    """``Omega`` at fixed ``u`` (``Omega_q`` for ``u = 0``)."""
    u = complex(u)
    return omega_w_curve((1 - u) * (q + u), d, samples)


def gamma_contour(q: int, d: float, eps: float, sigma: int = 1, corner: int = 1,
                  samples: int = 2001) -> np.ndarray:
    """The oriented curve from ``-d`` to ``d`` that skirts ``2 corner sqrt(q)`` on a semicircle."""
    c = 2 * corner * math.sqrt(q)
    n = max(samples // 3, 8)
    t = np.linspace(0.0, math.pi, n)
    arc = c + eps * np.exp(1j * sigma * (math.pi - t))
    return np.concatenate([np.linspace(-d, c - eps, n), arc[1:-1], np.linspace(c + eps, d, n)])


def omega_tilde_q_curve(q: int, d: float, eps: float, sigma: int = 1, corner: int = 1,
                        samples: int = 2001) -> np.ndarray:
    """``{z : 1/z + q z in Gamma}``: the singular set of the contour integral."""
    return roots_for_g(gamma_contour(q, d, eps, sigma, corner, samples), q)


def _densify(points: np.ndarray, step: float) -> np.ndarray:
    """Insert linear interpolants so consecutive points are at most ``step`` apart."""
    out = [points[:1]]
    gaps = np.abs(np.diff(points))
    for a, b, gap in zip(points[:-1], points[1:], gaps):
        k = int(math.ceil(gap / step))
        if k > 1:
            out.append(a + (b - a) * np.arange(1, k + 1) / k)
        else:
            out.append(np.array([b]))
    return np.concatenate(out)


def omega_disconnection_oracle(w: complex, d: float, grid: int = 256) -> bool:
    """Flood-fill check of whether ``Omega_w`` cuts the origin off from infinity.

    The curve is rasterised on a ``grid x grid`` box of three times its
    bounding radius (cells visited consecutively are 8-adjacent), and the
    complement is labelled with 4-connectivity.  Returns ``True`` iff the
    component holding the origin never touches the box boundary.
    """
    if grid < 64:
        raise ZetaError("grid must be >= 64")
    branches = omega_w_curve(w, d, samples=20001)
    finite = np.isfinite(branches)
    radius = float(np.abs(branches[finite]).max()) if complex(w) != 0 else 2.0 / d
    if complex(w) == 0:
        branches = np.where(np.abs(branches) <= 3 * radius, branches, np.nan)
    half = 3 * radius
    h = 2 * half / grid
    blocked = np.zeros((grid, grid), dtype=bool)
    for br in branches:
        br = br[np.isfinite(br)]
        if br.size == 0:
            continue
        pts = _densify(br, h / 2)
        ix = np.clip(((pts.real + half) / h).astype(int), 0, grid - 1)
        iy = np.clip(((pts.imag + half) / h).astype(int), 0, grid - 1)
        blocked[iy, ix] = True
    labels, _ = ndimage.label(~blocked)
    o = int(half / h)
    origin = labels[o, o]
    if origin == 0:
        return False
    edge = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    return not np.any(edge == origin)


# --- completed Bartholdi zeta ----------------------------------------------

def _regular_q(ctx: TraceContext, q: int | None, strict: bool) -> int:
    deg = np.asarray(ctx.degrees)[ctx.diag_index] if ctx.kind == "periodic" else np.asarray(ctx.degrees)
    if q is None:
        q = int(ctx.d) - 1
    if strict and not np.all(deg == q + 1):
        raise DomainError(f"context is not {q + 1}-regular; the completion needs a regular graph")
    return q


@lru_cache(maxsize=32)
def _series(ctx: TraceContext, u: complex, M: int):
    return log_zeta_series(ctx, u, M)


@lru_cache(maxsize=32)
def _measure(ctx: TraceContext):
    return spectral_measure(ctx)


def series_radius(ctx: TraceContext, u: complex) -> float:
    """Radius ``1/(2 alpha)`` inside which the series route is used."""
    return 0.5 / alpha_bound(ctx.d, u).alpha


def xi_bartholdi(ctx: TraceContext, z: complex, u: complex, q: int | None = None,
                 route: str = "auto", M: int | None = None, band: float = DEFAULT_BAND,
                 strict: bool = True) -> complex:
    """Completed Bartholdi zeta ``(1-(1-u)^2 z^2)^((q-1)/2) (1-(q+1)z+(1-u)(q+u)z^2) Z``.

    ``route="series"`` multiplies the truncated ``N_m`` series by the
    prefactors (``|z| < 1/alpha``; ``M`` defaults to an order whose tail
    bound is below double precision).  ``route="det"`` uses
    ``(g - (q+1)) / det_tau(g I - A)``, which is analytic off ``Omega``.
    ``"auto"`` uses the series inside ``|z| < 1/(2 alpha)`` and the
    determinant elsewhere.
    """
    z, u = complex(z), complex(u)
    q = _regular_q(ctx, q, strict)
    if z == 0:
        return 1 + 0j
    params = RegionParams(ctx.d, q, u, band)
    if omega_membership(z, u, params):
        raise DomainError(f"(z, u) = ({z}, {u}) lies in the singular band")
    if route == "auto":
        route = "series" if abs(z) < series_radius(ctx, u) else "det"
    if route == "series":
        x = abs(z) * alpha_bound(ctx.d, u).alpha
        if x >= 1:
            raise DomainError(f"|z| = {abs(z):.4g} outside the series disc {2 * series_radius(ctx, u):.4g}")
        if M is None:
            M = int(min(400, max(30, math.ceil(math.log(1e-17) / math.log(x)) + 10)))
        s = _series(ctx, u, M)
        log_z = np.polynomial.polynomial.polyval(z, s.coeffs)
        w = (1 - u) * (q + u)
        pref = 0.5 * (q - 1) * continued_log1p(-(1 - u) ** 2 * z * z)
        return cmath.exp(pref + log_z) * (1 - (q + 1) * z + w * z * z)
    if route == "det":
        g = params.g(z)
        return (g - (q + 1)) / cmath.exp(log_resolvent_det(_measure(ctx), g))
    raise ZetaError(f"unknown route {route!r}")


def route_discrepancy(ctx: TraceContext, z: complex, u: complex, q: int | None = None) -> float:
    """``|xi_series - xi_det|`` at a point of the series disc."""
    a = xi_bartholdi(ctx, z, u, q, route="series")
    b = xi_bartholdi(ctx, z, u, q, route="det")
    return abs(a - b)


# --- Ihara completion from the spectral distribution -----------------------

def _step_integral(F: SpectralCDF, g: complex) -> complex:
    """``int_{-d}^{d} F/(g - lambda) dlambda`` for a step distribution, in closed form."""
    atoms = np.unique(F.measure.atoms)
    cum = np.array([F(a) for a in atoms])
    ends = np.append(atoms[1:], F.d)
    keep = ends > atoms
    a, b, c = atoms[keep], ends[keep], cum[keep]
    return complex(np.sum(c * (np.log(g - a) - np.log(g - b))))


def _semicircle_integral(fn: Callable, c: float, r: float, side: int) -> tuple[complex, float]:
    """``int fn`` over the half circle from ``c - r`` to ``c + r`` on the ``side`` of the axis."""
    def path(t):
        e = np.exp(1j * side * (math.pi - t))
        return c + r * e, -1j * side * r * e

    def re(t):
        lam, dl = path(t)
        return (fn(lam) * dl).real

    def im(t):
        lam, dl = path(t)
        return (fn(lam) * dl).imag

    a, ea = integrate.quad(re, 0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    b, eb = integrate.quad(im, 0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return complex(a, b), float(math.hypot(ea, eb))


def _real_integral(fn: Callable, a: float, b: float, points=()) -> tuple[complex, float]:
    if b <= a:
        return 0j, 0.0
    kw = dict(epsabs=1e-13, epsrel=1e-12, limit=500)
    pts = [p for p in points if a < p < b]
    if pts:
        kw["points"] = pts
    re, ea = integrate.quad(lambda x: complex(fn(x)).real, a, b, **kw)
    im, eb = integrate.quad(lambda x: complex(fn(x)).imag, a, b, **kw)
    return complex(re, im), float(math.hypot(ea, eb))


def xi_ihara_spectral(F: SpectralCDF, z: complex, q: int, band: float = DEFAULT_BAND,
                      side: int | None = None, flat_tol: float = 1e-12) -> tuple[complex, float]:
    """``exp(-int_{-d}^{d} z F / (1 + q z^2 - lambda z) dlambda)`` with an error estimate.

    Off the support the integral is taken as it stands.  When the pole
    ``g = 1/z + q z`` sits on the real axis inside an interval where ``F``
    is constant, the segment around it is replaced by a half circle; the
    default side continues from inside the disc ``|z| < 1/sqrt(q)``.
    """
    z = complex(z)
    if z == 0:
        return 1 + 0j, 0.0
    g = 1 / z + q * z
    lo = F.support_min()
    on_axis = abs(g.imag) <= band and lo - band <= g.real <= F.d + band
    if not on_axis:
        if F.kind == "step":
            return cmath.exp(-_step_integral(F, g)), 1e-15
        val, err = _real_integral(lambda x: F(x) / (g - x), -F.d, F.d, _breakpoints(F))
        return cmath.exp(-val), abs(cmath.exp(-val)) * err
    x = g.real
    piece = hole_extension_applicable(F, flat_tol, q, containing=x)
    if piece is None:
        raise SingularIntegrand(f"pole at lambda = {x:.6g} lies on the support of dF")
    a, b = piece
    r = 0.5 * min(x - a, b - x)
    if r <= band:
        raise SingularIntegrand(f"pole at lambda = {x:.6g} too close to the edge of a flat piece")
    if side is None:
        if z.imag == 0:
            raise SingularIntegrand("real z has no continuation side")
        side = 1 if z.imag > 0 else -1
    const = float(F(x))
    left, e1 = _real_integral(lambda t: F(t) / (g - t), -F.d, x - r, _breakpoints(F))
    right, e2 = _real_integral(lambda t: F(t) / (g - t), x + r, F.d, _breakpoints(F))
    arc, e3 = _semicircle_integral(lambda lam: const / (g - lam), x, r, side)
    val = left + arc + right
    out = cmath.exp(-val)
    return out, abs(out) * (e1 + e2 + e3)


def _breakpoints(F: SpectralCDF):
    if F.kind == "step":
        return list(np.unique(F.measure.atoms))
    return list(F.band_edges)


def hole_extension_applicable(F: SpectralCDF, tol: float = 1e-12, q: int = 2,
                              containing: float | None = None):
    """Largest open interval inside ``(-2 sqrt q, 2 sqrt q)`` on which ``F`` is flat.

    Flat means increments below ``tol``.  With ``containing`` set, only the
    flat interval around that point is considered.  Returns ``None`` if
    there is none.
    """
    lim = 2 * math.sqrt(q)
    if F.kind == "step":
        atoms = F.measure.atoms[F.measure.weights >= tol]
        cuts = np.unique(np.concatenate([[-lim], atoms[(atoms > -lim) & (atoms < lim)], [lim]]))
        pieces = [(float(a), float(b)) for a, b in zip(cuts[:-1], cuts[1:])]
    else:
        grid = np.linspace(-lim, lim, 8001)
        vals = F(grid)
        flat = np.diff(vals) < tol
        pieces, start = [], None
        for k, f in enumerate(flat):
            if f and start is None:
                start = k
            if (not f or k == len(flat) - 1) and start is not None:
                end = k + 1 if f else k
                if end > start:
                    pieces.append((float(grid[start]), float(grid[end])))
                start = None
    if containing is not None:
        pieces = [p for p in pieces if p[0] < containing < p[1]]
    if not pieces:
        return None
    return max(pieces, key=lambda p: p[1] - p[0])


def contour_xi(phi: Callable[[complex], complex], sigma: int, corner: int, eps: float,
               z: complex, q: int, d: float, F: Callable | None = None, tol: float = 1e-8,
               band: float = DEFAULT_BAND) -> complex:
    """``exp(-int_Gamma z phi / (1 + q z^2 - lambda z) dlambda)``.

    ``Gamma`` runs along ``[-d, d]`` but detours around ``2 corner sqrt(q)``
    on the half circle of radius ``eps`` in ``{sigma Im lambda >= 0}``.
    When ``F`` is given, ``phi`` is compared with it on the real segments.
    Only ``q >= 2`` is supported.
    """
    if q < 2:
        raise DomainError("the contour extension needs q >= 2")
    if sigma not in (1, -1) or corner not in (1, -1):
        raise ZetaError("sigma and corner must be +1 or -1")
    c = 2 * corner * math.sqrt(q)
    if not (-d < c - eps and c + eps < d):
        raise DomainError("the half circle must fit inside [-d, d]")
    z = complex(z)
    if z == 0:
        return 1 + 0j
    if F is not None:
        xs = np.concatenate([np.linspace(-d, c - eps, 200), np.linspace(c + eps, d, 200)])
        diff = np.max(np.abs(np.array([complex(phi(x)) for x in xs]) - np.asarray(F(xs))))
        if diff > tol:
            raise AnalyticityViolation(f"phi differs from F by {diff:.3e} on the real segments")
    g = 1 / z + q * z
    on_segment = abs(g.imag) <= band and -d <= g.real <= d and abs(g.real - c) >= eps
    on_arc = abs(abs(g - c) - eps) <= band and sigma * g.imag >= -band
    if on_segment or on_arc:
        raise SingularIntegrand(f"g = {g} lies on the contour")
    fn = lambda lam: phi(lam) / (g - lam)
    left, _ = _real_integral(fn, -d, c - eps)
    arc, _ = _semicircle_integral(lambda lam: complex(phi(lam)) / (g - lam), c, eps, sigma)
    right, _ = _real_integral(fn, c + eps, d)
    return cmath.exp(-(left + arc + right))


def straight_xi(phi: Callable, z: complex, q: int, d: float) -> complex:
    """The same integral taken along the real segment ``[-d, d]``."""
    z = complex(z)
    if z == 0:
        return 1 + 0j
    g = 1 / z + q * z
    if abs(g.imag) <= DEFAULT_BAND and -d <= g.real <= d:
        raise SingularIntegrand(f"g = {g} lies on [-d, d]")
    val, _ = _real_integral(lambda lam: phi(lam) / (g - lam), -d, d)
    return cmath.exp(-val)


# --- the lattice Z (closed forms) ------------------------------------------

def _clair_g(z: complex, u: complex, band: float) -> tuple[complex, complex]:
    z, u = complex(z), complex(u)
    a = 1 + (1 - u * u) * z * z
    if z != 0:
        g = a / z
        if abs(g.imag) <= band and abs(g.real) <= 2 + band:
            raise DomainError(f"(z, u) = ({z}, {u}) lies in the singular band of the lattice Z")
    return a, z


def clair_inverse_zeta(z: complex, u: complex = 0, band: float = DEFAULT_BAND) -> complex:
    """``1/Z`` for the integer lattice: ``(a/2)(1 + sqrt(1 - 4 z^2 / a^2))``, ``a = 1 + (1-u^2) z^2``.

    The principal square root is analytic off the singular set and equals
    ``+1`` at ``z = 0``.
    """
    a, z = _clair_g(z, u, band)
    return 0.5 * a * (1 + cmath.sqrt(1 - 4 * z * z / (a * a)))


def clair_zeta(z: complex, u: complex = 0, band: float = DEFAULT_BAND) -> complex:
    return 1 / clair_inverse_zeta(z, u, band)


def clair_xi(z: complex, u: complex = 0, band: float = DEFAULT_BAND) -> complex:
    """``(1 - 2z + (1-u^2) z^2) Z`` (no power prefactor since ``q = 1``)."""
    z, u = complex(z), complex(u)
    return (1 - 2 * z + (1 - u * u) * z * z) * clair_zeta(z, u, band)


def warn_near_omega(z: complex, u: complex, params: RegionParams, factor: float = 1e3) -> None:
    """Emit a warning when ``(z, u)`` is within ``factor`` bands of ``Omega``."""
    wide = RegionParams(params.d, params.q, u, params.band * factor)
    if omega_membership(z, u, wide):
        warnings.warn(f"(z, u) = ({z}, {u}) is close to the singular set", RuntimeWarning,
                      stacklevel=2)
