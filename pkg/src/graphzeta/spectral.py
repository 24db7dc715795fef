"""Spectral distribution functions ``F(lambda) = tau(E(lambda))`` and Stieltjes integrals."""

from __future__ import annotations

import cmath
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import SingularIntegrand, ZetaError
from .operators import TraceContext
from .zeta import continue_log

STEP_TOL = 1e-12


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms of the (normalised) spectral measure of ``A``.

    Exact eigenvalues for finite windows; torus quadrature nodes (fibre
    eigenvalues, trapezoid weights) for periodic graphs.
    """

    atoms: np.ndarray
    weights: np.ndarray
    d: float
    exact: bool


def floquet_bands(spec, grid: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted fibre eigenvalues on a uniform torus grid: (thetas, bands[point, k])."""
    thetas = 2 * np.pi * np.arange(grid) / grid
    if spec.rank == 1:
        pts = thetas[:, None]
    else:
        pts = np.stack(np.meshgrid(thetas, thetas, indexing="ij"), -1).reshape(-1, 2)
    bands = np.array([np.linalg.eigvalsh(spec.fiber(p)) for p in pts])
    return pts, bands


def spectral_measure(ctx: TraceContext, grid: int = 2048) -> SpectralMeasure:
    if ctx.kind == "periodic":
        g = grid if ctx.spec.rank == 1 else max(16, int(round(grid ** 0.5)))
        _, bands = floquet_bands(ctx.spec, g)
        atoms = bands.ravel()
        return SpectralMeasure(atoms, np.full(atoms.size, 1.0 / atoms.size), float(ctx.d), False)
    A = ctx.adjacency(dtype=float).toarray()
    eig = np.linalg.eigvalsh(A)
    return SpectralMeasure(eig, np.full(eig.size, 1.0 / eig.size), float(ctx.d), True)


@dataclass(frozen=True)
class SpectralCDF:
    """Distribution function of the spectral measure on ``[-d, d]``.

    ``kind`` is ``"step"`` (finitely many atoms, exact) or ``"continuous"``
    (periodic graph; band functions interpolated by periodic cubic splines
    and sublevel sets measured from their roots).  ``grid``/``values``
    tabulate ``F`` for export; evaluation goes through ``__call__``.
    """

    kind: str
    d: float
    measure: SpectralMeasure
    grid: np.ndarray
    values: np.ndarray
    splines: tuple = field(default=(), repr=False)
    band_edges: tuple = ()
    delta: float | None = None

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind == "step":
            cum = np.concatenate([[0.0], np.cumsum(self.measure.weights)])
            # eigensolvers land atoms a few ulps off their exact values
            k = np.searchsorted(self.measure.atoms, lam + STEP_TOL * max(1.0, self.d), side="right")
            return np.clip(cum[k], 0.0, 1.0)
        flat = np.atleast_1d(lam).ravel()
        total = np.zeros(flat.shape)
        for pieces in self.splines:
            total += sum(piece.below(flat) for piece in pieces)
        out = np.clip(total / (2 * np.pi * len(self.splines)), 0.0, 1.0)
        out[flat < -self.d] = 0.0
        out[flat >= self.d] = 1.0
        return out.reshape(lam.shape) if lam.ndim else float(out[0])

    def support_min(self) -> float:
        return float(self.measure.atoms.min())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "F"])
            for x, y in zip(self.grid, self.values):
                w.writerow([f"{x:.12g}", f"{y:.12g}"])


class _MonotonePiece:
    """A monotone stretch ``[a, b]`` of a periodic band spline."""

    def __init__(self, sp: CubicSpline, a: float, b: float):
        self.sp, self.a, self.b = sp, a, b
        self.fa, self.fb = float(sp(a)), float(sp(b))
        self.increasing = self.fb >= self.fa

    def below(self, lam: np.ndarray) -> np.ndarray:
        """Length of ``{theta in [a, b] : band(theta) <= lam}``."""
        lo = np.full(lam.shape, self.a)
        hi = np.full(lam.shape, self.b)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            v = self.sp(mid)
            go_right = (v <= lam) if self.increasing else (v > lam)
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_right, hi, mid)
        root = 0.5 * (lo + hi)
        length = (root - self.a) if self.increasing else (self.b - root)
        vmin, vmax = min(self.fa, self.fb), max(self.fa, self.fb)
        length = np.where(lam >= vmax, self.b - self.a, length)
        return np.where(lam < vmin, 0.0, length)


def _monotone_pieces(sp: CubicSpline) -> list[_MonotonePiece]:
    lo, hi = sp.x[0], sp.x[-1]
    crit = np.asarray(sp.derivative().roots(extrapolate=False)).real
    cuts = np.unique(np.concatenate([[lo, hi], crit[(crit > lo) & (crit < hi)]]))
    return [_MonotonePiece(sp, a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def spectral_cdf(ctx: TraceContext, grid_size: int = 2048, points: int = 401) -> SpectralCDF:
    """``F`` for a context.

    Finite windows give the exact eigenvalue step function; periodic graphs
    of rank 1 give a continuous ``F`` from spline-interpolated bands; rank-2
    lattices fall back to the quadrature step function.  Self-similar
    contexts also report the sup-distance to the level ``n-1`` function.
    """
    if grid_size < 16:
        raise ZetaError("grid_size must be >= 16")
    meas = spectral_measure(ctx, grid_size)
    d = meas.d
    lam = np.linspace(-d, d, points)
    order = np.argsort(meas.atoms, kind="stable")
    meas = SpectralMeasure(meas.atoms[order], meas.weights[order], d, meas.exact)
    if ctx.kind == "periodic" and ctx.spec.rank == 1:
        thetas, bands = floquet_bands(ctx.spec, grid_size)
        x = np.concatenate([thetas[:, 0], [2 * np.pi]])
        splines = tuple(_monotone_pieces(CubicSpline(x, np.concatenate([b, b[:1]]),
                                                     bc_type="periodic"))
                        for b in bands.T)
        edges = tuple(sorted({float(bands[:, k].min()) for k in range(bands.shape[1])}
                             | {float(bands[:, k].max()) for k in range(bands.shape[1])}))
        F = SpectralCDF("continuous", d, meas, lam, np.zeros(points), splines, edges)
        return SpectralCDF("continuous", d, meas, lam, F(lam), splines, edges)
    F = SpectralCDF("step", d, meas, lam, np.zeros(points))
    delta = None
    if ctx.kind == "self_similar" and ctx.level > 1:
        coarse = spectral_cdf(ctx.coarser(), grid_size, points)
        fine_vals = F(lam)
        delta = float(np.max(np.abs(fine_vals - coarse(lam))))
    return SpectralCDF("step", d, meas, lam, F(lam), delta=delta)


# --- Stieltjes log-integrals -------------------------------------------------

def _complex_quad(fn, a, b, points=None, epsabs=1e-13, epsrel=1e-12):
    kw = dict(epsabs=epsabs, epsrel=epsrel, limit=500)
    if points is not None and len(points):
        kw["points"] = [p for p in points if a < p < b]
    re, er = integrate.quad(lambda x: fn(x).real, a, b, **kw)
    im, ei = integrate.quad(lambda x: fn(x).imag, a, b, **kw)
    return complex(re, im), float(np.hypot(er, ei))


def _breakpoints(F: SpectralCDF):
    if F.kind == "step":
        pts = np.unique(np.round(F.measure.atoms, 12))
        return list(pts[(pts > -F.d) & (pts < F.d)])
    return [e for e in F.band_edges if -F.d < e < F.d]


def stieltjes_log(F: SpectralCDF, z: complex, q: int) -> complex:
    """``int log(1 + q z^2 - lambda z) dF`` with each log continued from ``z = 0``."""
    z = complex(z)
    atoms, weights = F.measure.atoms, F.measure.weights

    def fn(t):
        zz = t * z
        vals = 1 + q * zz * zz - atoms * zz
        if np.any(vals == 0):
            return np.full(atoms.shape, -np.inf), np.angle(vals)
        return np.log(np.abs(vals)), np.angle(vals)

    try:
        logs = continue_log(fn)
    except ZetaError as exc:
        raise SingularIntegrand(f"log argument vanishes on the support at z={z}") from exc
    return complex(np.dot(weights, logs))


def by_parts_log(F: SpectralCDF, z: complex, q: int) -> tuple[complex, float]:
    """``log(1 + q z^2 - d z) + int_{-d}^{d} z F / (1 + q z^2 - lambda z) dlambda``."""
    z = complex(z)
    a = 1 + q * z * z
    if z != 0:
        g = a / z
        if abs(g.imag) < 1e-12 and F.support_min() - 1e-12 <= g.real <= F.d:
            raise SingularIntegrand(f"integrand has a pole on the support at lambda={g.real:.6g}")
    integral, err = _complex_quad(lambda x: z * F(x) / (a - x * z), -F.d, F.d, _breakpoints(F))
    boundary = continue_log(lambda t: (np.array([np.log(abs(1 + q * (t * z) ** 2 - F.d * t * z))]),
                                       np.array([np.angle(1 + q * (t * z) ** 2 - F.d * t * z)])))[0]
    return complex(boundary) + integral, err


def stieltjes_log_det(F: SpectralCDF, z: complex, q: int, check: bool = True,
                      tol: float = 1e-8) -> complex:
    """``det_tau((1 + q z^2) I - z A)`` from the spectral distribution.

    The Stieltjes sum is the returned value; with ``check`` the
    integration-by-parts form is evaluated as well and a discrepancy above
    ``tol`` raises ``ArithmeticError``.
    """
    direct = cmath.exp(stieltjes_log(F, z, q))
    if check:
        parts, _ = by_parts_log(F, z, q)
        other = cmath.exp(parts)
        if abs(direct - other) > tol * max(1.0, abs(direct)):
            raise ArithmeticError(f"by-parts identity off by {abs(direct - other):.3e} at z={z}")
    return direct


def log_resolvent_det(measure: SpectralMeasure, g: complex) -> complex:
    """``int log(g - lambda) dF`` with principal logs.

    For real atoms of total mass one this is single valued and analytic on
    ``C \\ [-d, d]`` after exponentiation, and ``~ log g`` at infinity.
    """
    return complex(np.dot(measure.weights, np.log(complex(g) - measure.atoms)))
