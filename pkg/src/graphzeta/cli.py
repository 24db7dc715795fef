"""Command line interface: ``graphzeta <command> [options]``.

Every command writes one JSON document (or CSV table) to stdout or
``--output``.  Errors are reported as a JSON object on stderr with exit
status 2 (domain and validation errors) or 3 (exhausted budgets).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .builders import (
    FIXTURES,
    LATTICES,
    PeriodicSpec,
    gasket_exhaustion,
    periodic_lattice,
)
from .cycles import default_budget
from .errors import BadParameter, ZetaError
from .functional import (
    clair_zeta,
    g_and_psi,
    omega_disconnection_oracle,
    omega_q_curve,
    omega_tilde_q_curve,
    omega_w_curve,
    omega_w_disconnects,
    series_radius,
    xi_bartholdi,
)
from .graph import read_edge_list
from .operators import FiniteContext, alpha_bound, tn_sequence
from .spectral import spectral_cdf
from .zeta import (
    bartholdi_pencil,
    continued_log1p,
    det_formula_rhs,
    euler_characteristic,
    floquet_log_det,
    log_zeta_series,
    verify_det_formula,
    zeta_eval,
)

SCHEMA = "graphzeta/1"
GOLDEN = (math.sqrt(5) - 1) / 2

FIXTURE_INFO = {
    "C4": "cycle on 4 vertices (finite)",
    "C5": "cycle on 5 vertices (finite)",
    "K4": "complete graph on 4 vertices (finite, 3-regular)",
    "petersen": "Petersen graph (finite, 3-regular)",
    "Z": "integer lattice, one vertex per cell (periodic, rank 1)",
    "ladder": "ladder Z x {0,1} (periodic, rank 1)",
    "Z2": "square lattice (periodic, rank 2)",
    "gasket": "one-sided Sierpinski gasket exhaustion (self-similar, --level)",
    "clair": "integer lattice, closed-form Bartholdi zeta",
}


def parse_complex(text: str) -> complex:
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise BadParameter(f"cannot parse complex number {text!r}") from exc


def cjson(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


# --- contexts --------------------------------------------------------------

def build_context(args, propagation: int = 0):
    """Trace context from the graph-source options."""
    if args.edges:
        return FiniteContext(read_edge_list(args.edges))
    if args.lattice_json:
        with open(args.lattice_json) as fh:
            spec = PeriodicSpec.from_json(fh.read())
        return periodic_lattice(spec, args.radius or propagation + 1)
    name = args.fixture
    if name in FIXTURES:
        return FiniteContext(FIXTURES[name]())
    if name in LATTICES:
        return periodic_lattice(LATTICES[name], args.radius or propagation + 1)
    if name == "gasket":
        return gasket_exhaustion(args.level)
    raise BadParameter(f"unknown fixture {name!r}; see 'graphzeta fixtures'")


def add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph source")
    g.add_argument("--fixture", default="K4", help="named fixture (default K4)")
    g.add_argument("--edges", help="edge list file, one 'u v' pair per line")
    g.add_argument("--lattice-json", help="periodic graph description in JSON")
    g.add_argument("--level", type=int, default=5, help="gasket level")
    g.add_argument("--radius", type=int, help="periodic window radius (default: as needed)")


def add_output(p: argparse.ArgumentParser, csv_ok: bool = True) -> None:
    p.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


# --- commands --------------------------------------------------------------

def cmd_series(args):
    u = parse_complex(args.u)
    ctx = build_context(args, args.M)
    seq = tn_sequence(ctx, u, args.M)
    s = log_zeta_series(ctx, u, args.M)
    rows = [{"m": m, "N": cjson(seq.N[m]), "t": cjson(seq.t[m]), "coeff": cjson(s.coeffs[m])}
            for m in range(1, args.M + 1)]
    prov = {"context": ctx.describe(), "u": cjson(u), "M": args.M, "alpha": s.alpha,
            "radius": s.radius}
    header = ["m", "N_re", "N_im", "t_re", "t_im", "coeff_re", "coeff_im"]
    table = [[r["m"], *r["N"], *r["t"], *r["coeff"]] for r in rows]
    return {"coefficients": rows, "radius": s.radius}, prov, (header, table)


def _eval_det(ctx, u, z):
    if ctx.kind == "periodic":
        chi = euler_characteristic(ctx).value
        pref = -chi * continued_log1p(-(1 - u) ** 2 * z * z)
        pen = bartholdi_pencil(u)
        fine = np.exp(pref + floquet_log_det(ctx, pen, z))
        coarse = np.exp(pref + floquet_log_det(ctx, pen, z, grid=1024 if ctx.spec.rank == 1 else 48))
        return 1 / fine, abs(1 / fine - 1 / coarse), "floquet determinant"
    a = det_formula_rhs(ctx, u, z)
    b = det_formula_rhs(ctx, u, z, method="integral")
    return 1 / a, abs(1 / a - 1 / b), "determinant formula"


def cmd_eval(args):
    u, z = parse_complex(args.u), parse_complex(args.z)
    if args.fixture == "clair" and not (args.edges or args.lattice_json):
        value = clair_zeta(z, u)
        prov = {"context": {"kind": "closed_form", "graph": "Z"}, "branch": "principal sqrt"}
        return {"value": cjson(value), "error_bound": 0.0, "route": "closed form"}, prov, None
    ctx = build_context(args, args.M)
    alpha = alpha_bound(ctx.d, u).alpha
    if abs(z) < 1 / alpha:
        s = log_zeta_series(ctx, u, args.M)
        val = zeta_eval(s, z)
        result = {"value": cjson(val.value), "error_bound": val.error_bound, "route": "series"}
    else:
        value, err, route = _eval_det(ctx, u, z)
        result = {"value": cjson(value), "error_bound": err, "route": route}
    prov = {"context": ctx.describe(), "u": cjson(u), "z": cjson(z), "M": args.M,
            "alpha": alpha, "branch": "logarithm continued along the segment [0, z]"}
    return result, prov, None


def sample_disc(radius: float, count: int) -> list[complex]:
    """Deterministic points spread over the disc of the given radius."""
    return [radius * math.sqrt((k + 0.5) / count) * complex(math.cos(2 * math.pi * GOLDEN * k),
                                                               math.sin(2 * math.pi * GOLDEN * k))
            for k in range(count)]


def cmd_verify_det(args):
    us = [parse_complex(x) for x in (args.u or ["0"])]
    ctx = build_context(args, args.M)
    rows = []
    for u in us:
        r = 0.95 / (2 * alpha_bound(ctx.d, u).alpha)
        for z in sample_disc(r, args.zgrid):
            rows.append({"u": cjson(u), "z": cjson(z), "residual": verify_det_formula(ctx, u, z, args.M)})
    worst = max(r["residual"] for r in rows)
    prov = {"context": ctx.describe(), "M": args.M, "zgrid": args.zgrid,
            "sampling": "golden-angle points in 0.95/(2 alpha)"}
    table = [[*r["u"], *r["z"], r["residual"]] for r in rows]
    return ({"rows": rows, "max_residual": worst}, prov,
            (["u_re", "u_im", "z_re", "z_im", "residual"], table))


def cmd_verify_funceq(args):
    us = [parse_complex(x) for x in (args.u or ["0"])]
    ctx = build_context(args)
    q = int(ctx.d) - 1
    rows = []
    for u in us:
        for z in sample_disc(0.95 * series_radius(ctx, u), args.zgrid):
            _, pz = g_and_psi(z, u, q)
            a = xi_bartholdi(ctx, z, u, q)
            b = xi_bartholdi(ctx, pz, u, q)
            rows.append({"u": cjson(u), "z": cjson(z), "psi_z": cjson(pz), "xi": cjson(a),
                         "difference": abs(a - b)})
    worst = max(r["difference"] for r in rows)
    prov = {"context": ctx.describe(), "q": q, "zgrid": args.zgrid,
            "routes": "series at z, determinant (g - (q+1))/det(gI - A) at psi(z)"}
    table = [[*r["u"], *r["z"], *r["psi_z"], r["difference"]] for r in rows]
    return ({"rows": rows, "max_difference": worst}, prov,
            (["u_re", "u_im", "z_re", "z_im", "psi_re", "psi_im", "difference"], table))


def cmd_region(args):
    d = args.d
    if args.kind == "omega_w":
        w = parse_complex(args.w)
        branches = omega_w_curve(w, d, args.samples)
        extra = {"w": cjson(w), "disconnects": omega_w_disconnects(w, d)}
        if args.oracle_grid:
            extra["oracle_disconnects"] = omega_disconnection_oracle(w, d, args.oracle_grid)
    elif args.kind == "omega_q":
        u = parse_complex(args.u)
        branches = omega_q_curve(args.q, d, u, args.samples)
        w = (1 - u) * (args.q + u)
        extra = {"q": args.q, "u": cjson(u), "w": cjson(w), "disconnects": omega_w_disconnects(w, d)}
    else:
        branches = omega_tilde_q_curve(args.q, d, args.eps, args.sigma, args.corner, args.samples)
        extra = {"q": args.q, "eps": args.eps, "sigma": args.sigma, "corner": args.corner}
    pts = [(b, complex(z)) for b, br in enumerate(branches) for z in br if np.isfinite(z)
           and abs(z.real) <= args.box and abs(z.imag) <= args.box]
    prov = {"kind": args.kind, "d": d, "samples": args.samples, "box": args.box}
    result = dict(extra, points=[[b, z.real, z.imag] for b, z in pts])
    return result, prov, (["branch", "x", "y"], [[b, z.real, z.imag] for b, z in pts])


def cmd_spectrum(args):
    ctx = build_context(args, 1)
    F = spectral_cdf(ctx, args.grid, args.points)
    prov = {"context": ctx.describe(), "grid": args.grid, "points": args.points, "kind": F.kind}
    rows = [[float(x), float(y)] for x, y in zip(F.grid, F.values)]
    result = {"lambda_F": rows, "kind": F.kind}
    if F.delta is not None:
        result["delta_previous_level"] = F.delta
    return result, prov, (["lambda", "F"], rows)


def cmd_fixtures(args):
    rows = [[k, v] for k, v in FIXTURE_INFO.items()]
    return {"fixtures": FIXTURE_INFO}, {}, (["name", "description"], rows)


# --- plumbing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphzeta", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", help="coefficients N_m, t_m and N_m/m of log Z")
    add_source(p)
    p.add_argument("--u", default="0")
    p.add_argument("--M", type=int, default=20)
    add_output(p)
    p.set_defaults(fn=cmd_series)

    p = sub.add_parser("eval", help="Z(z, u) with an error bound")
    add_source(p)
    p.add_argument("--z", required=True)
    p.add_argument("--u", default="0")
    p.add_argument("--M", type=int, default=60)
    add_output(p, csv_ok=False)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify-det", help="residuals of the determinant formula")
    add_source(p)
    p.add_argument("--u", action="append", help="repeatable")
    p.add_argument("--M", type=int, default=30)
    p.add_argument("--zgrid", type=int, default=20)
    add_output(p)
    p.set_defaults(fn=cmd_verify_det)

    p = sub.add_parser("verify-funceq", help="|xi(z) - xi(psi(z))| on sample points")
    add_source(p)
    p.add_argument("--u", action="append", help="repeatable")
    p.add_argument("--zgrid", type=int, default=20)
    add_output(p)
    p.set_defaults(fn=cmd_verify_funceq)

    p = sub.add_parser("region", help="point clouds of the singular sets")
    p.add_argument("--kind", choices=["omega_q", "omega_w", "omega_tilde"], default="omega_q")
    p.add_argument("--d", type=float, default=3.0)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--u", default="0")
    p.add_argument("--w", default="0.5")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--sigma", type=int, choices=[-1, 1], default=1)
    p.add_argument("--corner", type=int, choices=[-1, 1], default=1)
    p.add_argument("--samples", type=int, default=401)
    p.add_argument("--box", type=float, default=10.0, help="keep points with |x|, |y| <= box")
    p.add_argument("--oracle-grid", type=int, help="also run the flood-fill oracle")
    add_output(p)
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("spectrum", help="spectral distribution function (lambda, F)")
    add_source(p)
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--points", type=int, default=401)
    add_output(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("fixtures", help="list named fixtures")
    add_output(p)
    p.set_defaults(fn=cmd_fixtures)
    return parser


def render(args, result, prov, table) -> str:
    if args.format == "csv":
        if table is None:
            raise BadParameter(f"{args.command} has no CSV form")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table[0])
        for row in table[1]:
            w.writerow([f"{x:.15g}" if isinstance(x, float) else x for x in row])
        return buf.getvalue()
    doc = {"schema": SCHEMA, "command": args.command,
           "provenance": dict(prov, version=__version__, budget=default_budget()),
           "result": result}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = render(args, *args.fn(args))
    except ZetaError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return exc.exit_code
    except (OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
