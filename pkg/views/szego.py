# views/szego.py
import math

import click
import numpy as np

from models import HartogsParams, HartogsPoint
from utils.domains import generic_norm, make_domain, parse_kind, sample_interior
from utils.hardy import (
    CLOSED_FORM_ABOVE,
    SERIES_DEGREE,
    SERIES_DEGREE_MC,
    SERIES_M_CUTOFF,
    TAIL_RTOL,
    boundary_limit,
    default_b_coefficients,
    default_radial_grid,
    evaluate_szego,
    fit_b_coefficients,
    fit_log_term,
    fourier_inner_product,
    isometry_ratio,
    log_term_fit,
    planted_log_fixture,
    szego_closed,
)
from utils.hartogs import sample_boundary
from utils.report import (
    DOMAIN,
    common_options,
    make_stencil,
    parse_floats,
    parse_point,
    quad_option,
    resolve_quad,
    run_report,
)

SERIES_RTOL = 1e-6
LOGTERM_TOL = 1e-6
PLANTED_TOL = 1e-6
PLANTED_BETA = 0.1
BOUNDARY_LIMIT_TOL = 1e-4
ISOMETRY_RTOL = 0.02
TOTAL_MEASURE_RTOL = 0.01
FOURIER_SIGMAS = 3.0
FAMILY_SCALE = 0.5     # radial families start at half-way sampled base points

DEFAULT_SCAN_BASES = ("typeI:1,1", "typeI:1,2")
DEFAULT_SCAN_MUS = (1.0, 2.0)


def _log_term_ratio(fit, d: int) -> float:
    """|b̂| relative to a·t_min^{−(d+1)}."""
    t_min = min(fit.grid)
    return abs(fit.b_estimate) / (abs(fit.a_estimate) * t_min ** (-(d + 1)))


@click.command("szego")
@click.option("--base", type=DOMAIN, required=True)
@click.option("--mu", type=click.FloatRange(min=0.0, min_open=True), required=True)
@click.option("--point", required=True, help="z then w coordinates: re,im pairs or real parts.")
@click.option("--radial-grid", default=None, help="ρ values for the log-term fit (default: 24 geometric nodes).")
@click.option("--m-cutoff", type=click.IntRange(min=1), default=SERIES_M_CUTOFF, show_default=True)
@click.option("--degree-cutoff", type=click.IntRange(min=0), default=None,
              help=f"Base monomial degree (default {SERIES_DEGREE} on balls, {SERIES_DEGREE_MC} Monte Carlo).")
@quad_option
@common_options()
def szego(base, mu, point, radial_grid, m_cutoff, degree_cutoff, quad, seed, samples, fd_step, richardson, out, tol):
    """Szegő kernel of the disk bundle: truncated series, closed form and log-term fit.

    Series and closed form are compared as a gated check on ball bases with
    the radial rule; Monte Carlo Gram matrices only report the comparison.
    """
    coords = parse_point(point, base.dim + 1)
    grid = parse_floats(radial_grid, "--radial-grid") if radial_grid else None
    quad = resolve_quad(quad, base)
    if degree_cutoff is None:
        degree_cutoff = SERIES_DEGREE if quad == "radial" else SERIES_DEGREE_MC

    def body(report):
        params = HartogsParams(base, mu, 1)
        v = HartogsPoint.from_coords(coords, base.dim)
        if quad == "radial":
            nodes, b = None, default_b_coefficients(base, mu)
        else:
            nodes = sample_interior(base, samples, seed)
            b = fit_b_coefficients(base, mu, degree_cutoff=degree_cutoff, quad=nodes)
        report.add_data("b", list(b))
        x = float(v.w_norm2 / generic_norm(base, v.z) ** mu)
        report.add_data("x", x)
        if x <= CLOSED_FORM_ABOVE:
            ev = evaluate_szego(params, v, m_cutoff, degree_cutoff, quad=nodes, b=b)
            report.check("szego.series_vs_closed", ev.series_value, ev.closed_value, SERIES_RTOL, relative=True,
                         gated=quad == "radial")
            report.check("szego.tail", ev.tail_estimate, 0.0, TAIL_RTOL * abs(ev.series_value))
            report.add_data("series", ev.series_value)
            report.add_data("closed", ev.closed_value)
            report.add_data("tail", ev.tail_estimate)
        else:
            report.add_data("series", None)
            report.add_data("closed", szego_closed(params, v, b))
            report.add_data("tail", None)

        fit = log_term_fit(params, v.z, grid, b)
        report.check("logterm.b", _log_term_ratio(fit, base.dim), 0.0, LOGTERM_TOL)
        report.add_data("logterm", fit.to_dict())

    params = {"base": str(base.kind), "mu": mu, "point": coords, "radial_grid": grid,
              "m_cutoff": m_cutoff, "degree_cutoff": degree_cutoff, "quad": quad}
    if quad == "mc":
        params["samples"] = samples
    run_report("szego", params, body, seed=seed, tol=tol, out=out)


@click.command("logterm-scan")
@click.option("--base", type=DOMAIN, multiple=True, help="Base domains (default: disk and typeI:1,2).")
@click.option("--mu", type=click.FloatRange(min=0.0, min_open=True), multiple=True, help="Default 1, 2.")
@click.option("--families", type=click.IntRange(min=1), default=5, show_default=True,
              help="Radial families per configuration.")
@common_options()
def logterm_scan(base, mu, families, seed, samples, fd_step, richardson, out, tol):
    """Log-term verdict along several radial families, the planted-log detector
    check and the boundary limit of ρ^{d+1}·S."""
    specs = list(base) or [make_domain(parse_kind(k)) for k in DEFAULT_SCAN_BASES]
    mus = list(mu) or list(DEFAULT_SCAN_MUS)

    def body(report):
        for d in sorted({s.dim for s in specs}):
            t = np.geomspace(1e-3, 1e-1, 24)
            fit = fit_log_term(t, planted_log_fixture(d, beta=PLANTED_BETA)(t), d)
            report.check(f"planted.d{d}", fit.b_estimate, PLANTED_BETA, PLANTED_TOL)

        for spec in specs:
            zs = FAMILY_SCALE * sample_interior(spec, families, seed).points
            for m in mus:
                params = HartogsParams(spec, m, 1)
                b = default_b_coefficients(spec, m)
                tag = f"{spec.kind}.mu{m:g}"
                rows = []
                for i, z in enumerate(zs):
                    fit = log_term_fit(params, z, default_radial_grid(params, z), b)
                    report.check(f"logterm.{tag}.family{i}", _log_term_ratio(fit, spec.dim), 0.0, LOGTERM_TOL)
                    limit = boundary_limit(params, z, b=b)
                    report.check(f"boundary_limit.{tag}.family{i}", limit["max_rel_dev"], 0.0, BOUNDARY_LIMIT_TOL)
                    rows.append({"z": z, "logterm": fit.to_dict(), "limit": limit["values"][-1],
                                 "expected_limit": limit["expected"]})
                report.add_data(tag, {"b": list(b), "families": rows})

    params = {"bases": [str(s.kind) for s in specs], "mus": mus, "families": families}
    run_report("logterm-scan", params, body, seed=seed, tol=tol, out=out)


@click.command("isometry")
@click.option("--base", type=DOMAIN, default="typeI:1,1", show_default=True)
@click.option("--mu", type=click.FloatRange(min=0.0, min_open=True), default=1.0, show_default=True)
@click.option("--m", "ms", type=click.IntRange(min=0), multiple=True, help="Weights (default 3, 4, 5).")
@click.option("--power", "powers", type=click.IntRange(min=0), multiple=True,
              help="Sections s = z_1^k (default k = 0, 1, 2).")
@common_options(samples=100_000)
def isometry(base, mu, ms, powers, seed, samples, fd_step, richardson, out, tol):
    """Hat-map isometry ‖ŝ‖/‖s‖ over weights and sections, Fourier orthogonality
    of different weights and the total boundary measure."""
    stencil = make_stencil(fd_step, richardson)
    ms = list(ms) or [3, 4, 5]
    powers = list(powers) or [0, 1, 2]

    def section(k):
        return lambda z: np.asarray(z)[..., 0] ** k

    def body(report):
        params = HartogsParams(base, mu, 1)
        bs = sample_boundary(params, samples, seed, stencil)
        # independent base nodes, so both norms carry their own sampling error
        base_quad = sample_interior(base, samples, seed + 1)
        total = float(np.sum(bs.weights))
        report.add_data("total_measure", total)
        if base.dim == 1 and mu == 1:
            report.check("boundary.total_measure", total, 4 * math.pi ** 2, TOTAL_MEASURE_RTOL, relative=True)

        ratios = {}
        for m in ms:
            for k in powers:
                ratios[(m, k)] = isometry_ratio(base, mu, m, section(k), bs, base_quad, stencil)
        first = next(iter(ratios.values()))
        report.check("isometry.calibration", first, 1.0, ISOMETRY_RTOL, relative=True)
        for (m, k), r in ratios.items():
            report.check(f"isometry.m{m}.s{k}", r, first, ISOMETRY_RTOL, relative=True)
        report.add_data("ratios", {f"m{m}.s{k}": r for (m, k), r in ratios.items()})

        if len(ms) > 1:
            value, stderr = fourier_inner_product(base, mu, ms[0], section(powers[0]), ms[1], section(powers[0]), bs)
            report.check(f"fourier.m{ms[0]}_m{ms[1]}", abs(value), 0.0, FOURIER_SIGMAS * stderr)
            report.add_data("fourier", {"value": value, "stderr": stderr})

    params = {"base": str(base.kind), "mu": mu, "m": ms, "powers": powers, "samples": samples,
              "fd_step": stencil.step, "richardson": stencil.richardson}
    run_report("isometry", params, body, seed=seed, tol=tol, out=out)
