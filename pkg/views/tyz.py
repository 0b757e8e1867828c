# views/tyz.py
import click
import numpy as np

from models import HartogsParams, HartogsPoint
from utils.hartogs import sample_hartogs_interior
from utils.quadrature import radial_rule
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
from utils.tyz import (
    DEGREE_CUTOFF,
    DEGREE_CUTOFF_MC,
    kempf_distortion,
    rank2_cross_check,
    rawnsley_oracle,
    smallest_admissible,
    tyz_coefficients,
)

RESIDUAL_TOL = 1e-8
A0_TOL = 1e-8
ORACLE_RTOL = 1e-2


def _m_grid(text):
    if not text:
        return None
    values = parse_floats(text, "--m-grid")
    if any(v != int(v) for v in values):
        raise click.BadParameter("m values must be integers", param_hint="--m-grid")
    return [int(v) for v in values]


@click.command("tyz")
@click.option("--base", type=DOMAIN, required=True, help="Base domain, e.g. typeI:1,1.")
@click.option("--mu", type=click.FloatRange(min=0.0, min_open=True), required=True)
@click.option("--d0", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--m", "ms", type=click.IntRange(min=1), multiple=True,
              help="Weights to evaluate (default: smallest admissible).")
@click.option("--point", default=None, help="z then w coordinates: re,im pairs or real parts (default 0).")
@click.option("--m-grid", default=None, help="Interpolation nodes (d+d0+1 distinct integers).")
@click.option("--oracle", is_flag=True, help="Compare with the orthonormal-basis sum.")
@click.option("--cross-check", is_flag=True, help="Monte Carlo oracle at the origin with batch stderr (reported only).")
@click.option("--degree-cutoff", type=click.IntRange(min=0), default=None,
              help=f"Oracle monomial degree (default {DEGREE_CUTOFF} radial, {DEGREE_CUTOFF_MC} Monte Carlo).")
@quad_option
@common_options()
def tyz(base, mu, d0, ms, point, m_grid, oracle, cross_check, degree_cutoff, quad,
        seed, samples, fd_step, richardson, out, tol):
    """Kempf distortion T_m from the Gamma-ratio formula and its exact TYZ coefficients."""
    stencil = make_stencil(fd_step, richardson)
    grid = _m_grid(m_grid)
    coords = parse_point(point, base.dim + d0) if point else np.zeros(base.dim + d0, dtype=complex)
    quad = resolve_quad(quad, base)
    if degree_cutoff is None:
        degree_cutoff = DEGREE_CUTOFF if quad == "radial" else DEGREE_CUTOFF_MC

    def body(report):
        params = HartogsParams(base, mu, d0)
        v = HartogsPoint.from_coords(coords, base.dim)
        weights = list(ms) or [smallest_admissible(params)]

        dist = tyz_coefficients(params, v, grid)
        report.check("tyz.residual", dist.interpolation_residual, 0.0, RESIDUAL_TOL)
        report.check("tyz.a0", dist.coefficients[0], 1.0, A0_TOL, relative=True)
        report.add_data("a", dist.coefficients)
        report.add_data("distortion", dist.to_dict())

        values = {m: kempf_distortion(params, m, v) for m in weights}
        report.add_data("values", {str(m): t for m, t in values.items()})
        if len(values) == 1:
            report.add_data("value", next(iter(values.values())))
        for m, t in values.items():
            report.check(f"tyz.polynomial.m{m}", float(np.polyval(dist.coefficients, m)), t,
                         RESIDUAL_TOL, relative=True)

        if oracle:
            oracle_values = {}
            for m in weights:
                if quad == "radial":
                    nodes = radial_rule(base, 2 * degree_cutoff + m + 2, fiber=(mu, d0))
                else:
                    nodes = sample_hartogs_interior(params, samples, seed)
                o = rawnsley_oracle(params, m, v, degree_cutoff, nodes, stencil)
                oracle_values[str(m)] = o
                report.check(f"oracle.m{m}", o, values[m], ORACLE_RTOL, relative=True, gated=quad == "radial")
            report.add_data("oracle", oracle_values)

        if cross_check:
            results = {}
            for m in weights:
                res = rank2_cross_check(params, m, samples=samples, seed=seed, stencil=stencil)
                results[str(m)] = res
                report.check(f"cross_check.m{m}", res["ratio"], 1.0, 3 * res["stderr"], gated=False)
            report.add_data("cross_check", results)

    params = {"base": str(base.kind), "mu": mu, "d0": d0, "m": list(ms),
              "point": coords, "m_grid": grid, "degree_cutoff": degree_cutoff, "quad": quad,
              "oracle": oracle, "cross_check": cross_check}
    if oracle or cross_check:
        params["samples"] = samples
    run_report("tyz", params, body, seed=seed, tol=tol, out=out)
