# views/geometry.py
import click
import numpy as np

from models import HartogsParams
from utils.calculus import (
    ball_det_constant,
    boundary_constant_residual,
    boundary_density_A,
    boundary_density_cofactor,
    det_identity_residual,
    nominal_det_constant,
)
from utils.domains import make_domain, parse_kind, sample_interior
from utils.hartogs import boundary_constant_report
from utils.report import DOMAIN, common_options, make_stencil, run_report

# ---- Default configurations ----------------------------------------------------
DEFAULT_BASES = ("typeI:1,1", "typeI:1,2", "typeI:2,2", "typeII:2", "typeIV:3")
DEFAULT_MUS = (0.5, 1.0, 2.0)
MIN_NORM = 0.1

DET_TOL = 1e-4
CONSTANT_TOL = 1e-4
DISK_A_TOL = 1e-5
COFACTOR_TOL = 1e-8
PRINTED_TOL = 1e-6


def _configs(bases, mus):
    specs = list(bases) or [make_domain(parse_kind(k)) for k in DEFAULT_BASES]
    return [(spec, mu) for spec in specs for mu in (mus or DEFAULT_MUS)]


def _tag(spec, mu) -> str:
    return f"{spec.kind}.mu{mu:g}"


def _base_options(f):
    f = click.option("--min-norm", type=click.FloatRange(0.0, 1.0, max_open=True), default=MIN_NORM,
                     show_default=True, help="Sample only where N > this value.")(f)
    f = click.option("--mu", type=click.FloatRange(min=0.0, min_open=True), multiple=True,
                     help="Weight exponents (default 0.5, 1, 2).")(f)
    f = click.option("--base", type=DOMAIN, multiple=True, help="Base domains (default: five calibration kinds).")(f)
    return f


@click.command("verify-metric")
@_base_options
@common_options(samples=100)
def verify_metric(base, mu, min_norm, seed, samples, fd_step, richardson, out, tol):
    """det(g_Ω)·N^γ is constant on Ω; on balls it equals (μ/2)^d."""
    stencil = make_stencil(fd_step, richardson)
    configs = _configs(base, mu)

    def body(report):
        for spec, m in configs:
            pts = sample_interior(spec, samples, seed, min_norm=min_norm)
            constant, dev = det_identity_residual(spec, m, pts, stencil)
            tag = _tag(spec, m)
            report.check(f"det_identity.{tag}", dev, 0.0, DET_TOL)
            nominal = nominal_det_constant(spec, m)
            entry = {"constant": constant, "deviation": dev, "nominal": nominal,
                     "nominal_discrepancy": constant / nominal}
            if spec.is_ball:
                exact = ball_det_constant(spec, m)
                report.check(f"det_constant.{tag}", constant, exact, CONSTANT_TOL, relative=True)
                entry["exact"] = exact
            report.add_data(tag, entry)

    params = {"bases": sorted({str(s.kind) for s, _ in configs}), "mus": sorted({m for _, m in configs}),
              "samples": samples, "min_norm": min_norm, "fd_step": stencil.step, "richardson": stencil.richardson}
    run_report("verify-metric", params, body, seed=seed, tol=tol, out=out)


@click.command("verify-volume-form")
@_base_options
@common_options(samples=100)
def verify_volume_form(base, mu, min_norm, seed, samples, fd_step, richardson, out, tol):
    """A(z)·N^{γ−μ(d+1)} is constant on Ω; the cofactor form agrees; the nominal
    contact constant is reported with its discrepancy factor."""
    stencil = make_stencil(fd_step, richardson)
    configs = _configs(base, mu)

    def body(report):
        for spec, m in configs:
            pts = sample_interior(spec, samples, seed, min_norm=min_norm)
            tag = _tag(spec, m)
            constant, dev = boundary_constant_residual(spec, m, pts, stencil)
            report.check(f"volume_form.{tag}", dev, 0.0, DET_TOL)

            A = np.asarray(boundary_density_A(spec, m, pts.points, stencil))
            cof = np.asarray(boundary_density_cofactor(spec, m, pts.points, stencil))
            report.check(f"cofactor.{tag}", float(np.max(np.abs(cof / A - 1.0))), 0.0, COFACTOR_TOL)
            if spec.dim == 1 and m == 1:
                report.check(f"disk_unit_density.{tag}", float(np.max(np.abs(A - 1.0))), 0.0, DISK_A_TOL)

            contact = boundary_constant_report(HartogsParams(spec, m, 1), pts, stencil)
            report.check(f"nominal_contact_constant.{tag}", contact["measured"], contact["nominal"],
                         PRINTED_TOL, relative=True, gated=False)
            report.add_data(tag, {"constant": constant, "deviation": dev, "contact": contact})

    params = {"bases": sorted({str(s.kind) for s, _ in configs}), "mus": sorted({m for _, m in configs}),
              "samples": samples, "min_norm": min_norm, "fd_step": stencil.step, "richardson": stencil.richardson}
    run_report("verify-volume-form", params, body, seed=seed, tol=tol, out=out)
