# utils/hartogs.py
"""The Cartan–Hartogs domain M = {(z, w) ∈ Ω × C^{d0} : ‖w‖² < N(z)^μ}."""
import logging
import math

import numpy as np

from models import BoundarySamples, HartogsParams, HartogsPoint, SampleSet, Stencil
from utils.calculus import fd_derivatives, boundary_density_A, fit_steps
from utils.domains import contains, generic_norm, raw_norm, rejection_sample, sample_interior
from utils.errors import OutsideDomainError, PreconditionError, ShapeError, UnsupportedError

log = logging.getLogger(__name__)


def _check_point(params: HartogsParams, v: HartogsPoint):
    if v.z.shape[-1] != params.base.dim or v.w.shape[-1] != params.d0:
        raise ShapeError(
            f"expected z of length {params.base.dim} and w of length {params.d0}, "
            f"got {v.z.shape[-1]} and {v.w.shape[-1]}"
        )


def _scalar(x):
    return x if np.ndim(x) else float(x)


def rho(params: HartogsParams, v: HartogsPoint):
    """Defining function N^μ(z) − ‖w‖²."""
    _check_point(params, v)
    if not np.all(contains(params.base, v.z)):
        raise OutsideDomainError(f"z outside the base domain {params.base.kind}")
    return _scalar(generic_norm(params.base, v.z) ** params.mu - v.w_norm2)


def hermitian_weight(params: HartogsParams, m: int, v: HartogsPoint):
    """h_m = ρ^m."""
    r = np.asarray(rho(params, v))
    if np.any(r <= 0):
        raise OutsideDomainError("hermitian weight needs ρ > 0")
    if m == 0:
        return _scalar(np.ones_like(r))
    return _scalar(r ** m)


def rho_function(params: HartogsParams):
    """ρ on joined coordinates (..., d + d0), clamped to 0 off the base positivity region."""
    d, mu = params.base.dim, params.mu

    def fun(u):
        N = np.maximum(raw_norm(params.base, u[..., :d]), 0.0)
        return N ** mu - np.sum(np.abs(u[..., d:]) ** 2, axis=-1)
    return fun


def metric_hartogs(params: HartogsParams, v: HartogsPoint, stencil: Stencil | None = None):
    """−½ ∂∂̄ log ρ over all d + d0 coordinates."""
    stencil = stencil or Stencil()
    r = np.asarray(rho(params, v))
    if np.any(r <= 0):
        raise OutsideDomainError("metric needs ρ > 0")
    fun = rho_function(params)
    coords = v.coords
    steps = fit_steps(fun, coords, stencil)
    _, H = fd_derivatives(fun, coords, stencil, take_log=True, steps=steps)
    return -0.5 * H


def volume_density(params: HartogsParams, v: HartogsPoint, stencil: Stencil | None = None):
    """Density of ω^n/n! against Lebesgue measure: 2^n det(metric_hartogs) = det(−∂∂̄ log ρ)."""
    g = metric_hartogs(params, v, stencil)
    return _scalar(2.0 ** params.n * np.linalg.det(g).real)


# ── Sampling ────────────────────────────────────────────────────────────────
def boundary_point(params: HartogsParams, z, theta) -> HartogsPoint:
    """(z, N^{μ/2} e^{iθ}) on the smooth boundary (d0 = 1)."""
    z = np.asarray(z, dtype=complex)
    N = generic_norm(params.base, z)
    w = (np.asarray(N) ** (params.mu / 2) * np.exp(1j * np.asarray(theta)))[..., None]
    return HartogsPoint(z, w)


def sample_boundary(params: HartogsParams, count: int, seed: int,
                    stencil: Stencil | None = None, min_norm: float = 0.0) -> BoundarySamples:
    """Seeded nodes on {‖w‖² = N^μ, z ∈ Ω}, weighted by the contact volume form.

    Weight = base Lebesgue weight · 2π · κ(z) with κ = 2^d A(z) measured from
    derivatives of N^μ.
    """
    if params.d0 != 1:
        raise UnsupportedError(f"boundary sampling needs d0 = 1, got {params.d0}")
    base = sample_interior(params.base, count, seed, min_norm=min_norm)
    theta = np.random.default_rng([seed, 1]).uniform(0.0, 2 * math.pi, count)
    kappa = 2.0 ** params.base.dim * np.asarray(boundary_density_A(params.base, params.mu, base.points, stencil))
    weights = base.weights * 2 * math.pi * kappa
    return BoundarySamples(params=params, base=base, theta=theta, weights=weights, kappa=kappa)


def boundary_nodes(samples: BoundarySamples) -> HartogsPoint:
    return boundary_point(samples.params, samples.z, samples.theta)


def boundary_sample_set(samples: BoundarySamples, normalized: bool = True) -> SampleSet:
    """Boundary nodes as a SampleSet over (z, w); ``normalized`` divides by 2π^{d+1}."""
    v = boundary_nodes(samples)
    scale = 2 * math.pi ** (samples.params.base.dim + 1) if normalized else 1.0
    return SampleSet(v.coords, samples.weights / scale, seed=samples.seed,
                     variance_hint=samples.base.variance_hint, kind="mc")


def sample_hartogs_interior(params: HartogsParams, count: int, seed: int) -> SampleSet:
    """Seeded uniform points of M with Lebesgue weights (|w_j| < 1 since N^μ <= 1)."""
    d = params.base.dim
    fun = rho_function(params)

    def accept(cand):
        return contains(params.base, cand[:, :d]) & (fun(cand) > 0)

    points, ratio, trials = rejection_sample(accept, params.n, count, seed, f"M over {params.base.kind}")
    box = math.pi ** params.n
    weights = np.full(count, box * ratio / count)
    return SampleSet(points, weights, seed=seed, variance_hint=box ** 2 * ratio * (1 - ratio) / trials)


# ── Boundary constant ───────────────────────────────────────────────────────
def nominal_boundary_constant(params: HartogsParams) -> float:
    """(2μ/γ)^d, the nominal constant of the contact volume form."""
    return (2 * params.mu / params.base.genus) ** params.base.dim


def boundary_constant_report(params: HartogsParams, samples: SampleSet, stencil: Stencil | None = None) -> dict:
    """Measured κ(z)·N^{γ − μ(d+1)} against the nominal constant."""
    if samples.dim != params.base.dim:
        raise PreconditionError("samples must live on the base domain")
    spec, mu = params.base, params.mu
    kappa = 2.0 ** spec.dim * np.asarray(boundary_density_A(spec, mu, samples.points, stencil))
    c = kappa * generic_norm(spec, samples.points) ** (spec.genus - mu * (spec.dim + 1))
    measured = math.fsum(c) / len(c)
    nominal = nominal_boundary_constant(params)
    report = {
        "measured": measured,
        "deviation": float(np.max(np.abs(c / measured - 1.0))),
        "nominal": nominal,
        "discrepancy": measured / nominal,
    }
    if abs(report["discrepancy"] - 1) > 1e-6:
        log.warning("%s μ=%g: boundary constant %.8g vs nominal %.8g (factor %.6g)",
                    spec.kind, mu, measured, nominal, report["discrepancy"])
    return report
