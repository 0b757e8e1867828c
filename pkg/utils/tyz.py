# utils/tyz.py
"""Finite TYZ expansion of the Kempf distortion on Cartan–Hartogs domains."""
import logging
import math
import os

import numpy as np
from scipy.special import comb

from models import DistortionReport, DomainSpec, HartogsParams, HartogsPoint, MonomialBasis, SampleSet, Stencil
from utils.domains import generic_norm
from utils.errors import GridError, HypothesisError, PoleError, PreconditionError
from utils.gram import gram_factor, gram_matrix, monomial_values
from utils.hartogs import rho, sample_hartogs_interior, volume_density
from utils.quadrature import radial_rule
from utils.special import gamma_ratio

log = logging.getLogger(__name__)

DEGREE_CUTOFF: int = int(os.getenv("CH_DEGREE_CUTOFF", "20"))
DEGREE_CUTOFF_MC: int = int(os.getenv("CH_DEGREE_CUTOFF_MC", "2"))
ORACLE_SAMPLES: int = int(os.getenv("CH_SAMPLES", "20000"))
CROSS_CHECK_BATCHES = 10


# ── X̃ and its differences ──────────────────────────────────────────────────
def x_tilde(spec: DomainSpec, mu: float, s: float) -> float:
    """∏_{l=1}^{r} Γ(μs − γ + 2 − (l+1)a/2 + b + ra) / Γ(μs − γ + 1 + (l−1)a/2)."""
    r, a, b, g = spec.r, spec.a, spec.b, spec.genus
    value = 1.0
    for l in range(1, r + 1):
        num = mu * s - g + 2 - (l + 1) * a / 2 + b + r * a
        den = mu * s - g + 1 + (l - 1) * a / 2
        try:
            value *= gamma_ratio(num, den)
        except PoleError as e:
            raise PoleError(f"x_tilde factor l={l}: {e}", index=l) from e
    return value


def dk_x_tilde(spec: DomainSpec, mu: float, d: int, k: int) -> float:
    """Σ_{j=0}^{k} C(k, j)(−1)^j X̃(d − j)."""
    if not 0 <= k <= d:
        raise PreconditionError(f"k={k} outside [0, {d}]")
    terms = [comb(k, j, exact=True) * (-1) ** j * x_tilde(spec, mu, d - j) for j in range(k + 1)]
    return math.fsum(terms)


# ── Distortion ──────────────────────────────────────────────────────────────
def admissible_threshold(params: HartogsParams) -> float:
    return max(params.n, (params.base.genus - 1) / params.mu)


def smallest_admissible(params: HartogsParams) -> int:
    return int(math.floor(admissible_threshold(params))) + 1


def default_grids(params: HartogsParams):
    """(m_grid, check_grid): the n+1 smallest admissible m, then the next 3."""
    m0 = smallest_admissible(params)
    grid = list(range(m0, m0 + params.n + 1))
    return grid, list(range(grid[-1] + 1, grid[-1] + 4))


def kempf_coefficients(params: HartogsParams, m: int) -> np.ndarray:
    """c_k with T_m = Σ_k c_k u^{d−k}, u = 1 − ‖w‖²/N^μ."""
    if not m > admissible_threshold(params):
        raise HypothesisError(
            f"m={m} must exceed max(d + d0, (γ−1)/μ) = {admissible_threshold(params):g}"
        )
    spec, mu, d, d0 = params.base, params.mu, params.base.dim, params.d0
    return np.array([
        dk_x_tilde(spec, mu, d, k) / math.factorial(k) * gamma_ratio(m - d + k, m - d - d0)
        for k in range(d + 1)
    ]) / mu ** d


def kempf_distortion(params: HartogsParams, m: int, v: HartogsPoint):
    """T_m(z, w) from the closed Gamma-ratio formula; depends on w only via ‖w‖²."""
    c = kempf_coefficients(params, m)
    r = np.asarray(rho(params, v))
    if np.any(r <= 0):
        raise PreconditionError("distortion needs ρ > 0")
    u = 1.0 - v.w_norm2 / generic_norm(params.base, v.z) ** params.mu
    d = params.base.dim
    value = sum(c[k] * u ** (d - k) for k in range(d + 1))
    return value if np.ndim(value) else float(value)


def distortion_profile(params: HartogsParams, m: int, z, fractions) -> list[float]:
    """T_m along (z, s·N^{μ/2}·e_1) for the given fractions s in [0, 1)."""
    z = np.asarray(z, dtype=complex)
    top = generic_norm(params.base, z) ** (params.mu / 2)
    out = []
    for s in fractions:
        w = np.zeros(params.d0, dtype=complex)
        w[0] = s * top
        out.append(kempf_distortion(params, m, HartogsPoint(z, w)))
    return out


# ── Coefficient extraction ──────────────────────────────────────────────────
def newton_to_monomial(nodes, values) -> np.ndarray:
    """Interpolating polynomial through (nodes, values), coefficients highest degree first."""
    x = np.asarray(nodes, dtype=float)
    dd = np.asarray(values, dtype=float).copy()
    n = len(x)
    for j in range(1, n):
        dd[j:] = (dd[j:] - dd[j - 1:-1]) / (x[j:] - x[:n - j])
    # Horner on the Newton form dd[0] + (m − x0)(dd[1] + (m − x1)(…))
    poly = np.array([dd[-1]])
    for j in range(n - 2, -1, -1):
        poly = np.polymul(poly, [1.0, -x[j]])
        poly[-1] += dd[j]
    return poly


def tyz_coefficients(params: HartogsParams, v: HartogsPoint, m_grid=None, check_grid=None) -> DistortionReport:
    """Degree-(d+d0) interpolation of m -> T_m(v); a_j multiplies m^{(d+d0)−j}."""
    default_m, default_check = default_grids(params)
    m_grid = list(default_m if m_grid is None else m_grid)
    check_grid = list(default_check if check_grid is None else check_grid)
    if len(m_grid) != params.n + 1:
        raise GridError(f"need {params.n + 1} interpolation nodes, got {len(m_grid)}")
    if len(set(m_grid)) != len(m_grid):
        raise GridError(f"duplicate interpolation nodes in {m_grid}")
    values = [kempf_distortion(params, m, v) for m in m_grid]
    coefficients = newton_to_monomial(m_grid, values)
    residual = 0.0
    for m in check_grid:
        exact = kempf_distortion(params, m, v)
        residual = max(residual, abs(np.polyval(coefficients, m) - exact) / abs(exact))
    return DistortionReport(
        params=params,
        m_grid=m_grid,
        point=v,
        values=[float(x) for x in values],
        coefficients=[float(c) for c in coefficients],
        interpolation_residual=float(residual),
        check_grid=check_grid,
    )


# ── Rawnsley oracle ─────────────────────────────────────────────────────────
def default_degree_cutoff(quad: SampleSet) -> int:
    """Oracle basis degree; Monte Carlo nodes only support a small basis."""
    return DEGREE_CUTOFF if quad.kind == "radial" else DEGREE_CUTOFF_MC


def default_oracle_quadrature(params: HartogsParams, m: int, degree_cutoff: int = DEGREE_CUTOFF,
                              seed: int = 0) -> SampleSet:
    """Radial rule over M for ball bases, Monte Carlo otherwise."""
    if params.base.is_ball:
        return radial_rule(params.base, 2 * degree_cutoff + m + 2, fiber=(params.mu, params.d0))
    return sample_hartogs_interior(params, ORACLE_SAMPLES, seed)


def oracle_weights(params: HartogsParams, m: int, quad: SampleSet, stencil: Stencil | None = None) -> np.ndarray:
    """Node weights of the normalised measure ρ^m · volume density · dλ / π^{d+d0}."""
    v = HartogsPoint.from_coords(quad.points, params.base.dim)
    dens = np.asarray(volume_density(params, v, stencil))
    return quad.weights * np.asarray(rho(params, v)) ** m * dens / math.pi ** params.n


def rawnsley_oracle(params: HartogsParams, m: int, v: HartogsPoint, degree_cutoff: int | None = None,
                    quad: SampleSet | None = None, stencil: Stencil | None = None):
    """Σ_j h_m(s_j, s_j)(v) over monomials z^α w^β of degree <= cutoff, orthonormalised
    in the normalised weighted L² inner product on M. Monte Carlo nodes get a
    degree-graded Gram."""
    quad = quad or default_oracle_quadrature(params, m, DEGREE_CUTOFF if degree_cutoff is None else degree_cutoff)
    if degree_cutoff is None:
        degree_cutoff = default_degree_cutoff(quad)
    basis = MonomialBasis.up_to(params.n, degree_cutoff)
    weights = oracle_weights(params, m, quad, stencil)
    G = gram_matrix(quad.points, weights, basis, diagonal=quad.kind == "radial", graded=quad.kind == "mc")
    factor = gram_factor(basis, G)
    phi = monomial_values(v.coords, basis)
    value = np.asarray(rho(params, v)) ** m * factor.kernel(phi)
    return value if np.ndim(value) else float(value)


def rank2_cross_check(params: HartogsParams, m: int, v: HartogsPoint | None = None, degree_cutoff: int = 0,
                      samples: int = ORACLE_SAMPLES, seed: int = 0, batches: int = CROSS_CHECK_BATCHES,
                      stencil: Stencil | None = None) -> dict:
    """Closed formula vs Monte Carlo oracle with a batch-means standard error.

    Disagreement beyond 3 stderr is flagged and logged, never raised.
    """
    if v is None:
        v = HartogsPoint(np.zeros(params.base.dim), np.zeros(params.d0))
    closed = kempf_distortion(params, m, v)
    quad = sample_hartogs_interior(params, samples, seed)
    chunks = np.array_split(np.arange(len(quad)), batches)
    estimates = []
    for idx in chunks:
        part = SampleSet(quad.points[idx], quad.weights[idx] * len(quad) / len(idx), seed=seed)
        estimates.append(rawnsley_oracle(params, m, v, degree_cutoff, part, stencil))
    estimates = np.array(estimates)
    ratios = closed / estimates
    ratio = float(np.mean(ratios))
    stderr = float(np.std(ratios, ddof=1) / math.sqrt(len(ratios)))
    flagged = abs(ratio - 1.0) > 3 * stderr
    if flagged:
        log.warning("%s μ=%g m=%d: closed/oracle = %.5f ± %.5f disagrees beyond 3σ",
                    params.base.kind, params.mu, m, ratio, stderr)
    return {
        "closed": closed,
        "oracle": float(np.mean(estimates)),
        "ratio": ratio,
        "stderr": stderr,
        "flagged": bool(flagged),
    }
