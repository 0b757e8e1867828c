# utils/hardy.py
"""Hardy space of the disk bundle (d0 = 1): weighted Bergman spaces on the base,
the hat isometry, the Szegő kernel (series and closed form) and the log-term fit."""
from functools import lru_cache
import logging
import math
import os

import numpy as np
from scipy.special import comb, gammaln

from models import (
    DomainSpec,
    GramFactor,
    HartogsParams,
    HartogsPoint,
    LogTermFit,
    MonomialBasis,
    SampleSet,
    Stencil,
    SzegoEvaluation,
)
from utils.calculus import metric_base
from utils.domains import generic_norm, sample_interior
from utils.errors import (
    BoundaryError,
    GridError,
    NearBoundaryError,
    PreconditionError,
    UnsupportedError,
    ZDependenceError,
)
from utils.gram import gram_factor, gram_matrix, monomial_values, supported_degree
from utils.hartogs import boundary_nodes, boundary_sample_set, rho
from utils.quadrature import integrate

log = logging.getLogger(__name__)

GRAM_SAMPLES: int = int(os.getenv("CH_SAMPLES", "20000"))
SERIES_DEGREE: int = int(os.getenv("CH_SERIES_DEGREE", "40"))
SERIES_DEGREE_MC: int = int(os.getenv("CH_SERIES_DEGREE_MC", "4"))
SERIES_M_CUTOFF = 200
TAIL_RTOL = 1e-8
Z_DEPENDENCE_RTOL = 1e-3
CLOSED_FORM_ABOVE = 0.8     # x = ‖w‖²/N^μ beyond which only the closed form is used
BOUNDARY_TOL = 1e-10


def margin(spec: DomainSpec, mu: float) -> float:
    """H²_m(Ω) is nontrivial for m > (γ − 1)/μ."""
    return (spec.genus - 1) / mu


def is_admissible(spec: DomainSpec, mu: float, m: int) -> bool:
    return m > margin(spec, mu)


def smallest_admissible(spec: DomainSpec, mu: float) -> int:
    return int(math.floor(margin(spec, mu))) + 1


# ── Weighted Bergman spaces on the base ─────────────────────────────────────
def ball_monomial_norms(spec: DomainSpec, mu: float, m: int, basis: MonomialBasis) -> np.ndarray:
    """‖z^α‖² = μ^q α! Γ(μm − q)/Γ(μm + |α|) on the ball B^q (normalised measure)."""
    alpha = basis.array
    q = spec.dim
    logs = (q * math.log(mu) + gammaln(alpha + 1).sum(axis=1)
            + gammaln(mu * m - q) - gammaln(mu * m + alpha.sum(axis=1)))
    return np.exp(logs)


def base_density(spec: DomainSpec, mu: float, z, stencil: Stencil | None = None) -> np.ndarray:
    """2^d det(g_Ω), the density of ω_Ω^d/d! against Lebesgue measure."""
    return 2.0 ** spec.dim * np.linalg.det(metric_base(spec, mu, z, stencil)).real


def uses_exact_norms(spec: DomainSpec, quad: SampleSet | None = None) -> bool:
    """Ball bases without Monte Carlo nodes: Beta integrals or a radial rule."""
    return spec.is_ball and (quad is None or quad.kind == "radial")


def default_series_degree(spec: DomainSpec, quad: SampleSet | None = None) -> int:
    """Monomial degree of the base Gram; Monte Carlo nodes only support a small basis."""
    return SERIES_DEGREE if uses_exact_norms(spec, quad) else SERIES_DEGREE_MC


@lru_cache(maxsize=16)
def default_gram_quadrature(spec: DomainSpec) -> SampleSet:
    return sample_interior(spec, GRAM_SAMPLES, seed=0)


@lru_cache(maxsize=64)
def _default_gram_density(spec: DomainSpec, mu: float) -> np.ndarray:
    return base_density(spec, mu, default_gram_quadrature(spec).points)


def base_gram(spec: DomainSpec, mu: float, m: int, basis: MonomialBasis,
              quad: SampleSet | None = None, stencil: Stencil | None = None,
              density: np.ndarray | None = None) -> GramFactor:
    """Gram of monomials in ∫ N^{μm} z^α z̄^β 2^d det(g_Ω) dλ / π^d.

    Without ``quad`` ball bases use exact Beta integrals and other bases a
    seeded Monte Carlo set. Radial sets give a diagonal Gram. Monte Carlo
    sets give a degree-graded one, truncated to the degree their effective
    node count supports (read it back from ``GramFactor.basis``).
    ``density`` may carry precomputed ``base_density`` values at the nodes.
    """
    if not is_admissible(spec, mu, m):
        raise PreconditionError(f"m={m} must exceed (γ−1)/μ = {margin(spec, mu):g}")
    if quad is None:
        if spec.is_ball:
            return gram_factor(basis, ball_monomial_norms(spec, mu, m, basis))
        quad = default_gram_quadrature(spec)
        if density is None and stencil is None:
            density = _default_gram_density(spec, mu)
    pts = quad.points
    if density is None:
        density = base_density(spec, mu, pts, stencil)
    weights = quad.weights * generic_norm(spec, pts) ** (mu * m) * density / math.pi ** spec.dim
    if quad.kind == "mc" and len(basis):
        top = int(basis.degrees.max())
        degree = supported_degree(spec.dim, weights, top)
        if degree < top:
            log.debug("%s m=%d: effective nodes support degree %d of %d", spec.kind, m, degree, top)
            basis = basis.truncated(degree)
    G = gram_matrix(pts, weights, basis, diagonal=quad.kind == "radial", graded=quad.kind == "mc")
    return gram_factor(basis, G)


def epsilon_base(spec: DomainSpec, mu: float, m: int, z, gram: GramFactor):
    """N^{μm}(z) Σ_j |s_j^m(z)|²."""
    z = np.asarray(z, dtype=complex)
    value = generic_norm(spec, z) ** (mu * m) * gram.kernel(monomial_values(z, gram.basis))
    return value if np.ndim(value) else float(value)


def binomial_matrix(m_grid, d: int) -> np.ndarray:
    """Rows (C(m+l, l))_{l=0..d}."""
    return np.array([[comb(m + l, l, exact=True) for l in range(d + 1)] for m in m_grid], dtype=float)


def _default_z_samples(spec: DomainSpec, quad: SampleSet | None = None) -> np.ndarray:
    if uses_exact_norms(spec, quad):
        return 0.3 * sample_interior(spec, 5, seed=0).points
    # on a graded Gram the origin only sees ‖1‖², whatever the degree
    return np.zeros((1, spec.dim), dtype=complex)


def b_coefficient_samples(spec: DomainSpec, mu: float, z_samples=None, m_grid=None,
                          degree_cutoff: int | None = None, quad: SampleSet | None = None) -> np.ndarray:
    """Per-sample solutions b (one row per z) of ε_m(z) = Σ_l b_l C(m+l, l)."""
    d = spec.dim
    if degree_cutoff is None:
        degree_cutoff = default_series_degree(spec, quad)
    z = (_default_z_samples(spec, quad) if z_samples is None
         else np.atleast_2d(np.asarray(z_samples, dtype=complex)))
    if m_grid is None:
        m0 = smallest_admissible(spec, mu)
        m_grid = list(range(m0, m0 + d + 1))
    if len(m_grid) != d + 1 or len(set(m_grid)) != d + 1:
        raise GridError(f"need {d + 1} distinct m values, got {m_grid}")
    basis = MonomialBasis.up_to(d, degree_cutoff)
    eps = np.array([epsilon_base(spec, mu, m, z, base_gram(spec, mu, m, basis, quad)) for m in m_grid])
    return np.linalg.solve(binomial_matrix(m_grid, d), eps).T


def fit_b_coefficients(spec: DomainSpec, mu: float, z_samples=None, m_grid=None,
                       degree_cutoff: int | None = None, quad: SampleSet | None = None) -> list[float]:
    """b_0 … b_d of ε_m = Σ_l b_l C(m+l, l), averaged over z samples."""
    per_z = b_coefficient_samples(spec, mu, z_samples, m_grid, degree_cutoff, quad)
    mean = per_z.mean(axis=0)
    dev = float(np.max(np.abs(per_z - mean)) / np.max(np.abs(mean)))
    if dev > Z_DEPENDENCE_RTOL:
        raise ZDependenceError(f"b_l vary by {dev:.2e} across z samples (raise the degree cutoff)")
    log.info("%s μ=%g: b = %s (cross-z dev %.2e)", spec.kind, mu, np.array2string(mean, precision=8), dev)
    return [float(b) for b in mean]


@lru_cache(maxsize=64)
def default_b_coefficients(spec: DomainSpec, mu: float) -> tuple[float, ...]:
    return tuple(fit_b_coefficients(spec, mu))


def b_polynomial(b, m: int) -> float:
    """Σ_l b_l C(m+l, l)."""
    return math.fsum(bl * comb(m + l, l, exact=True) for l, bl in enumerate(b))


# ── Hat map and boundary inner products ─────────────────────────────────────
def _require_disk_bundle(params: HartogsParams):
    if params.d0 != 1:
        raise UnsupportedError(f"Hardy space needs d0 = 1, got {params.d0}")


def hat_map_value(spec: DomainSpec, mu: float, m: int, s, v: HartogsPoint):
    """ŝ(v) = 2^{−d/2} N^{−μ(d+1)/2} w^m s(z) on the smooth boundary."""
    if v.w.shape[-1] != 1:
        raise UnsupportedError("hat map needs a single fibre coordinate")
    N = np.asarray(generic_norm(spec, v.z))
    off = np.abs(v.w_norm2 - N ** mu)
    if np.any(off > BOUNDARY_TOL * np.maximum(1.0, N ** mu)):
        raise BoundaryError(f"point off the boundary ‖w‖² = N^μ by {float(np.max(off)):.2e}")
    d = spec.dim
    value = 2.0 ** (-d / 2) * N ** (-mu * (d + 1) / 2) * v.w[..., 0] ** m * np.asarray(s(v.z))
    return value if np.ndim(value) else complex(value)


def isometry_ratio(spec: DomainSpec, mu: float, m: int, s, boundary_samples, base_quad: SampleSet | None = None,
                   stencil: Stencil | None = None) -> float:
    """‖ŝ‖² in L²(∂M, dν/2π^{d+1}) over ‖s‖² in H²_m(Ω).

    Without ``base_quad`` the base nodes underlying the boundary samples are
    reused, so both norms see the same z nodes.
    """
    params = boundary_samples.params
    _require_disk_bundle(params)
    v = boundary_nodes(boundary_samples)
    top = boundary_sample_set(boundary_samples)
    num = math.fsum(top.weights * np.abs(hat_map_value(spec, mu, m, s, v)) ** 2)
    quad = base_quad or boundary_samples.base
    pts = quad.points
    dens = base_density(spec, mu, pts, stencil) / math.pi ** spec.dim
    den = math.fsum(quad.weights * generic_norm(spec, pts) ** (mu * m) * np.abs(np.asarray(s(pts))) ** 2 * dens)
    return num / den


def fourier_inner_product(spec: DomainSpec, mu: float, m1: int, s1, m2: int, s2, boundary_samples):
    """(⟨ŝ1, ŝ2⟩ on the boundary, stderr); vanishes for m1 != m2."""
    _require_disk_bundle(boundary_samples.params)
    v = boundary_nodes(boundary_samples)
    top = boundary_sample_set(boundary_samples)
    h1 = hat_map_value(spec, mu, m1, s1, v)
    h2 = hat_map_value(spec, mu, m2, s2, v)
    vals = h1 * np.conj(h2)
    # values are already aligned with the nodes of ``top``
    return integrate(lambda _nodes: vals, top)


# ── Szegő kernel ────────────────────────────────────────────────────────────
def _fibre_ratio(params: HartogsParams, v: HartogsPoint):
    if np.any(np.asarray(rho(params, v)) <= 0):
        raise PreconditionError("Szegő kernel needs an interior point")
    N = generic_norm(params.base, v.z)
    return N, v.w_norm2 / N ** params.mu


def szego_series(params: HartogsParams, v: HartogsPoint, m_cutoff: int = SERIES_M_CUTOFF,
                 degree_cutoff: int | None = None, quad: SampleSet | None = None, b=None,
                 include_continuation: bool = True):
    """Truncated S(v) = 2^{−d} N^{−μ(d+1)} Σ_{m<=M} x^m ε_m(z), x = ‖w‖²/N^μ.

    Returns (value, tail_estimate). For m at or below the integrability margin
    ε_m is continued by the b-polynomial (dropped when ``include_continuation``
    is False). The tail beyond M is bounded geometrically; if it cannot be
    made smaller than 1e-8 of the partial sum a NearBoundaryError is raised.
    """
    _require_disk_bundle(params)
    spec, mu, d = params.base, params.mu, params.base.dim
    N, x = _fibre_ratio(params, v)
    N, x = float(N), float(x)
    b = tuple(b) if b is not None else default_b_coefficients(spec, mu)
    if degree_cutoff is None:
        degree_cutoff = default_series_degree(spec, quad)
    basis = MonomialBasis.up_to(d, degree_cutoff)
    density = None if quad is None else base_density(spec, mu, quad.points)
    terms = []
    for m in range(m_cutoff + 1):
        if is_admissible(spec, mu, m):
            gram = base_gram(spec, mu, m, basis, quad, density=density)
            eps = float(N ** (mu * m) * gram.kernel(monomial_values(v.z, gram.basis)))
        elif include_continuation:
            eps = b_polynomial(b, m)
        else:
            eps = 0.0
        terms.append(x ** m * eps)
    p_next, p_after = abs(b_polynomial(b, m_cutoff + 1)), abs(b_polynomial(b, m_cutoff + 2))
    q = x * p_after / p_next if p_next else x
    if q >= 1:
        raise NearBoundaryError(f"series ratio {q:.4f} >= 1 at m_cutoff={m_cutoff}; use the closed form")
    tail = x ** (m_cutoff + 1) * p_next / (1 - q)
    scale = math.fsum(abs(t) for t in terms)
    if tail > TAIL_RTOL * scale:
        raise NearBoundaryError(f"tail {tail:.3e} exceeds {TAIL_RTOL:g} of the partial sum at m_cutoff={m_cutoff}")
    pref = 2.0 ** (-d) * N ** (-mu * (d + 1))
    return pref * math.fsum(terms), pref * tail


def szego_closed(params: HartogsParams, v: HartogsPoint, b=None):
    """2^{−d} N^{−μ(d+1)} Σ_l b_l (1 − x)^{−(l+1)}."""
    _require_disk_bundle(params)
    spec, mu, d = params.base, params.mu, params.base.dim
    N, x = _fibre_ratio(params, v)
    b = tuple(b) if b is not None else default_b_coefficients(spec, mu)
    value = 2.0 ** (-d) * N ** (-mu * (d + 1)) * sum(bl * (1 - x) ** (-(l + 1)) for l, bl in enumerate(b))
    return value if np.ndim(value) else float(value)


def evaluate_szego(params: HartogsParams, v: HartogsPoint, m_cutoff: int = SERIES_M_CUTOFF,
                   degree_cutoff: int | None = None, quad: SampleSet | None = None, b=None) -> SzegoEvaluation:
    if degree_cutoff is None:
        degree_cutoff = default_series_degree(params.base, quad)
    series, tail = szego_series(params, v, m_cutoff, degree_cutoff, quad, b)
    closed = szego_closed(params, v, b)
    if series <= 0 or closed <= 0:
        log.warning("nonpositive Szegő value (series %.6g, closed %.6g) at x=%.4f",
                    series, closed, float(_fibre_ratio(params, v)[1]))
    return SzegoEvaluation(v, series, closed, m_cutoff, degree_cutoff, tail)


# ── Log-term detector ───────────────────────────────────────────────────────
def default_radial_grid(params: HartogsParams, z, count: int = 24) -> np.ndarray:
    top = float(generic_norm(params.base, np.asarray(z, dtype=complex))) ** params.mu
    return np.geomspace(1e-3, 1e-1, count) * top


def fibre_point(params: HartogsParams, z, t: float) -> HartogsPoint:
    """(z, w) with ρ = t and w along the first fibre axis."""
    z = np.asarray(z, dtype=complex)
    top = float(generic_norm(params.base, z)) ** params.mu
    return HartogsPoint(z, np.array([math.sqrt(top - t)] + [0.0] * (params.d0 - 1), dtype=complex))


def szego_along_fibre(params: HartogsParams, z, t: float, b=None, degree_cutoff: int | None = None) -> float:
    """S at ρ = t: the series in the bulk, the closed form near the boundary."""
    v = fibre_point(params, z, t)
    _, x = _fibre_ratio(params, v)
    if float(x) <= CLOSED_FORM_ABOVE:
        try:
            return szego_series(params, v, degree_cutoff=degree_cutoff, b=b)[0]
        except NearBoundaryError:
            pass
    return szego_closed(params, v, b)


def fit_log_term(t, S, d: int) -> LogTermFit:
    """Least squares S(t) = Σ_{k=0}^{d} c_k t^{k−(d+1)} + c + β log t.

    Rows are weighted by t^{d+1} and columns normalised. a = c_0, b = β.
    """
    t = np.asarray(t, dtype=float)
    S = np.asarray(S, dtype=float)
    if len(t) < max(6, d + 3):
        raise GridError(f"log-term fit needs at least {max(6, d + 3)} nodes, got {len(t)}")
    if np.any(t <= 0) or t.max() / t.min() < 10:
        raise GridError("radial grid must be positive and span at least a decade")
    cols = [t ** (k - (d + 1)) for k in range(d + 1)] + [np.ones_like(t), np.log(t)]
    A = np.stack(cols, axis=1) * (t ** (d + 1))[:, None]
    y = S * t ** (d + 1)
    norms = np.linalg.norm(A, axis=0)
    coef, _, rank, _ = np.linalg.lstsq(A / norms, y, rcond=None)
    if rank < A.shape[1]:
        raise GridError("log-term fit matrix is rank deficient (grid too clustered)")
    coef = coef / norms
    residual = float(np.linalg.norm(A @ coef - y) / np.linalg.norm(y))
    return LogTermFit(a_estimate=float(coef[0]), b_estimate=float(coef[-1]), residual=residual,
                      coefficients=[float(c) for c in coef], grid=[float(x) for x in t])


def log_term_fit(params: HartogsParams, z, radial_grid=None, b=None) -> LogTermFit:
    """Fit the Fefferman decomposition of S along the fibre family ρ(v_t) = t."""
    _require_disk_bundle(params)
    z = np.asarray(z, dtype=complex)
    top = float(generic_norm(params.base, z)) ** params.mu
    grid = default_radial_grid(params, z) if radial_grid is None else np.asarray(radial_grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > top):
        raise GridError(f"radial grid must lie in (0, N^μ(z)] = (0, {top:.6g}]")
    S = [szego_along_fibre(params, z, t, b) for t in grid]
    return fit_log_term(grid, S, params.base.dim)


def planted_log_fixture(d: int, a: float = 1.0, beta: float = 0.1):
    """S(t) = a·t^{−(d+1)} + β log t, used to validate the detector."""
    return lambda t: a * np.asarray(t, dtype=float) ** (-(d + 1)) + beta * np.log(t)


def boundary_limit(params: HartogsParams, z, radii=None, b=None) -> dict:
    """ρ^{d+1}·S approaching the smooth boundary, against 2^{−d} b_d."""
    _require_disk_bundle(params)
    spec, mu, d = params.base, params.mu, params.base.dim
    b = tuple(b) if b is not None else default_b_coefficients(spec, mu)
    top = float(generic_norm(spec, np.asarray(z, dtype=complex))) ** mu
    radii = np.array([1e-5, 3e-6, 1e-6, 3e-7, 1e-7]) * top if radii is None else np.asarray(radii, dtype=float)
    values = [t ** (d + 1) * szego_closed(params, fibre_point(params, z, t), b) for t in radii]
    expected = 2.0 ** (-d) * b[-1]
    return {
        "radii": [float(t) for t in radii],
        "values": [float(x) for x in values],
        "expected": expected,
        "max_rel_dev": float(max(abs(x / expected - 1) for x in values)),
    }
