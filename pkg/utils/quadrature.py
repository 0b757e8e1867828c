# utils/quadrature.py
"""Deterministic integration over SampleSets and exact radial rules for balls."""
import logging
import math

import numpy as np
from scipy.special import roots_legendre

from models import DomainSpec, SampleSet
from utils.errors import IntegrandError, ShapeError, UnsupportedError

log = logging.getLogger(__name__)


def _fsum(values: np.ndarray):
    # correctly rounded, so the result does not depend on summation order
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def integrate(f, samples: SampleSet):
    """(Σ w_i f(x_i), stderr).

    ``f`` is called once on the (n, dim) node array and returns n values.
    For Monte Carlo sets the stderr combines the integrand variance with the
    volume-estimate variance carried in ``samples.variance_hint``; radial rules
    report 0.
    """
    n = len(samples)
    vals = np.asarray(f(samples.points))
    if vals.shape != (n,):
        try:
            vals = np.broadcast_to(vals, (n,))
        except ValueError:
            raise ShapeError(f"integrand returned shape {vals.shape}, expected ({n},)")
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise IntegrandError(f"non-finite integrand value {vals[i]!r} at node {i}", index=i)
    terms = samples.weights * vals
    value = _fsum(terms)
    if samples.kind != "mc" or n < 2:
        return value, 0.0
    scaled = n * terms
    var = np.var(scaled.real, ddof=1) + (np.var(scaled.imag, ddof=1) if np.iscomplexobj(scaled) else 0.0)
    volume = samples.total_weight
    mean_f = abs(value) / volume
    stderr = math.sqrt(var / n + mean_f ** 2 * samples.variance_hint)
    return value, stderr


# ── Radial rules ────────────────────────────────────────────────────────────
def gauss_legendre_01(n: int):
    """n-point Gauss–Legendre nodes/weights on [0, 1]."""
    x, w = roots_legendre(n)
    return (x + 1) / 2, w / 2


def simplex_rule(k: int, degree: int):
    """Collapsed tensor Gauss–Legendre rule on {t >= 0, Σ t <= 1} ⊂ R^k.

    Exact for polynomials in t of total degree <= ``degree``. Returns (t, w)
    with t of shape (N, k).
    """
    n = (degree + k) // 2 + 1
    x, w = gauss_legendre_01(n)
    s = np.stack(np.meshgrid(*([x] * k), indexing="ij"), axis=-1).reshape(-1, k)
    ws = np.prod(np.stack(np.meshgrid(*([w] * k), indexing="ij"), axis=-1).reshape(-1, k), axis=1)
    t = np.empty_like(s)
    remaining = np.ones(s.shape[0])
    jac = np.ones(s.shape[0])
    for i in range(k):
        t[:, i] = s[:, i] * remaining
        if i < k - 1:
            jac *= (1 - s[:, i]) ** (k - 1 - i)
        remaining = remaining * (1 - s[:, i])
    return t, ws * jac


def radial_rule(spec: DomainSpec, degree: int, fiber=None) -> SampleSet:
    """Radial rule over the ball B^q, or over {(z, w) : ‖w‖² < (1 − ‖z‖²)^μ}
    when ``fiber=(mu, d0)``.

    Nodes are real and nonnegative (|z_j| = sqrt(t_j)); the angular integrals
    are left to the caller, which must only integrate rotation-invariant
    quantities such as |z^α|² against them.
    """
    if not spec.is_ball:
        raise UnsupportedError(f"radial rule needs a rank-1 type I base, got {spec.kind}")
    if degree < 0:
        raise ShapeError("degree must be nonnegative")
    q = spec.dim
    if fiber is None:
        t, wt = simplex_rule(q, degree)
        return SampleSet(np.sqrt(t), math.pi ** q * wt, seed=None, kind="radial")
    mu, d0 = fiber
    t, wt = simplex_rule(q, degree + int(math.ceil(mu * d0)))
    s, ws = simplex_rule(d0, degree)
    N = 1.0 - t.sum(axis=1)
    nz, nw = t.shape[0], s.shape[0]
    z = np.repeat(np.sqrt(t), nw, axis=0)
    w = np.sqrt(np.repeat(N ** mu, nw)[:, None] * np.tile(s, (nz, 1)))
    weights = math.pi ** (q + d0) * np.outer(wt * N ** (mu * d0), ws).ravel()
    return SampleSet(np.concatenate([z, w], axis=1), weights, seed=None, kind="radial")
