# utils/calculus.py
"""Finite-difference Wirtinger calculus on C^n.

Every operator is vectorised over leading point axes: a function ``f`` is
called on arrays of shape (..., n) and must return real arrays of shape (...).
Derivatives come from real central differences in (x, y) = (Re z, Im z):

    ∂f/∂z_j        = ½(f_{x_j} − i f_{y_j})
    ∂²f/∂z_j∂z̄_k  = ¼[(f_{x_j x_k} + f_{y_j y_k}) + i(f_{x_j y_k} − f_{y_j x_k})]

with one optional Richardson level (4·D(h/2) − D(h))/3.
"""
from itertools import combinations
import logging
import math
import os

import numpy as np

from models import DomainSpec, SampleSet, Stencil
from utils.domains import contains, generic_norm, raw_norm
from utils.errors import DomainViolationError, MetricError, OutsideDomainError, PreconditionError

log = logging.getLogger(__name__)

FD_CHUNK: int = int(os.getenv("CH_FD_CHUNK", "2048"))
STEP_REL_DROP = 0.1      # fitted stencils keep f within 10% of its center value
STEP_SHRINK_LIMIT = 40


# ── Stencil plumbing ────────────────────────────────────────────────────────
def _unit_offsets(n: int):
    """Center, ±e_i and the four corners of every (i, j) pair in R^{2n}."""
    m = 2 * n
    eye = np.eye(m)
    rows = [np.zeros(m)]
    rows.extend(eye)
    rows.extend(-eye)
    pairs = list(combinations(range(m), 2))
    for i, j in pairs:
        rows.extend([eye[i] + eye[j], eye[i] - eye[j], -eye[i] + eye[j], -eye[i] - eye[j]])
    D = np.array(rows)
    return D[:, :n] + 1j * D[:, n:], pairs


def _node_values(fun, z, h, offsets):
    nodes = z[:, None, :] + h[:, None, None] * offsets[None, :, :]
    return np.asarray(fun(nodes), dtype=float)


def _real_derivatives(vals, h, m, pairs):
    P = vals.shape[0]
    f0 = vals[:, :1]
    plus, minus = vals[:, 1:1 + m], vals[:, 1 + m:1 + 2 * m]
    hc = h[:, None]
    grad = (plus - minus) / (2 * hc)
    hess = np.empty((P, m, m))
    idx = np.arange(m)
    hess[:, idx, idx] = (plus - 2 * f0 + minus) / hc ** 2
    corners = vals[:, 1 + 2 * m:].reshape(P, len(pairs), 4)
    mixed = (corners[..., 0] - corners[..., 1] - corners[..., 2] + corners[..., 3]) / (4 * hc ** 2)
    I, J = np.array(pairs).T
    hess[:, I, J] = mixed
    hess[:, J, I] = mixed
    return grad, hess


def _wirtinger(grad, hess, n):
    gz = 0.5 * (grad[:, :n] - 1j * grad[:, n:])
    Hxx, Hyy = hess[:, :n, :n], hess[:, n:, n:]
    Hxy, Hyx = hess[:, :n, n:], hess[:, n:, :n]
    return gz, 0.25 * ((Hxx + Hyy) + 1j * (Hxy - Hyx))


def _pass(fun, z, h, offsets, pairs, take_log):
    vals = _node_values(fun, z, h, offsets)
    if take_log:
        bad = ~np.isfinite(vals) | (vals <= 0)
        if bad.any():
            raise DomainViolationError(
                f"log argument nonpositive at {int(bad.any(axis=1).sum())} stencil(s)"
            )
        vals = np.log(vals)
    elif not np.all(np.isfinite(vals)):
        raise DomainViolationError("non-finite function value on the stencil")
    grad, hess = _real_derivatives(vals, h, 2 * z.shape[1], pairs)
    return _wirtinger(grad, hess, z.shape[1])


def hermitize(H):
    return 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))


def fd_derivatives(fun, z, stencil: Stencil, take_log: bool, steps=None):
    z = np.asarray(z, dtype=complex)
    batch, n = z.shape[:-1], z.shape[-1]
    flat = z.reshape(-1, n)
    steps = np.full(flat.shape[0], stencil.step) if steps is None else np.asarray(steps).reshape(-1)
    offsets, pairs = _unit_offsets(n)
    grads, hessians = [], []
    for start in range(0, flat.shape[0], FD_CHUNK):
        zc, hc = flat[start:start + FD_CHUNK], steps[start:start + FD_CHUNK]
        g, H = _pass(fun, zc, hc, offsets, pairs, take_log)
        if stencil.richardson:
            g2, H2 = _pass(fun, zc, hc / 2, offsets, pairs, take_log)
            g, H = (4 * g2 - g) / 3, (4 * H2 - H) / 3
        grads.append(g)
        hessians.append(H)
    gz = np.concatenate(grads).reshape(batch + (n,))
    H = np.concatenate(hessians).reshape(batch + (n, n))
    return gz, hermitize(H)


def fit_steps(fun, z, stencil: Stencil):
    """Per-point steps for a positive ``fun``: the base step, halved until every
    stencil node keeps ``fun`` within STEP_REL_DROP of its center value."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    flat = z.reshape(-1, n)
    offsets, _ = _unit_offsets(n)
    steps = np.full(flat.shape[0], stencil.step)
    for start in range(0, flat.shape[0], FD_CHUNK):
        idx = np.arange(start, min(start + FD_CHUNK, flat.shape[0]))
        for _ in range(STEP_SHRINK_LIMIT):
            vals = _node_values(fun, flat[idx], steps[idx], offsets)
            f0 = vals[:, :1]
            if np.any(~(f0 > 0)):
                raise DomainViolationError("stencil center outside the positivity region")
            ok = np.all(np.abs(vals - f0) <= STEP_REL_DROP * f0, axis=1)
            if ok.all():
                break
            idx = idx[~ok]
            steps[idx] /= 2
        else:
            raise DomainViolationError("no stencil step fits inside the domain")
    return steps.reshape(z.shape[:-1])


# ── Generic operators ───────────────────────────────────────────────────────
def wirtinger_gradient(f, z, stencil: Stencil | None = None):
    """∂f/∂z_j for real f."""
    gz, _ = fd_derivatives(f, z, stencil or Stencil(), take_log=False)
    return gz


def complex_hessian(f, z, stencil: Stencil | None = None):
    """∂²f/∂z_j∂z̄_k for real f, Hermitian-symmetrised."""
    _, H = fd_derivatives(f, z, stencil or Stencil(), take_log=False)
    return H


def complex_hessian_log(f, z, stencil: Stencil | None = None):
    """∂²(log f)/∂z_j∂z̄_k; f must be positive on the whole stencil."""
    _, H = fd_derivatives(f, z, stencil or Stencil(), take_log=True)
    return H


# ── Base-domain geometry ────────────────────────────────────────────────────
def norm_power(spec: DomainSpec, mu: float):
    """z -> N(z)^μ, clamped to 0 outside the positivity region."""
    def fun(u):
        return np.maximum(raw_norm(spec, u), 0.0) ** mu
    return fun


def _require_interior(spec: DomainSpec, z):
    if not np.all(contains(spec, z)):
        raise OutsideDomainError(f"point outside {spec.kind}")


def metric_base(spec: DomainSpec, mu: float, z, stencil: Stencil | None = None):
    """g_Ω = −½ ∂∂̄ log N^μ, positive definite on Ω."""
    if not mu > 0:
        raise PreconditionError(f"mu must be positive, got {mu}")
    stencil = stencil or Stencil()
    z = np.asarray(z, dtype=complex)
    _require_interior(spec, z)
    fun = norm_power(spec, mu)
    steps = fit_steps(fun, z, stencil)
    _, H = fd_derivatives(fun, z, stencil, take_log=True, steps=steps)
    g = -0.5 * H
    if np.any(np.linalg.eigvalsh(g)[..., 0] <= 0):
        raise MetricError(f"metric not positive definite on {spec.kind} (μ={mu}, step={stencil.step})")
    return g


def det_identity_residual(spec: DomainSpec, mu: float, samples: SampleSet, stencil: Stencil | None = None):
    """(mean, max relative deviation) of c(z) = det(g_Ω(z))·N(z)^γ over the samples."""
    if not mu > 0:
        raise PreconditionError(f"mu must be positive, got {mu}")
    pts = samples.points
    g = metric_base(spec, mu, pts, stencil)
    c = np.linalg.det(g).real * generic_norm(spec, pts) ** spec.genus
    mean = math.fsum(c) / len(c)
    dev = float(np.max(np.abs(c / mean - 1.0)))
    log.info("%s μ=%g: det(g)·N^γ = %.10g (dev %.2e)", spec.kind, mu, mean, dev)
    return mean, dev


def ball_det_constant(spec: DomainSpec, mu: float) -> float:
    """Exact det(g_Ω)·N^γ on the ball: (μ/2)^d."""
    if not spec.is_ball:
        raise PreconditionError(f"{spec.kind} is not a ball")
    return (mu / 2.0) ** spec.dim


def nominal_det_constant(spec: DomainSpec, mu: float) -> float:
    """(μ/γ)^d as stated for all bases."""
    return (mu / spec.genus) ** spec.dim


# ── Boundary volume density ─────────────────────────────────────────────────
def _norm_power_derivatives(spec, mu, z, stencil):
    stencil = stencil or Stencil()
    z = np.asarray(z, dtype=complex)
    _require_interior(spec, z)
    fun = norm_power(spec, mu)
    steps = fit_steps(fun, z, stencil)
    Fz, H = fd_derivatives(fun, z, stencil, take_log=False, steps=steps)
    return np.asarray(fun(z), dtype=float), Fz, H


def boundary_density_A(spec: DomainSpec, mu: float, z, stencil: Stencil | None = None):
    """A = F^{d+1} det(G̃), G̃_{jk} = (F_j F_k̄ − F_{jk̄} F)/F², F = N^μ."""
    if not mu > 0:
        raise PreconditionError(f"mu must be positive, got {mu}")
    F, Fz, H = _norm_power_derivatives(spec, mu, z, stencil)
    Fb = F[..., None, None]
    outer = Fz[..., :, None] * np.conj(Fz)[..., None, :]
    G = (outer - H * Fb) / Fb ** 2
    A = F ** (spec.dim + 1) * np.linalg.det(G).real
    return A if np.ndim(A) else float(A)


def boundary_density_cofactor(spec: DomainSpec, mu: float, z, stencil: Stencil | None = None):
    """Cofactor form F·det(−H) + Σ_{jk} (−1)^{j+k} F̄_j F_k det(−H without row k, col j).

    Same quantity as ``boundary_density_A``, assembled minor by minor.
    """
    if not mu > 0:
        raise PreconditionError(f"mu must be positive, got {mu}")
    F, Fz, H = _norm_power_derivatives(spec, mu, z, stencil)
    M = -H
    d = spec.dim
    total = F * np.linalg.det(M).real
    for j in range(d):
        for k in range(d):
            if d == 1:
                minor = np.ones(F.shape)
            else:
                sub = np.delete(np.delete(M, k, axis=-2), j, axis=-1)
                minor = np.linalg.det(sub)
            total = total + ((-1) ** (j + k) * np.conj(Fz[..., j]) * Fz[..., k] * minor).real
    return total if np.ndim(total) else float(total)


def boundary_constant_residual(spec: DomainSpec, mu: float, samples: SampleSet, stencil: Stencil | None = None):
    """(mean, max relative deviation) of A(z)·N(z)^{γ − μ(d+1)}."""
    pts = samples.points
    A = boundary_density_A(spec, mu, pts, stencil)
    N = generic_norm(spec, pts)
    c = A * N ** (spec.genus - mu * (spec.dim + 1))
    mean = math.fsum(c) / len(c)
    dev = float(np.max(np.abs(c / mean - 1.0)))
    log.info("%s μ=%g: A·N^(γ−μ(d+1)) = %.10g (dev %.2e)", spec.kind, mu, mean, dev)
    return mean, dev
