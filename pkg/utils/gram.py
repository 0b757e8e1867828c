# utils/gram.py
"""Monomial Gram matrices and their orthonormalising factors."""
import logging
import os

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import comb

from models import GramFactor, MonomialBasis
from utils.errors import IllConditionedError, PreconditionError, QuadratureError

log = logging.getLogger(__name__)

COND_MAX: float = float(os.getenv("CH_COND_MAX", "1e12"))
GRAM_MAX_ENTRIES: int = int(float(os.getenv("CH_GRAM_MAX_ENTRIES", "5e7")))
NODES_PER_MONOMIAL = 10


def monomial_values(points, basis: MonomialBasis) -> np.ndarray:
    """z^α for every α in the basis; points (..., nvars) -> (..., len(basis))."""
    points = np.asarray(points, dtype=complex)
    alpha = basis.array
    top = int(alpha.max()) if alpha.size else 0
    # power table: powers[..., j, k] = z_j^k
    powers = np.ones(points.shape + (top + 1,), dtype=complex)
    for k in range(1, top + 1):
        powers[..., k] = powers[..., k - 1] * points
    out = np.ones(points.shape[:-1] + (len(basis),), dtype=complex)
    for j in range(alpha.shape[1]):
        out *= powers[..., j, :][..., alpha[:, j]]
    return out


def effective_nodes(weights) -> float:
    """Kish effective sample size (Σ|w|)² / Σ|w|²."""
    w = np.abs(np.asarray(weights))
    total = float(w.sum())
    return total ** 2 / float(np.sum(w ** 2)) if total > 0 else 0.0


def supported_degree(nvars: int, weights, cutoff: int) -> int:
    """Largest degree <= cutoff leaving NODES_PER_MONOMIAL effective nodes per monomial; never below 0."""
    ess = effective_nodes(weights)
    degree = cutoff
    while degree > 0 and NODES_PER_MONOMIAL * comb(nvars + degree, degree, exact=True) > ess:
        degree -= 1
    return degree


def gram_matrix(points, weights, basis: MonomialBasis, diagonal: bool = False,
                graded: bool = False) -> np.ndarray:
    """G_{αβ} = Σ_i weights_i z_i^α conj(z_i^β); only |z^α|² terms when ``diagonal``.

    ``graded`` zeroes the entries with |α| != |β|, which vanish exactly for a
    circular measure and only carry sampling noise.
    """
    n = len(points)
    if n * len(basis) > GRAM_MAX_ENTRIES:
        raise PreconditionError(
            f"{len(basis)} monomials on {n} nodes exceed CH_GRAM_MAX_ENTRIES={GRAM_MAX_ENTRIES} (lower the degree)")
    if not diagonal and n < NODES_PER_MONOMIAL * len(basis):
        raise IllConditionedError(
            f"{len(basis)} monomials need at least {NODES_PER_MONOMIAL * len(basis)} nodes, got {n}")
    phi = monomial_values(points, basis)
    if diagonal:
        return np.einsum("i,ia->a", weights, np.abs(phi) ** 2)
    G = phi.T @ (weights[:, None] * np.conj(phi))
    if graded:
        degrees = basis.degrees
        G[degrees[:, None] != degrees[None, :]] = 0
    return G


def gram_factor(basis: MonomialBasis, gram: np.ndarray) -> GramFactor:
    """Orthonormalise: C lower-triangular with C G C* = I.

    Cholesky is taken on the Jacobi-scaled Gram D^{-1/2} G D^{-1/2}; its
    condition number is the one guarded.
    """
    gram = np.asarray(gram)
    diag = np.real(gram if gram.ndim == 1 else np.diag(gram))
    if np.any(~np.isfinite(diag)) or np.any(diag <= 0):
        raise QuadratureError("Gram matrix has a nonpositive diagonal entry")
    if gram.ndim == 1:
        return GramFactor(basis, 1.0 / np.sqrt(diag), 1.0, gram)
    scale = 1.0 / np.sqrt(diag)
    S = gram * scale[:, None] * scale[None, :]
    S = 0.5 * (S + S.conj().T)
    cond = float(np.linalg.cond(S))
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedError(f"Gram condition number {cond:.3e} exceeds {COND_MAX:.0e}")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as e:
        raise QuadratureError(f"Gram matrix not positive definite: {e}")
    Linv = solve_triangular(L, np.eye(L.shape[0]), lower=True)
    log.info("gram: %d monomials, cond %.3e", len(basis), cond)
    return GramFactor(basis, Linv * scale[None, :], cond, gram)
