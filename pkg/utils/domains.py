# utils/domains.py
"""Classical bounded symmetric domains (types I–IV): invariants, generic norms,
membership and seeded interior sampling."""
import logging
import math
import os
import re

import numpy as np

from models import DomainKind, DomainSpec, SampleSet, TypeI, TypeII, TypeIII, TypeIV
from utils.errors import (
    ConsistencyError,
    InvalidKindError,
    NonpositiveNormError,
    SamplingError,
    ShapeError,
)

log = logging.getLogger(__name__)

# ── Sampler config ──────────────────────────────────────────────────────────
MAX_TRIALS: int = int(os.getenv("CH_MAX_TRIALS", "50000000"))
MIN_ACCEPTANCE: float = 1e-6
ACCEPTANCE_PROBE: int = 1_000_000   # trials before the acceptance floor is enforced
BATCH_MIN: int = 4096
BATCH_MAX: int = 1 << 20

KIND_RE = re.compile(r"^type(i|ii|iii|iv):(\d+)(?:,(\d+))?$", re.IGNORECASE)


# ── Kind parsing ────────────────────────────────────────────────────────────
def parse_kind(text: str) -> DomainKind:
    """``typeI:p,q`` / ``typeII:n`` / ``typeIII:n`` / ``typeIV:n`` -> DomainKind.

    The family tag is matched case-insensitively (``typei:1,2`` works too);
    parameter bounds are checked later by ``make_domain``.
    """
    m = KIND_RE.match((text or "").strip())
    if not m:
        raise InvalidKindError(f"cannot parse domain kind {text!r}")
    family, first, second = m.groups()
    family = family.upper()
    if family == "I":
        if second is None:
            raise InvalidKindError(f"typeI needs two parameters, got {text!r}")
        return TypeI(int(first), int(second))
    if second is not None:
        raise InvalidKindError(f"type{family} takes one parameter, got {text!r}")
    return {"II": TypeII, "III": TypeIII, "IV": TypeIV}[family](int(first))


def _check_bounds(kind: DomainKind):
    fam, par = kind.family, kind.params
    if fam == "I":
        p, q = par
        if p < 1 or q < 1 or p > q:
            raise InvalidKindError(f"typeI:{p},{q} needs 1 <= p <= q")
    elif fam == "II":
        if par[0] < 2:
            raise InvalidKindError(f"typeII:{par[0]} needs n >= 2")
    elif fam == "III":
        if par[0] < 4:
            raise InvalidKindError(f"typeIII:{par[0]} needs n >= 4")
    elif fam == "IV":
        if par[0] < 3:
            raise InvalidKindError(f"typeIV:{par[0]} needs n >= 3 (n = 2 is reducible)")
    else:
        raise InvalidKindError(f"unknown family {fam!r}")


# ── Invariants ──────────────────────────────────────────────────────────────
def _rab(kind: DomainKind):
    fam, par = kind.family, kind.params
    if fam == "I":
        p, q = par
        return p, 2, q - p
    if fam == "II":
        return par[0], 1, 0
    if fam == "III":
        n = par[0]
        return n // 2, 4, 0 if n % 2 == 0 else 2
    return 2, par[0] - 2, 0


def direct_invariants(kind: DomainKind):
    """(γ, d) from the closed per-family formulas."""
    fam, par = kind.family, kind.params
    if fam == "I":
        p, q = par
        return p + q, p * q
    n = par[0]
    if fam == "II":
        return n + 1, n * (n + 1) // 2
    if fam == "III":
        return 2 * (n - 1), n * (n - 1) // 2
    return n, n


def make_domain(kind: DomainKind) -> DomainSpec:
    _check_bounds(kind)
    r, a, b = _rab(kind)
    genus = 2 + a * (r - 1) + b
    dim = r + a * r * (r - 1) // 2 + r * b
    direct = direct_invariants(kind)
    if (genus, dim) != direct:
        raise ConsistencyError(
            f"{kind}: table gives (γ, d) = {(genus, dim)}, direct formulas give {direct}"
        )
    return DomainSpec(kind=kind, r=r, a=a, b=b, genus=genus, dim=dim)


def enumerate_kinds(max_dim: int) -> list[DomainKind]:
    """Every constructible classical kind with dim <= max_dim."""
    kinds = []
    for p in range(1, max_dim + 1):
        for q in range(p, max_dim // p + 1):
            kinds.append(TypeI(p, q))
    n = 2
    while n * (n + 1) // 2 <= max_dim:
        kinds.append(TypeII(n))
        n += 1
    n = 4
    while n * (n - 1) // 2 <= max_dim:
        kinds.append(TypeIII(n))
        n += 1
    for n in range(3, max_dim + 1):
        kinds.append(TypeIV(n))
    return kinds


# ── Coordinates ─────────────────────────────────────────────────────────────
def _check_shape(spec: DomainSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0 or z.shape[-1] != spec.dim:
        raise ShapeError(f"{spec.kind} expects {spec.dim} coordinates, got shape {z.shape}")
    return z


def to_matrix(spec: DomainSpec, z) -> np.ndarray:
    """Rebuild the matrix Z (types I–III) from flattened coordinates (..., dim)."""
    z = _check_shape(spec, z)
    fam, par = spec.kind.family, spec.kind.params
    batch = z.shape[:-1]
    if fam == "I":
        p, q = par
        return z.reshape(batch + (p, q))
    n = par[0]
    Z = np.zeros(batch + (n, n), dtype=complex)
    if fam == "II":
        iu = np.triu_indices(n)
        Z[..., iu[0], iu[1]] = z
        Z[..., iu[1], iu[0]] = z
        return Z
    if fam == "III":
        iu = np.triu_indices(n, 1)
        Z[..., iu[0], iu[1]] = z
        Z[..., iu[1], iu[0]] = -z
        return Z
    raise ShapeError("type IV points are plain vectors")


def from_matrix(spec: DomainSpec, Z) -> np.ndarray:
    """Inverse of ``to_matrix`` (row-major; II upper triangle, III strict upper)."""
    Z = np.asarray(Z, dtype=complex)
    fam, par = spec.kind.family, spec.kind.params
    if fam == "I":
        return Z.reshape(Z.shape[:-2] + (par[0] * par[1],))
    n = par[0]
    iu = np.triu_indices(n, 0 if fam == "II" else 1)
    return Z[..., iu[0], iu[1]]


def _defect_eigs(spec: DomainSpec, z) -> np.ndarray:
    """Eigenvalues of I − Z Z* (ascending)."""
    Z = to_matrix(spec, z)
    ZZ = Z @ np.conj(np.swapaxes(Z, -1, -2))
    eye = np.eye(ZZ.shape[-1])
    return np.linalg.eigvalsh(eye - ZZ)


def raw_norm(spec: DomainSpec, z) -> np.ndarray:
    """Generic norm polynomial without membership checks (may be <= 0 outside)."""
    z = _check_shape(spec, z)
    fam = spec.kind.family
    if fam == "IV":
        s2 = np.sum(z * z, axis=-1)
        return 1.0 - 2.0 * np.sum(np.abs(z) ** 2, axis=-1) + np.abs(s2) ** 2
    if fam == "III":
        # eigenvalues of I − ZZ* come in equal pairs; one per pair gives the signed root
        eig = _defect_eigs(spec, z)
        half = spec.kind.params[0] // 2
        return np.prod(eig[..., 0:2 * half:2], axis=-1)
    Z = to_matrix(spec, z)
    ZZ = Z @ np.conj(np.swapaxes(Z, -1, -2))
    return np.linalg.det(np.eye(ZZ.shape[-1]) - ZZ).real


def _closed_membership(spec: DomainSpec, z, tol: float) -> np.ndarray:
    z = _check_shape(spec, z)
    if spec.kind.family == "IV":
        s2 = np.abs(np.sum(z * z, axis=-1))
        nz = np.sum(np.abs(z) ** 2, axis=-1)
        return (s2 <= 1 + tol) & (2 * nz <= 1 + s2 ** 2 + tol)
    return _defect_eigs(spec, z)[..., 0] >= -tol


def contains(spec: DomainSpec, z) -> np.ndarray:
    """Open-domain membership; batched over leading axes."""
    z = _check_shape(spec, z)
    if spec.kind.family == "IV":
        s2 = np.abs(np.sum(z * z, axis=-1))
        nz = np.sum(np.abs(z) ** 2, axis=-1)
        return (s2 < 1) & (2 * nz < 1 + s2 ** 2)
    return _defect_eigs(spec, z)[..., 0] > 0


def generic_norm(spec: DomainSpec, z) -> np.ndarray:
    """N(z, z̄), in (0, 1] on the interior and 0 on the boundary."""
    z = _check_shape(spec, z)
    if not np.all(_closed_membership(spec, z, 1e-12)):
        raise NonpositiveNormError(f"point outside the closed domain {spec.kind}")
    value = np.clip(raw_norm(spec, z), 0.0, None)
    return value if value.ndim else float(value)


# ── Sampling ────────────────────────────────────────────────────────────────
def uniform_polydisk(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    r = np.sqrt(rng.random((count, dim)))
    phase = np.exp(2j * np.pi * rng.random((count, dim)))
    return r * phase


def rejection_sample(accept, dim: int, count: int, seed, label: str = "domain"):
    """Uniform points of {accept} inside the unit polydisk of C^dim.

    ``accept`` maps a (k, dim) batch to a boolean mask. Returns the accepted
    points and the acceptance ratio over all trials. Batch sizes depend only on
    earlier outcomes, so the stream is reproducible from the seed.
    """
    rng = np.random.default_rng(seed)
    kept, n_acc, trials = [], 0, 0
    while n_acc < count:
        ratio = n_acc / trials if n_acc else 0.0
        want = (count - n_acc) / ratio * 1.2 if ratio else 4 * count
        batch = int(min(BATCH_MAX, max(BATCH_MIN, want)))
        cand = uniform_polydisk(rng, batch, dim)
        mask = accept(cand)
        kept.append(cand[mask])
        n_acc += int(mask.sum())
        trials += batch
        if trials >= ACCEPTANCE_PROBE and n_acc / trials < MIN_ACCEPTANCE:
            raise SamplingError(
                f"{label}: acceptance {n_acc / trials:.2e} below {MIN_ACCEPTANCE:g} "
                f"after {trials} trials"
            )
        if trials >= MAX_TRIALS and n_acc < count:
            raise SamplingError(f"{label}: trial budget {MAX_TRIALS} exhausted ({n_acc}/{count})")
    ratio = n_acc / trials
    log.info("%s: acceptance %.4f over %d trials", label, ratio, trials)
    return np.concatenate(kept)[:count], ratio, trials


def sample_interior(spec: DomainSpec, count: int, seed: int, min_norm: float = 0.0) -> SampleSet:
    """Seeded uniform interior points; weights estimate Lebesgue integrals over Ω.

    With ``min_norm > 0`` the sampled region is {N > min_norm} and the weights
    integrate over that region.
    """
    if count < 1:
        raise ShapeError("count must be positive")

    def accept(cand):
        ok = contains(spec, cand)
        if min_norm > 0:
            ok &= raw_norm(spec, cand) > min_norm
        return ok

    points, ratio, trials = rejection_sample(accept, spec.dim, count, seed, str(spec.kind))
    box = math.pi ** spec.dim
    weights = np.full(count, box * ratio / count)
    variance = box ** 2 * ratio * (1 - ratio) / trials
    return SampleSet(points, weights, seed=seed, variance_hint=variance, kind="mc")
