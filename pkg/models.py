# models.py
"""Value types shared by the engines and the command layer."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import os

import numpy as np

from utils.errors import PreconditionError, ShapeError

FD_STEP = float(os.getenv("CH_FD_STEP", "1e-3"))
FD_RICHARDSON = os.getenv("CH_FD_RICHARDSON", "1").strip().lower() not in ("0", "false", "no", "off")


# -----------------------------
# 1. Domain kind / spec
# -----------------------------
@dataclass(frozen=True)
class DomainKind:
    """Classical family tag plus its integer parameters, e.g. ("I", (2, 2))."""
    family: str
    params: tuple[int, ...]

    def __str__(self):
        return f"type{self.family}:" + ",".join(str(p) for p in self.params)


def TypeI(p: int, q: int) -> DomainKind:
    return DomainKind("I", (int(p), int(q)))


def TypeII(n: int) -> DomainKind:
    return DomainKind("II", (int(n),))


def TypeIII(n: int) -> DomainKind:
    return DomainKind("III", (int(n),))


def TypeIV(n: int) -> DomainKind:
    return DomainKind("IV", (int(n),))


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind
    r: int
    a: int
    b: int
    genus: int
    dim: int

    def __repr__(self):
        return f"<DomainSpec {self.kind} r={self.r} a={self.a} b={self.b} γ={self.genus} d={self.dim}>"

    @property
    def is_ball(self) -> bool:
        """Rank-1 type I, i.e. the unit ball of C^dim."""
        return self.kind.family == "I" and self.kind.params[0] == 1

    def to_dict(self):
        return {
            "kind": str(self.kind),
            "r": self.r,
            "a": self.a,
            "b": self.b,
            "genus": self.genus,
            "dim": self.dim,
        }


# -----------------------------
# 2. Finite-difference stencil
# -----------------------------
@dataclass(frozen=True)
class Stencil:
    step: float = FD_STEP
    richardson: bool = FD_RICHARDSON

    def __post_init__(self):
        if not (1e-6 <= self.step <= 1e-1):
            raise PreconditionError(f"stencil step {self.step} outside [1e-6, 1e-1]")


# -----------------------------
# 3. Quadrature nodes
# -----------------------------
@dataclass(eq=False)
class SampleSet:
    """Weighted nodes; ``kind`` is "mc" (Monte Carlo) or "radial" (angles integrated analytically)."""
    points: np.ndarray
    weights: np.ndarray
    seed: int | None = None
    variance_hint: float = 0.0
    kind: str = "mc"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if self.points.ndim == 1:
            self.points = self.points[:, None]
        self.weights = np.asarray(self.weights, dtype=float)
        if self.points.shape[0] != self.weights.shape[0]:
            raise ShapeError(
                f"{self.points.shape[0]} points but {self.weights.shape[0]} weights"
            )
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise PreconditionError("sample weights must be finite and positive")
        if self.kind not in ("mc", "radial"):
            raise PreconditionError(f"unknown sample kind {self.kind!r}")

    def __len__(self):
        return self.weights.shape[0]

    def __repr__(self):
        return f"<SampleSet {self.kind} n={len(self)} dim={self.points.shape[1]} seed={self.seed}>"

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


# -----------------------------
# 4. Cartan–Hartogs domain
# -----------------------------
@dataclass(frozen=True)
class HartogsParams:
    base: DomainSpec
    mu: float
    d0: int = 1

    def __post_init__(self):
        if not self.mu > 0:
            raise PreconditionError(f"mu must be positive, got {self.mu}")
        if int(self.d0) != self.d0 or self.d0 < 1:
            raise PreconditionError(f"d0 must be a positive integer, got {self.d0}")

    def __repr__(self):
        return f"<HartogsParams base={self.base.kind} μ={self.mu} d0={self.d0}>"

    @property
    def n(self) -> int:
        """Total complex dimension d + d0."""
        return self.base.dim + self.d0

    def to_dict(self):
        return {"base": str(self.base.kind), "mu": self.mu, "d0": self.d0}


@dataclass(eq=False)
class HartogsPoint:
    """(z, w); both arrays may carry matching leading batch axes."""
    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        self.w = np.asarray(self.w, dtype=complex)
        if self.z.shape[:-1] != self.w.shape[:-1]:
            raise ShapeError(f"z batch {self.z.shape[:-1]} != w batch {self.w.shape[:-1]}")

    @classmethod
    def from_coords(cls, coords, d: int):
        coords = np.asarray(coords, dtype=complex)
        return cls(coords[..., :d], coords[..., d:])

    @property
    def coords(self) -> np.ndarray:
        return np.concatenate([self.z, self.w], axis=-1)

    @property
    def w_norm2(self) -> np.ndarray:
        return np.sum(np.abs(self.w) ** 2, axis=-1)

    def rotate(self, lam: complex) -> "HartogsPoint":
        """S^1 action (z, w) -> (z, λw)."""
        return HartogsPoint(self.z, lam * self.w)

    def to_dict(self):
        return {"z": [[c.real, c.imag] for c in self.z.ravel()],
                "w": [[c.real, c.imag] for c in self.w.ravel()]}


@dataclass(frozen=True)
class BoundarySample:
    z: np.ndarray
    theta: np.ndarray
    weight: float


@dataclass(eq=False)
class BoundarySamples:
    """Columnar boundary nodes for d0 = 1; indexing yields ``BoundarySample``."""
    params: HartogsParams
    base: SampleSet
    theta: np.ndarray
    weights: np.ndarray
    kappa: np.ndarray

    def __len__(self):
        return self.weights.shape[0]

    def __getitem__(self, i):
        return BoundarySample(self.base.points[i], np.atleast_1d(self.theta[i]), float(self.weights[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def z(self) -> np.ndarray:
        return self.base.points

    @property
    def seed(self):
        return self.base.seed


# -----------------------------
# 5. TYZ / Kempf distortion
# -----------------------------
@dataclass(eq=False)
class DistortionReport:
    params: HartogsParams
    m_grid: list[int]
    point: HartogsPoint
    values: list[float]
    coefficients: list[float]
    interpolation_residual: float
    check_grid: list[int] = field(default_factory=list)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "point": self.point.to_dict(),
            "m_grid": list(self.m_grid),
            "values": list(self.values),
            "coefficients": list(self.coefficients),
            "check_grid": list(self.check_grid),
            "residual": self.interpolation_residual,
        }


# -----------------------------
# 6. Hardy space / Szegő kernel
# -----------------------------
@dataclass(frozen=True)
class MonomialBasis:
    """Multi-indices with total degree <= cutoff, lexicographically sorted."""
    exponents: tuple[tuple[int, ...], ...]

    @classmethod
    def up_to(cls, nvars: int, cutoff: int) -> "MonomialBasis":
        seen = set()
        for deg in range(cutoff + 1):
            for combo in combinations_with_replacement(range(nvars), deg):
                alpha = [0] * nvars
                for j in combo:
                    alpha[j] += 1
                seen.add(tuple(alpha))
        return cls(tuple(sorted(seen)))

    def __len__(self):
        return len(self.exponents)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.exponents, dtype=int).reshape(len(self), -1)

    @property
    def degrees(self) -> np.ndarray:
        return self.array.sum(axis=1)

    def truncated(self, cutoff: int) -> "MonomialBasis":
        return MonomialBasis(tuple(a for a in self.exponents if sum(a) <= cutoff))


@dataclass(eq=False)
class GramFactor:
    """C with C G C* = I; a 1-D ``coefficients`` array means C is diagonal."""
    basis: MonomialBasis
    coefficients: np.ndarray
    condition_number: float
    gram: np.ndarray

    @property
    def is_diagonal(self) -> bool:
        return self.coefficients.ndim == 1

    def dense_gram(self) -> np.ndarray:
        return np.diag(self.gram) if self.gram.ndim == 1 else self.gram

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Orthonormal-family values from monomial values (..., len(basis))."""
        if self.is_diagonal:
            return values * self.coefficients
        return values @ self.coefficients.T

    def kernel(self, values: np.ndarray) -> np.ndarray:
        """Diagonal reproducing kernel Σ_j |s_j|^2 at the given monomial values."""
        return np.sum(np.abs(self.apply(values)) ** 2, axis=-1)


@dataclass
class SzegoEvaluation:
    point: HartogsPoint
    series_value: float
    closed_value: float
    m_cutoff: int
    degree_cutoff: int
    tail_estimate: float

    def to_dict(self):
        return {
            "point": self.point.to_dict(),
            "series": self.series_value,
            "closed": self.closed_value,
            "m_cutoff": self.m_cutoff,
            "degree_cutoff": self.degree_cutoff,
            "tail": self.tail_estimate,
        }


@dataclass
class LogTermFit:
    a_estimate: float
    b_estimate: float
    residual: float
    coefficients: list[float] = field(default_factory=list)
    grid: list[float] = field(default_factory=list)

    def to_dict(self):
        return {"a": self.a_estimate, "b": self.b_estimate, "residual": self.residual}
