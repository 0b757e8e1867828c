# utils/errors.py
"""Exception hierarchy for the Cartan–Hartogs toolkit.

Every failure raised by the engines derives from ``CartanHartogsError`` so the
command layer can turn it into a ``{"ok": false, "error": ...}`` report.
Errors caused by bad input also derive from ``ValueError``.
"""


class CartanHartogsError(Exception):
    """Base class for all toolkit errors."""


# ── Input / parameter errors ────────────────────────────────────────────────
class InvalidKindError(CartanHartogsError, ValueError):
    """Domain kind with parameters outside the classical bounds."""


class ConsistencyError(CartanHartogsError):
    """Invariant table and direct formulas disagree."""


class ShapeError(CartanHartogsError, ValueError):
    """Coordinate vector of the wrong length."""


class PreconditionError(CartanHartogsError, ValueError):
    """An operation was called outside its documented preconditions."""


class HypothesisError(PreconditionError):
    """m does not satisfy m > max(d + d0, (γ - 1)/μ)."""


class GridError(CartanHartogsError, ValueError):
    """Interpolation or fitting grid is too small, duplicated or clustered."""


class UnsupportedError(CartanHartogsError):
    """Configuration outside the supported scope (e.g. d0 != 1 on the boundary)."""


# ── Geometry errors ─────────────────────────────────────────────────────────
class DomainViolationError(CartanHartogsError, ValueError):
    """A function that must stay positive was evaluated where it is not."""


class NonpositiveNormError(DomainViolationError):
    """Generic norm evaluated outside the closed domain."""


class OutsideDomainError(DomainViolationError):
    """Point outside the base domain or the Cartan–Hartogs domain."""


class BoundaryError(CartanHartogsError, ValueError):
    """Point expected on the smooth boundary is not there."""


class MetricError(CartanHartogsError):
    """Metric failed to be positive definite at an interior point."""


# ── Numerical errors ────────────────────────────────────────────────────────
class PoleError(CartanHartogsError):
    """Gamma ratio hits a pole that does not cancel."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SamplingError(CartanHartogsError):
    """Rejection sampler acceptance ratio too small."""


class IntegrandError(CartanHartogsError):
    """Integrand returned a non-finite value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class QuadratureError(CartanHartogsError):
    """Quadrature noise produced an invalid Gram matrix."""


class IllConditionedError(CartanHartogsError):
    """Gram matrix condition number above the guard."""


class ZDependenceError(CartanHartogsError):
    """Fitted coefficients disagree between sample points."""


class NearBoundaryError(CartanHartogsError):
    """Series tail bound not reachable within the cutoff budget."""
