"""Exception hierarchy.

Every error raised deliberately by the toolkit derives from
:class:`ContractionError`, so callers can separate toolkit failures from
generic numpy/scipy errors.
"""

from __future__ import annotations


class ContractionError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(ContractionError, ValueError):
    """Input matrix has the wrong type or contains NaN/Inf."""


class AmbientMismatch(ContractionError, ValueError):
    """Two subspaces live in ambient spaces of different dimension."""


class ShapeMismatch(ContractionError, ValueError):
    """Operator shapes are not composable."""


class NotSquare(ContractionError, ValueError):
    pass


class NotContractive(ContractionError, ValueError):
    def __init__(self, sigma_max: float, limit: float):
        super().__init__(f"largest singular value {sigma_max!r} exceeds {limit!r}")
        self.sigma_max = sigma_max


class NotUnitary(ContractionError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"||U*U - I|| = {residual:.3e}")
        self.residual = residual


class BNotCnu(ContractionError, ValueError):
    """The right-hand operator has a nonzero unitary part."""


class LambdaOnBoundary(ContractionError, ValueError):
    pass


class SingularResolvent(ContractionError, ArithmeticError):
    """(I - lambda T*) is numerically singular although |lambda| < 1.

    For a validated contraction this cannot happen, so it points at a
    validation bug upstream.
    """


class GridMismatch(ContractionError, ValueError):
    pass


class NotInvariant(ContractionError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"subspace is not invariant: ||(I-P)TP|| = {residual:.3e}")
        self.residual = residual


class RestrictionNotUnitary(ContractionError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"restriction is not unitary: residual {residual:.3e}")
        self.residual = residual


class PreconditionViolated(ContractionError, ValueError):
    pass


class NoConvergence(ContractionError, RuntimeError):
    def __init__(self, msg: str, diagnostics: dict | None = None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class YNotContraction(ContractionError, ValueError):
    pass


class NotApplicable(ContractionError, ValueError):
    def __init__(self, max_gap: float):
        super().__init__(f"singular values differ (max gap {max_gap:.3e})")
        self.max_gap = max_gap


class WindowTooSmall(ContractionError, ValueError):
    pass


class DimsTooLarge(ContractionError, ValueError):
    pass


class DocumentError(ContractionError, ValueError):
    """Malformed input document; carries a JSON path and/or byte offset."""

    def __init__(self, msg: str, path: str | None = None, offset: int | None = None):
        where = []
        if path is not None:
            where.append(f"path {path}")
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{msg} ({', '.join(where)})" if where else msg)
        self.path = path
        self.offset = offset
