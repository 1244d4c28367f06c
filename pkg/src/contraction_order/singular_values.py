"""Products of leading singular values and the equal-singular-value range test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contraction import defect_operator
from .errors import NotApplicable, ShapeMismatch, YNotContraction
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, complement, contains, opnorm, range_basis, svd

__all__ = [
    "leading_sigmas",
    "log_leading_product",
    "horn_products",
    "horn_holds",
    "contraction_corollary_check",
    "RangeLemmaReport",
    "equal_sv_range_lemma",
]

_UNDERFLOW = 1e-150


def leading_sigmas(M, k: int) -> np.ndarray:
    """First ``k`` singular values, padded with zeros."""
    s = svd(M)[1]
    out = np.zeros(k)
    m = min(k, s.size)
    out[:m] = s[:m]
    return out


def log_leading_product(M, k: int) -> float:
    """log of prod_{t<=k} sigma_t(M); ``-inf`` when a factor vanishes."""
    return _log_product(leading_sigmas(M, k))


def _product(s: np.ndarray) -> float:
    if np.any(s < _UNDERFLOW):
        if np.any(s == 0):
            return 0.0
        return float(np.exp(np.sum(np.log(s))))
    return float(np.prod(s))


def _product_sigmas(X, Y, k: int) -> np.ndarray:
    """Leading singular values of ``YX``; indices past the inner dimension are exactly zero."""
    s = leading_sigmas(Y @ X, k)
    s[X.shape[0]:] = 0.0
    return s


def _log_product(s: np.ndarray) -> float:
    if np.any(s == 0):
        return -np.inf
    return float(np.sum(np.log(s)))


def _composable(X, Y):
    X = as_matrix(X, "X")
    Y = as_matrix(Y, "Y")
    if Y.shape[1] != X.shape[0]:
        raise ShapeMismatch(f"Y is {Y.shape}, X is {X.shape}: YX undefined")
    return X, Y


def horn_products(X, Y, k: int) -> tuple[float, float]:
    """``(prod sigma_t(YX), prod sigma_t(Y) * prod sigma_t(X))`` over ``t <= k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    X, Y = _composable(X, Y)
    lhs = _product(_product_sigmas(X, Y, k))
    rhs = _product(leading_sigmas(Y, k)) * _product(leading_sigmas(X, k))
    return lhs, rhs


def horn_holds(X, Y, k: int, slack: float = 1e-10) -> bool:
    """Horn's inequality with relative slack, compared in log space."""
    X, Y = _composable(X, Y)
    lhs = _log_product(_product_sigmas(X, Y, k))
    rhs = log_leading_product(Y, k) + log_leading_product(X, k)
    if lhs == -np.inf:
        return True
    return lhs <= rhs + np.log1p(slack)


def contraction_corollary_check(
    X, Y, k: int, slack: float = 1e-10, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """For a contraction ``Y``: prod sigma_t(YX) <= prod sigma_t(X)."""
    X, Y = _composable(X, Y)
    if opnorm(Y) > 1 + tol.residual_tol:
        raise YNotContraction(f"||Y|| = {opnorm(Y)!r}")
    lhs = _log_product(_product_sigmas(X, Y, k))
    rhs = log_leading_product(X, k)
    if lhs == -np.inf:
        return True
    return lhs <= rhs + np.log1p(slack)


@dataclass(eq=False)
class RangeLemmaReport:
    holds: bool
    sigma_gap: float
    defect_residual: float
    range_dim: int


def equal_sv_range_lemma(X, Y, tol: Tolerance = DEFAULT_TOL) -> RangeLemmaReport:
    """If X and YX share singular values (Y a contraction), R(X) ⊥ D_Y.

    Raises :class:`NotApplicable` when the singular values differ.  The
    report's ``holds`` is the containment ``R(X) ⊂ D_Y^perp``;
    ``defect_residual`` is ``||D_Y P_{R(X)}||`` for information.
    """
    X, Y = _composable(X, Y)
    if opnorm(Y) > 1 + tol.residual_tol:
        raise YNotContraction(f"||Y|| = {opnorm(Y)!r}")
    k = max(min(X.shape), min(Y.shape[0], X.shape[1]))
    gap = float(np.max(np.abs(leading_sigmas(X, k) - leading_sigmas(Y @ X, k)), initial=0.0))
    if gap > tol.residual_tol:
        raise NotApplicable(gap)
    R = range_basis(X, tol)
    D, Dspace = defect_operator(Y, tol)
    holds = contains(complement(Dspace), R)
    return RangeLemmaReport(holds, gap, opnorm(D @ R.frame), R.dim)
