"""Dense complex kernels and subspace algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Subspaces are
carried as orthonormal frames (the columns of an ``ambient x k`` array) along
with the :class:`Tolerance` under which they were extracted.

All rank decisions go through one thresholding rule: a singular value
counts as zero when it is at most ``rank_tol * scale`` where ``scale`` is the
largest singular value unless the caller supplies the natural scale of the
problem (``1`` for matrices like ``I - A*A``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from .errors import AmbientMismatch, InvalidInput

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Subspace",
    "as_matrix",
    "svd",
    "opnorm",
    "kernel_basis",
    "range_basis",
    "intersect",
    "complement",
    "sum_spaces",
    "contains",
    "same_subspace",
    "zero_subspace",
    "full_space",
    "coordinate_subspace",
    "canonical_phase",
    "nearest_unitary",
    "haar_unitary",
]


@dataclass(frozen=True)
class Tolerance:
    """Global numerical policy.

    rank_tol
        Relative cut on singular values for every rank decision.
    residual_tol
        Absolute bound on operator-norm residuals (isometry, intertwining,
        invariance, ...).
    """

    rank_tol: float = 1e-9
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise InvalidInput(f"{name} must lie in (0, 1), got {v!r}")

    def to_dict(self) -> dict:
        return {"rank_tol": self.rank_tol, "residual_tol": self.residual_tol}


DEFAULT_TOL = Tolerance()


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array (copy)."""
    try:
        arr = np.array(M, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: cannot convert to a complex matrix ({exc})") from None
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidInput(f"{name}: expected 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name}: contains NaN or Inf")
    return arr


def svd(M, full_matrices: bool = False):
    """Singular value decomposition ``M = U diag(s) V*``.

    Returns ``(U, s, V)`` (note: ``V``, not ``V*``) with ``s`` nonincreasing.
    Empty matrices are allowed.
    """
    M = as_matrix(M)
    m, n = M.shape
    if m == 0 or n == 0:
        k = m if full_matrices else 0
        l = n if full_matrices else 0
        return (np.eye(m, k, dtype=complex), np.zeros(0), np.eye(n, l, dtype=complex))
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=full_matrices)
    except np.linalg.LinAlgError:
        U, s, Vh = spla.svd(M, full_matrices=full_matrices, lapack_driver="gesvd")
    return U, s, Vh.conj().T


def opnorm(M) -> float:
    """Spectral norm; 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def canonical_phase(frame: np.ndarray) -> np.ndarray:
    """Rotate each column so its first entry of maximal modulus is real positive.

    Makes one-dimensional frames canonical and multi-dimensional frames
    reproducible.
    """
    frame = np.array(frame, dtype=complex)
    for j in range(frame.shape[1]):
        col = frame[:, j]
        mags = np.abs(col)
        i = int(np.argmax(mags > mags.max() * (1 - 1e-12)))
        if mags[i] > 0:
            frame[:, j] = col * (abs(col[i]) / col[i])
    return frame


def _cut(s: np.ndarray, tol: Tolerance, scale: float | None) -> int:
    """Numerical rank of a nonincreasing singular value vector."""
    if s.size == 0:
        return 0
    ref = float(s[0]) if scale is None else float(scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_tol * ref))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal frame of a subspace of ``C^ambient_dim``."""

    frame: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex)
        if f.ndim != 2 or f.shape[1] > f.shape[0]:
            raise InvalidInput(f"frame must be ambient x k with k <= ambient, got {f.shape}")
        f.setflags(write=False)
        object.__setattr__(self, "frame", f)

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def orthonormality_residual(self) -> float:
        return opnorm(self.frame.conj().T @ self.frame - np.eye(self.dim))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def zero_subspace(n: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return Subspace(np.zeros((n, 0), dtype=complex), tol)


def full_space(n: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return Subspace(np.eye(n, dtype=complex), tol)


def coordinate_subspace(n: int, indices, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of the standard basis vectors ``e_i`` (0-based indices)."""
    return Subspace(np.eye(n, dtype=complex)[:, list(indices)], tol)


def kernel_basis(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> Subspace:
    """Numerical null space of ``M`` as a subspace of ``C^cols``."""
    M = as_matrix(M)
    m, n = M.shape
    if n == 0:
        return zero_subspace(0, tol)
    U, s, V = svd(M, full_matrices=True)
    r = _cut(s, tol, scale)
    return Subspace(canonical_phase(V[:, r:]), tol)


def range_basis(M, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> Subspace:
    """Numerical column space of ``M`` as a subspace of ``C^rows``."""
    M = as_matrix(M)
    m, n = M.shape
    if m == 0 or n == 0:
        return zero_subspace(m, tol)
    U, s, _ = svd(M)
    r = _cut(s, tol, scale)
    return Subspace(canonical_phase(U[:, :r]), tol)


def _check_ambient(S1: Subspace, S2: Subspace):
    if S1.ambient_dim != S2.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions {S1.ambient_dim} and {S2.ambient_dim} differ")


def _sine_split(S1: Subspace, S2: Subspace):
    """Decompose S2 against S1 by principal angles.

    Returns ``(inside, outside_frame)``: the directions of S2 whose angle
    with S1 passes the shared-direction test ``1 - cos <= rank_tol``, and
    the normalized components orthogonal to S1 of the remaining ones.
    """
    F1, F2 = S1.frame, S2.frame
    R = F2 - F1 @ (F1.conj().T @ F2)
    if F2.shape[1] == 0:
        return F2, F2
    _, s, V = svd(R, full_matrices=True)
    s_full = np.zeros(F2.shape[1])
    s_full[: s.size] = s
    s_full = np.minimum(s_full, 1.0)
    # 1 - cos(theta) evaluated without cancellation
    one_minus_cos = s_full**2 / (1.0 + np.sqrt(1.0 - s_full**2))
    shared = one_minus_cos <= S1.tol.rank_tol
    inside = F2 @ V[:, shared]
    out = R @ V[:, ~shared]
    out = out / s_full[~shared]
    return inside, out


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    _check_ambient(S1, S2)
    inside, _ = _sine_split(S1, S2)
    if inside.shape[1]:
        inside = spla.qr(inside, mode="economic")[0]
    return Subspace(canonical_phase(inside), S1.tol)


def sum_spaces(S1: Subspace, S2: Subspace) -> Subspace:
    _check_ambient(S1, S2)
    _, out = _sine_split(S1, S2)
    F = np.hstack([S1.frame, out])
    if F.shape[1]:
        F = spla.qr(F, mode="economic")[0]
    return Subspace(canonical_phase(F), S1.tol)


def complement(S: Subspace) -> Subspace:
    n, k = S.frame.shape
    if k == 0:
        return full_space(n, S.tol)
    Q = spla.qr(S.frame, mode="full")[0]
    return Subspace(canonical_phase(Q[:, k:]), S.tol)


def contains(S1: Subspace, S2: Subspace) -> bool:
    """True iff S2 is contained in S1 (every principal angle passes)."""
    _check_ambient(S1, S2)
    inside, _ = _sine_split(S1, S2)
    return inside.shape[1] == S2.dim


def same_subspace(S1: Subspace, S2: Subspace) -> bool:
    return S1.dim == S2.dim and contains(S1, S2) and contains(S2, S1)


def nearest_unitary(M) -> np.ndarray:
    """Polar factor ``U V*`` of ``M`` (isometric when rows >= cols)."""
    U, _, V = svd(M)
    return U @ V.conj().T


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    if n == 0:
        return Z
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
