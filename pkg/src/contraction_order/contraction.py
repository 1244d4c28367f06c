"""Validated contractions, defect data and the unitary / c.n.u. split."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as spla

from .errors import BNotCnu, NotContractive, NotSquare, NotUnitary
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_matrix,
    canonical_phase,
    complement,
    intersect,
    kernel_basis,
    opnorm,
)

__all__ = [
    "Contraction",
    "Decomposition",
    "defect_operator",
    "validate",
    "unitary_cnu_split",
    "unitary_multiplicity",
    "defect_dims",
    "check_defect_inequalities",
    "largest_reducing_subspace_in_kernel",
    "reducing_residual",
]


def defect_operator(M, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, Subspace]:
    """Return ``(D_M, closure of range D_M)`` for a (possibly rectangular) contraction.

    ``D_M = (I - M*M)^{1/2}`` acts on the domain of ``M``.  The square root
    is taken through an eigendecomposition of the Hermitian part; round-off
    negatives down to ``-residual_tol`` are rejected only below that bound.
    Eigenvalues ``1 - s^2 <= rank_tol`` (the natural scale of ``I - M*M`` is
    one) are set to zero, so ``D_M`` vanishes off the defect space and
    ``D_M^2`` matches ``I - M*M`` to within ``rank_tol``.
    """
    M = as_matrix(M)
    n = M.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), Subspace(np.zeros((0, 0)), tol)
    H = np.eye(n) - M.conj().T @ M
    H = (H + H.conj().T) / 2
    mu, V = np.linalg.eigh(H)
    if mu[0] < -tol.residual_tol:
        raise NotContractive(float(np.sqrt(1.0 - mu[0])), 1.0 + tol.residual_tol)
    keep = mu > tol.rank_tol
    # zero the discarded directions so D agrees with its range
    mu = np.where(keep, mu, 0.0)
    D = (V * np.sqrt(mu)) @ V.conj().T
    frame = V[:, keep][:, ::-1]
    return D, Subspace(canonical_phase(frame), tol)


@dataclass(frozen=True, eq=False)
class Contraction:
    """Square contraction together with its defect operators and spaces."""

    matrix: np.ndarray
    defect: np.ndarray
    defect_space: Subspace
    codefect: np.ndarray
    codefect_space: Subspace
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def defect_dim(self) -> int:
        return self.defect_space.dim

    @property
    def codefect_dim(self) -> int:
        return self.codefect_space.dim

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T

    def adjoint(self) -> "Contraction":
        return Contraction(
            self.H, self.codefect, self.codefect_space, self.defect, self.defect_space, self.tol
        )

    @cached_property
    def split(self) -> "Decomposition":
        return unitary_cnu_split(self)

    @property
    def is_cnu(self) -> bool:
        return self.split.unitary_space.dim == 0

    def __repr__(self):
        return f"Contraction(n={self.n}, defect_dim={self.defect_dim})"


def validate(M, tol: Tolerance = DEFAULT_TOL) -> Contraction:
    """Check that ``M`` is a square contraction and cache its defect data."""
    if isinstance(M, Contraction):
        M = M.matrix
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {M.shape}")
    smax = opnorm(M)
    if smax > 1.0 + tol.residual_tol:
        raise NotContractive(smax, 1.0 + tol.residual_tol)
    M.setflags(write=False)
    D, Dspace = defect_operator(M, tol)
    Dstar, Dstar_space = defect_operator(M.conj().T, tol)
    return Contraction(M, D, Dspace, Dstar, Dstar_space, tol)


def reducing_residual(A: np.ndarray, S: Subspace) -> float:
    """max(||(I-P) A P||, ||P A (I-P)||): zero iff S reduces A."""
    F = S.frame
    if F.shape[1] in (0, F.shape[0]):
        return 0.0
    C = complement(S).frame
    return max(opnorm(C.conj().T @ A @ F), opnorm(F.conj().T @ A @ C))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``H = H^c (+) H^u`` with ``A = A_c (+) A_u``.

    In finite dimension every unitary has purely atomic spectral measure, so
    the absolutely continuous unitary part is always zero and
    ``unitary_part`` is also the singular unitary part.
    """

    cnu_space: Subspace
    unitary_space: Subspace
    cnu_part: Contraction
    unitary_part: np.ndarray
    stabilization_index: int
    reducing_residual: float


def _isometric_chain(P: np.ndarray, tol: Tolerance) -> tuple[Subspace, int]:
    """Stable limit of E_k = {x : ||P^k x|| = ||x||} and the first k where it stops shrinking."""
    n = P.shape[0]
    power = np.eye(n, dtype=complex)
    prev = None
    for k in range(1, n + 2):
        power = P @ power
        E = kernel_basis(np.eye(n) - power.conj().T @ power, tol, scale=1.0)
        if prev is not None and E.dim == prev.dim:
            return prev, k - 1
        prev = E
        if E.dim == 0:
            return E, k
    return prev, n + 1


def unitary_cnu_split(A: Contraction) -> Decomposition:
    """Split off the largest reducing subspace on which ``A`` is unitary.

    The unitary subspace is the intersection of the stable limits of
    ``ker(I - A*^k A^k)`` and ``ker(I - A^k A*^k)``; both chains decrease
    and stop within ``n`` steps.
    """
    M, tol = A.matrix, A.tol
    n = A.n
    if n == 0:
        empty = Subspace(np.zeros((0, 0)), tol)
        return Decomposition(empty, empty, A, np.zeros((0, 0), dtype=complex), 0, 0.0)
    E, k1 = _isometric_chain(M, tol)
    Estar, k2 = _isometric_chain(M.conj().T, tol)
    Hu = intersect(E, Estar)
    Hc = complement(Hu)
    Fu, Fc = Hu.frame, Hc.frame
    cnu = validate(Fc.conj().T @ M @ Fc, tol)
    Au = Fu.conj().T @ M @ Fu
    return Decomposition(Hc, Hu, cnu, Au, max(k1, k2), reducing_residual(M, Hu))


def unitary_multiplicity(U, tol: Tolerance = DEFAULT_TOL) -> int:
    """Largest eigenvalue multiplicity of a unitary matrix.

    For a finite-dimensional unitary this is the least number of cyclic
    direct summands.  Eigenvalues closer than ``residual_tol`` are merged
    (single linkage).
    """
    U = as_matrix(U)
    n = U.shape[0]
    if U.shape[0] != U.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {U.shape}")
    if n == 0:
        return 0
    res = opnorm(U.conj().T @ U - np.eye(n))
    if res > tol.residual_tol:
        raise NotUnitary(res)
    T, _ = spla.schur(U, output="complex")
    ev = np.diag(T)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(ev[i] - ev[j]) <= tol.residual_tol:
                parent[find(i)] = find(j)
    roots = [find(i) for i in range(n)]
    return max(roots.count(r) for r in set(roots))


def defect_dims(A: Contraction) -> tuple[int, int]:
    """(dim D_A, dim D_A*)."""
    return A.defect_dim, A.codefect_dim


def check_defect_inequalities(A: Contraction, B: Contraction) -> bool:
    """Necessary condition for A ≼ B when B is completely nonunitary.

    dim D_A <= dim D_B and dim D_A* <= dim D_B + dim D_B*.
    """
    if not B.is_cnu:
        raise BNotCnu(f"B has a unitary part of dimension {B.split.unitary_space.dim}")
    return A.defect_dim <= B.defect_dim and A.codefect_dim <= B.defect_dim + B.codefect_dim


def largest_reducing_subspace_in_kernel(M, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Largest subspace Y with Y ⊂ ker M that reduces M.

    Y reduces M and lies in ker M iff it is M*-invariant and inside ker M,
    so Y = {x : M M*^j x = 0 for all j >= 0}; j <= n suffices.
    """
    M = as_matrix(M)
    n = M.shape[0]
    blocks = []
    P = np.eye(n, dtype=complex)
    for _ in range(n + 1):
        blocks.append(M @ P)
        P = M.conj().T @ P
    return kernel_basis(np.vstack(blocks), tol)

