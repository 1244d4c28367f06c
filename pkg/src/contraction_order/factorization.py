"""Regular factorizations and the invariant-subspace correspondence.

An invariant subspace ``Y`` of ``T`` gives ``T = [[T1, X], [0, T2]]``.  The
matching factorization ``theta_T = theta_2 theta_1`` is produced here by
splitting the unitary colligation

    [[T*, D_T], [D_{T*}, -T]] : H (+) D_T -> H (+) D_{T*}

whose transfer function ``-T + lam D_{T*} (I - lam T*)^{-1} D_T`` is the
characteristic function.  In the triangular coordinates the state operator
``T*`` is lower triangular, so the colligation is a cascade of a colligation
with state space ``Y`` (main operator ``T1*``) followed by one with state
space ``Y^perp`` (main operator ``T2*``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .charfn import (
    DEFAULT_GRID,
    CharFnSample,
    GridSpec,
    _sample,
    coincide,
    pure_split,
    sample_charfn,
)
from .contraction import Contraction, defect_operator, validate
from .errors import GridMismatch, NotInvariant, ShapeMismatch
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_matrix,
    complement,
    full_space,
    intersect,
    opnorm,
    svd,
)
from .verdict import Budget, Report

__all__ = [
    "Triangulation",
    "is_regular_pair",
    "is_regular_factorization",
    "triangulate",
    "factor_samples",
    "verify_factorization_theorem",
]


def is_regular_pair(T1, T2, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Is the product ``T2 T1`` a regular factorization?

    ``T1: E1 -> E2`` and ``T2: E2 -> E3`` are (possibly rectangular)
    contractions; regular means ``D_{T2} E2 ∩ D_{T1*} E2 = {0}``.
    """
    T1 = as_matrix(T1, "T1")
    T2 = as_matrix(T2, "T2")
    if T2.shape[1] != T1.shape[0]:
        raise ShapeMismatch(f"T2 is {T2.shape}, T1 is {T1.shape}: not composable")
    if T1.shape[0] == 0:
        return True
    _, d2 = defect_operator(T2, tol)
    _, d1s = defect_operator(T1.conj().T, tol)
    return intersect(d2, d1s).dim == 0


def is_regular_factorization(F1: CharFnSample, F2: CharFnSample) -> bool:
    """Regularity of ``F2 F1`` tested at every boundary point of the grid."""
    if not np.array_equal(F1.boundary_points, F2.boundary_points):
        raise GridMismatch("factor samples use different boundary grids")
    if F1.shape[0] != F2.shape[1]:
        raise ShapeMismatch(f"codomain of F1 ({F1.shape[0]}) != domain of F2 ({F2.shape[1]})")
    return all(
        is_regular_pair(B1, B2, F1.tol) for B1, B2 in zip(F1.boundary_blocks, F2.boundary_blocks)
    )


@dataclass(eq=False)
class Triangulation:
    invariant_space: Subspace
    t1: Contraction
    t2: Contraction
    x_block: np.ndarray
    invariance_residual: float

    def reassemble(self) -> np.ndarray:
        """T in the coordinates (Y, Y^perp)."""
        return np.block(
            [
                [self.t1.matrix, self.x_block],
                [np.zeros((self.t2.n, self.t1.n)), self.t2.matrix],
            ]
        )

    def basis(self) -> np.ndarray:
        """Unitary whose columns are the frames of Y then Y^perp."""
        return np.hstack([self.invariant_space.frame, complement(self.invariant_space).frame])


def triangulate(T, Y: Subspace) -> Triangulation:
    if not isinstance(T, Contraction):
        T = validate(T)
    F = Y.frame
    C = complement(Y).frame
    M = T.matrix
    res = opnorm(C.conj().T @ M @ F)
    if res > T.tol.residual_tol:
        raise NotInvariant(res)
    t1 = validate(F.conj().T @ M @ F, T.tol)
    t2 = validate(C.conj().T @ M @ C, T.tol)
    return Triangulation(Y, t1, t2, F.conj().T @ M @ C, res)


def _transfer(D, C, A, B):
    """lam -> D + lam C (I - lam A)^{-1} B."""
    n = A.shape[0]

    def f(lam):
        if n == 0:
            return D.copy()
        return D + lam * C @ np.linalg.solve(np.eye(n) - lam * A, B)

    return f


def _coisometry_completion(R: np.ndarray) -> np.ndarray:
    """Rows completing a co-isometry ``R`` (p x (p+d)) to a unitary."""
    m = R.shape[1]
    if R.shape[0] == 0:
        return np.eye(m, dtype=complex)
    _, s, V = svd(R, full_matrices=True)
    return V[:, R.shape[0]:].conj().T


def factor_colligations(T: Contraction, Y: Subspace):
    """Split the colligation of ``T`` along the invariant subspace ``Y``.

    Returns ``(sys1, sys2)`` where each system is ``(D, C, A, B)`` with
    transfer function ``D + lam C (I - lam A)^{-1} B``.  ``sys1`` maps
    ``D_T`` to an intermediate space of dimension ``dim D_T``; ``sys2`` maps
    it to ``D_{T*}``.
    """
    tri = triangulate(T, Y)
    Q = tri.basis()
    p = Y.dim
    Fd, Gd = T.defect_space.frame, T.codefect_space.frame
    d = Fd.shape[1]
    n = T.n
    A_s = Q.conj().T @ T.H @ Q
    B_s = Q.conj().T @ T.defect @ Fd
    C_s = Gd.conj().T @ T.codefect @ Q
    D_s = -Gd.conj().T @ T.matrix @ Fd
    # first colligation: state Y, input D_T
    R1 = np.hstack([A_s[:p, :p], B_s[:p]])
    N = _coisometry_completion(R1)
    C1, D1 = N[:, :p], N[:, p:]
    U1 = np.vstack([R1, N])
    # full colligation with columns ordered (s1, u, s2), rows (s1', s2', y)
    U_full = np.block(
        [
            [A_s[:p, :p], B_s[:p], A_s[:p, p:]],
            [A_s[p:, :p], B_s[p:], A_s[p:, p:]],
            [C_s[:, :p], D_s, C_s[:, p:]],
        ]
    )
    # (U1 (+) I_q)^{-1} maps (s1', e, s2) back to (s1, u, s2)
    q = n - p
    inv = spla.block_diag(U1.conj().T, np.eye(q))
    M = U_full @ inv
    # M: (s1', e, s2) -> (s1', s2', y); second colligation acts on (s2, e)
    rows = slice(p, None)
    A2 = M[rows, p + d:][:q]
    B2 = M[rows, p:p + d][:q]
    C2 = M[p + q:, p + d:]
    D2 = M[p + q:, p:p + d]
    passthrough = opnorm(M[:p, :p] - np.eye(p)) + opnorm(M[:p, p:]) + opnorm(M[p:, :p])
    sys1 = (D1, C1, A_s[:p, :p], B_s[:p])
    sys2 = (D2, C2, A2, B2)
    return sys1, sys2, passthrough


def factor_samples(T, Y: Subspace, grid: GridSpec = DEFAULT_GRID):
    """Sampled factors ``(theta_1, theta_2)`` of the factorization attached to ``Y``."""
    if not isinstance(T, Contraction):
        T = validate(T)
    sys1, sys2, passthrough = factor_colligations(T, Y)
    d, ds = T.defect_dim, T.codefect_dim
    tol = T.tol
    out = []
    for sys, shape in ((sys1, (d, d)), (sys2, (ds, d))):
        disk, bnd, blocks, bblocks = _sample(_transfer(*sys), shape, grid)
        out.append(
            CharFnSample(
                full_space(shape[1], tol),
                full_space(shape[0], tol),
                disk,
                bnd,
                blocks,
                bblocks,
                grid.boundary_eps,
                tol,
            )
        )
    return out[0], out[1], passthrough


def _sigma_profile_gap(F: CharFnSample, G: CharFnSample) -> float:
    gap = 0.0
    for Bf, Bg in zip(F.blocks, G.blocks):
        sf, sg = svd(Bf)[1], svd(Bg)[1]
        k = max(len(sf), len(sg))
        sf = np.pad(sf, (0, k - len(sf)))
        sg = np.pad(sg, (0, k - len(sg)))
        gap = max(gap, float(np.max(np.abs(sf - sg), initial=0.0)))
    return gap


def verify_factorization_theorem(
    T, Y: Subspace, grid: GridSpec = DEFAULT_GRID, budget: Budget = Budget()
) -> Report:
    """Check the coincidence-level content of the invariant subspace / factorization link.

    (a) theta_T = theta_2 theta_1 pointwise and the singular value profiles
    agree; (b) the pure part of each factor coincides with the
    characteristic function of the corresponding block, and when
    ``dim D_T = dim D_{T1}`` the first factor has no unitary part; (c) the
    factorization is regular at every boundary grid point.
    """
    if not isinstance(T, Contraction):
        T = validate(T)
    tol = T.tol
    rep = Report("factorization-theorem")
    rep.data["grid_size"] = grid.boundary_angles + len(grid.disk_points())
    tri = triangulate(T, Y)
    rep.add("invariance", True, tri.invariance_residual, tol.residual_tol)
    rep.add("reassembly", opnorm(tri.basis().conj().T @ T.matrix @ tri.basis() - tri.reassemble()) <= tol.residual_tol)
    if not T.is_cnu:
        rep.applicable = False
        rep.notes.append("T has a unitary part; the factorization theorem needs c.n.u. T")
    F1, F2, passthrough = factor_samples(T, Y, grid)
    rep.add("colligation_split", passthrough <= tol.residual_tol, passthrough, tol.residual_tol)
    theta = sample_charfn(T, grid)
    prod_err = max(
        (opnorm(B - B2 @ B1) for B, B1, B2 in zip(theta.blocks, F1.blocks, F2.blocks)),
        default=0.0,
    )
    rep.add("product_identity", prod_err <= tol.residual_tol, prod_err, tol.residual_tol)
    prod = CharFnSample(
        theta.domain_space,
        theta.codomain_space,
        theta.disk_points,
        theta.boundary_points,
        np.einsum("pij,pjk->pik", F2.blocks, F1.blocks),
        np.einsum("pij,pjk->pik", F2.boundary_blocks, F1.boundary_blocks),
        theta.boundary_eps,
        tol,
    )
    gap = _sigma_profile_gap(theta, prod)
    rep.add("sigma_profile", gap <= tol.residual_tol, gap, tol.residual_tol)
    rep.add(
        "factors_contractive",
        max(F1.max_sigma(), F2.max_sigma()) <= 1 + tol.residual_tol,
        max(F1.max_sigma(), F2.max_sigma()),
    )
    for name, F, block in (("theta_1", F1, tri.t1), ("theta_2", F2, tri.t2)):
        ps = pure_split(F)
        own = sample_charfn(block, grid) if block.n else None
        if own is None:
            ok = ps.pure.shape == (0, 0)
            rep.add(f"{name}_pure_part_coincides", ok, note="empty block")
            continue
        v = coincide(ps.pure, own, budget)
        rep.add(
            f"{name}_pure_part_coincides",
            v.holds,
            v.diagnostics.get("best_residual"),
            note=v.status,
        )
        rep.data[f"{name}_unitary_part_dim"] = ps.unitary_domain.dim
    if T.defect_dim == tri.t1.defect_dim:
        dim_u = rep.data.get("theta_1_unitary_part_dim", 0)
        rep.add("theta_1_pure_when_defects_equal", dim_u == 0, dim_u)
    rep.add("regular", is_regular_factorization(F1, F2), note="grid-relative")
    return rep
