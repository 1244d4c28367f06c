"""Truncated Schäffer dilations and the extension of ≼ to dilations.

The dilation space is ``H ⊕ D_A(1) ⊕ ... ⊕ D_A(d) ⊕ D_{A*}(-d) ⊕ ... ⊕ D_{A*}(-1)``.
The Julia block ``[[A, D_{A*}], [D_A, -A*]]`` maps ``H ⊕ D_{A*}(-1)`` onto
``H ⊕ D_A(1)``, the remaining copies shift by one, and the last forward copy
wraps to the first backward one.  In finite dimensions ``dim D_A = dim D_{A*}``,
so the wrap is a unitary identification of frames and ``U`` is exactly
unitary.  A vector leaving ``H`` needs ``2d + 1`` steps to come back, hence
``P_H U^n|H = A^n`` for ``|n| <= 2d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contraction import Contraction, validate
from .errors import PreconditionViolated, WindowTooSmall
from .numerics import Subspace, coordinate_subspace, opnorm, range_basis
from .verdict import Report

__all__ = [
    "DEFAULT_DEPTH",
    "TruncatedDilation",
    "schaffer_dilation",
    "verify_order_extends_to_dilations",
]

DEFAULT_DEPTH = 6


@dataclass(eq=False)
class TruncatedDilation:
    depth: int
    space_dim: int
    U: np.ndarray
    embed: Subspace

    @property
    def n(self) -> int:
        return self.embed.dim

    def unitarity_residual(self) -> float:
        return opnorm(self.U.conj().T @ self.U - np.eye(self.space_dim))

    def compressed_power(self, k: int) -> np.ndarray:
        """``P_H U^k|H``; negative ``k`` uses ``U*``."""
        E = self.embed.frame
        M = self.U if k >= 0 else self.U.conj().T
        return E.conj().T @ np.linalg.matrix_power(M, abs(k)) @ E

    def power_residuals(self, A, nmax: int | None = None) -> list[float]:
        """``||A^k - P_H U^k|H||`` for ``k = 0..nmax`` (default: depth)."""
        A = A.matrix if isinstance(A, Contraction) else np.asarray(A, dtype=complex)
        nmax = self.depth if nmax is None else nmax
        E = self.embed.frame
        out, P, Ak = [], E, np.eye(A.shape[0])
        for _ in range(nmax + 1):
            out.append(opnorm(Ak - E.conj().T @ P))
            P = self.U @ P
            Ak = A @ Ak
        return out

    def orbit(self, window: int | None = None) -> np.ndarray:
        """Columns ``U^k E`` for ``k = -window..window`` (``E`` the copy of H)."""
        w = self.depth if window is None else window
        return _lifted_orbit(self, self.embed.frame, w)

    def minimality_rank(self) -> int:
        return range_basis(self.orbit()).dim


def schaffer_dilation(A, depth: int = DEFAULT_DEPTH) -> TruncatedDilation:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    A = A if isinstance(A, Contraction) else validate(A)
    n = A.n
    F, G = A.defect_space.frame, A.codefect_space.frame
    delta = F.shape[1]
    if G.shape[1] != delta:
        raise PreconditionViolated(f"defect dims differ ({delta} vs {G.shape[1]})")
    N = n + 2 * depth * delta
    U = np.zeros((N, N), dtype=complex)
    fwd = [n + j * delta for j in range(depth)]
    bwd = [n + (depth + j) * delta for j in range(depth)]  # copies -d .. -1
    h = slice(0, n)
    U[h, h] = A.matrix
    if delta:
        f1 = slice(fwd[0], fwd[0] + delta)
        m1 = slice(bwd[-1], bwd[-1] + delta)
        U[f1, h] = F.conj().T @ A.defect
        U[h, m1] = A.codefect @ G
        U[f1, m1] = -F.conj().T @ A.H @ G
        # forward copies then backward copies form one cycle back into H
        chain = fwd + bwd
        for src, dst in zip(chain[:-1], chain[1:]):
            U[dst:dst + delta, src:src + delta] = np.eye(delta)
    return TruncatedDilation(depth, N, U, coordinate_subspace(N, range(n)))


def verify_order_extends_to_dilations(A, B, omega, depth: int = DEFAULT_DEPTH) -> Report:
    """Extend a witness of A ≼ B to the truncated dilations and check the result.

    ``omega~`` is defined on the window ``span{U^k H : |k| <= depth}`` by
    ``omega~ U^k h = V^k omega h``.  Checked: Gram matrices of the two orbits
    agree (so ``omega~`` is well defined and isometric), ``omega~`` restricts
    to ``omega`` on ``H``, and ``omega~ U = V omega~`` and
    ``omega~ U* = V* omega~`` on orbit vectors that stay inside the window.
    """
    A = A if isinstance(A, Contraction) else validate(A)
    B = B if isinstance(B, Contraction) else validate(B)
    tol = A.tol
    W = np.asarray(omega, dtype=complex)
    wres = max(opnorm(W.conj().T @ W - np.eye(A.n)), opnorm(W @ A.matrix - B.matrix @ W))
    if wres > tol.residual_tol:
        raise PreconditionViolated(f"omega does not witness A <= B (residual {wres:.3e})")
    U = schaffer_dilation(A, depth)
    V = schaffer_dilation(B, depth)
    rep = Report("order-extends-to-dilations")
    rep.data.update({"depth": depth, "window": [-depth, depth], "dim_K_A": U.space_dim, "dim_K_B": V.space_dim})
    rep.notes.append(f"claims hold on the window |k| <= {depth} of the truncated dilations only")
    KU = U.orbit()
    EB = V.embed.frame
    Vlift = _lifted_orbit(V, EB @ W, depth)
    rank_u = range_basis(KU).dim
    if rank_u < U.space_dim:
        raise WindowTooSmall(
            f"orbit of H spans {rank_u} of {U.space_dim} dilation dimensions; increase depth"
        )
    gram = opnorm(KU.conj().T @ KU - Vlift.conj().T @ Vlift)
    rep.add("gram_agreement", gram <= tol.residual_tol, gram, tol.residual_tol)
    Wt = Vlift @ np.linalg.pinv(KU)
    iso = opnorm(Wt.conj().T @ Wt - np.eye(U.space_dim))
    rep.add("extension_isometric", iso <= tol.residual_tol, iso, tol.residual_tol)
    restr = opnorm(Wt @ U.embed.frame - EB @ W)
    rep.add("restricts_to_omega", restr <= tol.residual_tol, restr, tol.residual_tol)
    n = A.n
    inner = KU[:, : 2 * depth * n]  # k = -d .. d-1: U x stays in the window
    inter = opnorm(Wt @ U.U @ inner - V.U @ Wt @ inner)
    rep.add("intertwining_on_window", inter <= tol.residual_tol, inter, tol.residual_tol)
    inner_star = KU[:, n:]  # k = -d+1 .. d: U* x stays in the window
    star = opnorm(Wt @ U.U.conj().T @ inner_star - V.U.conj().T @ Wt @ inner_star)
    rep.add("star_intertwining_on_window", star <= tol.residual_tol, star, tol.residual_tol)
    rep.data["k_span_dim"] = range_basis(Vlift).dim
    rep.data["image_dim"] = range_basis(EB @ W).dim
    return rep


def _lifted_orbit(V: TruncatedDilation, X: np.ndarray, w: int) -> np.ndarray:
    back, fwd, P = [], [], X
    for _ in range(w):
        P = V.U.conj().T @ P
        back.append(P)
    P = X
    for _ in range(w):
        P = V.U @ P
        fwd.append(P)
    return np.hstack(back[::-1] + [X] + fwd)
