"""Characteristic functions of completely nonunitary contractions.

``theta_T(lam) = -T + lam * D_{T*} (I - lam T*)^{-1} D_T`` restricted to the
defect space ``D_T`` and read in the frames of ``D_T`` and ``D_{T*}``.

Functions are handled through samples on a fixed grid of disk points plus a
ring of boundary proxies.  Boundary values are radial limits; they are
estimated from the radii ``1 - eps`` and ``1 - 2 eps`` by linear Richardson
extrapolation, which removes the first-order radial error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .contraction import Contraction, validate
from .errors import GridMismatch, LambdaOnBoundary, SingularResolvent
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    complement,
    full_space,
    kernel_basis,
    opnorm,
    range_basis,
    svd,
)
from .search import isometric_combination
from .verdict import HOLDS, REFUTED, UNKNOWN, Budget, Certificate, OrderVerdict

__all__ = [
    "GridSpec",
    "CharFnSample",
    "PureSplit",
    "eval_charfn",
    "sample_charfn",
    "sample_function",
    "pure_split",
    "analytic_range_span",
    "coincide",
]


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid: ``radii x angles`` interior points plus a boundary ring.

    When ``points`` is given it replaces the polar interior grid.
    """

    radii: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    angles: int = 5
    boundary_angles: int = 64
    boundary_eps: float = 1e-6
    points: tuple[complex, ...] | None = None

    def disk_points(self) -> np.ndarray:
        if self.points is not None:
            return np.asarray(self.points, dtype=complex)
        t = 2 * np.pi * np.arange(self.angles) / self.angles
        return np.array([r * np.exp(1j * a) for r in self.radii for a in t], dtype=complex)

    def boundary_points(self) -> np.ndarray:
        t = 2 * np.pi * np.arange(self.boundary_angles) / self.boundary_angles
        return np.exp(1j * t)

    def to_dict(self):
        out = {
            "radii": list(self.radii),
            "angles": self.angles,
            "boundary_angles": self.boundary_angles,
            "boundary_eps": self.boundary_eps,
        }
        if self.points is not None:
            out["points"] = [[p.real, p.imag] for p in map(complex, self.points)]
        return out


DEFAULT_GRID = GridSpec()


@dataclass(eq=False)
class CharFnSample:
    """A contractive analytic function known through its values on a grid.

    ``blocks[i]`` is the value at ``disk_points[i]``; ``boundary_blocks[j]``
    estimates the radial limit at ``boundary_points[j]``.  Blocks are written
    in the orthonormal frames of ``domain_space`` and ``codomain_space``.
    """

    domain_space: Subspace
    codomain_space: Subspace
    disk_points: np.ndarray
    boundary_points: np.ndarray
    blocks: np.ndarray
    boundary_blocks: np.ndarray
    boundary_eps: float
    tol: Tolerance = field(default=DEFAULT_TOL)

    @property
    def shape(self) -> tuple[int, int]:
        return self.codomain_space.dim, self.domain_space.dim

    @property
    def grid_size(self) -> int:
        return len(self.disk_points) + len(self.boundary_points)

    def max_sigma(self) -> float:
        vals = [opnorm(b) for b in self.blocks] + [opnorm(b) for b in self.boundary_blocks]
        return max(vals, default=0.0)

    def compress(self, codomain: np.ndarray, domain: np.ndarray) -> "CharFnSample":
        """Sample of ``G* F(lam) H`` for frames ``G`` (codomain) and ``H`` (domain) in block coordinates."""
        c = lambda B: np.einsum("ij,pjk,kl->pil", codomain.conj().T, B, domain)
        return CharFnSample(
            Subspace(self.domain_space.frame @ domain, self.tol),
            Subspace(self.codomain_space.frame @ codomain, self.tol),
            self.disk_points,
            self.boundary_points,
            c(self.blocks),
            c(self.boundary_blocks),
            self.boundary_eps,
            self.tol,
        )

    def to_dict(self):
        return {
            "shape": list(self.shape),
            "domain_space": self.domain_space.frame,
            "codomain_space": self.codomain_space.frame,
            "disk_points": [[p.real, p.imag] for p in map(complex, self.disk_points)],
            "boundary_points": [[p.real, p.imag] for p in map(complex, self.boundary_points)],
            "boundary_eps": self.boundary_eps,
            "blocks": list(self.blocks),
            "boundary_blocks": list(self.boundary_blocks),
        }


def _theta(T: Contraction, lam: complex) -> np.ndarray:
    n = T.n
    F = T.defect_space.frame
    G = T.codefect_space.frame
    if F.shape[1] == 0 or G.shape[1] == 0:
        return np.zeros((G.shape[1], F.shape[1]), dtype=complex)
    R = np.eye(n) - lam * T.H
    try:
        X = np.linalg.solve(R, T.defect @ F)
    except np.linalg.LinAlgError:
        raise SingularResolvent(f"I - lam T* singular at lam={lam!r}") from None
    if not np.all(np.isfinite(X)) or opnorm(X) > 1e12:
        raise SingularResolvent(f"I - lam T* numerically singular at lam={lam!r}")
    return G.conj().T @ (-T.matrix @ F + lam * T.codefect @ X)


def eval_charfn(T, lam: complex) -> np.ndarray:
    """Value of the characteristic function at ``lam`` (``|lam| < 1``)."""
    if not isinstance(T, Contraction):
        T = validate(T)
    lam = complex(lam)
    if abs(lam) >= 1.0:
        raise LambdaOnBoundary(f"|lambda| = {abs(lam)!r} >= 1")
    if not T.is_cnu:
        warnings.warn(
            "contraction has a nonzero unitary part; evaluating the formula anyway",
            stacklevel=2,
        )
    return _theta(T, lam)


def _sample(fn: Callable[[complex], np.ndarray], shape, grid: GridSpec):
    disk = grid.disk_points()
    bnd = grid.boundary_points()
    if len(disk) == 0 and len(bnd) == 0:
        raise ValueError("empty grid")
    if np.any(np.abs(disk) >= 1.0):
        raise LambdaOnBoundary("grid contains points outside the open disk")
    eps = grid.boundary_eps
    blocks = np.zeros((len(disk), *shape), dtype=complex)
    for i, lam in enumerate(disk):
        blocks[i] = fn(lam)
    bblocks = np.zeros((len(bnd), *shape), dtype=complex)
    for j, z in enumerate(bnd):
        bblocks[j] = 2 * fn((1 - eps) * z) - fn((1 - 2 * eps) * z)
    return disk, bnd, blocks, bblocks


def sample_charfn(T, grid: GridSpec = DEFAULT_GRID) -> CharFnSample:
    if not isinstance(T, Contraction):
        T = validate(T)
    if not T.is_cnu:
        warnings.warn("sampling the characteristic function of a contraction with a unitary part")
    shape = (T.codefect_dim, T.defect_dim)
    disk, bnd, blocks, bblocks = _sample(lambda z: _theta(T, z), shape, grid)
    return CharFnSample(
        T.defect_space, T.codefect_space, disk, bnd, blocks, bblocks, grid.boundary_eps, T.tol
    )


def sample_function(
    fn: Callable[[complex], np.ndarray],
    domain_dim: int,
    codomain_dim: int,
    grid: GridSpec = DEFAULT_GRID,
    tol: Tolerance = DEFAULT_TOL,
) -> CharFnSample:
    """Sample an arbitrary matrix-valued analytic function on ``grid``."""
    shape = (codomain_dim, domain_dim)

    def f(z):
        v = np.asarray(fn(z), dtype=complex).reshape(shape)
        return v

    disk, bnd, blocks, bblocks = _sample(f, shape, grid)
    return CharFnSample(
        full_space(domain_dim, tol),
        full_space(codomain_dim, tol),
        disk,
        bnd,
        blocks,
        bblocks,
        grid.boundary_eps,
        tol,
    )


@dataclass(eq=False)
class PureSplit:
    """``F(lam) = F_pure(lam) (+) unitary_constant``.

    Subspaces are given in the block coordinates of the sample.  ``margin``
    is ``1 - max ||F_pure(lam)||`` over the disk points (positive means the
    pure part is strictly contractive on the grid).
    """

    pure_domain: Subspace
    unitary_domain: Subspace
    pure_codomain: Subspace
    unitary_codomain: Subspace
    unitary_constant: np.ndarray
    pure: CharFnSample
    margin: float
    split_residual: float
    grid_size: int


def pure_split(F: CharFnSample) -> PureSplit:
    """Separate the maximal constant-unitary summand of a sampled function.

    The unitary domain is the set of vectors ``x`` with
    ``||F(lam) x|| = ||x||`` at every disk point and ``F(lam) x`` independent
    of ``lam``.  Sound only up to sampling: the grid size is recorded.
    """
    tol = F.tol
    p, q = F.shape
    blocks = F.blocks
    if q == 0 or len(blocks) == 0:
        unitary_dom = Subspace(np.zeros((q, 0)), tol)
    else:
        rows = []
        for B in blocks:
            rows.append(np.eye(q) - B.conj().T @ B)
            rows.append(B - blocks[0])
        unitary_dom = kernel_basis(np.vstack(rows), tol, scale=1.0)
    Fu = unitary_dom.frame
    if Fu.shape[1]:
        unitary_cod = range_basis(blocks[0] @ Fu, tol, scale=1.0)
    else:
        unitary_cod = Subspace(np.zeros((p, 0)), tol)
    Gu = unitary_cod.frame
    if Gu.shape[1] != Fu.shape[1]:
        # the constant part failed to be isometric on the grid; treat as pure
        unitary_dom = Subspace(np.zeros((q, 0)), tol)
        unitary_cod = Subspace(np.zeros((p, 0)), tol)
        Fu, Gu = unitary_dom.frame, unitary_cod.frame
    W = Gu.conj().T @ blocks[0] @ Fu if len(blocks) else np.zeros((0, 0), dtype=complex)
    pure_dom = complement(unitary_dom)
    pure_cod = complement(unitary_cod)
    pure = F.compress(pure_cod.frame, pure_dom.frame)
    split_res = 0.0
    for B in blocks:
        split_res = max(
            split_res,
            opnorm(Gu.conj().T @ B @ pure_dom.frame),
            opnorm(pure_cod.frame.conj().T @ B @ Fu),
            opnorm(Gu.conj().T @ B @ Fu - W),
        )
    top = max((opnorm(B) for B in pure.blocks), default=0.0)
    return PureSplit(
        pure_dom, unitary_dom, pure_cod, unitary_cod, W, pure, 1.0 - top, split_res, F.grid_size
    )


def analytic_range_span(F: CharFnSample) -> tuple[Subspace, Subspace]:
    """Span of all values ``F(lam) x`` over the disk grid, and its complement."""
    p, q = F.shape
    if p == 0 or q == 0 or len(F.blocks) == 0:
        span = Subspace(np.zeros((p, 0)), F.tol)
    else:
        span = range_basis(np.hstack(list(F.blocks)), F.tol)
    return span, complement(span)


def _check_same_grid(F: CharFnSample, G: CharFnSample):
    if not (
        np.array_equal(F.disk_points, G.disk_points)
        and np.array_equal(F.boundary_points, G.boundary_points)
    ):
        raise GridMismatch("samples were taken on different grids")


def _coincidence_space(Fb: np.ndarray, Gb: np.ndarray, tol: Tolerance):
    """Basis of ``{(X, Y) : X G_i = F_i Y for all i}`` as two coordinate stacks."""
    p, q = Fb.shape[1], Fb.shape[2]
    Ip, Iq = np.eye(p), np.eye(q)
    # column-major vec: vec(X G) = (G^T (x) I) vec X, vec(F Y) = (I (x) F) vec Y
    L = np.vstack([np.hstack([np.kron(G.T, Ip), -np.kron(Iq, F)]) for F, G in zip(Fb, Gb)])
    s = svd(L)[1]
    K = kernel_basis(L, tol, scale=max(float(s[0]), 1.0)).frame
    X = np.stack([K[: p * p, j].reshape((p, p), order="F") for j in range(K.shape[1])]) if K.shape[1] else None
    Y = np.stack([K[p * p:, j].reshape((q, q), order="F") for j in range(K.shape[1])]) if K.shape[1] else None
    return X, Y, float(s[-1]) if s.size else 0.0


def coincide(F: CharFnSample, G: CharFnSample, budget: Budget = Budget()) -> OrderVerdict:
    """Decide whether ``G(lam) = tau F(lam) tau'`` for constant unitaries on the grid.

    Refutations use unitary invariance of singular values, or an empty
    solution space of the linear relaxation ``tau* G(lam) = F(lam) tau'``.
    The positive answer comes from a seeded multi-start search for a unitary
    pair inside that solution space; the residual is checked at the disk and
    boundary points.
    The witness is ``tau`` (codomain side); ``tau'`` is in ``extra_witnesses``.
    """
    _check_same_grid(F, G)
    tol = F.tol
    diag = {"grid_size": F.grid_size}
    if F.shape != G.shape:
        cert = Certificate("dimension", {"shape_F": list(F.shape), "shape_G": list(G.shape)})
        return OrderVerdict(REFUTED, "coincide", certificate=cert, diagnostics=diag)
    p, q = F.shape
    gap, worst = 0.0, 0
    for i, (Bf, Bg) in enumerate(zip(F.blocks, G.blocks)):
        sf, sg = svd(Bf)[1], svd(Bg)[1]
        g = float(np.max(np.abs(sf - sg), initial=0.0))
        if g > gap:
            gap, worst = g, i
    diag["max_singular_value_gap"] = gap
    if gap > tol.residual_tol:
        Bf, Bg = F.blocks[worst], G.blocks[worst]
        cert = Certificate(
            "singular-value-product",
            {
                "point_index": worst,
                "lambda": [F.disk_points[worst].real, F.disk_points[worst].imag],
                "sigma_F": svd(Bf)[1].tolist(),
                "sigma_G": svd(Bg)[1].tolist(),
            },
        )
        return OrderVerdict(REFUTED, "coincide", certificate=cert, diagnostics=diag)
    if p == 0 or q == 0:
        return OrderVerdict(
            HOLDS,
            "coincide",
            witness=np.eye(p, dtype=complex),
            extra_witnesses={"tau_prime": np.eye(q, dtype=complex)},
            diagnostics=diag,
        )
    Xs, Ys, smin = _coincidence_space(F.blocks, G.blocks, tol)
    diag["coincidence_space_dim"] = 0 if Xs is None else len(Xs)
    if Xs is None:
        cert = Certificate(
            "dimension",
            {"coincidence_space_dim": 0, "smallest_singular_value": smin},
        )
        return OrderVerdict(REFUTED, "coincide", certificate=cert, diagnostics=diag)
    Fall = np.concatenate([F.blocks, F.boundary_blocks])
    Gall = np.concatenate([G.blocks, G.boundary_blocks])

    def accept(cands):
        X, Y = cands
        tau = X.conj().T
        res = max(
            opnorm(X @ X.conj().T - np.eye(p)),
            opnorm(Y.conj().T @ Y - np.eye(q)),
            max(opnorm(Gi - tau @ Fi @ Y) for Fi, Gi in zip(Fall, Gall)),
        )
        return res <= tol.residual_tol, res

    identity = [np.eye(p, dtype=complex), np.eye(q, dtype=complex)]
    found, info = isometric_combination([Xs, Ys], budget, accept, [identity])
    diag.update(info)
    if found is not None:
        return OrderVerdict(
            HOLDS,
            "coincide",
            witness=found[0].conj().T,
            extra_witnesses={"tau_prime": found[1]},
            diagnostics=diag,
        )
    return OrderVerdict(UNKNOWN, "coincide", diagnostics=diag)
