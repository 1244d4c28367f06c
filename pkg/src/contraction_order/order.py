"""Deciding A ≼ B, A ≺ B and unitary equivalence; Cantor-Bernstein gluing.

A ≼ B holds iff some isometry ``W`` satisfies ``W A = B W``; for A ≺ B the
range of ``W`` must also reduce ``B``, i.e. additionally ``W A* = B* W``.
Such ``W`` lie in the linear space of intertwiners (a Sylvester kernel), so
the search is a nonconvex feasibility problem inside that space.  A
positive answer always comes with a witness that is re-verified from
scratch, a negative one with a discrete certificate that an independent
code path re-checks, and anything else is reported as Unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg as spla

from .charfn import DEFAULT_GRID, GridSpec, analytic_range_span, coincide, sample_charfn
from .contraction import Contraction, reducing_residual, validate
from .errors import NoConvergence, NotInvariant, PreconditionViolated, RestrictionNotUnitary
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    complement,
    kernel_basis,
    opnorm,
    svd,
)
from .search import isometric_combination
from .singular_values import leading_sigmas
from .verdict import HOLDS, REFUTED, UNKNOWN, Budget, Certificate, OrderVerdict, Report

__all__ = [
    "sylvester_kernel",
    "witness_residuals",
    "find_isometric_intertwiner",
    "unitarily_equivalent",
    "recheck_certificate",
    "decide_relations",
    "word_traces",
    "CantorBernsteinResult",
    "cantor_bernstein",
    "invariant_unitary_implies_reducing_check",
    "verify_unit_cnu_corollary",
    "verify_theorem_general_n_finite",
]


def _mat(A) -> np.ndarray:
    return A.matrix if isinstance(A, Contraction) else np.asarray(A, dtype=complex)


def _sylvester_operator(A: np.ndarray, B: np.ndarray, reducing: bool) -> np.ndarray:
    # column-major vec: vec(BX - XA) = (I (x) B - A^T (x) I) vec(X)
    m, n = A.shape[0], B.shape[0]
    L = np.kron(np.eye(m), B) - np.kron(A.T, np.eye(n))
    if reducing:
        L = np.vstack([L, np.kron(np.eye(m), B.conj().T) - np.kron(A.conj(), np.eye(n))])
    return L


def sylvester_kernel(A, B, reducing: bool = False, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of {X : BX = XA} (and B*X = XA* if ``reducing``).

    Rank is cut relative to ``max(sigma_max(L), ||A|| + ||B||)``, the natural
    scale of the stacked operator ``L``.
    """
    A, B = _mat(A), _mat(B)
    m, n = A.shape[0], B.shape[0]
    if m == 0 or n == 0:
        return []
    L = _sylvester_operator(A, B, reducing)
    s = svd(L)[1]
    scale = max(float(s[0]) if s.size else 0.0, opnorm(A) + opnorm(B))
    K = kernel_basis(L, tol, scale=scale).frame
    return [K[:, j].reshape((n, m), order="F") for j in range(K.shape[1])]


def witness_residuals(A, B, W, reducing: bool = False) -> dict[str, float]:
    """||W*W - I||, ||WA - BW|| and (reducing) ||WA* - B*W||."""
    A, B, W = _mat(A), _mat(B), np.asarray(W, dtype=complex)
    out = {
        "isometry": opnorm(W.conj().T @ W - np.eye(W.shape[1])),
        "intertwining": opnorm(W @ A - B @ W),
    }
    if reducing:
        out["star_intertwining"] = opnorm(W @ A.conj().T - B.conj().T @ W)
    return out


def _witness_ok(res: dict[str, float], tol: Tolerance) -> bool:
    return all(v <= tol.residual_tol for v in res.values())


def _eigen_clusters(A: np.ndarray, tol: Tolerance) -> list[complex]:
    ev = np.linalg.eigvals(A) if A.size else np.zeros(0)
    centers: list[complex] = []
    radius = np.sqrt(tol.rank_tol)
    for lam in sorted(ev, key=lambda z: (round(z.real, 6), round(z.imag, 6))):
        if all(abs(lam - c) > radius for c in centers):
            centers.append(complex(lam))
    return centers


def _geometric_multiplicity(M: np.ndarray, lam: complex, cut: float) -> int:
    s = svd(M - lam * np.eye(M.shape[0]))[1]
    return int(np.count_nonzero(s <= cut))


def _point_spectrum_obstruction(A: np.ndarray, B: np.ndarray, tol: Tolerance):
    """Eigenvalue of A whose geometric multiplicity exceeds that in B.

    The count for A uses the strict cut ``rank_tol``, the one for B the
    loose cut ``sqrt(rank_tol)``, so a refutation survives perturbations of
    the computed eigenvalue.
    """
    for lam in _eigen_clusters(A, tol):
        ga = _geometric_multiplicity(A, lam, tol.rank_tol)
        gb = _geometric_multiplicity(B, lam, np.sqrt(tol.rank_tol))
        if ga > gb:
            return Certificate(
                "point-spectrum",
                {"eigenvalue": [lam.real, lam.imag], "multiplicity_A": ga, "multiplicity_B": gb},
            )
    return None


def _defect_obstruction(A: Contraction, B: Contraction):
    if not B.is_cnu:
        return None
    if A.defect_dim <= B.defect_dim and A.codefect_dim <= B.defect_dim + B.codefect_dim:
        return None
    return Certificate(
        "defect",
        {
            "dim_D_A": A.defect_dim,
            "dim_D_A_star": A.codefect_dim,
            "dim_D_B": B.defect_dim,
            "dim_D_B_star": B.codefect_dim,
        },
    )


def _search_isometry(Kst: np.ndarray, A, B, reducing, budget: Budget, tol: Tolerance):
    def accept(cands):
        res = witness_residuals(A, B, cands[0], reducing)
        return _witness_ok(res, tol), max(res.values())

    n, m = Kst.shape[1:]
    initial = [[np.eye(n, m, dtype=complex)]] if n == m else []
    found, info = isometric_combination([Kst], budget, accept, initial)
    return (None if found is None else found[0]), info


def find_isometric_intertwiner(
    A,
    B,
    reducing: bool = False,
    budget: Budget = Budget(),
    tol: Tolerance | None = None,
) -> OrderVerdict:
    """Decide A ≼ B (``reducing=False``) or A ≺ B (``reducing=True``)."""
    A = A if isinstance(A, Contraction) else validate(A, tol or DEFAULT_TOL)
    B = B if isinstance(B, Contraction) else validate(B, tol or DEFAULT_TOL)
    tol = tol or A.tol
    relation = "A<B (reducing)" if reducing else "A<=B (invariant)"
    diag: dict = {"budget": budget.to_dict()}
    if A.n > B.n:
        cert = Certificate("dimension", {"dim_A": A.n, "dim_B": B.n, "requires": "dim_A <= dim_B"})
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    if A.n == 0:
        return OrderVerdict(HOLDS, relation, witness=np.zeros((B.n, 0), dtype=complex), diagnostics=diag)
    cert = _defect_obstruction(A, B)
    if cert is None:
        cert = _point_spectrum_obstruction(A.matrix, B.matrix, tol)
    if cert is not None:
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    K = sylvester_kernel(A, B, reducing, tol)
    diag["intertwiner_space_dim"] = len(K)
    if not K:
        cert = Certificate(
            "dimension",
            {"dim_A": A.n, "dim_B": B.n, "intertwiner_space_dim": 0, "reducing": reducing},
        )
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    common = kernel_basis(np.vstack(K), tol).dim
    if common:
        # every intertwiner kills a common vector, so none is injective
        cert = Certificate(
            "dimension",
            {
                "dim_A": A.n,
                "dim_B": B.n,
                "intertwiner_space_dim": len(K),
                "common_kernel_dim": common,
                "reducing": reducing,
            },
        )
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    W, info = _search_isometry(np.array(K), A.matrix, B.matrix, reducing, budget, tol)
    diag.update(info)
    if W is None:
        return OrderVerdict(UNKNOWN, relation, diagnostics=diag)
    diag["residuals"] = witness_residuals(A, B, W, reducing)
    return OrderVerdict(HOLDS, relation, witness=W, diagnostics=diag)


def _words(max_len: int):
    for L in range(1, max_len + 1):
        yield from itertools.product((0, 1), repeat=L)


def _word_name(word) -> str:
    return " ".join("M*" if b else "M" for b in word)


def word_traces(M, max_len: int = 6) -> dict[str, complex]:
    """Traces of all words in (M, M*) up to ``max_len``, in lexicographic order."""
    M = _mat(M)
    pair = (M, M.conj().T)
    cache: dict[tuple, np.ndarray] = {(): np.eye(M.shape[0], dtype=complex)}
    out = {}
    for w in _words(max_len):
        P = cache[w[:-1]] @ pair[w[-1]]
        cache[w] = P
        out[_word_name(w)] = complex(np.trace(P))
    return out


def _word_trace_obstruction(A: np.ndarray, B: np.ndarray, max_len: int, tol: Tolerance):
    ta, tb = word_traces(A, max_len), word_traces(B, max_len)
    limit = tol.residual_tol * max(1, A.shape[0])
    for name in ta:
        if abs(ta[name] - tb[name]) > limit:
            return Certificate(
                "word-trace",
                {
                    "word": name,
                    "trace_A": [ta[name].real, ta[name].imag],
                    "trace_B": [tb[name].real, tb[name].imag],
                },
            )
    return None


def unitarily_equivalent(
    A,
    B,
    budget: Budget = Budget(),
    word_length: int = 6,
    via_charfn: bool = False,
    grid: GridSpec = DEFAULT_GRID,
    tol: Tolerance | None = None,
) -> OrderVerdict:
    """Decide whether ``B = W A W*`` for a unitary ``W`` (the witness).

    With ``via_charfn`` and both inputs c.n.u., the decision is delegated to
    the coincidence test of their sampled characteristic functions.
    """
    A = A if isinstance(A, Contraction) else validate(A, tol or DEFAULT_TOL)
    B = B if isinstance(B, Contraction) else validate(B, tol or DEFAULT_TOL)
    tol = tol or A.tol
    relation = "unitary-equivalence"
    diag: dict = {"budget": budget.to_dict(), "word_length": word_length}
    if A.n != B.n:
        cert = Certificate("dimension", {"dim_A": A.n, "dim_B": B.n, "requires": "dim_A == dim_B"})
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    cert = _word_trace_obstruction(A.matrix, B.matrix, word_length, tol)
    if cert is not None:
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    sa, sb = svd(A.matrix)[1], svd(B.matrix)[1]
    gap = float(np.max(np.abs(sa - sb), initial=0.0))
    if gap > tol.residual_tol:
        k = int(np.argmax(np.abs(sa - sb))) + 1
        cert = Certificate(
            "singular-value-product",
            {
                "k": k,
                "product_A": float(np.prod(sa[:k])),
                "product_B": float(np.prod(sb[:k])),
                "sigma_A": sa.tolist(),
                "sigma_B": sb.tolist(),
            },
        )
        return OrderVerdict(REFUTED, relation, certificate=cert, diagnostics=diag)
    if via_charfn and A.is_cnu and B.is_cnu:
        v = coincide(sample_charfn(A, grid), sample_charfn(B, grid), budget)
        v.relation = relation + " (characteristic functions)"
        return v
    v = find_isometric_intertwiner(A, B, reducing=True, budget=budget, tol=tol)
    v.relation = relation
    v.diagnostics.update(diag)
    if v.refuted:
        return v
    if v.holds:
        W = v.witness
        v.diagnostics["unitarity"] = opnorm(W @ W.conj().T - np.eye(A.n))
    return v


def recheck_certificate(cert: Certificate, A, B, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Re-derive a refutation along a code path independent of the deciders."""
    A, B = _mat(A), _mat(B)
    d = cert.detail
    if cert.kind == "dimension":
        if "intertwiner_space_dim" in d:
            L = _sylvester_operator(A, B, bool(d.get("reducing")))
            scale = max(np.linalg.norm(L, 2), np.linalg.norm(A, 2) + np.linalg.norm(B, 2))
            sL = np.linalg.norm(L, 2)
            N = spla.null_space(L, rcond=tol.rank_tol * scale / sL) if sL > 0 else np.eye(L.shape[1])
            if N.shape[1] == 0:
                return True
            if "common_kernel_dim" not in d:
                return False
            m, n = A.shape[0], B.shape[0]
            stack = np.vstack([N[:, j].reshape((n, m), order="F") for j in range(N.shape[1])])
            return np.linalg.matrix_rank(stack, tol=tol.rank_tol * np.linalg.norm(stack, 2)) < m
        if d.get("requires") == "dim_A == dim_B":
            return A.shape[0] != B.shape[0]
        return A.shape[0] > B.shape[0]
    if cert.kind == "defect":

        def rank(M):
            H = np.eye(M.shape[0]) - M.conj().T @ M
            return int(np.linalg.matrix_rank(H, tol=tol.rank_tol, hermitian=True))

        da, das, db, dbs = rank(A), rank(A.conj().T), rank(B), rank(B.conj().T)
        return da > db or das > db + dbs
    if cert.kind == "point-spectrum":
        lam = complex(*d["eigenvalue"])
        ga = A.shape[0] - np.linalg.matrix_rank(A - lam * np.eye(A.shape[0]), tol=tol.rank_tol)
        gb = B.shape[0] - np.linalg.matrix_rank(B - lam * np.eye(B.shape[0]), tol=np.sqrt(tol.rank_tol))
        return ga > gb
    if cert.kind == "word-trace":
        letters = d["word"].split()
        pick = lambda M: [M if s == "M" else M.conj().T for s in letters]
        ta = np.trace(reduce(np.matmul, pick(A)))
        tb = np.trace(reduce(np.matmul, pick(B)))
        return abs(ta - tb) > tol.residual_tol * max(1, A.shape[0])
    if cert.kind == "singular-value-product":
        if "point_index" in d:
            sa, sb = np.asarray(d["sigma_F"]), np.asarray(d["sigma_G"])
            return len(sa) != len(sb) or np.max(np.abs(sa - sb)) > tol.residual_tol
        sa = spla.svdvals(A)
        sb = spla.svdvals(B)
        k = d["k"]
        return abs(np.prod(sa[:k]) - np.prod(sb[:k])) > tol.residual_tol * 1e-3 or np.max(np.abs(sa - sb)) > tol.residual_tol
    raise ValueError(f"unknown certificate kind {cert.kind!r}")


def decide_relations(A, B, budget: Budget = Budget(), tol: Tolerance | None = None) -> dict[str, OrderVerdict]:
    """All four relations between A and B plus the verdicts they are built from."""
    ab = find_isometric_intertwiner(A, B, False, budget, tol)
    ba = find_isometric_intertwiner(B, A, False, budget, tol)
    ab_r = find_isometric_intertwiner(A, B, True, budget, tol)
    ba_r = find_isometric_intertwiner(B, A, True, budget, tol)

    def both(x, y, name):
        if x.holds and y.holds:
            status = HOLDS
        elif x.refuted or y.refuted:
            status = REFUTED
        else:
            status = UNKNOWN
        return OrderVerdict(status, name, diagnostics={"forward": x.status, "backward": y.status})

    return {
        "A<=B": ab,
        "B<=A": ba,
        "A<B": ab_r,
        "B<A": ba_r,
        "A~~B": both(ab, ba, "A~~B (both invariant)"),
        "A~B": both(ab_r, ba_r, "A~B (both reducing)"),
    }


@dataclass(eq=False)
class CantorBernsteinResult:
    unitary: np.ndarray
    fixed_point: Subspace
    iterations: int
    dims: list[int] = field(default_factory=list)
    residuals: dict[str, float] = field(default_factory=dict)


def cantor_bernstein(A, B, omega, omega_prime, tol: Tolerance = DEFAULT_TOL) -> CantorBernsteinResult:
    """Glue two reducing isometric intertwiners into a unitary equivalence.

    Iterates ``Y -> H_A ⊖ omega'(H_B ⊖ omega(Y))`` from ``Y = {0}``.  The map
    is monotone on reducing subspaces, so dimensions never decrease and the
    chain is stable after at most ``dim H_A + 1`` steps.  The result is
    ``W = omega`` on the fixed point and ``omega'*`` on its complement.
    """
    A, B = _mat(A), _mat(B)
    omega = np.asarray(omega, dtype=complex)
    omega_prime = np.asarray(omega_prime, dtype=complex)
    na, nb = A.shape[0], B.shape[0]
    if omega.shape != (nb, na) or omega_prime.shape != (na, nb):
        raise PreconditionViolated(f"witness shapes {omega.shape}, {omega_prime.shape} do not fit")
    for name, X, P, Q in (("omega", omega, A, B), ("omega_prime", omega_prime, B, A)):
        res = witness_residuals(P, Q, X, reducing=True)
        if not _witness_ok(res, tol):
            raise PreconditionViolated(f"{name} is not a reducing isometric intertwiner: {res}")

    def psi(Y: Subspace) -> Subspace:
        img = Subspace(omega @ Y.frame, tol)
        rest = complement(img)
        back = Subspace(omega_prime @ rest.frame, tol)
        return complement(back)

    Y = Subspace(np.zeros((na, 0), dtype=complex), tol)
    dims = [0]
    for it in range(1, na + 2):
        Ynext = psi(Y)
        if Ynext.dim < Y.dim:
            raise NoConvergence("iterate dimension decreased", {"dims": dims + [Ynext.dim]})
        dims.append(Ynext.dim)
        if Ynext.dim == Y.dim:
            Y = Ynext
            break
        Y = Ynext
    else:
        raise NoConvergence("chain did not stabilize within dim + 1 steps", {"dims": dims})
    P = Y.projector()
    W = omega @ P + omega_prime.conj().T @ (np.eye(na) - P)
    res = {
        "W*W-I": opnorm(W.conj().T @ W - np.eye(na)),
        "WW*-I": opnorm(W @ W.conj().T - np.eye(nb)),
        "WA-BW": opnorm(W @ A - B @ W),
    }
    if max(res.values()) > tol.residual_tol:
        raise NoConvergence("glued operator failed verification", {"dims": dims, **res})
    return CantorBernsteinResult(W, Y, it, dims, res)


def invariant_unitary_implies_reducing_check(B, Y: Subspace) -> bool:
    """An invariant subspace on which B acts unitarily must reduce B.

    Raises if the hypotheses fail; returns whether ``||(I-P) B* P||`` is
    within tolerance (False signals a tolerance misconfiguration).
    """
    B = B if isinstance(B, Contraction) else validate(B)
    tol = B.tol
    F, C = Y.frame, complement(Y).frame
    M = B.matrix
    inv = opnorm(C.conj().T @ M @ F)
    if inv > tol.residual_tol:
        raise NotInvariant(inv)
    R = F.conj().T @ M @ F
    ures = max(opnorm(R.conj().T @ R - np.eye(Y.dim)), opnorm(R @ R.conj().T - np.eye(Y.dim)))
    if ures > tol.residual_tol:
        raise RestrictionNotUnitary(ures)
    return opnorm(C.conj().T @ M.conj().T @ F) <= tol.residual_tol


def verify_unit_cnu_corollary(A, B, omega) -> Report:
    """Given W witnessing A ≼ B: W maps H_A^u into H_B^u and witnesses A_u ≺ B_u."""
    A = A if isinstance(A, Contraction) else validate(A)
    B = B if isinstance(B, Contraction) else validate(B)
    tol = A.tol
    W = np.asarray(omega, dtype=complex)
    res = witness_residuals(A, B, W)
    if not _witness_ok(res, tol):
        raise PreconditionViolated(f"omega does not witness A <= B: {res}")
    rep = Report("unit-cnu-corollary")
    sa, sb = A.split, B.split
    Fa, Fb = sa.unitary_space.frame, sb.unitary_space.frame
    rep.data.update({"dim_Hu_A": Fa.shape[1], "dim_Hu_B": Fb.shape[1]})
    if Fa.shape[1] == 0:
        rep.add("vacuous", True, note="A has no unitary part")
        return rep
    img = W @ Fa
    leak = opnorm(img - Fb @ (Fb.conj().T @ img))
    rep.add("image_in_unitary_part", leak <= tol.residual_tol, leak, tol.residual_tol)
    Wu = Fb.conj().T @ img
    ures = witness_residuals(sa.unitary_part, sb.unitary_part, Wu, reducing=True)
    for key, val in ures.items():
        rep.add(f"restricted_{key}", val <= tol.residual_tol, val, tol.residual_tol)
    if sa.cnu_space.dim == 0:
        r = reducing_residual(B.matrix, Subspace(W, tol))
        rep.add("unitary_A_image_reduces_B", r <= tol.residual_tol, r, tol.residual_tol)
    return rep


def _leading_products(M: np.ndarray, n: int) -> np.ndarray:
    s = leading_sigmas(M, n)
    return np.cumprod(s)


def verify_theorem_general_n_finite(
    A,
    B,
    grid: GridSpec = DEFAULT_GRID,
    budget: Budget = Budget(),
    forward=None,
    backward=None,
) -> Report:
    """Check the finite-defect equivalence theorem on a concrete pair.

    Needs witnesses of A ≼ B and B ≼ A (searched for when not supplied).
    Verifies equal defect dimensions, equal products of the leading ``k``
    singular values of the characteristic functions at every grid point for
    ``k = 1..n``, equal singular value profiles, and finally runs the
    unitary equivalence decider.
    """
    A = A if isinstance(A, Contraction) else validate(A)
    B = B if isinstance(B, Contraction) else validate(B)
    tol = A.tol
    rep = Report("general-n-finite-theorem")
    rep.data["grid_size"] = len(grid.disk_points()) + grid.boundary_angles
    if not (A.is_cnu and B.is_cnu):
        rep.applicable = False
        rep.notes.append("theorem needs completely nonunitary A and B")
    for label, given, P, Q in (("forward", forward, A, B), ("backward", backward, B, A)):
        if given is None:
            v = find_isometric_intertwiner(P, Q, False, budget, tol)
            given = v.witness if v.holds else None
            rep.data[f"{label}_search"] = v.status
        if given is None:
            rep.applicable = False
            rep.notes.append(f"no {label} witness: theorem not applicable")
            rep.add(f"{label}_witness_present", False)
            continue
        res = witness_residuals(P, Q, given)
        rep.add(f"{label}_witness_verified", _witness_ok(res, tol), max(res.values()), tol.residual_tol)
    if not rep.applicable:
        return rep
    n = A.defect_dim
    rep.add("equal_defect_dims", A.defect_dim == B.defect_dim, [A.defect_dim, B.defect_dim])
    FA, FB = sample_charfn(A, grid), sample_charfn(B, grid)
    worst_prod, worst_sigma = 0.0, 0.0
    for Ba, Bb in zip(
        list(FA.blocks) + list(FA.boundary_blocks), list(FB.blocks) + list(FB.boundary_blocks)
    ):
        pa, pb = _leading_products(Ba, n), _leading_products(Bb, n)
        worst_prod = max(worst_prod, float(np.max(np.abs(pa - pb), initial=0.0)))
        k = max(min(Ba.shape), min(Bb.shape))
        worst_sigma = max(
            worst_sigma,
            float(np.max(np.abs(leading_sigmas(Ba, k) - leading_sigmas(Bb, k)), initial=0.0)),
        )
    rep.add("product_equalities", worst_prod <= tol.residual_tol, worst_prod, tol.residual_tol)
    rep.add("equal_sigma_profiles", worst_sigma <= tol.residual_tol, worst_sigma, tol.residual_tol)
    ra, rb = analytic_range_span(FA)[0].dim, analytic_range_span(FB)[0].dim
    rep.add("equal_analytic_range_dims", ra == rb, [ra, rb])
    v = unitarily_equivalent(A, B, budget, tol=tol)
    rep.data["equivalence"] = v.status
    rep.data["equivalence_diagnostics"] = {
        k: v.diagnostics[k] for k in ("starts_used", "best_residual") if k in v.diagnostics
    }
    rep.add("not_refuted", not v.refuted, note=v.status)
    rep.add("unitarily_equivalent", v.holds, note=v.status)
    return rep
