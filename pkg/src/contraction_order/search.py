"""Search for isometries inside a linear space of matrix tuples.

Both the intertwiner problem (``W A = B W``) and the coincidence problem
(``X G(lam) = F(lam) Y``) are linear in the unknowns; what makes them hard is
the extra requirement that the solution be isometric.  Given a Frobenius
orthonormal basis of the solution space, this module minimizes
``sum_i ||X_i(c)* X_i(c) - I||_F^2`` over the coordinates ``c`` with
``scipy.optimize.least_squares`` and an analytic Jacobian.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from .numerics import nearest_unitary
from .verdict import Budget

__all__ = ["isometric_combination"]


def _problem(stacks: Sequence[np.ndarray]):
    k = stacks[0].shape[0]

    def unpack(x):
        return x[:k] + 1j * x[k:]

    def mats(x):
        c = unpack(x)
        return [np.tensordot(c, K, axes=1) for K in stacks]

    def fun(x):
        parts = []
        for X in mats(x):
            E = X.conj().T @ X - np.eye(X.shape[1])
            parts += [E.real.ravel(), E.imag.ravel()]
        return np.concatenate(parts)

    def jac(x):
        rows = []
        for X, K in zip(mats(x), stacks):
            P = np.einsum("nm,jnp->jmp", X.conj(), K)
            Ph = P.conj().transpose(0, 2, 1)
            cols = np.concatenate([P + Ph, 1j * (P - Ph)], axis=0).reshape(2 * k, -1)
            rows += [cols.real.T, cols.imag.T]
        return np.vstack(rows)

    return fun, jac, mats


def isometric_combination(
    stacks: Sequence[np.ndarray],
    budget: Budget,
    accept: Callable[[list[np.ndarray]], tuple[bool, float]],
    initial: Sequence[list[np.ndarray]] = (),
):
    """Find ``c`` making every ``X_i(c) = sum_j c_j stacks[i][j]`` an isometry.

    ``stacks[i]`` has shape ``(k, n_i, m_i)`` with a shared coordinate count
    ``k``.  Starts run in index order with seeds from ``budget``; after each
    local solve both the raw combination and its polar factors are offered
    to ``accept``, which returns ``(ok, residual)``.  The first accepted
    candidate is returned, so the outcome does not depend on scheduling.
    Candidates in ``initial`` (e.g. identities) are tried before any start.
    Returns ``(matrices or None, info)``.
    """
    k = stacks[0].shape[0]
    fun, jac, mats = _problem(stacks)
    n_res = sum(2 * K.shape[2] ** 2 for K in stacks)
    method = "lm" if n_res >= 2 * k else "trf"
    target = np.sqrt(sum(K.shape[2] for K in stacks))
    best, nfev = np.inf, 0
    for cand in initial:
        ok, res = accept(list(cand))
        best = min(best, res)
        if ok:
            return list(cand), {"starts_used": 0, "function_evals": 0, "best_residual": float(res)}
    for start in range(budget.starts):
        rng = budget.rng(start)
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        c *= target / np.linalg.norm(c)
        sol = least_squares(
            fun,
            np.concatenate([c.real, c.imag]),
            jac=jac,
            method=method,
            max_nfev=budget.max_iter,
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        nfev += sol.nfev
        raw = mats(sol.x)
        for cand in ([nearest_unitary(X) for X in raw], raw):
            ok, res = accept(cand)
            best = min(best, res)
            if ok:
                return cand, {"starts_used": start + 1, "function_evals": nfev, "best_residual": float(res)}
    return None, {"starts_used": budget.starts, "function_evals": nfev, "best_residual": float(best)}
