"""Seeded verification suites, one per theorem-level claim.

Each suite returns a :class:`Report` with one check per assertion.  Reports
contain no timings or other run-dependent values, so the same seed and
configuration always serialize to the same bytes.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
import scipy.linalg as spla

from .charfn import sample_charfn
from .config import Config
from .contraction import check_defect_inequalities, largest_reducing_subspace_in_kernel, validate
from .dilation import schaffer_dilation, verify_order_extends_to_dilations
from .factorization import is_regular_pair, verify_factorization_theorem
from .fixtures import approx_pair, jordan_block, jordan_sum_pair, random_contraction, sim_pair
from .numerics import Subspace, coordinate_subspace, haar_unitary, opnorm
from .order import (
    cantor_bernstein,
    invariant_unitary_implies_reducing_check,
    verify_theorem_general_n_finite,
    verify_unit_cnu_corollary,
    witness_residuals,
)
from .singular_values import horn_holds, horn_products
from .verdict import Report

__all__ = ["SUITES", "run_suite"]


def _child_seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2**63 - 1, size=count)]


def _complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _with_defect(rng, n: int, d: int, m: int | None = None) -> np.ndarray:
    """Random ``m x n`` contraction with ``n - d`` singular values equal to one."""
    m = n if m is None else m
    s = np.concatenate([np.ones(n - d), rng.uniform(0.05, 0.95, d)])
    U = haar_unitary(rng, m)[:, :n]
    return U @ np.diag(s) @ haar_unitary(rng, n).conj().T


def charfn_closed_forms(seed: int, cfg: Config) -> Report:
    """theta_{S_m}(lam) = lam^m for m = 1..6 and theta_0(lam) = lam on C^1."""
    rep = Report("charfn-closed-forms")
    for m in range(1, 7):
        F = sample_charfn(jordan_block(m, cfg.tol), cfg.grid)
        err = max(
            np.max(np.abs(F.blocks[:, 0, 0] - F.disk_points**m)),
            np.max(np.abs(F.boundary_blocks[:, 0, 0] - F.boundary_points**m)),
        )
        rep.add(f"S_{m}", err <= 1e-8, float(err), 1e-8)
    F = sample_charfn(validate(np.zeros((1, 1)), cfg.tol), cfg.grid)
    err = max(
        np.max(np.abs(F.blocks[:, 0, 0] - F.disk_points)),
        np.max(np.abs(F.boundary_blocks[:, 0, 0] - F.boundary_points)),
    )
    rep.add("zero_on_C1", err <= 1e-12, float(err), 1e-12)
    return rep


def horn(seed: int, cfg: Config) -> Report:
    """1000 random composable pairs (sizes <= 8, every k) and exact diagonal equality cases."""
    rep = Report("horn")
    rng = np.random.default_rng(seed)
    slack = 1e-10
    for i in range(1000):
        m, p, q = (int(x) for x in rng.integers(1, 9, size=3))
        X = _complex(rng, p, m) * np.exp(rng.uniform(-3, 1))
        Y = _complex(rng, q, p) * np.exp(rng.uniform(-3, 1))
        kmax = max(m, p, q)
        ok = all(horn_holds(X, Y, k, slack) for k in range(1, kmax + 1))
        excess = max(
            (lhs - rhs) / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
            for lhs, rhs in (horn_products(X, Y, k) for k in range(1, kmax + 1))
        )
        rep.add(f"pair_{i}", ok, float(excess), slack)
    for i in range(20):
        n = int(rng.integers(1, 9))
        x = -np.sort(-rng.uniform(0, 1, n))
        y = -np.sort(-rng.uniform(0, 1, n))
        gap = max(
            abs(lhs - rhs) / max(rhs, np.finfo(float).tiny)
            for lhs, rhs in (horn_products(np.diag(x), np.diag(y), k) for k in range(1, n + 1))
        )
        rep.add(f"diagonal_equality_{i}", gap <= 1e-12, float(gap), 1e-12)
    return rep


def sim_theorem(seed: int, cfg: Config) -> Report:
    """Cantor-Bernstein gluing on 200 fixtures with A ~ B known by construction."""
    rep = Report("sim-theorem")
    rng = np.random.default_rng(seed)
    for i, s in enumerate(_child_seeds(seed, 200)):
        n0, r = int(rng.integers(0, 9)), int(rng.integers(1, 9))
        f = sim_pair(s, (n0, r), cfg.tol)
        res = cantor_bernstein(f.A, f.B, f.omega, f.omega_prime, cfg.tol)
        worst = max(res.residuals.values())
        ok = worst <= 1e-8 and res.iterations <= f.A.n + 1
        rep.add(f"fixture_{i}", ok, float(worst), 1e-8, note=f"dim={f.A.n} iterations={res.iterations}")
    return rep


def n_finite_theorem(seed: int, cfg: Config) -> Report:
    """Finite-defect equivalence theorem on 100 conjugated c.n.u. pairs."""
    rep = Report("n-finite-theorem")
    rng = np.random.default_rng(seed)
    holds = 0
    for i, s in enumerate(_child_seeds(seed, 100)):
        n = int(rng.integers(2, 7))
        f = approx_pair(s, n, tol=cfg.tol)
        r = verify_theorem_general_n_finite(f.A, f.B, cfg.grid, cfg.budget, f.forward, f.backward)
        status = r.data.get("equivalence")
        holds += status == "Holds"
        prod = r.check("product_equalities")
        rep.add(f"fixture_{i}_product_equalities", prod.passed, prod.value, prod.threshold)
        rep.add(f"fixture_{i}_not_refuted", r.check("not_refuted").passed, note=status)
    rep.data["holds"] = holds
    rep.add("holds_at_least_95", holds >= 95, holds, 95)
    return rep


def jordan_sum(seed: int, cfg: Config, N: int = 6) -> Report:
    """Integer Jordan-sum pair: exact intertwiner and kernel structure."""
    rep = Report("jordan-sum")
    j = jordan_sum_pair(N)
    W = j.omega
    res = float(np.max(np.abs(W.astype(float) @ j.A_int - j.B_int @ W.astype(float)), initial=0.0))
    rep.add("intertwining", res <= 1e-14, res, 1e-14)
    rep.add("integer_isometry", bool(np.array_equal(W.T @ W, np.eye(W.shape[1], dtype=np.int64))))
    rep.add("integer_intertwining", bool(np.array_equal(W @ j.A_int, j.B_int @ W)))
    ka = largest_reducing_subspace_in_kernel(j.A_int, cfg.tol)
    kb = largest_reducing_subspace_in_kernel(j.B_int, cfg.tol)
    rep.add("reducing_in_ker_A", ka.dim >= 1, ka.dim)
    s1 = coordinate_subspace(j.A_int.shape[0], [0], cfg.tol)
    inside = opnorm(s1.projector() - ka.projector() @ s1.projector())
    rep.add("S_1_summand_inside", inside <= cfg.tol.residual_tol, inside, cfg.tol.residual_tol)
    rep.add("no_reducing_in_ker_B", kb.dim == 0, kb.dim)
    tres = witness_residuals(j.tail_int, j.A_int, j.tail_embedding)
    rep.add("tail_embeds_in_A", max(tres.values()) <= cfg.tol.residual_tol, max(tres.values()))
    rep.add("dimensions_differ", j.A_int.shape[0] != j.B_int.shape[0], [j.A_int.shape[0], j.B_int.shape[0]])
    worst = 0.0
    for M in (j.A_int, j.B_int):
        F = sample_charfn(validate(M, cfg.tol), cfg.grid)
        I = np.eye(F.shape[1])
        for Bk in F.boundary_blocks:
            worst = max(worst, opnorm(Bk.conj().T @ Bk - I), opnorm(Bk @ Bk.conj().T - I))
    rep.add("inner_on_boundary_grid", worst <= cfg.tol.residual_tol, worst, note="grid-relative")
    rep.data["caveats"] = j.caveats
    return rep


def defect(seed: int, cfg: Config) -> Report:
    """Defect inequalities for restrictions to Schur invariant subspaces."""
    rep = Report("defect")
    rng = np.random.default_rng(seed)
    for i in range(200):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, n + 1))
        B = validate(_with_defect(rng, n, d), cfg.tol)
        if not B.is_cnu:
            rep.notes.append(f"instance {i}: draw has a unitary part, skipped")
            continue
        _, Z = spla.schur(B.matrix, output="complex")
        k = int(rng.integers(1, n + 1))
        F = Z[:, :k]
        A = validate(F.conj().T @ B.matrix @ F, cfg.tol)
        ok = check_defect_inequalities(A, B)
        rep.add(
            f"instance_{i}",
            ok,
            [A.defect_dim, A.codefect_dim, B.defect_dim, B.codefect_dim],
        )
    return rep


def dilation_order(seed: int, cfg: Config) -> Report:
    """Power identity and unitarity of truncated dilations; order lifts to dilations."""
    rep = Report("dilation-order")
    rng = np.random.default_rng(seed)
    for i, s in enumerate(_child_seeds(seed, 50)):
        n = int(rng.integers(1, 7))
        A = random_contraction(s, n, float(rng.uniform(0.3, 1.0)), cfg.tol)
        D = schaffer_dilation(A, cfg.depth)
        p = max(D.power_residuals(A))
        u = D.unitarity_residual()
        rep.add(f"contraction_{i}_power", p <= 1e-10, float(p), 1e-10)
        rep.add(f"contraction_{i}_unitary", u <= 1e-12, float(u), 1e-12)
    W = np.zeros((3, 2))
    W[1, 0] = W[2, 1] = 1
    r = verify_order_extends_to_dilations(jordan_block(2, cfg.tol), jordan_block(3, cfg.tol), W, 4)
    for c in r.checks:
        rep.add(f"S2_in_S3_{c.name}", c.passed, c.value, c.threshold)
    return rep


def regularity(seed: int, cfg: Config) -> Report:
    """Zero-factor and direct-sum properties of regular factorizations."""
    rep = Report("regularity")
    rng = np.random.default_rng(seed)
    for i in range(20):
        p = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        q = p + int(rng.integers(0, 3))
        T1 = np.zeros((p, m))
        isometric = i % 2 == 0
        if isometric:
            T2 = haar_unitary(rng, q)[:, :p]
        else:
            T2 = _with_defect(rng, p, int(rng.integers(1, p + 1)), q)
        rep.add(f"zero_factor_{i}", is_regular_pair(T1, T2, cfg.tol) == isometric, note=f"isometric={isometric}")
    for i in range(50):
        pairs = []
        for _ in range(2):
            p = int(rng.integers(1, 5))
            a, b = int(rng.integers(0, p + 1)), int(rng.integers(0, p + 1))
            pairs.append((_with_defect(rng, p, b), _with_defect(rng, p, a)))
        verdicts = [is_regular_pair(T1, T2, cfg.tol) for T1, T2 in pairs]
        T1 = spla.block_diag(pairs[0][0], pairs[1][0])
        T2 = spla.block_diag(pairs[0][1], pairs[1][1])
        total = is_regular_pair(T1, T2, cfg.tol)
        rep.add(f"direct_sum_{i}", total == all(verdicts), note=f"parts={verdicts} sum={total}")
    return rep


def factorization(seed: int, cfg: Config) -> Report:
    """Factorizations attached to invariant subspaces of Jordan sums and random c.n.u. matrices."""
    rep = Report("factorization")
    cases = [
        (jordan_block(4, cfg.tol), coordinate_subspace(4, [2, 3], cfg.tol), "S_4"),
        (jordan_block(3, cfg.tol), coordinate_subspace(3, [2], cfg.tol), "S_3"),
        (validate(spla.block_diag(np.eye(2, k=-1), np.eye(2, k=-1)), cfg.tol), coordinate_subspace(4, [0, 1], cfg.tol), "S_2+S_2"),
    ]
    rng = np.random.default_rng(seed)
    for i in range(12):
        n = int(rng.integers(2, 6))
        T = validate(_with_defect(rng, n, int(rng.integers(1, n + 1))), cfg.tol)
        _, Z = spla.schur(T.matrix, output="complex")
        k = int(rng.integers(1, n))
        cases.append((T, Subspace(Z[:, :k], cfg.tol), f"random_{i}"))
    for T, Y, name in cases:
        if not T.is_cnu:
            rep.notes.append(f"{name}: unitary part present, skipped")
            continue
        r = verify_factorization_theorem(T, Y, cfg.grid, cfg.budget)
        failed = [c.name for c in r.checks if not c.passed]
        rep.add(name, r.passed, note=",".join(failed))
    return rep


def unit_cnu(seed: int, cfg: Config) -> Report:
    """Invariant-unitary-is-reducing and the unitary-part corollary on mixed fixtures."""
    rep = Report("unit-cnu")
    rng = np.random.default_rng(seed)
    for i in range(50):
        u, c = int(rng.integers(1, 5)), int(rng.integers(0, 5))
        C = _complex(rng, c, c)
        if c:
            C *= rng.uniform(0.2, 0.95) / np.linalg.norm(C, 2)
        V = haar_unitary(rng, u + c)
        B = V @ spla.block_diag(haar_unitary(rng, u), C) @ V.conj().T
        ok = invariant_unitary_implies_reducing_check(validate(B, cfg.tol), Subspace(V[:, :u], cfg.tol))
        rep.add(f"reducing_{i}", ok)
    for i in range(50):
        u = int(rng.integers(0, 4))
        c = int(rng.integers(0 if u else 1, 4))
        eu, ec = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        Uu = haar_unitary(rng, u)
        C = _complex(rng, c, c)
        if c:
            C *= rng.uniform(0.2, 0.95) / np.linalg.norm(C, 2)
        Ce = _complex(rng, ec, ec)
        if ec:
            Ce *= rng.uniform(0.2, 0.95) / np.linalg.norm(Ce, 2)
        Wa = haar_unitary(rng, u + c)
        Vb = haar_unitary(rng, u + eu + c + ec)
        A = Wa @ spla.block_diag(Uu, C) @ Wa.conj().T
        core = spla.block_diag(Uu, haar_unitary(rng, eu), C, Ce)
        B = Vb @ core @ Vb.conj().T
        E = np.zeros((u + eu + c + ec, u + c))
        E[:u, :u] = np.eye(u)
        E[u + eu:u + eu + c, u:] = np.eye(c)
        omega = Vb @ E @ Wa.conj().T
        r = verify_unit_cnu_corollary(validate(A, cfg.tol), validate(B, cfg.tol), omega)
        leak = r.check("image_in_unitary_part").value if u else 0.0
        rep.add(f"corollary_{i}", r.passed, leak, 1e-8, note=f"dim_Hu_A={u}")
    return rep


SUITES: dict[str, Callable[[int, Config], Report]] = {
    "charfn-closed-forms": charfn_closed_forms,
    "horn": horn,
    "sim-theorem": sim_theorem,
    "n-finite-theorem": n_finite_theorem,
    "jordan-sum": jordan_sum,
    "defect": defect,
    "dilation-order": dilation_order,
    "regularity": regularity,
    "factorization": factorization,
    "unit-cnu": unit_cnu,
}


def run_suite(name: str, seed: int = 0, cfg: Config | None = None) -> Report:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    cfg = cfg or Config()
    rep = SUITES[name](seed, cfg)
    rep.data["seed"] = seed
    rep.data["config"] = cfg.to_dict()
    return rep
