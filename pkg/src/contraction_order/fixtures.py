"""Deterministic generators: Jordan cells, shift truncations and seeded pairs with known answers.

Every generator is a pure function of its integer parameters and seed.  The
fixtures standing in for infinite-dimensional examples carry a ``caveats``
dict listing which claims survive truncation and which do not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg as spla

from .contraction import Contraction, validate
from .errors import DimsTooLarge, InvalidInput
from .numerics import DEFAULT_TOL, Tolerance, haar_unitary

__all__ = [
    "MAX_TOTAL_DIM",
    "FIXTURE_KINDS",
    "jordan_block",
    "cyclic_shift",
    "JordanSumPair",
    "jordan_sum_pair",
    "ShiftPair",
    "shift_pair",
    "SimPair",
    "sim_pair",
    "ApproxPair",
    "approx_pair",
    "conjugated_pair",
    "random_contraction",
    "FixtureSpec",
    "Fixture",
]

MAX_TOTAL_DIM = 24
FIXTURE_KINDS = (
    "jordan_sum",
    "truncated_shifts",
    "conjugated_pair",
    "sim_pair",
    "approx_pair",
    "random_contraction",
)


def _jordan_int(m: int) -> np.ndarray:
    return np.eye(m, k=-1, dtype=np.int64)


def jordan_block(m: int, tol: Tolerance = DEFAULT_TOL) -> Contraction:
    """Nilpotent cell ``S_m``: ``S e_k = e_{k+1}``, ``S e_m = 0`` (ones below the diagonal)."""
    if m < 1:
        raise InvalidInput(f"Jordan cell size must be >= 1, got {m}")
    return validate(_jordan_int(m), tol)


def cyclic_shift(n: int) -> np.ndarray:
    """Cyclic permutation ``Z e_k = e_{k+1 mod n}``, the unitary stand-in for a bilateral shift."""
    if n < 1:
        raise InvalidInput(f"cyclic shift size must be >= 1, got {n}")
    return np.roll(np.eye(n, dtype=np.int64), 1, axis=0)


def _random_complex(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def random_contraction(seed: int, n: int, sigma_max: float = 0.9, tol: Tolerance = DEFAULT_TOL) -> Contraction:
    """Seeded complex Gaussian matrix rescaled to the given largest singular value."""
    if n < 1 or n > MAX_TOTAL_DIM:
        raise DimsTooLarge(f"n = {n} outside 1..{MAX_TOTAL_DIM}")
    if not 0 <= sigma_max <= 1:
        raise InvalidInput(f"sigma_max must lie in [0, 1], got {sigma_max}")
    rng = np.random.default_rng(seed)
    M = _random_complex(rng, n, n)
    return validate(M * (sigma_max / np.linalg.norm(M, 2)), tol)


@dataclass(eq=False)
class JordanSumPair:
    """``A = S_1 ⊕ ... ⊕ S_N`` and ``B = S_2 ⊕ ... ⊕ S_{N+1}`` with integer data.

    ``omega`` sends ``e^m_k`` to ``e^{m+1}_{k+1}``; ``tail_embedding`` is the
    coordinate inclusion of ``S_2 ⊕ ... ⊕ S_N`` into ``A``.
    """

    N: int
    A_int: np.ndarray
    B_int: np.ndarray
    omega: np.ndarray
    tail_int: np.ndarray
    tail_embedding: np.ndarray
    caveats: dict[str, list[str]]

    @property
    def A(self) -> Contraction:
        return validate(self.A_int)

    @property
    def B(self) -> Contraction:
        return validate(self.B_int)

    def __iter__(self):
        yield from (self.A, self.B, self.omega)


def _offsets(sizes) -> dict[int, int]:
    out, pos = {}, 0
    for m in sizes:
        out[m] = pos
        pos += m
    return out


def jordan_sum_pair(N: int) -> JordanSumPair:
    if N < 2:
        raise InvalidInput(f"N must be >= 2, got {N}")
    a_sizes = range(1, N + 1)
    b_sizes = range(2, N + 2)
    if sum(b_sizes) > 10 * MAX_TOTAL_DIM:
        raise DimsTooLarge(f"N = {N} too large")
    A = spla.block_diag(*[_jordan_int(m) for m in a_sizes])
    B = spla.block_diag(*[_jordan_int(m) for m in b_sizes])
    oa, ob = _offsets(a_sizes), _offsets(b_sizes)
    omega = np.zeros((B.shape[0], A.shape[0]), dtype=np.int64)
    for m in a_sizes:
        for k in range(m):
            omega[ob[m + 1] + k + 1, oa[m] + k] = 1
    tail = spla.block_diag(*[_jordan_int(m) for m in range(2, N + 1)])
    emb = np.zeros((A.shape[0], tail.shape[0]), dtype=np.int64)
    emb[1:, :] = np.eye(tail.shape[0], dtype=np.int64)
    caveats = {
        "survives": [
            "omega is an exact isometric intertwiner (A <= B)",
            "S_2 + ... + S_N <= A by the coordinate inclusion",
            "ker A contains a one-dimensional reducing subspace, ker B none",
            "characteristic functions are inner and *-inner on the boundary grid",
        ],
        "infinite_only": [
            "B <= A (needs the whole infinite sum)",
            "A and B are not unitarily equivalent although A ~~ B",
        ],
    }
    return JordanSumPair(N, A, B, omega, tail, emb, caveats)


@dataclass(eq=False)
class ShiftPair:
    """``A = Z_N ⊕ ... ⊕ Z_N`` (copies) and ``B = A ⊕ S_N``."""

    A: Contraction
    B: Contraction
    embedding: np.ndarray
    caveats: dict[str, list[str]]

    def __iter__(self):
        yield from (self.A, self.B, self.embedding)


def shift_pair(N: int, copies: int = 1) -> ShiftPair:
    if N < 1 or copies < 1:
        raise InvalidInput("N and copies must be >= 1")
    if N * (copies + 1) > MAX_TOTAL_DIM:
        raise DimsTooLarge(f"total dimension {N * (copies + 1)} exceeds {MAX_TOTAL_DIM}")
    A = spla.block_diag(*[cyclic_shift(N)] * copies)
    B = spla.block_diag(A, _jordan_int(N))
    emb = np.zeros((B.shape[0], A.shape[0]), dtype=np.int64)
    emb[: A.shape[0]] = np.eye(A.shape[0], dtype=np.int64)
    caveats = {
        "survives": ["A < B via the summand embedding", "A unitary, B not unitary"],
        "infinite_only": ["B <= A (needs infinitely many copies of the bilateral shift)"],
    }
    return ShiftPair(validate(A), validate(B), emb, caveats)


@dataclass(eq=False)
class SimPair:
    """``A ~ B`` by construction, with reducing isometric intertwiners both ways.

    ``B = V (A0 ⊕ Q R Q*) V*`` for ``A = A0 ⊕ R``; ``omega`` and
    ``omega_prime`` carry independent random phases on the two reducing
    summands, so ``omega_prime`` is not simply ``omega*``.
    """

    A: Contraction
    B: Contraction
    omega: np.ndarray
    omega_prime: np.ndarray
    dims: tuple[int, int]

    def __iter__(self):
        yield from (self.A, self.B, self.omega, self.omega_prime)


def sim_pair(seed: int, dims: tuple[int, int] = (2, 2), tol: Tolerance = DEFAULT_TOL) -> SimPair:
    n0, r = (int(x) for x in dims)
    if n0 < 0 or r < 1:
        raise InvalidInput(f"dims must be (>= 0, >= 1), got {dims}")
    if n0 + 2 * r > MAX_TOTAL_DIM:
        raise DimsTooLarge(f"dim C = {n0 + 2 * r} exceeds {MAX_TOTAL_DIM}")
    rng = np.random.default_rng(seed)
    A0 = _random_complex(rng, n0, n0)
    if n0:
        A0 *= rng.uniform(0.5, 1.0) / np.linalg.norm(A0, 2)
    R = _random_complex(rng, r, r)
    R *= rng.uniform(0.5, 1.0) / np.linalg.norm(R, 2)
    Q = haar_unitary(rng, r)
    V = haar_unitary(rng, n0 + r)
    ph = np.exp(2j * np.pi * rng.uniform(size=4))
    A = spla.block_diag(A0, R)
    B = V @ spla.block_diag(A0, Q @ R @ Q.conj().T) @ V.conj().T
    omega = V @ spla.block_diag(ph[0] * np.eye(n0), ph[1] * Q)
    omega_prime = spla.block_diag(ph[2] * np.eye(n0), ph[3] * Q.conj().T) @ V.conj().T
    return SimPair(validate(A, tol), validate(B, tol), omega, omega_prime, (n0, r))


@dataclass(eq=False)
class ApproxPair:
    """c.n.u. ``A`` with small defect and ``B = Q A Q*``; witnesses both ways."""

    A: Contraction
    B: Contraction
    forward: np.ndarray
    backward: np.ndarray
    defect_dim: int

    def __iter__(self):
        yield from (self.A, self.B, (self.forward, self.backward))


def approx_pair(seed: int, n: int = 4, defect_dim: int | None = None, tol: Tolerance = DEFAULT_TOL) -> ApproxPair:
    """``A = U diag(1, ..., 1, s_1..s_d) W*`` with ``d <= 3`` defect directions.

    Draws are repeated (from the same stream) until ``A`` is c.n.u., which
    happens almost surely on the first draw.
    """
    if n < 1 or n > MAX_TOTAL_DIM:
        raise DimsTooLarge(f"n = {n} outside 1..{MAX_TOTAL_DIM}")
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, min(3, n) + 1)) if defect_dim is None else int(defect_dim)
    if not 1 <= d <= n:
        raise InvalidInput(f"defect_dim must lie in 1..{n}")
    for _ in range(100):
        s = np.concatenate([np.ones(n - d), rng.uniform(0.05, 0.95, d)])
        U, W = haar_unitary(rng, n), haar_unitary(rng, n)
        A = validate(U @ np.diag(s) @ W.conj().T, tol)
        if A.is_cnu and A.defect_dim == d:
            break
    else:  # pragma: no cover - probability zero
        raise InvalidInput("could not draw a c.n.u. contraction")
    Q = haar_unitary(rng, n)
    B = validate(Q @ A.matrix @ Q.conj().T, tol)
    # compose the forward witness with a phase so the two directions differ
    phase = np.exp(2j * np.pi * rng.uniform())
    return ApproxPair(A, B, phase * Q, Q.conj().T, d)


def conjugated_pair(seed: int, n: int = 4, sigma_max: float = 0.9, tol: Tolerance = DEFAULT_TOL):
    """``(A, B, Q)`` with ``A`` a seeded random contraction and ``B = Q A Q*``."""
    A = random_contraction(seed, n, sigma_max, tol)
    rng = np.random.default_rng([seed, 1])
    Q = haar_unitary(rng, n)
    return A, validate(Q @ A.matrix @ Q.conj().T, tol), Q


@dataclass(eq=False)
class Fixture:
    spec: "FixtureSpec"
    matrices: dict[str, np.ndarray]
    caveats: dict[str, list[str]] = field(default_factory=dict)

    def to_dict(self):
        return {"spec": self.spec.to_dict(), "matrices": self.matrices, "caveats": self.caveats}


@dataclass(frozen=True)
class FixtureSpec:
    """Serializable recipe; the same recipe always yields identical arrays."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in FIXTURE_KINDS:
            raise InvalidInput(f"unknown fixture kind {self.kind!r}; expected one of {FIXTURE_KINDS}")

    def to_dict(self):
        return {"kind": self.kind, "params": dict(self.params), "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "FixtureSpec":
        return cls(d["kind"], dict(d.get("params", {})), int(d.get("seed", 0)))

    def build(self) -> Fixture:
        p = self.params
        if self.kind == "jordan_sum":
            f = jordan_sum_pair(int(p.get("N", 2)))
            mats = {"A": f.A_int, "B": f.B_int, "omega": f.omega, "tail": f.tail_int, "tail_embedding": f.tail_embedding}
            return Fixture(self, mats, f.caveats)
        if self.kind == "truncated_shifts":
            f = shift_pair(int(p.get("N", 3)), int(p.get("copies", 1)))
            return Fixture(self, {"A": f.A.matrix, "B": f.B.matrix, "embedding": f.embedding}, f.caveats)
        if self.kind == "conjugated_pair":
            A, B, Q = conjugated_pair(self.seed, int(p.get("n", 4)), float(p.get("sigma_max", 0.9)))
            return Fixture(self, {"A": A.matrix, "B": B.matrix, "Q": Q})
        if self.kind == "sim_pair":
            f = sim_pair(self.seed, tuple(p.get("dims", (2, 2))))
            return Fixture(self, {"A": f.A.matrix, "B": f.B.matrix, "omega": f.omega, "omega_prime": f.omega_prime})
        if self.kind == "approx_pair":
            f = approx_pair(self.seed, int(p.get("n", 4)), p.get("defect_dim"))
            return Fixture(self, {"A": f.A.matrix, "B": f.B.matrix, "forward": f.forward, "backward": f.backward})
        A = random_contraction(self.seed, int(p.get("n", 4)), float(p.get("sigma_max", 0.9)))
        return Fixture(self, {"A": A.matrix})
