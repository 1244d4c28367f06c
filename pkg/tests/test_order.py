import numpy as np
import pytest
import scipy.linalg as spla
from hypothesis import given, settings, strategies as st

from contraction_order.charfn import GridSpec
from contraction_order.errors import NotInvariant, PreconditionViolated, RestrictionNotUnitary
from contraction_order.fixtures import cyclic_shift, jordan_block, jordan_sum_pair, shift_pair, sim_pair
from contraction_order.numerics import Subspace, coordinate_subspace, opnorm
from contraction_order.order import (
    cantor_bernstein,
    decide_relations,
    find_isometric_intertwiner,
    invariant_unitary_implies_reducing_check,
    recheck_certificate,
    sylvester_kernel,
    unitarily_equivalent,
    verify_theorem_general_n_finite,
    verify_unit_cnu_corollary,
    witness_residuals,
    word_traces,
)
from contraction_order.verdict import HOLDS, REFUTED, Budget, Certificate

from conftest import haar, random_contraction_matrix

SMALL = GridSpec(radii=(0.3, 0.6, 0.9), angles=4, boundary_angles=16)
TOL = 1e-8


def S(m):
    return jordan_block(m).matrix.real.copy()


def assert_witness(v, A, B, reducing=False):
    A = A.matrix if hasattr(A, "matrix") else np.asarray(A)
    B = B.matrix if hasattr(B, "matrix") else np.asarray(B)
    W = v.witness
    assert opnorm(W.conj().T @ W - np.eye(A.shape[0])) <= TOL
    assert opnorm(W @ A - B @ W) <= TOL
    if reducing:
        assert opnorm(W @ A.conj().T - B.conj().T @ W) <= TOL


# sylvester_kernel


def test_kernel_identity():
    K = sylvester_kernel(np.eye(2), np.eye(2))
    assert len(K) == 4
    G = np.array([[np.vdot(a, b) for b in K] for a in K])
    assert np.allclose(G, np.eye(4))


def test_kernel_zero_into_jordan():
    K = sylvester_kernel(np.zeros((1, 1)), S(2))
    assert len(K) == 1
    assert np.allclose(np.abs(K[0].ravel()), [0, 1])


def test_kernel_distinct_scalars():
    assert sylvester_kernel(np.diag([0.3]), np.diag([0.7])) == []


def test_kernel_matches_scipy_null_space(rng):
    A, B = random_contraction_matrix(rng, 2), random_contraction_matrix(rng, 3)
    B = spla.block_diag(A, B)
    L = np.kron(np.eye(2), B) - np.kron(A.T, np.eye(5))
    assert len(sylvester_kernel(A, B)) == spla.null_space(L).shape[1] == 2  # commutant of A is span{I, A}


# find_isometric_intertwiner


def test_s2_into_s3():
    v = find_isometric_intertwiner(jordan_block(2), jordan_block(3))
    assert v.status == HOLDS
    assert_witness(v, S(2), S(3))
    # the witness has range span{e_2, e_3}
    assert np.allclose(np.abs(v.witness[0]), 0)


def test_s3_into_s2_refuted_by_dimension():
    v = find_isometric_intertwiner(jordan_block(3), jordan_block(2))
    assert v.status == REFUTED and v.certificate.kind == "dimension"
    assert recheck_certificate(v.certificate, S(3), S(2))


def test_unitary_into_shift_plus_jordan_reducing():
    Z = cyclic_shift(4)
    B = spla.block_diag(Z, S(2))
    v = find_isometric_intertwiner(Z, B, reducing=True)
    assert v.status == HOLDS
    assert_witness(v, Z, B, reducing=True)


def test_reducing_refuted_for_s2_in_s3():
    v = find_isometric_intertwiner(jordan_block(2), jordan_block(3), reducing=True)
    assert v.status == REFUTED
    assert recheck_certificate(v.certificate, S(2), S(3))


def test_defect_obstruction():
    A = spla.block_diag(S(2), S(2))
    v = find_isometric_intertwiner(A, S(4))
    assert v.status == REFUTED and v.certificate.kind in ("defect", "point-spectrum", "dimension")
    assert recheck_certificate(v.certificate, A, S(4))


def test_point_spectrum_obstruction():
    A = np.diag([0.5, 0.5])
    B = spla.block_diag(np.array([[0.5, 0.3], [0.0, 0.5]]), np.diag([0.1]))
    v = find_isometric_intertwiner(A, B)
    assert v.status == REFUTED
    assert recheck_certificate(v.certificate, A, B)


def test_certificate_recheck_detects_forgery():
    cert = Certificate("word-trace", {"word": "M M*", "trace_A": [1, 0], "trace_B": [1, 0]})
    assert not recheck_certificate(cert, S(3), S(3))
    cert = Certificate("dimension", {"dim_A": 2, "dim_B": 3, "requires": "dim_A <= dim_B"})
    assert not recheck_certificate(cert, S(2), S(3))


def test_truncated_shift_pair_reducing():
    f = shift_pair(3, 2)
    v = find_isometric_intertwiner(f.A, f.B, reducing=True)
    assert v.status == HOLDS
    assert_witness(v, f.A, f.B, reducing=True)
    assert max(witness_residuals(f.A, f.B, f.embedding, reducing=True).values()) == 0


# unitarily_equivalent


def test_equiv_conjugation(rng):
    A = random_contraction_matrix(rng, 4)
    Q = haar(rng, 4)
    v = unitarily_equivalent(A, Q @ A @ Q.conj().T)
    assert v.status == HOLDS
    assert_witness(v, A, Q @ A @ Q.conj().T, reducing=True)
    assert opnorm(v.witness @ v.witness.conj().T - np.eye(4)) <= TOL


def test_equiv_word_trace_refutation():
    A = spla.block_diag(S(2), S(1))
    v = unitarily_equivalent(A, S(3))
    assert v.status == REFUTED and v.certificate.kind == "word-trace"
    assert v.certificate.detail["word"] == "M M*"
    assert v.certificate.detail["trace_A"][0] == pytest.approx(1)
    assert v.certificate.detail["trace_B"][0] == pytest.approx(2)
    assert recheck_certificate(v.certificate, A, S(3))


def test_equiv_jordan_and_adjoint():
    v = unitarily_equivalent(S(2), S(2).T)
    assert v.status == HOLDS
    assert np.allclose(np.abs(v.witness), [[0, 1], [1, 0]])


def test_equiv_dimension():
    v = unitarily_equivalent(S(2), S(3))
    assert v.status == REFUTED and recheck_certificate(v.certificate, S(2), S(3))


def test_equiv_via_charfn(rng):
    A = random_contraction_matrix(rng, 3)
    Q = haar(rng, 3)
    v = unitarily_equivalent(A, Q @ A @ Q.conj().T, via_charfn=True, grid=SMALL)
    assert v.status == HOLDS


def test_word_traces_count():
    # all words over two letters of length 1..3
    assert len(word_traces(S(2), 3)) == 2 + 4 + 8


# order properties


@settings(max_examples=15)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_reflexive_and_transitive(n, extra, seed):
    rng = np.random.default_rng(seed)
    A = random_contraction_matrix(rng, n, 0.8)
    # B contains A as a summand in a rotated basis, C contains B the same way
    V = haar(rng, n + extra)
    B = V @ spla.block_diag(A, random_contraction_matrix(rng, extra, 0.8)) @ V.conj().T
    W = haar(rng, n + 2 * extra)
    C = W @ spla.block_diag(B, random_contraction_matrix(rng, extra, 0.8)) @ W.conj().T
    assert max(witness_residuals(A, A, np.eye(n)).values()) <= TOL
    vab = find_isometric_intertwiner(A, B)
    vbc = find_isometric_intertwiner(B, C)
    assert vab.status == HOLDS and vbc.status == HOLDS
    assert_witness(vab, A, B)
    composed = vbc.witness @ vab.witness
    assert max(witness_residuals(A, C, composed).values()) <= 1e-8


@settings(max_examples=15)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_every_refutation_rechecks(n, seed):
    rng = np.random.default_rng(seed)
    A = random_contraction_matrix(rng, n, float(rng.uniform(0.3, 1.0)))
    B = random_contraction_matrix(rng, int(rng.integers(1, 5)), float(rng.uniform(0.3, 1.0)))
    for key, v in decide_relations(A, B, Budget(starts=4)).items():
        if v.status == REFUTED and v.certificate is not None:
            X, Y = (B, A) if key.startswith("B") else (A, B)
            assert recheck_certificate(v.certificate, X, Y), key


def test_decide_relations_keys():
    out = decide_relations(jordan_block(2), jordan_block(3))
    assert set(out) == {"A<=B", "B<=A", "A<B", "B<A", "A~~B", "A~B"}
    assert out["A<=B"].status == HOLDS and out["B<=A"].status == REFUTED
    assert out["A~~B"].status == REFUTED


# Cantor-Bernstein


def test_cantor_bernstein_unitary_witnesses(rng):
    A = random_contraction_matrix(rng, 3)
    Q = haar(rng, 3)
    B = Q @ A @ Q.conj().T
    res = cantor_bernstein(A, B, Q, Q.conj().T)
    assert max(res.residuals.values()) <= TOL
    assert res.iterations <= 4
    # both witnesses unitary: Psi({0}) = {0}, so the complement rule applies everywhere
    assert res.fixed_point.dim == 0
    assert np.allclose(res.unitary, Q)


def test_cantor_bernstein_swap():
    A = np.diag([0.5, 0.5])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = cantor_bernstein(A, A, swap, swap)
    W = res.unitary
    assert opnorm(W.conj().T @ W - np.eye(2)) <= TOL and opnorm(W @ A - A @ W) <= TOL


@pytest.mark.parametrize("seed", range(10))
def test_cantor_bernstein_sim_pairs(seed):
    f = sim_pair(seed, (seed % 4, 1 + seed % 3))
    res = cantor_bernstein(f.A, f.B, f.omega, f.omega_prime)
    W, A, B = res.unitary, f.A.matrix, f.B.matrix
    assert opnorm(W.conj().T @ W - np.eye(A.shape[0])) <= TOL
    assert opnorm(W @ W.conj().T - np.eye(B.shape[0])) <= TOL
    assert opnorm(W @ A - B @ W) <= TOL
    assert res.iterations <= A.shape[0] + 1
    assert res.dims == sorted(res.dims)


def test_cantor_bernstein_rejects_bad_witness():
    with pytest.raises(PreconditionViolated):
        cantor_bernstein(S(2), S(2), np.eye(2), 0.5 * np.eye(2))


# unitary-part lemmas


def test_invariant_unitary_is_reducing(rng):
    U = haar(rng, 2)
    B = spla.block_diag(U, random_contraction_matrix(rng, 2, 0.7))
    assert invariant_unitary_implies_reducing_check(B, coordinate_subspace(4, [0, 1]))
    V = haar(rng, 4)
    assert invariant_unitary_implies_reducing_check(V @ B @ V.conj().T, Subspace(V[:, :2]))


def test_invariant_unitary_errors():
    with pytest.raises(RestrictionNotUnitary):
        invariant_unitary_implies_reducing_check(S(2), coordinate_subspace(2, [1]))
    with pytest.raises(NotInvariant):
        invariant_unitary_implies_reducing_check(S(2), coordinate_subspace(2, [0]))


def test_unit_cnu_corollary_summandwise():
    Z = cyclic_shift(3)
    A = spla.block_diag(Z, S(2))
    B = spla.block_diag(Z, S(3))
    W = np.zeros((6, 5))
    W[:3, :3] = np.eye(3)
    W[4, 3] = W[5, 4] = 1
    rep = verify_unit_cnu_corollary(A, B, W)
    assert rep.passed and rep.data["dim_Hu_A"] == 3


def test_unit_cnu_corollary_vacuous():
    W = np.zeros((3, 2))
    W[1, 0] = W[2, 1] = 1
    rep = verify_unit_cnu_corollary(S(2), S(3), W)
    assert rep.passed and rep.check("vacuous").passed


def test_unit_cnu_corollary_unitary_a():
    Z = cyclic_shift(3)
    B = spla.block_diag(Z, S(2))
    rep = verify_unit_cnu_corollary(Z, B, np.eye(5, 3))
    assert rep.passed and rep.check("unitary_A_image_reduces_B").passed


# finite-defect theorem


def test_general_n_finite_conjugated_jordans(rng):
    A = spla.block_diag(S(3), S(2))
    Q = haar(rng, 5)
    rep = verify_theorem_general_n_finite(A, Q @ A @ Q.conj().T, SMALL)
    assert rep.applicable and rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.data["equivalence"] == HOLDS


def test_general_n_finite_one_direction_only():
    rep = verify_theorem_general_n_finite(S(2), S(3), SMALL, Budget(starts=4))
    assert not rep.applicable
    assert any("backward" in n for n in rep.notes)


def test_general_n_finite_jordan_sum():
    j = jordan_sum_pair(3)
    rep = verify_theorem_general_n_finite(j.A, j.B, SMALL, Budget(starts=4), forward=j.omega)
    assert not rep.applicable
    assert rep.check("forward_witness_verified").passed
    assert "infinite_only" in j.caveats


def test_common_kernel_refutes_jordan_sum_reducing():
    # the S_1 summand of A would need a vector in ker B and ker B*, and there is none
    j = jordan_sum_pair(3)
    v = find_isometric_intertwiner(j.A, j.B, reducing=True)
    assert v.status == REFUTED
    assert v.certificate.detail["common_kernel_dim"] >= 1
    assert recheck_certificate(v.certificate, j.A_int, j.B_int)
    # the same certificate does not recheck for a pair that has a reducing witness
    Z = cyclic_shift(3)
    assert not recheck_certificate(v.certificate, Z, spla.block_diag(Z, S(2)))
