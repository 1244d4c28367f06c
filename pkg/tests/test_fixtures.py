import numpy as np
import pytest

from contraction_order.document import emit
from contraction_order.errors import DimsTooLarge, InvalidInput
from contraction_order.fixtures import (
    FIXTURE_KINDS,
    FixtureSpec,
    approx_pair,
    cyclic_shift,
    jordan_block,
    jordan_sum_pair,
    random_contraction,
    shift_pair,
    sim_pair,
)
from contraction_order.numerics import opnorm
from contraction_order.order import cantor_bernstein, unitarily_equivalent, witness_residuals
from contraction_order.verdict import HOLDS


def test_jordan_cells():
    assert np.array_equal(jordan_block(1).matrix, [[0]])
    S2 = jordan_block(2).matrix
    assert np.array_equal(S2 @ [1, 0], [0, 1]) and np.array_equal(S2 @ [0, 1], [0, 0])
    S3 = jordan_block(3).matrix
    assert np.any(S3 @ S3) and not np.any(S3 @ S3 @ S3)
    with pytest.raises(InvalidInput):
        jordan_block(0)


def test_cyclic_shift_is_unitary_permutation():
    Z = cyclic_shift(4)
    assert Z.dtype.kind == "i"
    assert np.array_equal(Z.T @ Z, np.eye(4, dtype=int))
    assert np.array_equal(Z @ np.eye(4)[:, 3], np.eye(4)[:, 0])


def test_jordan_sum_pair_n2():
    j = jordan_sum_pair(2)
    assert j.A_int.shape == (3, 3) and j.B_int.shape == (5, 5)
    assert j.A_int.dtype.kind == j.B_int.dtype.kind == j.omega.dtype.kind == "i"
    assert np.array_equal(j.omega @ j.A_int, j.B_int @ j.omega)
    assert np.array_equal(j.omega.T @ j.omega, np.eye(3, dtype=int))
    assert np.array_equal(j.tail_embedding @ j.tail_int, j.A_int @ j.tail_embedding)


@pytest.mark.parametrize("N", [2, 4, 6])
def test_jordan_sum_omega_maps_cells(N):
    j = jordan_sum_pair(N)
    # omega e^m_k = e^{m+1}_{k+1}: the first vector of every B-cell is missed
    missed = np.flatnonzero(j.omega.sum(axis=1) == 0)
    starts = np.cumsum([0] + list(range(2, N + 1)))
    assert missed.tolist() == starts.tolist()
    assert "survives" in j.caveats and "infinite_only" in j.caveats


def test_jordan_sum_rejects_small_n():
    with pytest.raises(InvalidInput):
        jordan_sum_pair(1)


def test_shift_pair():
    f = shift_pair(3)
    assert f.A.n == 3 and f.B.n == 6
    assert not f.A.is_cnu and f.A.split.unitary_space.dim == 3
    assert np.linalg.svd(f.B.matrix, compute_uv=False)[-1] == 0
    assert f.B.split.unitary_space.dim == 3
    assert max(witness_residuals(f.A, f.B, f.embedding, reducing=True).values()) == 0
    with pytest.raises(DimsTooLarge):
        shift_pair(13, 1)


def test_sim_pair_witnesses():
    f = sim_pair(7, (2, 1))
    for W, P, Q in ((f.omega, f.A, f.B), (f.omega_prime, f.B, f.A)):
        assert max(witness_residuals(P, Q, W, reducing=True).values()) < 1e-12
    res = cantor_bernstein(f.A, f.B, f.omega, f.omega_prime)
    assert max(res.residuals.values()) < 1e-8
    with pytest.raises(DimsTooLarge):
        sim_pair(0, (20, 3))


def test_approx_pair_equivalent():
    f = approx_pair(3, 4)
    assert f.A.is_cnu and 1 <= f.defect_dim <= 3
    assert max(witness_residuals(f.A, f.B, f.forward).values()) < 1e-12
    assert max(witness_residuals(f.B, f.A, f.backward).values()) < 1e-12
    assert unitarily_equivalent(f.A, f.B).status == HOLDS


def test_random_contraction_norm():
    A = random_contraction(5, 5, 0.9)
    assert abs(opnorm(A.matrix) - 0.9) < 1e-12
    with pytest.raises(DimsTooLarge):
        random_contraction(0, 30)


@pytest.mark.parametrize("kind", FIXTURE_KINDS)
def test_spec_determinism(kind):
    spec = FixtureSpec(kind, {}, 11)
    assert emit(spec.build()) == emit(FixtureSpec.from_dict(spec.to_dict()).build())


def test_seed_changes_random_fixtures():
    a = FixtureSpec("random_contraction", {"n": 3}, 1).build().matrices["A"]
    b = FixtureSpec("random_contraction", {"n": 3}, 2).build().matrices["A"]
    assert not np.array_equal(a, b)


def test_unknown_kind():
    with pytest.raises(InvalidInput):
        FixtureSpec("nope")
