import numpy as np
import pytest
from hypothesis import given, strategies as st

from contraction_order.errors import NotApplicable, ShapeMismatch, YNotContraction
from contraction_order.singular_values import (
    contraction_corollary_check,
    equal_sv_range_lemma,
    horn_holds,
    horn_products,
    leading_sigmas,
    log_leading_product,
)

from conftest import haar, random_complex, random_contraction_matrix


def direct_products(X, Y, k):
    """Oracle: plain numpy singular values, missing ones count as zero."""
    def lead(M):
        s = np.linalg.svd(M, compute_uv=False)
        return np.prod(np.pad(s, (0, max(0, k - s.size)))[:k])

    return lead(Y @ X), lead(Y) * lead(X)


def test_identity():
    assert horn_products(np.eye(3), np.eye(3), 2) == (1.0, 1.0)


def test_commuting_diagonals_give_equality():
    lhs, rhs = horn_products(np.diag([0.5, 0.2]), np.diag([0.4, 0.1]), 2)
    assert lhs == pytest.approx(0.004, rel=1e-12)
    assert rhs == pytest.approx(0.004, rel=1e-12)


@pytest.mark.parametrize("k", range(1, 6))
def test_random_pair_against_numpy(rng, k):
    X, Y = random_complex(rng, 5, 5), random_complex(rng, 5, 5)
    lhs, rhs = horn_products(X, Y, k)
    olhs, orhs = direct_products(X, Y, k)
    assert lhs == pytest.approx(olhs, rel=1e-10)
    assert rhs == pytest.approx(orhs, rel=1e-10)
    assert lhs <= rhs * (1 + 1e-12)


def test_inner_dimension_gives_exact_zero(rng):
    X, Y = random_complex(rng, 2, 5), random_complex(rng, 5, 2)
    lhs, _ = horn_products(X, Y, 3)
    assert lhs == 0.0
    assert horn_holds(X, Y, 3)


def test_shape_and_k_errors():
    with pytest.raises(ShapeMismatch):
        horn_products(np.eye(2), np.eye(3), 1)
    with pytest.raises(ValueError):
        horn_products(np.eye(2), np.eye(2), 0)


def test_log_space_avoids_underflow():
    X = np.diag([1e-200, 1e-200])
    assert log_leading_product(X, 2) == pytest.approx(2 * np.log(1e-200))
    assert horn_holds(X, X, 2)
    assert leading_sigmas(np.eye(2), 4).tolist() == [1, 1, 0, 0]


@given(
    st.integers(1, 8), st.integers(1, 8), st.integers(1, 8),
    st.integers(0, 2**32 - 1), st.floats(-6, 2),
)
def test_horn_property(m, p, q, seed, logscale):
    rng = np.random.default_rng(seed)
    X = random_complex(rng, p, m) * np.exp(logscale)
    Y = random_complex(rng, q, p)
    for k in range(1, max(m, p, q) + 1):
        assert horn_holds(X, Y, k, 1e-10)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_unitary_invariance(n, seed):
    rng = np.random.default_rng(seed)
    X, Y = random_complex(rng, n, n), random_complex(rng, n, n)
    U, V = haar(rng, n), haar(rng, n)
    for k in range(1, n + 1):
        a = horn_products(X, Y, k)
        b = horn_products(X @ U, V @ Y, k)
        assert b[0] == pytest.approx(a[0], rel=1e-10)
        assert b[1] == pytest.approx(a[1], rel=1e-10)


def test_corollary_examples(rng):
    X = random_complex(rng, 4, 3)
    assert contraction_corollary_check(X, np.eye(4), 2)
    assert contraction_corollary_check(X, np.zeros((4, 4)), 2)
    Y = random_contraction_matrix(rng, 4, 1.0)
    assert all(contraction_corollary_check(X, Y, k) for k in range(1, 4))
    with pytest.raises(YNotContraction):
        contraction_corollary_check(X, 2 * np.eye(4), 1)


def test_range_lemma_unitary(rng):
    X = random_complex(rng, 3, 2)
    rep = equal_sv_range_lemma(X, haar(rng, 3))
    assert rep.holds and rep.range_dim == 2


def test_range_lemma_hand_example():
    rep = equal_sv_range_lemma(np.array([[1.0], [0.0]]), np.diag([1.0, 0.5]))
    assert rep.holds and rep.defect_residual < 1e-15


def test_range_lemma_not_applicable():
    with pytest.raises(NotApplicable):
        equal_sv_range_lemma(np.ones((1, 1)), 0.5 * np.ones((1, 1)))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_range_lemma_on_isometric_directions(n, seed):
    # Y is isometric on a random subspace; X maps into it, so sigma(YX) = sigma(X)
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, n))
    V = haar(rng, n)
    s = np.concatenate([np.ones(r), rng.uniform(0.1, 0.9, n - r)])
    Y = haar(rng, n) @ np.diag(s) @ V.conj().T
    X = V[:, :r] @ random_complex(rng, r, 3)
    rep = equal_sv_range_lemma(X, Y)
    assert rep.holds
