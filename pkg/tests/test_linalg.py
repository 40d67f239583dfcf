import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ginibre
from reference import cofactor_det, naive_matmul, permutation_sign
from ugi.errors import InputError
from ugi.linalg import Spectrum, as_matrix, determinant, eigenvalues, matmul, vandermonde


def multiset_distance(x, y):
    """Largest distance under the best pairing (brute force over permutations)."""
    x, y = list(x), list(y)
    return min(max(abs(a - b) for a, b in zip(x, p)) for p in itertools.permutations(y))


def test_matmul_identity_and_diagonal(rng):
    x = ginibre(rng, 2)
    np.testing.assert_array_equal(matmul(np.eye(2), x), x)
    np.testing.assert_array_equal(matmul(np.diag([2, 3]), np.diag([5, 7])), np.diag([10, 21]))


def test_matmul_matches_naive_triple_loop(rng):
    a, b = ginibre(rng, 3), ginibre(rng, 3)
    expected = np.array(naive_matmul(a.tolist(), b.tolist()))
    np.testing.assert_allclose(matmul(a, b), expected, rtol=0, atol=1e-15)


def test_matmul_rejects_mismatch():
    with pytest.raises(InputError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_as_matrix_rejects_bad_input():
    with pytest.raises(InputError):
        as_matrix([[1, np.nan]])
    with pytest.raises(InputError):
        as_matrix([1, 2, 3])
    with pytest.raises(InputError):
        as_matrix(np.zeros((0, 2)))


def test_determinant_basic():
    assert determinant(np.eye(4)) == pytest.approx(1)
    assert determinant([[0, 1], [1, 0]]) == pytest.approx(-1)
    with pytest.raises(InputError):
        determinant(np.ones((2, 3)))


def test_determinant_vs_cofactor(rng):
    m = ginibre(rng, 4)
    ref = cofactor_det(m.tolist())
    assert abs(determinant(m) - ref) / abs(ref) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_determinant_multiplicative(n, seed):
    r = np.random.default_rng(seed)
    a, b = ginibre(r, n), ginibre(r, n)
    lhs = determinant(matmul(a, b))
    rhs = determinant(a) * determinant(b)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_eigenvalues_diag_and_nilpotent():
    s = eigenvalues(np.diag([1 + 2j, 3]))
    assert multiset_distance(s.values, [1 + 2j, 3]) < 1e-14
    assert s.source_dim == 2 and s.min_gap == pytest.approx(abs(2 - 2j))
    s = eigenvalues([[0, 1], [0, 0]])
    assert multiset_distance(s.values, [0, 0]) < 1e-14
    assert s.min_gap < 1e-14


def test_eigenvalues_trace_and_determinant(rng):
    m = ginibre(rng, 5)
    s = eigenvalues(m)
    assert abs(sum(s.values) - np.trace(m)) <= 1e-10 * np.abs(m).sum()
    prod = np.prod(s.array)
    assert abs(prod - determinant(m)) <= 1e-10 * abs(determinant(m))


def test_eigenvalues_similarity_invariant(rng):
    m = ginibre(rng, 4)
    q, _ = np.linalg.qr(ginibre(rng, 4))
    s_mat = q @ np.diag([1.0, 1.5, 2.0, 0.8]) @ q.conj().T  # well conditioned
    moved = s_mat @ m @ np.linalg.inv(s_mat)
    assert multiset_distance(eigenvalues(m).values, eigenvalues(moved).values) < 1e-8


def test_eigenvalues_ab_ba(rng):
    a, b = ginibre(rng, 4), ginibre(rng, 4)
    assert multiset_distance(eigenvalues(a @ b).values, eigenvalues(b @ a).values) < 1e-8


def test_spectrum_product_is_determinant_for_jordan_block():
    m = np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=complex)
    s = eigenvalues(m)
    assert abs(np.prod(s.array) - 8) < 1e-10
    assert len(s) == 3


def test_vandermonde_examples():
    assert vandermonde([5 + 1j]) == 1
    assert vandermonde([3, 1]) == 2
    assert vandermonde([0.3, 0.3, 2.0]) == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6, unique=True), st.randoms())
def test_vandermonde_antisymmetric(values, rnd):
    perm = list(range(len(values)))
    rnd.shuffle(perm)
    permuted = [values[p] for p in perm]
    # integers: exact in double precision at this size
    assert vandermonde(permuted) == permutation_sign(perm) * vandermonde(values)


def test_spectrum_from_values():
    s = Spectrum.from_values([1, 1 + 1e-3, 4])
    assert s.source_dim == 3
    assert s.min_gap == pytest.approx(1e-3)
    assert s.radius == 4
