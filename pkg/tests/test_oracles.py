import warnings
from fractions import Fraction

import numpy as np
import pytest

from conftest import disk_matrix, ginibre, rel_err
from reference import exact_trace, naive_matmul
from ugi.errors import InputError
from ugi.integrals import eval_i1, eval_i2
from ugi.oracles import (
    SHARD_SIZE,
    MCEstimate,
    complex_gaussian,
    mc_i1,
    mc_i2,
    mc_i2_rect_det,
    mc_i3,
    mc_integrate,
    sample_haar,
    series_i1,
    series_i2,
    unitarity_defect,
)


def test_complex_gaussian_moments(rng):
    z = complex_gaussian(rng, 200_000)
    assert abs(np.mean(np.abs(z) ** 2) - 1) < 0.02
    assert abs(np.mean(z)) < 0.01
    assert abs(np.mean(z**2)) < 0.01


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_haar_samples_unitary(rng, n):
    u = sample_haar(n, rng, 500)
    assert u.shape == (500, n, n)
    assert unitarity_defect(u) < 1e-12
    assert sample_haar(n, rng).shape == (n, n)


def test_haar_one_dimensional_is_uniform_phase(rng):
    u = sample_haar(1, rng, 100_000)[:, 0, 0]
    assert np.allclose(np.abs(u), 1, atol=1e-14)
    # first Fourier moments of a uniform phase vanish
    for k in (1, 2, 3):
        assert abs(np.mean(u**k)) < 4 / np.sqrt(100_000)


def test_haar_left_invariance(rng):
    # E[U_11 conj(U_11)] is unchanged by a fixed rotation
    n = 3
    w, _ = np.linalg.qr(ginibre(rng, n))
    u = sample_haar(n, rng, 100_000)
    for mats in (u, w @ u):
        x = np.abs(mats[:, 0, 0]) ** 2
        assert abs(x.mean() - 1 / n) < 4 * x.std() / np.sqrt(x.size)


def test_mc_trivial_integrand_is_exact():
    z = np.zeros((3, 3))
    est = mc_i1(z, z, 0, 25_000, 1)
    assert est.mean == 1 and est.stderr_real == 0 and est.stderr_imag == 0
    assert est.agrees(1.0)


def test_mc_determinism_across_workers(rng):
    a, b = ginibre(rng, 3, scale=0.5), ginibre(rng, 3, scale=0.5)
    runs = [mc_i1(a, b, 1, 4 * SHARD_SIZE + 123, 99, workers=w) for w in (1, 2, 4)]
    assert runs[0] == runs[1] == runs[2]
    assert mc_i1(a, b, 1, 4 * SHARD_SIZE + 123, 100) != runs[0]


def test_mc_merged_statistics_match_direct():
    # shard merging reproduces the single-pass mean and standard error
    draws = []

    def integrand(rng, count):
        x = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        draws.append(x)
        return x

    est = mc_integrate(integrand, 3 * SHARD_SIZE + 7, 5)
    x = np.concatenate(draws)
    assert abs(est.mean - x.mean()) < 1e-14
    assert abs(est.stderr_real - x.real.std(ddof=1) / np.sqrt(x.size)) < 1e-14


def test_mc_argument_checks(rng):
    a = ginibre(rng, 2)
    with pytest.raises(InputError):
        mc_i1(a, a, 0, 10, 0)
    with pytest.raises(InputError):
        mc_i1(a, a, 0, 1000, -1)
    with pytest.raises(InputError):
        mc_i2_rect_det(a, a, a, a, 0, 0, 1000, 0)


def test_mc_norm_warning(rng):
    a = 3 * np.eye(2)
    with pytest.warns(RuntimeWarning):
        est = mc_i1(a, a, 0, 1000, 0)
    assert est.norm_warning
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not mc_i1(0.1 * a, a * 0, 0, 1000, 0).norm_warning


def test_zscores():
    est = MCEstimate(1 + 1j, 0.5, 0.0, 100, 0)
    assert est.zscores(0.5 + 1j) == (1.0, 0.0)
    assert est.zscores(1 + 2j)[1] == float("inf")


def test_vanishing_one_group():
    z = np.zeros((2, 2))
    est = mc_i1(z, z, 1, 50_000, 3)
    assert est.agrees(0.0)


@pytest.mark.parametrize("nu,eta", [(1, 2), (0, 1), (1, 0)])
def test_vanishing_rectangular(rng, nu, eta):
    a, c = disk_matrix(rng, (2, 1), 0.7), disk_matrix(rng, (2, 1), 0.7)
    b, d = disk_matrix(rng, (1, 2), 0.7), disk_matrix(rng, (1, 2), 0.7)
    assert mc_i2_rect_det(a, b, c, d, nu, eta, 50_000, 8).agrees(0.0)


def test_mc_i2_vs_closed_form(rng):
    a, b, c, d = (disk_matrix(rng, (2, 2), 0.7) for _ in range(4))
    assert mc_i2(a, b, c, d, 1, 50_000, 4).agrees(eval_i2(a, b, c, d, 1).value)


def test_mc_i3_scalar():
    est = mc_i3([[0.3 + 0.2j]], [[1.5]], 1000, 0)
    assert rel_err(est.mean, np.exp((0.3 + 0.2j) * 1.5)) < 1e-14


def test_series_weight_zero():
    a = np.eye(3)
    assert series_i1(a, a, 0, 0).value == 1
    assert series_i2(a, a, a, a, 0, 0).value == 1


def test_series_needs_weight_n_nu():
    a = np.eye(2)
    est = series_i1(a, a, 2, 3)
    assert est.value == 0 and est.terms == 0
    assert series_i1(a, a, 2, 4).terms == 1


def test_series_first_order_by_hand():
    # with max_weight 1 both expansions are 1 plus the trace term
    a = [[1, 2], [0, -1]]
    b = [[3, 1], [1, 1]]
    c = [[0, 1], [2, 2]]
    d = [[1, 1], [-1, 4]]
    n = 2
    t_ab = exact_trace(naive_matmul(a, b))
    expected = 1 + Fraction(t_ab, 4 * n)
    assert rel_err(series_i1(a, b, 0, 1).value, float(expected)) < 1e-13
    t_ad = exact_trace(naive_matmul(a, d))
    t_bc = exact_trace(naive_matmul(b, c))
    expected = 1 + Fraction(t_ad * t_bc, 4 * n * n)
    assert rel_err(series_i2(a, b, c, d, 0, 1).value, float(expected)) < 1e-13


def test_series_shells_decay(rng):
    a, b = disk_matrix(rng, (3, 3), 1 / np.sqrt(3)), disk_matrix(rng, (3, 3), 1 / np.sqrt(3))
    shells = [series_i1(a, b, 1, w).last_shell_magnitude for w in (6, 10, 14, 18)]
    assert all(x > y for x, y in zip(shells, shells[1:]))
    assert shells[-1] < 1e-12


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_series_converges_to_closed_form(rng, nu):
    a, b, c, d = (disk_matrix(rng, (2, 2), 1 / np.sqrt(2)) for _ in range(4))
    assert rel_err(series_i1(a, b, nu, 24).value, eval_i1(a, b, nu).value) < 1e-10
    assert rel_err(series_i2(a, b, c, d, nu, 24).value, eval_i2(a, b, c, d, nu).value) < 1e-10


def test_series_handles_singular_matrices(rng):
    a = disk_matrix(rng, (3, 3), 0.5)
    a[2] = a[0] + a[1]
    b = disk_matrix(rng, (3, 3), 0.5)
    assert rel_err(series_i1(a, b, 1, 24).value, eval_i1(a, b, 1).value) < 1e-10
