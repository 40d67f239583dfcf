import math

import numpy as np
import pytest

from conftest import rel_err
from ugi.confluent import (
    clustering_tolerance,
    confluent_det_ratio,
    det_ratio,
    det_ratio_pair,
    newton_table,
    separation,
    use_confluent,
)
from ugi.errors import InputError, NumericalError
from ugi.special import exp_kernel, g_kernel, h_kernel, monomial_kernel


def divided_difference(f, nodes):
    """Textbook recursive divided difference at distinct nodes."""
    if len(nodes) == 1:
        return f(nodes[0])
    return (divided_difference(f, nodes[1:]) - divided_difference(f, nodes[:-1])) / (nodes[-1] - nodes[0])


def test_single_node_is_kernel_value():
    for f in (g_kernel(1, 2), h_kernel(0), exp_kernel()):
        lam = 0.4 - 0.3j
        assert rel_err(confluent_det_ratio([f], [lam]), f(lam)) < 1e-15


@pytest.mark.parametrize("tau", [None, 0.0, math.inf])
def test_monomial_columns_give_one(rng, tau):
    for n in (2, 3, 5):
        vals = rng.normal(size=n) + 1j * rng.normal(size=n)
        kernels = [monomial_kernel(j) for j in range(n)]
        assert abs(det_ratio(kernels, vals, tau=tau).value - 1) < 1e-12


def test_newton_table_is_divided_difference(rng):
    vals = list(rng.normal(size=4) + 1j * rng.normal(size=4))
    table = newton_table(vals, 9)
    for a in range(4):
        for k in range(9):
            ref = divided_difference(lambda x: x**k, vals[: a + 1])
            assert abs(table[a, k] - ref) < 1e-11 * max(1, abs(ref))


def test_dual_path_agreement(rng):
    for n in (2, 3, 4):
        for _ in range(3):
            nus = rng.integers(0, 3)
            kernels = [g_kernel(j, nus) for j in range(1, n + 1)]
            vals = rng.normal(size=n) + 1j * rng.normal(size=n)
            vals[1] = vals[0] + 1e-2 * np.exp(2j * np.pi * rng.random())
            direct = det_ratio(kernels, vals, tau=0.0)
            newton = det_ratio(kernels, vals, tau=math.inf)
            assert not direct.confluent and newton.confluent
            assert rel_err(direct.value, newton.value) < 1e-8


def test_pair_dual_path_agreement(rng):
    for kern in (h_kernel(1), exp_kernel()):
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = rng.normal(size=3) + 1j * rng.normal(size=3)
        x[2] = x[0] + 1e-2
        a = det_ratio_pair(kern, x, y, tau=0.0).value
        b = det_ratio_pair(kern, x, y, tau=math.inf).value
        assert rel_err(a, b) < 1e-8


def test_exact_coincidence_is_finite_and_continuous():
    kernels = [g_kernel(j, 1) for j in (1, 2, 3)]
    centre = 0.3 + 0.1j
    at = det_ratio(kernels, [centre, centre, -0.2])
    assert at.confluent and np.isfinite(at.value)
    for gap in (1e-3, 1e-5, 1e-7):
        near = det_ratio(kernels, [centre - gap / 2, centre + gap / 2, -0.2]).value
        assert rel_err(near, at.value) < max(gap**2 * 10, 1e-12)


def test_switch_uses_both_tests():
    assert use_confluent([0.0, 1e-7])
    assert not use_confluent([0.0, 1e-3])
    # well separated pairwise, but the Vandermonde product is tiny
    vals = [0.0, 1e-3, 2e-3j, -1.5e-3]
    assert separation(vals) < 1e-6 and use_confluent(vals)
    assert clustering_tolerance([3.0, -1.0]) == pytest.approx(4e-6)


def test_small_spectrum_against_high_precision():
    import mpmath

    x = np.array([0.001, 0.002j, -0.0015, 0.0007 + 0.001j]) / 5
    y = np.array([1, 2, -1j, 3])
    with mpmath.workdps(50):
        f = mpmath.matrix(4, 4)
        for i in range(4):
            for j in range(4):
                f[i, j] = mpmath.exp(mpmath.mpc(x[i]) * mpmath.mpc(y[j]))
        vx = vy = mpmath.mpf(1)
        for i in range(4):
            for j in range(i + 1, 4):
                vx *= mpmath.mpc(x[i]) - mpmath.mpc(x[j])
                vy *= mpmath.mpc(y[i]) - mpmath.mpc(y[j])
        ref = complex(mpmath.det(f) / (vx * vy))
    assert rel_err(det_ratio_pair(exp_kernel(), x, y).value, ref) < 1e-10


def test_errors():
    with pytest.raises(InputError):
        det_ratio([exp_kernel()], [1.0, 2.0])
    with pytest.raises(InputError):
        det_ratio_pair(exp_kernel(), [1.0], [1.0, 2.0])
    with pytest.raises(NumericalError):
        det_ratio_pair(exp_kernel(), [10.0, 1.0], [10.0, 2.0])
