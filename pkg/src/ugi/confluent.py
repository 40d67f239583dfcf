"""Determinant ratios ``det[f_j(lam_i)] / Vandermonde`` including coincident limits.

Two evaluation paths share the same power-series coefficients:

* direct: ``F[i, j] = sum_k c_jk lam_i**k`` followed by division by the
  Vandermonde product;
* confluent: the power ``lam_i**k`` is replaced by the Newton divided
  difference of ``lam**k`` over ``lam_1..lam_i``, which is the complete
  homogeneous symmetric polynomial ``h_{k-i+1}(lam_1, .., lam_i)``.  The
  triangular change of basis carries the whole Vandermonde factor, so
  nothing is divided and the result is exact at coincidence.

The direct path loses roughly ``-log10(rho)`` digits, where ``rho`` is the
Vandermonde product measured in units of ``1 + max |lam|`` (see
:func:`separation`).  The confluent path is taken for the whole spectrum as
soon as any pair of eigenvalues is closer than :func:`clustering_tolerance`
or ``rho`` drops below ``SEPARATION_MIN``; for two eigenvalues both tests
coincide.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import InputError, NumericalError
from .linalg import Spectrum, vandermonde
from .special import SeriesKernel, power_budget, stopping_index

__all__ = [
    "RatioResult",
    "clustering_tolerance",
    "separation",
    "use_confluent",
    "power_table",
    "newton_table",
    "det_ratio",
    "det_ratio_pair",
    "confluent_det_ratio",
]

CLUSTER_RTOL = 1e-6
SEPARATION_MIN = 1e-6


@dataclass(frozen=True)
class RatioResult:
    value: complex
    confluent: bool
    terms: int
    min_gap: float


def _spectrum(s) -> Spectrum:
    return s if isinstance(s, Spectrum) else Spectrum.from_values(s)


def clustering_tolerance(values) -> float:
    """``1e-6 * (1 + max |lam|)``."""
    v = np.asarray(values, dtype=np.complex128)
    return CLUSTER_RTOL * (1.0 + float(np.max(np.abs(v))))


def separation(values) -> float:
    """``prod_{i<j} |lam_i - lam_j| / (1 + max |lam|)**(N(N-1)/2)``."""
    v = np.asarray(values, dtype=np.complex128)
    n = v.size
    scale = 1.0 + float(np.max(np.abs(v)))
    i, j = np.triu_indices(n, 1)
    return float(np.prod(np.abs(v[i] - v[j]) / scale))


def use_confluent(spectrum, tau=None) -> bool:
    """Whether the divided-difference path is needed for `spectrum`.

    An explicit `tau` replaces both default tests by ``min_gap < tau``
    (``tau=0`` forces the direct path, ``tau=inf`` the confluent one).
    """
    s = _spectrum(spectrum)
    if tau is not None:
        return s.min_gap < tau
    return s.min_gap < clustering_tolerance(s.values) or separation(s.values) < SEPARATION_MIN


def power_table(values, count: int) -> np.ndarray:
    """``P[i, k] = values[i]**k`` for ``k < count``."""
    v = np.asarray(values, dtype=np.complex128)
    return v[:, None] ** np.arange(count)[None, :]


def newton_table(values, count: int) -> np.ndarray:
    """``T[a, k] = h_{k-a}(values[0], .., values[a])`` (zero for ``k < a``).

    Row ``a`` holds the divided differences of ``lam**k`` over the first
    ``a + 1`` nodes.
    """
    v = np.asarray(values, dtype=np.complex128)
    n = v.size
    out = np.zeros((n, count), dtype=np.complex128)
    h = v[0] ** np.arange(count)
    out[0] = h
    for a in range(1, n):
        # h_m(S + {x}) = h_m(S) + x h_{m-1}(S + {x})
        h = lfilter([1.0], [1.0, -v[a]], h)
        out[a, a:] = h[: count - a]
    return out


def _coefficient_matrix(kernels: Sequence[SeriesKernel], count: int) -> np.ndarray:
    c = np.zeros((count, len(kernels)), dtype=np.complex128)
    for j, kern in enumerate(kernels):
        col = kern.coefficients(count)
        c[: col.size, j] = col
    return c


def _term_count(kernels, radius):
    if all(k.degree is not None for k in kernels):
        return max(k.degree for k in kernels) + 1, True
    return power_budget(radius), False


def _accumulate(term_mag, partial, polynomial, start, label):
    """Pick the truncation point and return the partial sum there."""
    count = partial.shape[-1]
    if polynomial:
        return partial[..., -1], count
    sum_mag = np.max(np.abs(partial).reshape(-1, count), axis=0)
    stop = stopping_index(term_mag, sum_mag, start)
    if stop is None:
        raise NumericalError(f"{label}: series did not converge within {count} terms")
    return partial[..., stop - 1], stop


def det_ratio(kernels: Sequence[SeriesKernel], spectrum, tau=None) -> RatioResult:
    """``det[f_j(lam_i)] / prod_{i<j} (lam_j - lam_i)`` with diagnostics.

    The denominator orders each factor as (later minus earlier), so the
    column functions ``f_j = lam**(j-1)`` give exactly 1.
    """
    s = _spectrum(spectrum)
    n = len(s)
    if len(kernels) != n:
        raise InputError(f"need {n} column kernels, got {len(kernels)}")
    radius = s.radius
    for kern in kernels:
        kern.check_domain(radius)
    count, polynomial = _term_count(kernels, radius)
    c = _coefficient_matrix(kernels, count)
    confluent = use_confluent(s, tau)
    base = newton_table(s.values, count) if confluent else power_table(s.values, count)
    # contributions[i, j, k] = base[i, k] * c[k, j]
    contributions = base[:, None, :] * c.T[None, :, :]
    term_mag = np.max(np.abs(contributions).reshape(-1, count), axis=0)
    start = min(k.offset for k in kernels)
    f, terms = _accumulate(term_mag, np.cumsum(contributions, axis=2), polynomial, start, "det_ratio")
    value = complex(np.linalg.det(f))
    if not confluent:
        sign = -1 if (n * (n - 1) // 2) % 2 else 1
        value /= sign * vandermonde(s.values)
    return RatioResult(value, confluent, terms, s.min_gap)


def det_ratio_pair(kernel: SeriesKernel, left, right, tau=None) -> RatioResult:
    """``det[f(x_i y_j)] / (Delta(x) Delta(y))`` with ``Delta = prod_{i<j}(v_i - v_j)``.

    `left` and `right` must have equal length.  If either spectrum needs the
    confluent path, the divided-difference table is used on both sides.
    """
    x = _spectrum(left)
    y = _spectrum(right)
    n = len(x)
    if len(y) != n:
        raise InputError(f"spectra differ in length: {n} vs {len(y)}")
    rx, ry = x.radius, y.radius
    kernel.check_domain(rx * ry)
    count = power_budget(max(rx, ry, rx * ry))
    c = kernel.coefficients(count)
    confluent = use_confluent(x, tau) or use_confluent(y, tau)
    table = newton_table if confluent else power_table
    bx = table(x.values, count)
    by = table(y.values, count)
    contributions = (bx * c)[:, None, :] * by[None, :, :]
    term_mag = np.max(np.abs(contributions).reshape(-1, count), axis=0)
    f, terms = _accumulate(term_mag, np.cumsum(contributions, axis=2), False, 0, kernel.label)
    value = complex(np.linalg.det(f))
    if not confluent:
        value /= vandermonde(x.values) * vandermonde(y.values)
    return RatioResult(value, confluent, terms, min(x.min_gap, y.min_gap))


def confluent_det_ratio(kernels: Sequence[SeriesKernel], spectrum) -> complex:
    """Value of :func:`det_ratio`, finite and continuous at coincident eigenvalues."""
    return det_ratio(kernels, spectrum).value
