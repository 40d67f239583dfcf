"""Closed forms for integrals over the unitary group with general complex matrices.

=========== ================================================================
function    integral (``dU`` normalised Haar measure)
=========== ================================================================
eval_i1     ``int_U(N) det(U)**nu exp(tr(A U + B U^+) / 2)``
eval_i2     ``int_U(N) int_U(N) det(UV)**nu exp(tr(U A V B + C V^+ D U^+) / 2)``
eval_i2_rect same with ``U in U(N)``, ``V in U(M)``, ``M < N``, ``nu = 0``
            (conjectured closed form)
eval_i3     ``int_U(N) exp(tr(A U B U^+))``
=========== ================================================================

Each closed form is written in terms of kernels that are entire in the
squared eigenvalues, so it is single valued:

* ``I1 = 2**(N(N-1)/2) prod_{n<N} n! det(B)**nu det[G_j(lam_i)] / V(lam)``,
  ``lam = eig(A B)``;
* ``I2 = 2**(N(N-1)) (prod_{n<N} n!)**2 (det C det D)**nu
  det[H_nu(lam_i kap_j)] / (Delta(lam) Delta(kap))``, ``lam = eig(A D)``,
  ``kap = eig(B C)``;
* ``I3 = prod_{n<N} n! det[exp(x_i y_j)] / (Delta(x) Delta(y))``.

``V(lam) = prod_{i<j}(lam_j - lam_i)`` and ``Delta(x) = prod_{i<j}(x_i - x_j)``.
Coincident eigenvalues are handled by the divided-difference path of
:mod:`ugi.confluent`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .confluent import clustering_tolerance, det_ratio, det_ratio_pair
from .errors import InputError
from .linalg import as_matrix, determinant, eigenvalues, vandermonde
from .special import bessel_i, exp_kernel, factorial_exact, g_kernel, h_kernel

__all__ = [
    "IntegralResult",
    "eval_i1",
    "eval_i1_literal",
    "eval_i2",
    "eval_i2_rect",
    "rect_prefactor",
    "eval_i3",
    "superfactorial",
]


@dataclass(frozen=True)
class IntegralResult:
    """Value of a closed form together with the data it was computed from."""

    value: complex
    spectra_used: tuple
    confluent_path: bool
    min_gap_seen: float
    kernel_truncation: int
    clustering_tolerance: float
    conjecture: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    def __complex__(self):
        return complex(self.value)


def superfactorial(lo: int, hi: int) -> int:
    """``prod_{n=lo}^{hi} n!`` (empty product is 1)."""
    out = 1
    for n in range(lo, hi + 1):
        out *= factorial_exact(n)
    return out


def _square_pair(a, b):
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n, n):
        raise InputError(f"A and B must be square of equal size, got {a.shape} and {b.shape}")
    return a, b, n


def _check_nu(nu):
    if int(nu) != nu or nu < 0:
        raise InputError(f"nu must be a non-negative integer, got {nu!r}")
    return int(nu)


def _int_power(z: complex, p: int) -> complex:
    out = 1 + 0j
    for _ in range(p):
        out *= z
    return out


def _result(value, ratio, spectra, conjecture=False, **extra):
    tau = max(clustering_tolerance(s.values) for s in spectra)
    return IntegralResult(
        value=complex(value),
        spectra_used=tuple(spectra),
        confluent_path=ratio.confluent,
        min_gap_seen=min(s.min_gap for s in spectra),
        kernel_truncation=ratio.terms,
        clustering_tolerance=tau,
        conjecture=conjecture,
        extra=extra,
    )


def eval_i1(a, b, nu: int = 0) -> IntegralResult:
    """``int_U(N) dU det(U)**nu exp(tr(A U + B U^+) / 2)`` in closed form.

    Parameters
    ----------
    a, b : array_like
        Square complex matrices of equal size; need not be invertible.
    nu : int
        Non-negative power of ``det U``.
    """
    a, b, n = _square_pair(a, b)
    nu = _check_nu(nu)
    lam = eigenvalues(a @ b)
    ratio = det_ratio([g_kernel(j, nu) for j in range(1, n + 1)], lam)
    pref = 2 ** (n * (n - 1) // 2) * superfactorial(1, n - 1)
    value = pref * _int_power(determinant(b), nu) * ratio.value
    return _result(value, ratio, [lam])


def eval_i1_literal(a, b, nu: int = 0, signs: Optional[Sequence[int]] = None) -> complex:
    """The one-matrix integral with explicit square roots ``mu_i = s_i sqrt(lam_i)``.

    Evaluates ``2**(N(N-1)/2) prod n! (det B / det A)**(nu/2)
    det[mu_i**(j-1) I_{nu+j-1}(mu_i)] / V(mu**2)`` with the half-integer
    power resolved as ``det(B)**nu / prod_i mu_i**nu``; `signs` picks the
    branch of each ``mu_i``.  Only meant as a cross-check of :func:`eval_i1`
    on distinct, non-zero eigenvalues.
    """
    a, b, n = _square_pair(a, b)
    nu = _check_nu(nu)
    lam = np.linalg.eigvals(a @ b)
    signs = np.ones(n) if signs is None else np.asarray(signs, dtype=float)
    mu = signs * np.sqrt(lam)
    m = np.array([[mu[i] ** j * bessel_i(nu + j, mu[i]) for j in range(n)] for i in range(n)])
    mu_pow = np.prod(mu) ** nu if nu else 1.0
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    pref = 2 ** (n * (n - 1) // 2) * superfactorial(1, n - 1)
    ratio = np.linalg.det(m) / (sign * vandermonde(lam))
    return complex(pref * _int_power(determinant(b), nu) / mu_pow * ratio)


def eval_i2(a, b, c, d, nu: int = 0) -> IntegralResult:
    """``int dU int dV det(UV)**nu exp(tr(U A V B + C V^+ D U^+) / 2)`` over U(N) x U(N)."""
    mats = [as_matrix(m, name) for m, name in zip((a, b, c, d), "ABCD")]
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise InputError(f"A, B, C, D must all be {n}x{n}, got {[m.shape for m in mats]}")
    a, b, c, d = mats
    nu = _check_nu(nu)
    lam = eigenvalues(a @ d)
    kap = eigenvalues(b @ c)
    ratio = det_ratio_pair(h_kernel(nu), lam, kap)
    pref = 2 ** (n * (n - 1)) * superfactorial(1, n - 1) ** 2
    value = pref * _int_power(determinant(c) * determinant(d), nu) * ratio.value
    return _result(value, ratio, [lam, kap])


def rect_prefactor(n: int, m: int) -> int:
    """``2**(M(N-1)) prod_{n=N-M}^{N-1} n! prod_{m=N-M}^{M-1} m!``."""
    return 2 ** (m * (n - 1)) * superfactorial(n - m, n - 1) * superfactorial(n - m, m - 1)


def eval_i2_rect(a, b, c, d) -> IntegralResult:
    """Conjectured closed form of the two-group integral over U(N) x U(M), ``M < N``.

    `a` and `c` are ``N x M``, `b` and `d` are ``M x N``.  The result is
    flagged ``conjecture=True``: the formula is verified numerically, not
    proven.
    """
    a, b, c, d = (as_matrix(m, name) for m, name in zip((a, b, c, d), "ABCD"))
    n, m = a.shape
    if m >= n:
        raise InputError(f"rectangular integral needs M < N, got N={n}, M={m}")
    if c.shape != (n, m) or b.shape != (m, n) or d.shape != (m, n):
        raise InputError(
            f"expected A, C of shape {(n, m)} and B, D of shape {(m, n)}, "
            f"got {a.shape}, {b.shape}, {c.shape}, {d.shape}"
        )
    lam = eigenvalues(d @ a)
    kap = eigenvalues(b @ c)
    ratio = det_ratio_pair(h_kernel(n - m), lam, kap)
    value = rect_prefactor(n, m) * ratio.value
    return _result(value, ratio, [lam, kap], conjecture=True, N=n, M=m)


def eval_i3(a, b) -> IntegralResult:
    """``int_U(N) dU exp(tr(A U B U^+))`` for general complex `a`, `b`.

    No factor 1/2 in the exponent.  Repeated eigenvalues (including ``A = 0``)
    go through the confluent path.
    """
    a, b, n = _square_pair(a, b)
    x = eigenvalues(a)
    y = eigenvalues(b)
    ratio = det_ratio_pair(exp_kernel(), x, y)
    value = superfactorial(1, n - 1) * ratio.value
    return _result(value, ratio, [x, y])
