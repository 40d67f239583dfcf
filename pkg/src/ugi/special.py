"""Modified Bessel functions and the entire kernels of the determinant formulas.

Every determinant entry of the closed forms is rewritten as an entire power
series in the *squared* eigenvalue, so no square root (and hence no branch)
is ever taken::

    mu**(j-1) * I_{nu+j-1}(mu) == mu**nu * kernel_G(j, nu, mu**2)
    I_nu(x*y)                  == (x*y)**nu * kernel_H(nu, (x*y)**2)

All coefficients are built from exact integer factorials and converted to
floating point once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np

from .errors import InputError, NumericalError

__all__ = [
    "BESSEL_DOMAIN",
    "MAX_TERMS",
    "SeriesKernel",
    "bessel_i",
    "factorial_exact",
    "kernel_G",
    "kernel_H",
    "g_kernel",
    "h_kernel",
    "exp_kernel",
    "monomial_kernel",
    "stopping_index",
]

#: largest |z| accepted by :func:`bessel_i`; no asymptotic branch exists.
BESSEL_DOMAIN = 50.0
#: hard cap on the number of series terms.
MAX_TERMS = 400
TERM_RTOL = 1e-17
QUIET_TERMS = 3
# powers are kept below ~1e280 so that h-tables and power tables stay finite
_LOG10_POWER_CEILING = 280.0


@lru_cache(maxsize=None)
def factorial_exact(n: int) -> int:
    """Exact ``n!`` as a Python integer."""
    if n < 0:
        raise InputError(f"factorial of negative integer {n}")
    return math.factorial(n)


@lru_cache(maxsize=None)
def _inv_fact_pair(a: int, b: int, pow2: int) -> float:
    """``1 / (a! * b! * 2**pow2)`` rounded once to double precision."""
    return float(Fraction(1, factorial_exact(a) * factorial_exact(b) * 2**pow2))


def stopping_index(term_mag, sum_mag, start: int = 0) -> Optional[int]:
    """Number of terms to keep under the truncation rule.

    Summation stops once ``QUIET_TERMS`` consecutive terms (from index
    `start` on) are each below ``TERM_RTOL`` times the running partial sum.
    Returns ``None`` if the rule never fires.
    """
    quiet = 0
    for k in range(start, len(term_mag)):
        if term_mag[k] <= TERM_RTOL * sum_mag[k]:
            quiet += 1
            if quiet == QUIET_TERMS:
                return k + 1
        else:
            quiet = 0
    return None


def power_budget(radius: float) -> int:
    """Largest number of powers of `radius` that stay comfortably finite."""
    if radius <= 1.0:
        return MAX_TERMS
    return max(8, min(MAX_TERMS, int(_LOG10_POWER_CEILING / math.log10(radius))))


@dataclass(frozen=True)
class SeriesKernel:
    """Power series ``f(lam) = sum_k c_k lam**k`` with exactly computed coefficients.

    `degree` is set for polynomials (finite series); `domain` bounds the
    accepted ``|lam|``.
    """

    label: str
    coefficient: Callable[[int], float] = field(compare=False)
    degree: Optional[int] = None
    domain: float = math.inf
    offset: int = 0

    def coefficients(self, count: int) -> np.ndarray:
        if self.degree is not None:
            count = min(count, self.degree + 1)
        return np.array([self.coefficient(k) for k in range(count)], dtype=np.complex128)

    def check_domain(self, radius: float) -> None:
        if radius > self.domain:
            raise NumericalError(
                f"{self.label}: |argument| = {radius:.6g} exceeds series domain {self.domain:g}"
            )

    def __call__(self, lam: complex) -> complex:
        value, _ = self.evaluate(lam)
        return value

    def evaluate(self, lam: complex) -> tuple[complex, int]:
        """Value at `lam` and the number of terms summed."""
        lam = complex(lam)
        self.check_domain(abs(lam))
        count = power_budget(abs(lam))
        if self.degree is not None:
            count = self.degree + 1
        c = self.coefficients(count)
        terms = c * lam ** np.arange(c.size)
        sums = np.cumsum(terms)
        if self.degree is not None:
            return complex(sums[-1]), c.size
        stop = stopping_index(np.abs(terms), np.abs(sums), self.offset)
        if stop is None:
            raise NumericalError(f"{self.label}: series did not converge within {c.size} terms")
        return complex(sums[stop - 1]), stop


def _g_coefficient(j: int, nu: int, m: int) -> float:
    k = m - (j - 1)
    if k < 0:
        return 0.0
    # 2**-(nu+j-1) * 4**-k / (k! (k+nu+j-1)!)
    return _inv_fact_pair(k, k + nu + j - 1, nu + j - 1 + 2 * k)


def _h_coefficient(nu: int, k: int) -> float:
    return _inv_fact_pair(k, k + nu, nu + 2 * k)


def _exp_coefficient(k: int) -> float:
    return _inv_fact_pair(k, 0, 0)


def _check_order(name, value):
    if int(value) != value or value < 0:
        raise InputError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


@lru_cache(maxsize=None)
def g_kernel(j: int, nu: int) -> SeriesKernel:
    """Column kernel ``G_j`` of the one-matrix integral.

    ``G_j(lam) = 2**-(nu+j-1) lam**(j-1) sum_k (lam/4)**k / (k! (k+nu+j-1)!)``.
    """
    if j < 1:
        raise InputError(f"column index must be >= 1, got {j}")
    nu = _check_order("nu", nu)
    return SeriesKernel(
        label=f"G[j={j},nu={nu}]",
        coefficient=lambda m: _g_coefficient(j, nu, m),
        domain=BESSEL_DOMAIN**2,
        offset=j - 1,
    )


@lru_cache(maxsize=None)
def h_kernel(nu: int) -> SeriesKernel:
    """Kernel ``H_nu(w) = 2**-nu sum_k (w/4)**k / (k! (k+nu)!)``."""
    nu = _check_order("nu", nu)
    return SeriesKernel(
        label=f"H[nu={nu}]",
        coefficient=lambda k: _h_coefficient(nu, k),
        domain=BESSEL_DOMAIN**2,
    )


@lru_cache(maxsize=None)
def exp_kernel() -> SeriesKernel:
    """``exp`` as a power series, the Itzykson-Zuber kernel."""
    return SeriesKernel(label="exp", coefficient=_exp_coefficient, domain=BESSEL_DOMAIN)


@lru_cache(maxsize=None)
def monomial_kernel(power: int) -> SeriesKernel:
    """``lam**power``; the column functions of the Weyl character formula."""
    power = _check_order("power", power)
    return SeriesKernel(
        label=f"x^{power}",
        coefficient=lambda k: 1.0 if k == power else 0.0,
        degree=power,
        offset=power,
    )


def kernel_G(j: int, nu: int, lam: complex) -> complex:
    """Evaluate ``G_j(lam)`` for order `nu`; see :func:`g_kernel`."""
    return g_kernel(j, nu)(lam)


def kernel_H(nu: int, w: complex) -> complex:
    """Evaluate ``H_nu(w)``; see :func:`h_kernel`."""
    return h_kernel(nu)(w)


def _bessel_terms(order, z, count):
    q = (z / 2) ** 2
    k = np.arange(count)
    c = np.array([_inv_fact_pair(i, i + order, 0) for i in range(count)])
    return c * q**k


def bessel_i(order: int, z: complex) -> complex:
    """Modified Bessel function ``I_order(z)`` of complex argument.

    Summed from the power series ``(z/2)**n sum_k (z**2/4)**k / (k! (k+n)!)``.
    When the terms cancel heavily (``z`` far from the positive real axis) the
    same series is re-summed in extended precision, with the working
    precision raised by the number of digits lost.

    Raises
    ------
    NumericalError
        If ``|z| > BESSEL_DOMAIN``.
    """
    order = _check_order("order", order)
    z = complex(z)
    if abs(z) > BESSEL_DOMAIN:
        raise NumericalError(f"bessel_i: |z| = {abs(z):.6g} exceeds series domain {BESSEL_DOMAIN:g}")
    if z == 0:
        return 1.0 + 0j if order == 0 else 0j
    terms = _bessel_terms(order, z, power_budget(abs(z / 2) ** 2))
    sums = np.cumsum(terms)
    stop = stopping_index(np.abs(terms), np.abs(sums))
    if stop is None:
        raise NumericalError("bessel_i: series did not converge")
    total = sums[stop - 1]
    lost = np.max(np.abs(terms[:stop])) / max(abs(total), np.finfo(float).tiny)
    if lost > 8.0:
        return _bessel_i_extended(order, z, lost)
    return complex((z / 2) ** order * total)


def _bessel_i_extended(order, z, lost):
    bits = 53 + 24 + int(math.ceil(math.log2(lost)))
    with mpmath.workprec(bits):
        zz = mpmath.mpc(z.real, z.imag)
        q = (zz / 2) ** 2
        term = mpmath.mpf(1) / factorial_exact(order)
        total = term
        k = 0
        while True:
            k += 1
            term = term * q / (k * (k + order))
            total += term
            if abs(term) <= mpmath.mpf(2) ** (-bits) * abs(total) and k > abs(q):
                break
            if k > 4 * MAX_TERMS:
                raise NumericalError("bessel_i: extended-precision series did not converge")
        return complex((zz / 2) ** order * total)
