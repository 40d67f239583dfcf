"""Partitions labelling polynomial irreps of Gl(N), their exact coefficients and characters.

All coefficient arithmetic is exact (:class:`fractions.Fraction` and Python
integers).  The coefficient ``alpha`` is a determinant of reciprocal
factorials, which is hopeless in floating point and trivial in rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .confluent import newton_table, power_table, use_confluent
from .errors import InputError
from .linalg import Spectrum, vandermonde
from .special import factorial_exact

__all__ = [
    "Partition",
    "enumerate_partitions",
    "alpha",
    "dimension",
    "alpha_over_dim",
    "character",
    "characters",
    "exact_det",
]


@dataclass(frozen=True, order=False)
class Partition:
    """Highest weight ``(n_1 >= n_2 >= ... >= n_N >= 0)``, trailing zeros included."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise InputError("a partition needs at least one slot")
        if any(p < 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise InputError(f"parts must be non-negative and non-increasing: {parts}")

    @property
    def ambient_rank(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> tuple:
        """Shifted parts ``k_i = N + n_i - i`` (1-based ``i``), strictly decreasing."""
        n = self.ambient_rank
        return tuple(n + p - i for i, p in enumerate(self.parts, start=1))

    def shifted(self, nu: int) -> "Partition":
        """Subtract `nu` from every part (``det**nu`` divided out of the character)."""
        return Partition(tuple(p - nu for p in self.parts))

    def __repr__(self):
        return f"Partition{self.parts}"


def _partitions_of(weight: int, slots: int, largest: int) -> Iterator[tuple]:
    if slots == 0:
        if weight == 0:
            yield ()
        return
    for first in range(min(weight, largest), -1, -1):
        if first * slots < weight:
            break
        for rest in _partitions_of(weight - first, slots - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _enumerate(ambient_rank: int, max_weight: int) -> tuple:
    return tuple(
        Partition(p)
        for w in range(max_weight + 1)
        for p in _partitions_of(w, ambient_rank, w)
    )


def enumerate_partitions(ambient_rank: int, max_weight: int) -> list:
    """All partitions with at most `ambient_rank` parts and weight <= `max_weight`.

    Ordered by weight, then lexicographically descending, e.g. for ``N = 2``:
    ``(0,0), (1,0), (2,0), (1,1), ...``.
    """
    if ambient_rank < 1 or max_weight < 0:
        raise InputError("need ambient_rank >= 1 and max_weight >= 0")
    return list(_enumerate(ambient_rank, max_weight))


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a rational matrix by fraction-exact Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def _inv_factorial(m: int) -> Fraction:
    # 1/m! = 0 for negative m
    return Fraction(0) if m < 0 else Fraction(1, factorial_exact(m))


@lru_cache(maxsize=None)
def alpha(r: Partition, nu: int) -> Fraction:
    """Character-expansion coefficient of ``det(X)**nu exp(tr X)``.

    ``alpha_r = det[1 / (n_j - nu + i - j)!]`` with ``1/m! = 0`` for ``m < 0``.
    """
    n = r.ambient_rank
    return exact_det(
        [[_inv_factorial(r.parts[j] - nu + i - j) for j in range(n)] for i in range(n)]
    )


@lru_cache(maxsize=None)
def dimension(r: Partition) -> int:
    """Dimension of the irrep: ``Delta(k_1..k_N) / prod_i (N-i)!``."""
    k = r.k
    n = len(k)
    num = 1
    for i in range(n):
        for j in range(i + 1, n):
            num *= k[i] - k[j]
    den = 1
    for i in range(n):
        den *= factorial_exact(i)
    d, rem = divmod(num, den)
    if rem or d <= 0:
        raise ArithmeticError(f"non-integral dimension {num}/{den} for {r}")
    return d


@lru_cache(maxsize=None)
def alpha_over_dim(r: Partition, nu: int) -> Fraction:
    """``prod_i (N-i)! / (k_i - nu)!``, zero if any ``k_i < nu``."""
    n = r.ambient_rank
    out = Fraction(1)
    for i, ki in enumerate(r.k, start=1):
        if ki - nu < 0:
            return Fraction(0)
        out *= Fraction(factorial_exact(n - i), factorial_exact(ki - nu))
    return out


def characters(partitions: Sequence[Partition], spectrum, tau=None) -> np.ndarray:
    """Weyl characters of several irreps at one spectrum, as an array.

    Uses ``det[x_i**k_j] / Delta(x)`` for well separated eigenvalues and the
    divided-difference table (no division at all) otherwise; the switch is
    :func:`ugi.confluent.use_confluent`.
    """
    s = spectrum if isinstance(spectrum, Spectrum) else Spectrum.from_values(spectrum)
    n = len(s)
    if not partitions:
        return np.zeros(0, dtype=np.complex128)
    if any(p.ambient_rank != n for p in partitions):
        raise InputError(f"partition rank does not match spectrum size {n}")
    # ascending exponents: column j holds k_{N-j}
    ks = np.array([p.k[::-1] for p in partitions])
    count = int(ks.max()) + 1
    if use_confluent(s, tau):
        table = newton_table(s.values, count)
        return np.linalg.det(table[:, ks].transpose(1, 0, 2))
    table = power_table(s.values, count)
    dets = np.linalg.det(table[:, ks].transpose(1, 0, 2))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return dets / (sign * vandermonde(s.values))


def character(r: Partition, spectrum) -> complex:
    """Schur polynomial ``chi_r`` at the eigenvalues in `spectrum`."""
    return complex(characters([r], spectrum)[0])
