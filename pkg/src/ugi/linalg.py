"""Dense complex linear algebra consumed by the closed forms.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single gate through which user data enters and enforces the
invariants (two dimensional, finite entries).  Products, determinants and
eigenvalues are delegated to LAPACK through ``numpy.linalg``: ``zgetrf``
(partial pivoting) for determinants and ``zgeev`` (Hessenberg reduction
followed by shifted QR with deflation) for eigenvalues.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError

__all__ = [
    "Spectrum",
    "as_matrix",
    "matmul",
    "determinant",
    "eigenvalues",
    "vandermonde",
    "min_gap",
]


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return `m` as a finite two-dimensional ``complex128`` array.

    Raises
    ------
    InputError
        If `m` is not two dimensional, is empty or holds NaN/Inf entries.
    """
    try:
        arr = np.array(m, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: cannot interpret as a complex matrix ({exc})") from exc
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name}: expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: entries must be finite")
    return arr


def _square(m, name):
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise InputError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def min_gap(values) -> float:
    """Smallest pairwise distance between entries of `values` (``inf`` for one value)."""
    v = np.asarray(values, dtype=np.complex128).ravel()
    if v.size < 2:
        return float("inf")
    d = np.abs(v[:, None] - v[None, :])
    d[np.diag_indices(v.size)] = np.inf
    return float(d.min())


@dataclass(frozen=True)
class Spectrum:
    """Unordered multiset of complex eigenvalues of an ``N x N`` matrix.

    ``min_gap`` is the smallest pairwise distance between eigenvalues and is
    what the evaluators use to decide whether a confluent limit is needed.
    """

    values: tuple
    source_dim: int
    min_gap: float

    @classmethod
    def from_values(cls, values) -> "Spectrum":
        vals = tuple(complex(v) for v in np.asarray(values, dtype=np.complex128).ravel())
        if not vals:
            raise InputError("a spectrum needs at least one value")
        return cls(vals, len(vals), min_gap(vals))

    def __len__(self):
        return self.source_dim

    def __iter__(self):
        return iter(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.complex128)

    @property
    def radius(self) -> float:
        return float(max(abs(v) for v in self.values))


def matmul(a, b) -> np.ndarray:
    """Matrix product ``a @ b`` with shape validation."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise InputError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def determinant(m) -> complex:
    """Determinant by LU factorisation with partial pivoting.

    The computed value is the exact determinant of ``m + E`` with
    ``|E| <= c * N * eps * |L||U|``; for well scaled inputs the relative error
    is a small multiple of ``N * eps``.
    """
    return complex(np.linalg.det(_square(m, "m")))


def eigenvalues(m) -> Spectrum:
    """All eigenvalues of a general complex square matrix, unsorted.

    Defective and non-normal inputs are accepted; eigenvalues of a Jordan
    block of size ``k`` are only determined to about ``eps**(1/k)``.
    """
    m = _square(m, "m")
    try:
        vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalError("eigenvalue iteration produced non-finite values")
    return Spectrum.from_values(vals)


def vandermonde(values) -> complex:
    """Vandermonde product ``prod_{i<j} (x_i - x_j)``.

    >>> vandermonde([3, 1])
    (2+0j)
    """
    vals = [complex(v) for v in values]
    if not vals:
        raise InputError("vandermonde needs at least one value")
    out = 1 + 0j
    for xi, xj in itertools.combinations(vals, 2):
        out *= xi - xj
    return out
