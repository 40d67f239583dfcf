"""Independent ground truth for the closed forms.

Monte Carlo
    Plain averages of the integrands over Haar-distributed unitaries.  Samples
    are drawn in fixed-size shards; shard ``s`` of a run with seed ``seed``
    owns the stream ``PCG64(SeedSequence(seed, spawn_key=(0, s)))``, so the
    estimate depends only on ``(seed, samples)`` and never on how many worker
    threads evaluate the shards.  Shard statistics are merged in index order.

Character series
    Partial sums of the character expansion over all partitions of total
    weight ``<= max_weight``, with exact rational coefficients.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .characters import alpha_over_dim, characters, dimension, enumerate_partitions
from .errors import InputError
from .linalg import as_matrix, determinant, eigenvalues

__all__ = [
    "MCEstimate",
    "SeriesEstimate",
    "complex_gaussian",
    "sample_haar",
    "unitarity_defect",
    "mc_integrate",
    "mc_i1",
    "mc_i2",
    "mc_i2_rect_det",
    "mc_i3",
    "series_i1",
    "series_i2",
]

SHARD_SIZE = 10_000
UNITARITY_TOL = 1e-12
NORM_GUARD = 2.0
MIN_SAMPLES = 100


@dataclass(frozen=True)
class MCEstimate:
    mean: complex
    stderr_real: float
    stderr_imag: float
    samples: int
    seed: int
    norm_warning: bool = False

    def zscores(self, reference: complex) -> tuple:
        """Per-component ``|mean - reference| / stderr`` (0 when both vanish)."""
        out = []
        for diff, se in (
            (self.mean.real - complex(reference).real, self.stderr_real),
            (self.mean.imag - complex(reference).imag, self.stderr_imag),
        ):
            if se > 0:
                out.append(abs(diff) / se)
            else:
                out.append(0.0 if diff == 0 else float("inf"))
        return tuple(out)

    def agrees(self, reference: complex, nsigma: float = 4.0) -> bool:
        return max(self.zscores(reference)) < nsigma


@dataclass(frozen=True)
class SeriesEstimate:
    value: complex
    max_weight: int
    last_shell_magnitude: float
    terms: int


# ---------------------------------------------------------------- sampling


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex normals (``E|z|**2 = 1``) by the Box-Muller transform."""
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def unitarity_defect(u: np.ndarray) -> float:
    """``max |U^+ U - 1|`` over a matrix or a stack of matrices."""
    u = np.asarray(u)
    n = u.shape[-1]
    g = np.einsum("...ki,...kj->...ij", u.conj(), u)
    return float(np.max(np.abs(g - np.eye(n))))


def sample_haar(n: int, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Haar-random element(s) of U(n).

    QR factorisation of a complex Ginibre matrix, with the phases of the
    diagonal of ``R`` moved into ``Q`` so that the law is exactly Haar.
    Returns shape ``(n, n)`` or ``(size, n, n)``.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    shape = (n, n) if size is None else (size, n, n)
    z = complex_gaussian(rng, shape)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    defect = unitarity_defect(q)
    if defect > UNITARITY_TOL:
        raise AssertionError(f"sampled matrix not unitary to {UNITARITY_TOL}: defect {defect:.3g}")
    return q


def _shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0, shard))))


def _stats(x: np.ndarray):
    mean = x.mean()
    return x.size, mean, float(np.sum((x - mean) ** 2))


def _merge(acc, new):
    # Chan et al. pairwise update of (count, mean, sum of squared deviations)
    na, ma, sa = acc
    nb, mb, sb = new
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def mc_integrate(
    integrand: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    workers: int = 1,
    norm_warning: bool = False,
) -> MCEstimate:
    """Average ``integrand(rng, count)`` (an array of `count` values) over shards."""
    samples = int(samples)
    if samples < MIN_SAMPLES:
        raise InputError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed}")
    sizes = [SHARD_SIZE] * (samples // SHARD_SIZE)
    if samples % SHARD_SIZE:
        sizes.append(samples % SHARD_SIZE)

    def run(shard):
        vals = np.asarray(integrand(_shard_rng(seed, shard), sizes[shard]), dtype=np.complex128)
        return _stats(vals.real), _stats(vals.imag)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(s) for s in range(len(sizes))]
    re, im = parts[0]
    for r, i in parts[1:]:
        re = _merge(re, r)
        im = _merge(im, i)
    se = [float(np.sqrt(s / (n - 1) / n)) for n, _, s in (re, im)]
    return MCEstimate(complex(re[1], im[1]), se[0], se[1], samples, seed, norm_warning)


def _guard(*mats) -> bool:
    big = max(np.linalg.norm(m, 2) for m in mats)
    if big > NORM_GUARD:
        warnings.warn(
            f"input spectral norm {big:.3g} exceeds {NORM_GUARD}: Monte Carlo variance "
            "grows exponentially and error bars may be unreliable",
            RuntimeWarning,
            stacklevel=3,
        )
        return True
    return False


def _det_power(u, p):
    if p == 0:
        return 1.0
    return np.linalg.det(u) ** p


def mc_i1(a, b, nu: int, samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of ``int dU det(U)**nu exp(tr(A U + B U^+) / 2)``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n, n):
        raise InputError(f"A and B must be square of equal size, got {a.shape}, {b.shape}")
    nu = int(nu)

    def integrand(rng, count):
        u = sample_haar(n, rng, count)
        expo = np.einsum("ij,sji->s", a, u) + np.einsum("ij,sij->s", b, u.conj())
        return _det_power(u, nu) * np.exp(0.5 * expo)

    return mc_integrate(integrand, samples, seed, workers, _guard(a, b))


def _two_group(a, b, c, d, nu, eta, samples, seed, workers, square):
    a, b, c, d = (as_matrix(m, name) for m, name in zip((a, b, c, d), "ABCD"))
    n, m = a.shape
    if square and m != n:
        raise InputError(f"A must be square, got {a.shape}")
    if not square and m >= n:
        raise InputError(f"need M < N, got N={n}, M={m}")
    if c.shape != (n, m) or b.shape != (m, n) or d.shape != (m, n):
        raise InputError(
            f"shape mismatch: A {a.shape}, B {b.shape}, C {c.shape}, D {d.shape}"
        )
    nu, eta = int(nu), int(eta)

    def integrand(rng, count):
        u = sample_haar(n, rng, count)
        v = sample_haar(m, rng, count)
        # tr(U A V B) and tr(C V^+ D U^+)
        uavb = np.einsum("sij,jk,skl,li->s", u, a, v, b, optimize=True)
        cvdu = np.einsum("ij,slj,lk,sik->s", c, v.conj(), d, u.conj(), optimize=True)
        return _det_power(u, nu) * _det_power(v, eta) * np.exp(0.5 * (uavb + cvdu))

    return mc_integrate(integrand, samples, seed, workers, _guard(a, b, c, d))


def mc_i2(a, b, c, d, nu: int, samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of ``int dU dV det(UV)**nu exp(tr(U A V B + C V^+ D U^+) / 2)``."""
    return _two_group(a, b, c, d, nu, nu, samples, seed, workers, square=True)


def mc_i2_rect_det(a, b, c, d, nu: int, eta: int, samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Two-group average over U(N) x U(M), ``M < N``, weighted by ``det(U)**nu det(V)**eta``."""
    return _two_group(a, b, c, d, nu, eta, samples, seed, workers, square=False)


def mc_i3(a, b, samples: int, seed: int, workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of ``int dU exp(tr(A U B U^+))``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n, n):
        raise InputError(f"A and B must be square of equal size, got {a.shape}, {b.shape}")

    def integrand(rng, count):
        u = sample_haar(n, rng, count)
        return np.exp(np.einsum("ij,sjk,kl,sil->s", a, u, b, u.conj(), optimize=True))

    return mc_integrate(integrand, samples, seed, workers, _guard(a, b))


# ------------------------------------------------------------------ series


@lru_cache(maxsize=None)
def _series_table(n: int, nu: int, max_weight: int, squared_dim: bool):
    """Admissible partitions (parts >= nu), their float coefficients and weights."""
    parts, coeffs, weights = [], [], []
    for r in enumerate_partitions(n, max_weight):
        if r.parts[-1] < nu:
            continue
        a0 = alpha_over_dim(r, 0)
        anu = alpha_over_dim(r, nu)
        # series_i1: (alpha0/d) * alpha_nu ; series_i2: (alpha0/d) * (alpha_nu/d)
        coef = a0 * anu if squared_dim else a0 * anu * dimension(r)
        parts.append(r.shifted(nu))
        coeffs.append(float(coef))
        weights.append(r.weight)
    return tuple(parts), np.array(coeffs), np.array(weights, dtype=int)


def _shell(terms, weights, max_weight):
    return float(np.sum(np.abs(terms[weights == max_weight])))


def series_i1(a, b, nu: int, max_weight: int) -> SeriesEstimate:
    """Truncated character expansion of ``int dU det(U)**nu exp(tr(A U + B U^+) / 2)``.

    Sums ``(alpha0_r / d_r) alpha_nu_r chi_r(A'B') / det(A')**nu`` with
    ``A' = A/2``, ``B' = B/2`` over partitions of weight <= `max_weight`.
    Since ``alpha_nu_r`` vanishes unless every part is >= nu, the determinant
    is divided out exactly as ``chi_r(X) = det(X)**nu chi_{r - nu}(X)``.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n, n):
        raise InputError(f"A and B must be square of equal size, got {a.shape}, {b.shape}")
    if nu < 0 or max_weight < 0:
        raise InputError("nu and max_weight must be non-negative")
    parts, coeffs, weights = _series_table(n, int(nu), int(max_weight), False)
    if not parts:
        return SeriesEstimate(0j, max_weight, 0.0, 0)
    lam = eigenvalues((a / 2) @ (b / 2))
    terms = coeffs * characters(parts, lam)
    value = np.sum(terms) * determinant(b / 2) ** int(nu)
    return SeriesEstimate(complex(value), max_weight, _shell(terms, weights, max_weight), len(parts))


def series_i2(a, b, c, d, nu: int, max_weight: int) -> SeriesEstimate:
    """Truncated character expansion of the two-group integral over U(N) x U(N).

    Sums ``alpha_nu_r alpha0_r / d_r**2 chi_r(A'D') chi_r(B'C')`` with all four
    matrices scaled by ``1/sqrt(2)``, divided by ``det(A'B')**nu``.
    """
    mats = [as_matrix(m, name) / np.sqrt(2) for m, name in zip((a, b, c, d), "ABCD")]
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise InputError(f"A, B, C, D must all be {n}x{n}")
    if nu < 0 or max_weight < 0:
        raise InputError("nu and max_weight must be non-negative")
    a, b, c, d = mats
    parts, coeffs, weights = _series_table(n, int(nu), int(max_weight), True)
    if not parts:
        return SeriesEstimate(0j, max_weight, 0.0, 0)
    terms = coeffs * characters(parts, eigenvalues(a @ d)) * characters(parts, eigenvalues(b @ c))
    value = np.sum(terms) * (determinant(c) * determinant(d)) ** int(nu)
    return SeriesEstimate(complex(value), max_weight, _shell(terms, weights, max_weight), len(parts))
