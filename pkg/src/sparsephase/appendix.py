"""Permanents, Fourier matrices and the n-cycle weight bound ``n!/n^n``.

The statistic ``|perm(conj(U) ∘ U_σ)|`` is the magnitude of the n-cycle
interference weight when one photon enters and leaves each port. Fourier
matrices reach ``n!/n^n``; the sweep checks Haar-random unitaries against it.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .engine import ScatteringMatrix, validate_unitary
from .errors import ValidationError
from .photons import Permutation

MAX_PERMANENT_N = 20
SWEEP_N_RANGE = (3, 7)
VIOLATION_TOL = 1e-12


def _square(M) -> np.ndarray:
    A = M.entries if isinstance(M, ScatteringMatrix) else np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"permanent needs a square matrix, got shape {A.shape}")
    return A


def ryser_permanent(M) -> complex:
    """Gray-code Ryser inclusion-exclusion, ``O(2^n n)``."""
    A = _square(M)
    if A.shape[0] > MAX_PERMANENT_N:
        raise ValidationError(f"permanent limited to n <= {MAX_PERMANENT_N}, got {A.shape[0]}")
    return complex(kernels.ryser(A))


def naive_permanent(M) -> complex:
    """Sum over all ``n!`` permutations; reference for small n."""
    A = _square(M)
    n = A.shape[0]
    rows = np.arange(n)
    return complex(sum(np.prod(A[rows, list(p)]) for p in itertools.permutations(range(n))))


def glynn_permanent(M) -> complex:
    """Glynn's formula over ``±1`` vectors with the first entry fixed."""
    A = _square(M)
    n = A.shape[0]
    if n == 0:
        return 1 + 0j
    total = 0j
    for signs in itertools.product((1, -1), repeat=n - 1):
        d = np.array((1,) + signs)
        total += np.prod(d) * np.prod(d @ A)
    return complex(total / 2 ** (n - 1))


def fourier_matrix(n: int) -> ScatteringMatrix:
    """``F[i, j] = e^{-2πi ij/n} / sqrt(n)`` (0-based indices)."""
    if n < 1:
        raise ValidationError(f"Fourier matrix needs n >= 1, got {n}")
    k = np.arange(n)
    F = np.exp(-2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)
    return validate_unitary(F, tol=1e-12)


def _as_cycle(sigma, n: int) -> Permutation:
    if not isinstance(sigma, Permutation):
        sigma = Permutation.from_cycles(n, [tuple(sigma)])
    if sigma.n != n or not sigma.is_full_cycle():
        raise ValidationError(f"{sigma.images} is not an n-cycle on {n} points")
    return sigma


def conjecture_statistic(U, sigma) -> float:
    """``|perm(conj(U) ∘ U_σ)|`` with ``(U_σ)[i, j] = U[i, σ(j)]``.

    ``sigma`` is a :class:`Permutation` or a cycle such as ``(1, 2, 3)``.
    """
    A = _square(U)
    s = _as_cycle(sigma, A.shape[0])
    return abs(ryser_permanent(A.conj() * A[:, s.as_array()]))


def carlen_bound(V) -> float:
    """``n! · sqrt(Π_i Σ_j |V_ij|^2 / n)``, an upper bound on ``|perm V|``."""
    A = _square(V)
    n = A.shape[0]
    row = np.sum(np.abs(A) ** 2, axis=1) / n
    return math.factorial(n) * math.sqrt(float(np.prod(row)))


def haar_random_unitary(n: int, seed) -> ScatteringMatrix:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    if n < 1:
        raise ValidationError(f"unitary needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    Q = Q * (d / np.abs(d))
    return validate_unitary(Q, tol=1e-12)


def cycle_bound(n: int) -> float:
    return math.factorial(n) / n ** n


def stirling_proxy(n: int) -> float:
    """``sqrt(2πn)/e^n``, the leading Stirling behaviour of ``n!/n^n``."""
    return math.sqrt(2 * math.pi * n) / math.e ** n


def _encode(U: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in U]


@dataclass
class ConjectureSweepResult:
    n: int
    bound: float
    fourier_value: float
    max_random_value: float
    samples: int
    seed: int
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "bound": self.bound,
            "fourier_value": self.fourier_value,
            "max_random_value": self.max_random_value,
            "samples": self.samples,
            "seed": self.seed,
            "violations": self.violations,
        }


def _sample_values(args) -> list:
    n, seeds = args
    sigma = Permutation.from_cycles(n, [tuple(range(1, n + 1))])
    out = []
    for s in seeds:
        U = haar_random_unitary(n, int(s))
        out.append((int(s), conjecture_statistic(U, sigma), U.entries))
    return out


def conjecture_sweep(n: int, samples: int, seed: int, workers: int = 1) -> ConjectureSweepResult:
    """Statistic on ``F^(n)`` and on ``samples`` Haar unitaries with ``σ = (1, 2, …, n)``.

    Sample ``k`` uses the ``k``-th seed drawn from ``default_rng(seed)``, so
    results do not depend on ``workers``.
    """
    lo, hi = SWEEP_N_RANGE
    if not lo <= n <= hi:
        raise ValidationError(f"sweep supports n in {lo}..{hi}, got {n}")
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    bound = cycle_bound(n)
    sigma = Permutation.from_cycles(n, [tuple(range(1, n + 1))])
    fourier = conjecture_statistic(fourier_matrix(n), sigma)
    seeds = np.random.default_rng(seed).integers(0, 2 ** 63 - 1, size=samples)
    if workers > 1 and samples > workers:
        chunks = [(n, part) for part in np.array_split(seeds, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = [v for part in pool.map(_sample_values, chunks) for v in part]
    else:
        values = _sample_values((n, seeds))
    violations = [{"seed": s, "value": val, "excess": val - bound, "matrix": _encode(U)}
                  for s, val, U in values if val > bound + VIOLATION_TOL]
    if fourier > bound + VIOLATION_TOL:
        violations.insert(0, {"seed": None, "value": fourier, "excess": fourier - bound,
                              "matrix": _encode(fourier_matrix(n).entries)})
    return ConjectureSweepResult(n, bound, fourier, max(v for _, v, _ in values),
                                 samples, int(seed), violations)
