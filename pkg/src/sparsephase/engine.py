"""Exact multiphoton coincidence rates for partially distinguishable photons.

For input ports ``v``, collision-free output ports ``eta`` and Gram matrix
``G`` the rate is

    C = Σ_{τ, σ ∈ S_n} conj(u_τ) u_{τ∘σ} r_σ,    u_τ = Π_i U[eta_{τ(i)}, v_i],

with ``r_σ`` from :func:`sparsephase.photons.overlap_r`. Only assignments
``τ`` with every factor of ``u_τ`` above a small threshold are enumerated,
so sparse interferometers cost far fewer than ``(n!)^2`` terms.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import kernels
from .errors import NumericalConsistencyError, ValidationError
from .photons import GramMatrix, Permutation

SUPPORT_THRESHOLD = 1e-14
IMAG_TOL = 1e-10
DEFAULT_CAP = 8


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Certified m x m unitary; columns are input ports, rows output ports."""

    entries: np.ndarray
    defect: float = 0.0

    def __post_init__(self):
        U = np.array(self.entries, dtype=complex)
        U.setflags(write=False)
        object.__setattr__(self, "entries", U)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, key):
        return self.entries[key]


def unitarity_defect(M) -> tuple[float, tuple[int, int]]:
    """``max |M^H M - I|`` and the (1-based) entry where it occurs."""
    M = np.asarray(M, dtype=complex)
    D = np.abs(M.conj().T @ M - np.eye(M.shape[0]))
    idx = np.unravel_index(np.argmax(D), D.shape)
    return float(D[idx]), (int(idx[0]) + 1, int(idx[1]) + 1)


def validate_unitary(M, tol: float = 1e-10) -> ScatteringMatrix:
    if isinstance(M, ScatteringMatrix):
        M = M.entries
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"scattering matrix must be square, got shape {M.shape}")
    defect, where = unitarity_defect(M)
    if defect > tol:
        raise ValidationError(
            f"matrix is not unitary: |U^H U - I| = {defect:.3g} at entry {where} (tol {tol:g})")
    return ScatteringMatrix(M, defect)


def input_config(ports: Sequence[int], m: int | None = None) -> tuple:
    """Validate an input configuration (ordered: entry i is photon i's port)."""
    v = tuple(int(p) for p in ports)
    if len(set(v)) != len(v):
        raise ValidationError(f"input ports must be distinct, got {v}")
    if m is not None and any(not 1 <= p <= m for p in v):
        raise ValidationError(f"input port out of range 1..{m}: {v}")
    return v


def output_config(ports: Sequence[int], m: int | None = None) -> tuple:
    """Canonical (sorted) collision-free output configuration."""
    eta = tuple(sorted(int(p) for p in ports))
    if len(set(eta)) != len(eta):
        raise ValidationError(f"output configuration has a collision: {tuple(ports)}")
    if m is not None and any(not 1 <= p <= m for p in eta):
        raise ValidationError(f"output port out of range 1..{m}: {tuple(ports)}")
    return eta


def format_config(eta: Sequence[int]) -> str:
    return ",".join(str(p) for p in eta)


def parse_config(text: str) -> tuple:
    return tuple(int(p) for p in text.replace(" ", "").split(",") if p)


@dataclass
class CoincidenceReport:
    """Absolute rates per canonical output configuration plus the collision/discard mass."""

    rates: dict
    discard_mass: float
    im_residuals: dict = field(default_factory=dict)
    stderr: dict | None = None
    total_shots: int | None = None

    def configs(self) -> list:
        return sorted(self.rates)

    def total(self) -> float:
        return math.fsum(self.rates.values()) + self.discard_mass


@dataclass
class CountsReport:
    """Sampled detection counts; ``discard`` collects every non-reported outcome."""

    counts: dict
    discard: int
    shots: int
    seed: int | None = None


def _unpack(U, G, v, eta=None):
    Ua = U.entries if isinstance(U, ScatteringMatrix) else np.asarray(U, dtype=complex)
    if not isinstance(G, GramMatrix):
        raise ValidationError("Gram matrix must be a GramMatrix (validated)")
    m = Ua.shape[0]
    v = input_config(v, m)
    if G.n != len(v):
        raise ValidationError(f"Gram matrix is {G.n}x{G.n} but {len(v)} photons are injected")
    if eta is not None:
        eta = output_config(eta, m)
        if len(eta) != len(v):
            raise ValidationError(f"output configuration {eta} does not have {len(v)} ports")
    return Ua, v, eta


def _finish(z: complex, tol: float) -> tuple[float, float]:
    if abs(z.imag) > tol:
        raise NumericalConsistencyError(f"coincidence sum has imaginary residual {z.imag:.3g}")
    if z.real < -tol:
        raise NumericalConsistencyError(f"coincidence sum is negative ({z.real:.3g})")
    return max(z.real, 0.0), z.imag


def rate_with_residual(U, G: GramMatrix, v, eta, tol: float = IMAG_TOL) -> tuple[float, float]:
    """Coincidence rate and the imaginary residual of the accumulated sum."""
    Ua, v, eta = _unpack(U, G, v, eta)
    M = Ua[np.ix_(np.array(eta) - 1, np.array(v) - 1)]
    return _finish(kernels.rate_one(M, G.entries, SUPPORT_THRESHOLD), tol)


def coincidence_rate(U, G: GramMatrix, v, eta, tol: float = IMAG_TOL) -> float:
    return rate_with_residual(U, G, v, eta, tol)[0]


def interference_weights(U, v, eta) -> dict:
    """Coefficients ``W_σ = Σ_τ conj(u_τ) u_{τ∘σ}`` so that ``C = Σ_σ r_σ W_σ``.

    Only permutations with a nonzero weight are returned.
    """
    Ua = U.entries if isinstance(U, ScatteringMatrix) else np.asarray(U, dtype=complex)
    v = input_config(v, Ua.shape[0])
    eta = output_config(eta, Ua.shape[0])
    M = Ua[np.ix_(np.array(eta) - 1, np.array(v) - 1)]
    n = len(v)
    T = kernels.supported_assignments(np.abs(M) > SUPPORT_THRESHOLD)
    u = np.prod(M[T, np.arange(n)], axis=1) if len(T) else np.zeros(0)
    parts: dict = {}
    for a in range(len(T)):
        inv_a = np.empty(n, dtype=np.intp)
        inv_a[T[a]] = np.arange(n)
        for b in range(len(T)):
            sigma = Permutation(tuple(inv_a[T[b]] + 1))
            parts.setdefault(sigma, []).append(np.conj(u[a]) * u[b])
    return {s: complex(math.fsum(z.real for z in zs), math.fsum(z.imag for z in zs))
            for s, zs in sorted(parts.items(), key=lambda kv: kv[0].images)}


def collision_free_configs(m: int, n: int) -> list:
    return list(itertools.combinations(range(1, m + 1), n))


def _rates_chunk(args):
    Ua, Ga, v0, etas0 = args
    return kernels.rates_many(Ua, Ga, v0, etas0, SUPPORT_THRESHOLD)


def all_rates(U, G: GramMatrix, v, cap: int = DEFAULT_CAP, workers: int = 1,
              tol: float = IMAG_TOL) -> CoincidenceReport:
    """Rates for every collision-free output configuration.

    With ``workers > 1`` the configuration list is split into contiguous
    chunks evaluated in separate processes; per-configuration values do not
    depend on the split and totals are reduced in canonical order.
    """
    Ua, v, _ = _unpack(U, G, v)
    n, m = len(v), Ua.shape[0]
    if n > cap:
        raise ValidationError(f"{n} photons exceeds the enumeration cap of {cap}")
    configs = collision_free_configs(m, n)
    etas0 = np.array(configs, dtype=np.intp).reshape(len(configs), n) - 1
    v0 = np.array(v, dtype=np.intp) - 1
    if workers > 1 and len(configs) > workers:
        bounds = np.linspace(0, len(configs), workers + 1).astype(int)
        jobs = [(Ua, G.entries, v0, etas0[lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_rates_chunk, jobs))
        re = np.concatenate([r[0] for r in results])
        im = np.concatenate([r[1] for r in results])
    else:
        re, im = kernels.rates_many(Ua, G.entries, v0, etas0, SUPPORT_THRESHOLD)
    rates, residuals = {}, {}
    for eta, x, y in zip(configs, re, im):
        rates[eta], residuals[eta] = _finish(complex(x, y), tol)
    discard = 1.0 - math.fsum(rates.values())
    if discard < -tol:
        raise NumericalConsistencyError(f"rates sum to more than one (excess {-discard:.3g})")
    return CoincidenceReport(rates, max(discard, 0.0), residuals)


def indistinguishable_oracle(U, v, eta) -> float:
    """``|perm(U[eta, v])|^2``: rate for identical photons."""
    Ua = U.entries if isinstance(U, ScatteringMatrix) else np.asarray(U, dtype=complex)
    M = Ua[np.ix_(np.array(output_config(eta)) - 1, np.array(input_config(v)) - 1)]
    return abs(kernels.ryser(M)) ** 2


def distinguishable_oracle(U, v, eta) -> float:
    """``perm(|U[eta, v]|^2)``: rate for fully distinguishable photons."""
    Ua = U.entries if isinstance(U, ScatteringMatrix) else np.asarray(U, dtype=complex)
    M = Ua[np.ix_(np.array(output_config(eta)) - 1, np.array(input_config(v)) - 1)]
    return kernels.ryser(np.abs(M) ** 2).real


def sample_counts(report: CoincidenceReport, shots: int, seed: int) -> CountsReport:
    """Multinomial shot-noise draw over the reported rates and the discard bucket."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    configs = report.configs()
    p = np.array([max(report.rates[c], 0.0) for c in configs] + [max(report.discard_mass, 0.0)])
    p /= p.sum()
    rng = np.random.default_rng(seed)
    draw = rng.multinomial(shots, p)
    counts = {c: int(k) for c, k in zip(configs, draw[:-1])}
    return CountsReport(counts, int(draw[-1]), int(shots), seed)
