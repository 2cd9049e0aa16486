"""Photon internal states, their overlap (Gram) matrix, and permutations.

Photon and port labels are 1-based throughout the public API, matching the
way configurations are written down in the lab; array storage is 0-based.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_GRAM_TOL = 1e-10


@dataclass(frozen=True)
class InternalState:
    """Normalized amplitude vector over a photon's internal modes."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size < 1:
            raise ValidationError("internal state needs dimension >= 1")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"internal state not normalized (norm={norm!r})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def normalized(cls, coeffs) -> "InternalState":
        c = np.asarray(coeffs, dtype=complex).ravel()
        return cls(c / np.linalg.norm(c))

    @property
    def dim(self) -> int:
        return self.coeffs.size


@dataclass(frozen=True)
class GramValidation:
    ok: bool
    diagnostic: str = ""

    def __bool__(self):
        return self.ok


def validate_gram(G, tol: float = DEFAULT_GRAM_TOL) -> GramValidation:
    """Check that ``G`` is a physically realizable overlap matrix.

    Returns a truthy :class:`GramValidation` on success; otherwise the
    diagnostic names the first violated invariant.
    """
    G = np.asarray(G.entries if isinstance(G, GramMatrix) else G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        return GramValidation(False, f"not square: shape {G.shape}")
    if G.shape[0] == 0:
        return GramValidation(False, "empty matrix")
    herm = np.max(np.abs(G - G.conj().T))
    if herm > tol:
        return GramValidation(False, f"not Hermitian (max |G - G^H| = {herm:.3g})")
    diag = np.max(np.abs(np.diag(G) - 1.0))
    if diag > tol:
        return GramValidation(False, f"diagonal not unit (max deviation {diag:.3g})")
    big = np.max(np.abs(G))
    if big > 1.0 + tol:
        return GramValidation(False, f"not PSD / |overlap|>1 (max |G| = {big:.6g})")
    lam = np.linalg.eigvalsh((G + G.conj().T) / 2).min()
    if lam < -tol:
        return GramValidation(False, f"not PSD (min eigenvalue {lam:.3g})")
    return GramValidation(True)


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Pairwise overlaps ``G[a, b] = <p_a, p_b>`` of the photons' internal states.

    Construction validates the matrix; :meth:`unchecked` skips that for
    algebraic probes that are not meant to be physical.
    """

    entries: np.ndarray
    checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        G = np.array(self.entries, dtype=complex)
        if self.checked:
            verdict = validate_gram(G)
            if not verdict:
                raise ValidationError(f"invalid Gram matrix: {verdict.diagnostic}")
        G.setflags(write=False)
        object.__setattr__(self, "entries", G)

    @classmethod
    def unchecked(cls, entries) -> "GramMatrix":
        return cls(entries, checked=False)

    @classmethod
    def identity(cls, n: int) -> "GramMatrix":
        """Fully distinguishable photons."""
        return cls(np.eye(n))

    @classmethod
    def ones(cls, n: int) -> "GramMatrix":
        """Fully indistinguishable photons."""
        return cls(np.ones((n, n)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, key):
        return self.entries[key]


def gram_from_states(states: Sequence[InternalState]) -> GramMatrix:
    if len(states) == 0:
        raise ValidationError("need at least one photon state")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise ValidationError(f"internal states have mismatched dimensions {sorted(dims)}")
    P = np.stack([s.coeffs for s in states])
    G = P.conj() @ P.T
    # exact unit diagonal and Hermitian symmetry; both hold up to rounding anyway
    G = (G + G.conj().T) / 2
    np.fill_diagonal(G, 1.0)
    return GramMatrix(G)


def random_gram(n: int, rng: np.random.Generator, dim: int | None = None) -> GramMatrix:
    """Gram matrix of ``n`` random internal states of dimension ``dim`` (default n)."""
    d = n if dim is None else dim
    states = [InternalState.normalized(rng.normal(size=d) + 1j * rng.normal(size=d))
              for _ in range(n)]
    return gram_from_states(states)


def cycle_gram(cycle: Sequence[int], magnitude: float, total_phase: float) -> GramMatrix:
    """Gram matrix whose only nonzero off-diagonal overlaps lie on ``cycle``.

    Consecutive photons ``c_k, c_{k+1}`` get ``G[c_k, c_{k+1}] = a e^{i total_phase/n}``,
    so the phases sum to ``total_phase`` around the cycle. Eigenvalues are
    ``1 + 2a cos(.)`` and the matrix is physical for ``a <= 1/2``.
    """
    n = len(cycle)
    G = np.eye(n, dtype=complex)
    z = magnitude * cmath.exp(1j * total_phase / n)
    for k in range(n):
        a, b = cycle[k] - 1, cycle[(k + 1) % n] - 1
        G[a, b] = z
        G[b, a] = z.conjugate()
    return GramMatrix(G)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``1..n`` stored by its images ``(σ(1), ..., σ(n))``."""

    images: tuple

    def __post_init__(self):
        im = tuple(int(x) for x in self.images)
        if sorted(im) != list(range(1, len(im) + 1)):
            raise ValidationError(f"not a permutation of 1..{len(im)}: {im}")
        object.__setattr__(self, "images", im)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        im = list(range(1, n + 1))
        seen = set()
        for cyc in cycles:
            for k, x in enumerate(cyc):
                if x in seen or not 1 <= x <= n:
                    raise ValidationError(f"bad cycle entry {x} in {list(cycles)}")
                seen.add(x)
                im[x - 1] = cyc[(k + 1) % len(cyc)]
        return cls(tuple(im))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    @property
    def cycles(self) -> list:
        return cycle_decompose(self)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.images, start=1):
            inv[x - 1] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def is_full_cycle(self) -> bool:
        return len(self.cycles) == 1 and self.n > 1

    def as_array(self) -> np.ndarray:
        """0-based image array."""
        return np.asarray(self.images, dtype=np.intp) - 1


def cycle_decompose(perm: Permutation) -> list:
    """Disjoint cycles, each starting at its minimum, sorted; fixed points included."""
    n = perm.n
    seen = [False] * (n + 1)
    out = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm(x)
        out.append(tuple(cyc))
    return out


def _as_array(G) -> np.ndarray:
    return G.entries if isinstance(G, GramMatrix) else np.asarray(G, dtype=complex)


def overlap_r(G, perm: Permutation) -> complex:
    """Permutation overlap ``r_σ = Π_i G[σ(i), i]``."""
    A = _as_array(G)
    if A.shape != (perm.n, perm.n):
        raise ValidationError(f"Gram is {A.shape}, permutation acts on {perm.n} photons")
    idx = np.arange(perm.n)
    return complex(np.prod(A[perm.as_array(), idx]))


def collective_phase_of_cycle(G, cycle: Sequence[int]) -> float:
    """Collective phase around ``cycle``: ``arg(G[c1,c2] G[c2,c3] ... G[ck,c1])``.

    The result lies in ``(-π, π]``. Reversing the cycle negates it.
    """
    A = _as_array(G)
    k = len(cycle)
    if k < 3 or len(set(cycle)) != k:
        raise ValidationError(f"cycle needs >= 3 distinct photons, got {tuple(cycle)}")
    prod = 1.0 + 0j
    for j in range(k):
        z = A[cycle[j] - 1, cycle[(j + 1) % k] - 1]
        if abs(z) == 0.0:
            raise ValidationError(
                f"zero overlap between photons {cycle[j]} and {cycle[(j + 1) % k]}: phase undefined")
        prod *= z
    phase = cmath.phase(prod)
    # cmath.phase returns [-π, π]; fold -π onto π
    return math.pi if phase == -math.pi else phase
