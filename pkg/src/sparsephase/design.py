"""The constant-depth 2n-mode sparse interferometer and related constructions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ScatteringMatrix, validate_unitary
from .errors import ValidationError
from .graphs import connectivity_graph, output_sets
from .photons import Permutation

_J = np.array([[1, 1], [1, 1]])
_K = np.array([[1, -1], [1, -1]])
_L = np.array([[-1, 1], [1, -1]])
BEAMSPLITTER = np.array([[1, -1], [1, 1]]) / math.sqrt(2)


def _require_n(n: int):
    if int(n) != n or n < 3:
        raise ValidationError(f"sparse design needs n >= 3 photons, got {n}")


def canonical_cycle(n: int) -> tuple[tuple, Permutation]:
    """The n-cycle traced by the default input configuration, and ``ρ`` with ``σ = (ρ(1),…,ρ(n))``."""
    _require_n(n)
    evens = list(range(2, n + 1, 2))
    odds_down = list(range(n if n % 2 else n - 1, 2, -2))
    sigma = tuple([1] + evens + odds_down)
    return sigma, Permutation(sigma)


def sparse_matrix(n: int) -> np.ndarray:
    """Block assembly with 2x2 blocks J, K, L (scaled by 1/2)::

        [ K  L  0  …       ]
        [ J  0  L  0  …    ]
        [ 0  J  0  L  …    ]
        [        …  J  -Kᵀ ]
    """
    _require_n(n)
    U = np.zeros((2 * n, 2 * n))

    def put(bi, bj, block):
        U[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2] = block

    put(0, 0, _K)
    put(0, 1, _L)
    for i in range(1, n - 1):
        put(i, i - 1, _J)
        put(i, i + 1, _L)
    put(n - 1, n - 2, _J)
    put(n - 1, n - 1, -_K.T)
    return U / 2


def beamsplitter_layers(n: int) -> list:
    """Two layers of n balanced beamsplitters with the wire routing between them."""
    _require_n(n)
    layers = []
    for layer in (1, 2):
        for k in range(1, n + 1):
            layers.append({"layer": layer, "element": k, "ports": [2 * k - 1, 2 * k]})
    return layers


def routing_permutation(n: int) -> np.ndarray:
    """Wire map between layers: 2k <-> 2k+1 for k = 1..n-1, ends fixed."""
    P = np.zeros((2 * n, 2 * n))
    P[0, 0] = P[-1, -1] = 1
    for k in range(1, n):
        P[2 * k - 1, 2 * k] = P[2 * k, 2 * k - 1] = 1
    return P


def layered_unitary(n: int) -> np.ndarray:
    """Product of the optical elements: BS layer, routing, BS layer."""
    B = np.kron(np.eye(n), BEAMSPLITTER)
    return B @ routing_permutation(n) @ B


@dataclass(frozen=True, eq=False)
class SparseDesign:
    n: int
    U: ScatteringMatrix
    v: tuple
    sigma: tuple
    rho: Permutation
    o_sets: dict
    layers: list = field(default_factory=list, repr=False)

    def cycle_pairs(self) -> list:
        """Consecutive photon pairs ``(ρ(i), ρ(i+1))`` around the cycle, wrapping."""
        s = self.sigma
        return [(s[i], s[(i + 1) % self.n]) for i in range(self.n)]

    def o_set(self, a: int, b: int) -> frozenset:
        return self.o_sets[(min(a, b), max(a, b))]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "v": list(self.v),
            "sigma": list(self.sigma),
            "rho": list(self.rho.images),
            "o_sets": {f"{a}-{b}": sorted(s) for (a, b), s in sorted(self.o_sets.items())},
        }


def build_sparse_unitary(n: int) -> SparseDesign:
    _require_n(n)
    U = validate_unitary(sparse_matrix(n), tol=1e-12)
    v = tuple(range(1, 2 * n, 2))
    sigma, rho = canonical_cycle(n)
    o_sets = output_sets(connectivity_graph(U), v)
    return SparseDesign(n, U, v, sigma, rho, o_sets, beamsplitter_layers(n))


def design_from_json(obj: dict) -> SparseDesign:
    """Rebuild a design from its JSON record, checking it matches the construction."""
    d = build_sparse_unitary(int(obj["n"]))
    if list(obj.get("v", d.v)) != list(d.v) or list(obj.get("sigma", d.sigma)) != list(d.sigma):
        raise ValidationError("design record does not match the sparse construction for this n")
    return d


def band_pattern(n: int) -> np.ndarray:
    """Mask with two nonzeros per row and column: ``(i, i)`` and ``(i, i+1 mod n)``."""
    if n < 3:
        raise ValidationError(f"band pattern needs n >= 3, got {n}")
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        mask[i, i] = mask[i, (i + 1) % n] = True
    return mask


def pattern_unitarity_defect(W) -> float:
    """``max |W^H W - I|`` for a fully populated band-pattern matrix; always positive."""
    W = np.asarray(W, dtype=complex)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValidationError(f"need a square matrix, got shape {W.shape}")
    mask = band_pattern(W.shape[0])
    if np.any(W[~mask] != 0):
        raise ValidationError("matrix has nonzeros off the band pattern")
    if np.any(W[mask] == 0):
        raise ValidationError("band pattern entry is zero")
    return float(np.max(np.abs(W.conj().T @ W - np.eye(W.shape[0]))))


def random_band_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    W = np.zeros((n, n), dtype=complex)
    mask = band_pattern(n)
    W[mask] = rng.normal(size=mask.sum()) + 1j * rng.normal(size=mask.sum())
    return W


def resource_comparison(n: int) -> dict:
    """Optical resources of the sparse scheme against an all-connected balanced multiport.

    The rival figures are scaling proxies: ⌈log2 n⌉ layers, ⌈n log2 n⌉
    elements, and ``d >= n - 3`` internal control parameters per photon.
    """
    _require_n(n)
    lg = math.log2(n)
    return {
        "n": n,
        "sparse": {"depth": 2, "beamsplitters": 2 * n, "modes": 2 * n, "internal_params": 0},
        "all_connected": {
            "depth": math.ceil(lg),
            "beamsplitters": math.ceil(n * lg),
            "modes": n,
            "internal_params": max(0, n - 3),
            "depth_scaling": "O(log n)",
            "beamsplitter_scaling": "O(n log n)",
        },
    }
