"""Pure-Python (numpy) versions of the hot kernels.

Interface mirrors ``_ckernels``; the engine picks one at import time.
All index arguments are 0-based.
"""
import math

import numpy as np

BACKEND = "python"

# bounds the T x T x n temporary in pair_sum
_PAIR_CHUNK = 1 << 22


def supported_assignments(mask):
    """All photon->row assignments ``t`` with ``mask[t[i], i]`` true for every photon.

    ``mask`` is an n x n boolean array indexed ``[row, photon]``. Rows are
    tried in increasing order, so the result is lexicographically sorted.
    Returns an int array of shape (T, n).
    """
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    options = [np.flatnonzero(mask[:, i]).tolist() for i in range(n)]
    out = []
    current = [0] * n
    used = [False] * n

    def descend(i):
        if i == n:
            out.append(tuple(current))
            return
        for k in options[i]:
            if not used[k]:
                used[k] = True
                current[i] = k
                descend(i + 1)
                used[k] = False

    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    descend(0)
    return np.array(out, dtype=np.intp).reshape(len(out), n)


def pair_sum(M, G, T):
    """``Σ_{a,b} conj(u_a) u_b Π_k G[a⁻¹(k), b⁻¹(k)]`` over assignments ``T``.

    ``u_t = Π_i M[t[i], i]``. Summation is exactly rounded (``math.fsum``),
    hence independent of evaluation order.
    """
    M = np.asarray(M, dtype=complex)
    G = np.asarray(G, dtype=complex)
    T = np.asarray(T, dtype=np.intp)
    nt, n = T.shape
    if nt == 0:
        return 0j
    photons = np.arange(n)
    u = np.prod(M[T, photons], axis=1)
    Tinv = np.empty_like(T)
    Tinv[np.arange(nt)[:, None], T] = photons
    re_parts, im_parts = [], []
    step = max(1, _PAIR_CHUNK // max(1, nt * n))
    for lo in range(0, nt, step):
        hi = min(nt, lo + step)
        R = np.prod(G[Tinv[lo:hi, None, :], Tinv[None, :, :]], axis=2)
        terms = (u[lo:hi].conj()[:, None] * u[None, :] * R).ravel()
        re_parts.append(terms.real)
        im_parts.append(terms.imag)
    return complex(math.fsum(np.concatenate(re_parts)), math.fsum(np.concatenate(im_parts)))


def rate_one(M, G, threshold):
    """Accumulated coincidence sum for one n x n transfer submatrix ``M``."""
    M = np.asarray(M, dtype=complex)
    T = supported_assignments(np.abs(M) > threshold)
    return pair_sum(M, G, T)


def rates_many(U, G, v, etas, threshold):
    """Real and imaginary parts of the coincidence sum for each row of ``etas``."""
    U = np.asarray(U, dtype=complex)
    v = np.asarray(v, dtype=np.intp)
    etas = np.asarray(etas, dtype=np.intp)
    re = np.empty(len(etas))
    im = np.empty(len(etas))
    for k, eta in enumerate(etas):
        z = rate_one(U[np.ix_(eta, v)], G, threshold)
        re[k] = z.real
        im[k] = z.imag
    return re, im


def ryser(M):
    """Permanent by inclusion-exclusion over column subsets (vectorized in chunks)."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if n == 0:
        return 1 + 0j
    total = 0j
    chunk = 1 << min(n, 14)
    weights = 1 << np.arange(n)
    for lo in range(1, 1 << n, chunk):
        s = np.arange(lo, min(1 << n, lo + chunk))
        bits = ((s[:, None] & weights[None, :]) != 0)
        rowsums = bits.astype(complex) @ M.T
        sizes = bits.sum(axis=1)
        signs = np.where((n - sizes) % 2 == 0, 1.0, -1.0)
        total += np.sum(signs * np.prod(rowsums, axis=1))
    return complex(total)
