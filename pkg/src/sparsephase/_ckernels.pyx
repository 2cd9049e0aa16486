# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the contract)."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"


cdef inline void _neumaier(double x, double *s, double *c) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


cdef Py_ssize_t _walk(const unsigned char[:, :] mask, Py_ssize_t n, Py_ssize_t i,
                      int *used, Py_ssize_t *cur, Py_ssize_t[:, :] out,
                      Py_ssize_t count) noexcept nogil:
    """Depth-first enumeration; writes rows into ``out`` when it has rows, else only counts."""
    cdef Py_ssize_t k, j
    if i == n:
        if out.shape[0] > count:
            for j in range(n):
                out[count, j] = cur[j]
        return count + 1
    for k in range(n):
        if mask[k, i] and not used[k]:
            used[k] = 1
            cur[i] = k
            count = _walk(mask, n, i + 1, used, cur, out, count)
            used[k] = 0
    return count


def supported_assignments(mask):
    cdef const unsigned char[:, :] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t n = m.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    cdef int *used = <int *> malloc(n * sizeof(int))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t[:, :] empty = np.zeros((0, n), dtype=np.intp)
    cdef Py_ssize_t count, j
    try:
        for j in range(n):
            used[j] = 0
        count = _walk(m, n, 0, used, cur, empty, 0)
        out = np.empty((count, n), dtype=np.intp)
        _walk(m, n, 0, used, cur, out, 0)
    finally:
        free(used)
        free(cur)
    return out


cdef double complex _pair_sum(const double complex[:, :] M, const double complex[:, :] G,
                              const Py_ssize_t[:, :] T, double complex[:] u,
                              Py_ssize_t[:, :] Tinv) noexcept nogil:
    cdef Py_ssize_t nt = T.shape[0], n = T.shape[1]
    cdef Py_ssize_t a, b, i, k
    cdef double complex prod, term
    cdef double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0
    for a in range(nt):
        prod = 1.0
        for i in range(n):
            prod = prod * M[T[a, i], i]
            Tinv[a, T[a, i]] = i
        u[a] = prod
    for a in range(nt):
        for b in range(nt):
            term = u[a].conjugate() * u[b]
            for k in range(n):
                term = term * G[Tinv[a, k], Tinv[b, k]]
            _neumaier(term.real, &sr, &cr)
            _neumaier(term.imag, &si, &ci)
    return (sr + cr) + 1j * (si + ci)


def pair_sum(M, G, T):
    cdef const double complex[:, :] Mv = np.ascontiguousarray(M, dtype=complex)
    cdef const double complex[:, :] Gv = np.ascontiguousarray(G, dtype=complex)
    cdef const Py_ssize_t[:, :] Tv = np.ascontiguousarray(T, dtype=np.intp)
    cdef Py_ssize_t nt = Tv.shape[0], n = Tv.shape[1]
    if nt == 0:
        return 0j
    cdef double complex[:] u = np.empty(nt, dtype=complex)
    cdef Py_ssize_t[:, :] Tinv = np.empty((nt, n), dtype=np.intp)
    return complex(_pair_sum(Mv, Gv, Tv, u, Tinv))


def rate_one(M, G, threshold):
    Ma = np.ascontiguousarray(M, dtype=complex)
    T = supported_assignments(np.abs(Ma) > threshold)
    return pair_sum(Ma, G, T)


def rates_many(U, G, v, etas, threshold):
    cdef const double complex[:, :] Uv = np.ascontiguousarray(U, dtype=complex)
    cdef const double complex[:, :] Gv = np.ascontiguousarray(G, dtype=complex)
    cdef const Py_ssize_t[:] vv = np.ascontiguousarray(v, dtype=np.intp)
    cdef const Py_ssize_t[:, :] ev = np.ascontiguousarray(etas, dtype=np.intp)
    cdef Py_ssize_t K = ev.shape[0], n = vv.shape[0]
    cdef Py_ssize_t q, i, j, count
    cdef double thr = threshold
    cdef double complex z
    re_out = np.zeros(K)
    im_out = np.zeros(K)
    cdef double[:] re = re_out
    cdef double[:] im = im_out
    cdef double complex[:, :] M = np.empty((n, n), dtype=complex)
    cdef unsigned char[:, :] mask = np.empty((n, n), dtype=np.uint8)
    cdef Py_ssize_t[:, :] empty = np.zeros((0, n), dtype=np.intp)
    cdef Py_ssize_t cap = 64
    cdef Py_ssize_t[:, :] T = np.empty((cap, n), dtype=np.intp)
    cdef Py_ssize_t[:, :] Tinv = np.empty((cap, n), dtype=np.intp)
    cdef double complex[:] u = np.empty(cap, dtype=complex)
    cdef int *used = <int *> malloc(max(n, 1) * sizeof(int))
    cdef Py_ssize_t *cur = <Py_ssize_t *> malloc(max(n, 1) * sizeof(Py_ssize_t))
    try:
        for q in range(K):
            for j in range(n):
                used[j] = 0
                for i in range(n):
                    M[i, j] = Uv[ev[q, i], vv[j]]
                    mask[i, j] = abs(M[i, j]) > thr
            count = _walk(mask, n, 0, used, cur, empty, 0)
            if count == 0:
                continue
            if count > cap:
                cap = count
                T = np.empty((cap, n), dtype=np.intp)
                Tinv = np.empty((cap, n), dtype=np.intp)
                u = np.empty(cap, dtype=complex)
            _walk(mask, n, 0, used, cur, T[:count], 0)
            z = _pair_sum(M, Gv, T[:count], u[:count], Tinv[:count])
            re[q] = z.real
            im[q] = z.imag
    finally:
        free(used)
        free(cur)
    return re_out, im_out


def ryser(M):
    cdef const double complex[:, :] A = np.ascontiguousarray(M, dtype=complex)
    cdef Py_ssize_t n = A.shape[0]
    if n == 0:
        return 1 + 0j
    cdef double complex[:] rs = np.zeros(n, dtype=complex)
    cdef unsigned long long k, gray, prev = 0, flip, top = 1ULL << n
    cdef Py_ssize_t i, j
    cdef int size = 0
    cdef double complex prod, total = 0
    cdef double sign
    with nogil:
        for k in range(1, top):
            gray = k ^ (k >> 1)
            flip = gray ^ prev
            j = 0
            while (flip >> j) != 1:
                j += 1
            if gray & flip:
                size += 1
                for i in range(n):
                    rs[i] = rs[i] + A[i, j]
            else:
                size -= 1
                for i in range(n):
                    rs[i] = rs[i] - A[i, j]
            prev = gray
            prod = 1.0
            for i in range(n):
                prod = prod * rs[i]
            sign = 1.0 if (n - size) % 2 == 0 else -1.0
            total = total + sign * prod
    return complex(total)
