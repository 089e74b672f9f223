# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``gss._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, fmod, M_PI

cnp.import_array()


def assemble_evolution(const Py_ssize_t[::1] in_ptr, const Py_ssize_t[::1] in_idx,
                       const Py_ssize_t[::1] out_ptr, const Py_ssize_t[::1] out_idx,
                       const Py_ssize_t[::1] reverse, const double[::1] degree, lam):
    cdef Py_ssize_t n = reverse.shape[0]
    cdef Py_ssize_t nv = degree.shape[0]
    cdef Py_ssize_t i, p, q, d, dp
    cdef double v
    cdef double complex z = lam
    cdef double complex c, off
    out = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] u = out
    for i in range(nv):
        if in_ptr[i] == in_ptr[i + 1]:
            continue
        v = degree[i]
        c = 2.0 / (v * (1.0 - 1j * (1.0 - z / v)))
        off = -1j * c
        for p in range(in_ptr[i], in_ptr[i + 1]):
            d = in_idx[p]
            for q in range(out_ptr[i], out_ptr[i + 1]):
                dp = out_idx[q]
                u[dp, d] = off
            u[reverse[d], d] = off + 1j
    return out


cdef inline double _circ(double a, double b) nogil:
    cdef double d = fmod(fabs(a - b), 2 * M_PI)
    return d if d < 2 * M_PI - d else 2 * M_PI - d


def greedy_assign(double[:, :] overlap, double[:] phase_a, double[:] phase_b,
                  double gap=0.1, double phase_tol=1e-6):
    cdef Py_ssize_t n = overlap.shape[0]
    cdef Py_ssize_t j, k, m, flat, idx, assigned = 0
    cdef double best
    cdef bint ambiguous = False
    perm_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] perm = perm_arr
    cdef cnp.uint8_t[::1] used = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t[::1] order = np.argsort(-np.asarray(overlap), axis=None,
                                            kind="stable").astype(np.intp)
    for idx in range(n * n):
        flat = order[idx]
        j = flat // n
        m = flat % n
        if perm[j] >= 0 or used[m]:
            continue
        perm[j] = m
        used[m] = 1
        assigned += 1
        if assigned == n:
            break
    for j in range(n):
        best = overlap[j, perm[j]]
        for k in range(n):
            if k == j:
                continue
            m = perm[k]
            if (best - overlap[j, m] < gap
                    and _circ(phase_a[j], phase_a[k]) > phase_tol
                    and _circ(phase_b[perm[j]], phase_b[m]) > phase_tol):
                ambiguous = True
                break
        if ambiguous:
            break
    return perm_arr, bool(ambiguous)
