# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the variational scan.

Bit-identical results to the fallback backend: plain comparisons and no
reassociated arithmetic, so maxima and tie resolution agree exactly.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def rightmost_argmax(values, double tie_tol=0.0):
    """Index of the rightmost entry within tie_tol of the maximum."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], i
    cdef double m = v[0]
    for i in range(1, n):
        if v[i] > m:
            m = v[i]
    for i in range(n - 1, -1, -1):
        if v[i] >= m - tie_tol:
            return int(i)
    return 0


def hopf_lax_scan(u0_in, suffix_in, phi_in, long j_min, x_idx_in, double tie_tol):
    """Rightmost maximizer of j -> u0[j] - phi_tab[j - k - j_min] per k.

    Monotone restart (the maximizer is nondecreasing in k) plus a pruning
    break once suffix_max minus the increasing cost falls below the running
    best by more than tie_tol; see the fallback backend for the argument
    that the cut never changes the reported pair.
    """
    cdef double[::1] u0 = np.ascontiguousarray(u0_in, dtype=np.float64)
    cdef double[::1] suffix_max = np.ascontiguousarray(suffix_in, dtype=np.float64)
    cdef double[::1] phi_tab = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef long[::1] x_idx = np.ascontiguousarray(x_idx_in, dtype=np.int64)

    cdef Py_ssize_t n1 = u0.shape[0]
    cdef Py_ssize_t n_phi = phi_tab.shape[0]
    cdef Py_ssize_t n_x = x_idx.shape[0]

    cdef Py_ssize_t i_argmin = 0
    cdef Py_ssize_t i
    for i in range(1, n_phi):
        if phi_tab[i] < phi_tab[i_argmin]:
            i_argmin = i

    arg_np = np.empty(n_x, dtype=np.int64)
    val_np = np.empty(n_x, dtype=np.float64)
    cdef long[::1] arg = arg_np
    cdef double[::1] val = val_np

    cdef Py_ssize_t r, k, lo, hi, j, jstop, bestj, jprev = 0
    cdef double best, v
    for r in range(n_x):
        k = x_idx[r]
        lo = jprev
        if k + j_min > lo:
            lo = k + j_min
        hi = n1 - 1
        if k + j_min + n_phi - 1 < hi:
            hi = k + j_min + n_phi - 1
        if lo > hi:
            raise ValueError("cost table does not cover query index %d" % k)

        best = u0[lo] - phi_tab[lo - k - j_min]
        jstop = hi
        for j in range(lo, hi + 1):
            i = j - k - j_min
            v = u0[j] - phi_tab[i]
            if v > best:
                best = v
            if i >= i_argmin and suffix_max[j] - phi_tab[i] < best - tie_tol:
                jstop = j
                break

        bestj = lo
        for j in range(jstop, lo - 1, -1):
            if u0[j] - phi_tab[j - k - j_min] >= best - tie_tol:
                bestj = j
                break

        arg[r] = bestj
        val[r] = best
        jprev = bestj
    return arg_np, val_np
