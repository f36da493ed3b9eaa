# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pykernels.

Built with -ffp-contract=off so the multiply/add sequences below round
exactly like the numpy elementwise operations in the fallback; the parity
tests assert bit equality between the two backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "c"


def simplex_iterate(double[:, ::1] tableau, cnp.int64_t[::1] basis,
                    Py_ssize_t n_cols, double tol, Py_ssize_t max_iter):
    """In-place simplex pivoting; same contract as _pykernels.simplex_iterate."""
    cdef Py_ssize_t m = tableau.shape[0] - 1
    cdef Py_ssize_t rhs = tableau.shape[1] - 1
    cdef Py_ssize_t width = tableau.shape[1]
    cdef Py_ssize_t it, i, j, k, enter, leave
    cdef double a, ratio, best, piv, f
    for it in range(max_iter):
        enter = -1
        for j in range(n_cols):
            if tableau[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return 0
        leave = -1
        best = 0.0
        for i in range(m):
            a = tableau[i, enter]
            if a > tol:
                ratio = tableau[i, rhs] / a
                if leave < 0 or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave = i
                    best = ratio
        if leave < 0:
            return 1
        piv = tableau[leave, enter]
        for k in range(width):
            tableau[leave, k] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            f = tableau[i, enter]
            if f != 0.0:
                for k in range(width):
                    tableau[i, k] -= f * tableau[leave, k]
        basis[leave] = enter
    return 2


def tally_transitions(double[::1] u, cnp.int64_t[::1] fathers, double[::1] lo,
                      double[::1] span, double cut_mid, double cut_up):
    """Count father->child transitions; same contract as the numpy version."""
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((3, 3), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] cv = counts
    cdef Py_ssize_t i
    cdef cnp.int64_t f, child
    cdef double theta
    for i in range(n):
        f = fathers[i]
        theta = lo[f] + u[i] * span[f]
        child = 0
        if theta >= cut_mid:
            child = child + 1
        if theta >= cut_up:
            child = child + 1
        cv[f, child] += 1
    return counts
