# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops for the row-action iteration.

The batched SGD sweep is the only hot path in the package: a table cell at
desk scale executes ~1e8 row updates. Everything else stays in numpy.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def sgd_sweep(double[:, ::1] A, double[::1] y, double[:, ::1] X,
              cnp.int64_t[:, ::1] indices, double c0, double alpha,
              long k_start):
    """Advance every run in the batch by one block of iterations.

    ``X`` is the (runs x m) state matrix, updated in place. ``indices`` is
    (runs x iters) of row indices; the global iteration counter for stepsize
    purposes starts at ``k_start`` (1-based).
    """
    cdef Py_ssize_t runs = X.shape[0]
    cdef Py_ssize_t m = X.shape[1]
    cdef Py_ssize_t iters = indices.shape[1]
    cdef Py_ssize_t r, t, j
    cdef long row
    cdef double eta, dot, coef
    cdef double k

    if indices.shape[0] != runs:
        raise ValueError("indices and X disagree on the number of runs")

    for r in range(runs):
        for t in range(iters):
            row = indices[r, t]
            if alpha == 0.0:
                eta = c0
            else:
                k = <double>(k_start + t)
                eta = c0 * k ** (-alpha)
            dot = 0.0
            for j in range(m):
                dot += A[row, j] * X[r, j]
            coef = eta * (dot - y[row])
            for j in range(m):
                X[r, j] -= coef * A[row, j]
    return None
