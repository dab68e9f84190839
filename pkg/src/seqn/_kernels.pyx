# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the solver hot loop: soft-thresholding and CSR row ops.

A pure-numpy implementation with the same signatures lives in _kernels_py;
the active backend is chosen at import time in seqn.kernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport copysign, fabs

cnp.import_array()


def backend_name():
    return "compiled"


def soft_threshold(cnp.float64_t[::1] x, double tau):
    """Componentwise sign(x) * max(|x| - tau, 0); produces exact zeros."""
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef double shrunk
    for i in range(n):
        shrunk = fabs(x[i]) - tau
        out[i] = copysign(max(shrunk, 0.0), x[i]) if shrunk > 0.0 else 0.0
    return out_arr


def csr_margins(cnp.float64_t[::1] data, cnp.int32_t[::1] indices,
                cnp.int32_t[::1] indptr, cnp.int64_t[::1] rows,
                cnp.float64_t[::1] x):
    """Inner products <a_r, x> for the listed CSR rows, in the given order."""
    cdef Py_ssize_t j, k, m = rows.shape[0]
    cdef cnp.int64_t r
    cdef double acc
    out_arr = np.empty(m, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    for j in range(m):
        r = rows[j]
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc += data[k] * x[indices[k]]
        out[j] = acc
    return out_arr


def csr_accumulate_rows(cnp.float64_t[::1] data, cnp.int32_t[::1] indices,
                        cnp.int32_t[::1] indptr, cnp.int64_t[::1] rows,
                        cnp.float64_t[::1] coef, cnp.float64_t[::1] out):
    """out += sum_j coef[j] * a_{rows[j]}, accumulated in row order."""
    cdef Py_ssize_t j, k, m = rows.shape[0]
    cdef cnp.int64_t r
    cdef double c
    for j in range(m):
        r = rows[j]
        c = coef[j]
        if c == 0.0:
            continue
        for k in range(indptr[r], indptr[r + 1]):
            out[indices[k]] += c * data[k]


def csr_row_sq_norms(cnp.float64_t[::1] data, cnp.int32_t[::1] indices,
                     cnp.int32_t[::1] indptr, Py_ssize_t num_rows):
    """Squared euclidean norm of every CSR row."""
    cdef Py_ssize_t r, k
    cdef double acc
    out_arr = np.empty(num_rows, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    for r in range(num_rows):
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc += data[k] * data[k]
        out[r] = acc
    return out_arr
