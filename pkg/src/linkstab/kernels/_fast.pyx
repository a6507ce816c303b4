# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and results mirror ``_reference``."""
import numpy as np

from libc.math cimport exp, log, log1p


def ncfsk_prr(const double[::1] gamma_db, long frame_bits):
    cdef Py_ssize_t i, n = gamma_db.shape[0]
    cdef double half_lin, beta
    cdef double f = <double>frame_bits
    cdef double db_scale = log(10.0) / 10.0
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(n):
            half_lin = 0.5 * exp(gamma_db[i] * db_scale)
            if half_lin > 746.0:
                # exp(-half_lin) underflows: every bit survives.
                res[i] = 1.0
                continue
            beta = 0.5 * exp(-half_lin)
            res[i] = exp(f * log1p(-beta))
    return out


def count_attempts(const double[::1] prr, const double[:, ::1] uniforms, long fail_value):
    cdef Py_ssize_t i, k
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t m = uniforms.shape[1]
    if prr.shape[0] != n:
        raise ValueError("prr and uniforms disagree on the number of trials")
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] res = out
    with nogil:
        for i in range(n):
            res[i] = fail_value
            for k in range(m):
                if uniforms[i, k] < prr[i]:
                    res[i] = k + 1
                    break
    return out
