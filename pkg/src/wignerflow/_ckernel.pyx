# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled quadrature transform: out[i, k] = sum_j f[i, j] * gt[k, j].

The j-sum runs in ascending order so serial and row-parallel execution
produce bitwise identical results.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


cdef void _block(const double* f, const double* gr, const double* gi,
                 double* outr, double* outi,
                 Py_ssize_t np_, Py_ssize_t ny) noexcept nogil:
    cdef Py_ssize_t j, k
    cdef double acc_re, acc_im, fv
    for k in range(np_):
        acc_re = 0.0
        acc_im = 0.0
        for j in range(ny):
            fv = f[j]
            acc_re += fv * gr[k * ny + j]
            acc_im += fv * gi[k * ny + j]
        outr[k] = acc_re
        outi[k] = acc_im


def transform(double[:, ::1] f, double complex[:, ::1] gt, int num_threads=1):
    cdef Py_ssize_t nx = f.shape[0]
    cdef Py_ssize_t ny = f.shape[1]
    cdef Py_ssize_t np_ = gt.shape[0]
    if gt.shape[1] != ny:
        raise ValueError("shape mismatch between f and gt")
    if num_threads < 1:
        num_threads = 1

    g = np.asarray(gt)
    gr_arr = np.ascontiguousarray(g.real)
    gi_arr = np.ascontiguousarray(g.imag)
    out_r = np.empty((nx, np_), dtype=np.float64)
    out_i = np.empty((nx, np_), dtype=np.float64)

    cdef double[:, ::1] gr = gr_arr
    cdef double[:, ::1] gi = gi_arr
    cdef double[:, ::1] mr = out_r
    cdef double[:, ::1] mi = out_i
    cdef Py_ssize_t i
    cdef int nt = num_threads

    if nt == 1:
        for i in range(nx):
            _block(&f[i, 0], &gr[0, 0], &gi[0, 0], &mr[i, 0], &mi[i, 0], np_, ny)
    else:
        for i in prange(nx, nogil=True, num_threads=nt, schedule="static"):
            _block(&f[i, 0], &gr[0, 0], &gi[0, 0], &mr[i, 0], &mi[i, 0], np_, ny)

    return out_r + 1j * out_i
