# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Same semantics as the numpy paths in ``core``; selected at import time
when the extension built.  Amplitudes are dense complex128 arrays in
big-endian wire order (wire 0 is the most significant bit).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_matrix1(cnp.complex128_t[::1] amp, int n, int qubit,
                  cnp.complex128_t[:, ::1] m):
    cdef Py_ssize_t outer = 1 << qubit
    cdef Py_ssize_t inner = 1 << (n - qubit - 1)
    cdef Py_ssize_t a, b, i0, i1
    cdef cnp.complex128_t x0, x1
    out_arr = np.empty(1 << n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    cdef cnp.complex128_t m00 = m[0, 0], m01 = m[0, 1]
    cdef cnp.complex128_t m10 = m[1, 0], m11 = m[1, 1]
    for a in range(outer):
        for b in range(inner):
            i0 = (a * 2) * inner + b
            i1 = i0 + inner
            x0 = amp[i0]
            x1 = amp[i1]
            out[i0] = m00 * x0 + m01 * x1
            out[i1] = m10 * x0 + m11 * x1
    return out_arr


def apply_cnot(cnp.complex128_t[::1] amp, int n, int control, int target):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t cmask = 1 << (n - 1 - control)
    cdef Py_ssize_t tmask = 1 << (n - 1 - target)
    cdef Py_ssize_t i
    out_arr = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    for i in range(dim):
        if i & cmask:
            out[i] = amp[i ^ tmask]
        else:
            out[i] = amp[i]
    return out_arr


def apply_cphase(cnp.complex128_t[::1] amp, int n, int a, int b):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t amask = 1 << (n - 1 - a)
    cdef Py_ssize_t bmask = 1 << (n - 1 - b)
    cdef Py_ssize_t i
    out_arr = np.empty(dim, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    for i in range(dim):
        if (i & amask) and (i & bmask):
            out[i] = -amp[i]
        else:
            out[i] = amp[i]
    return out_arr


def remove_wire(cnp.complex128_t[::1] amp, int n, int qubit,
                cnp.complex128_t k0, cnp.complex128_t k1):
    cdef Py_ssize_t outer = 1 << qubit
    cdef Py_ssize_t inner = 1 << (n - qubit - 1)
    cdef Py_ssize_t a, b
    out_arr = np.empty(outer * inner, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr
    for a in range(outer):
        for b in range(inner):
            out[a * inner + b] = (k0 * amp[(a * 2) * inner + b]
                                  + k1 * amp[(a * 2 + 1) * inner + b])
    return out_arr
