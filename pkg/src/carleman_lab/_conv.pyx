# Compiled core for the piecewise-exponential mode convolutions.
#
# Evaluates, for every slot, u(t_i) = sum_j m(t_i - s_j) wf_j on a uniform
# grid, where m is a sum of pieces c * eta^power * e^{-rate*|eta|} supported
# on eta <= 0 (side 0) or eta > 0 (side 1).  The exponential structure turns
# the quadratic sum into first-order recursions in j, one sweep per piece.

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def convolve_pieces(
    double[:, ::1] wf,
    double h,
    double[:, ::1] coeff,
    double[:, ::1] rate,
    int[:, ::1] side,
    int[:, ::1] power,
    Py_ssize_t lo,
    Py_ssize_t hi,
):
    cdef Py_ssize_t n_slots = wf.shape[0]
    cdef Py_ssize_t n_in = wf.shape[1]
    cdef Py_ssize_t n_pieces = coeff.shape[1]
    cdef Py_ssize_t s, p, i
    cdef double c, q, b, cc, b_prev, a
    out_arr = np.zeros((n_slots, hi - lo), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    for s in range(n_slots):
        for p in range(n_pieces):
            c = coeff[s, p]
            if c == 0.0:
                continue
            q = exp(-rate[s, p] * h)
            if side[s, p] == 0:
                # suffix recursion: B_i = wf_i + q B_{i+1},
                # C_i = q (C_{i+1} - h B_{i+1})   (power-1 factor eta)
                if power[s, p] == 0:
                    b = 0.0
                    for i in range(n_in - 1, -1, -1):
                        b = wf[s, i] + q * b
                        if lo <= i < hi:
                            out[s, i - lo] += c * b
                else:
                    b = 0.0
                    cc = 0.0
                    for i in range(n_in - 1, -1, -1):
                        b_prev = b
                        b = wf[s, i] + q * b
                        cc = q * (cc - h * b_prev)
                        if lo <= i < hi:
                            out[s, i - lo] += c * cc
            else:
                # prefix recursion, strict: A_i = q (A_{i-1} + wf_{i-1})
                a = 0.0
                for i in range(n_in):
                    if i > 0:
                        a = q * (a + wf[s, i - 1])
                    if lo <= i < hi:
                        out[s, i - lo] += c * a
    return out_arr
