# Compiled split-finding kernels: the hot inner loop of tree training.
#
# The arithmetic mirrors _split_py expression-for-expression so both
# engines pick identical splits; keep the two files in sync.

import numpy as np

cimport numpy as cnp

cnp.import_array()


def best_split_grad_hess(
    double[::1] values,
    double[::1] grad,
    double[::1] hess,
    double reg_lambda,
    double min_child_weight,
):
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return float("-inf"), -1
    cdef double total_g = 0.0
    cdef double total_h = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total_g += grad[i]
        total_h += hess[i]
    cdef double parent = total_g * total_g / (total_h + reg_lambda)
    cdef double gl = 0.0
    cdef double hl = 0.0
    cdef double gr, hr, gain
    cdef double best_gain = float("-inf")
    cdef Py_ssize_t best_pos = -1
    for i in range(n - 1):
        gl += grad[i]
        hl += hess[i]
        if values[i] == values[i + 1]:
            continue
        if hl < min_child_weight:
            continue
        hr = total_h - hl
        if hr < min_child_weight:
            continue
        gr = total_g - gl
        gain = 0.5 * (
            gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent
        )
        if gain > best_gain:
            best_gain = gain
            best_pos = i
    return best_gain, best_pos


def best_split_gini(
    double[::1] values,
    double[::1] weights,
    double[::1] pos_weights,
):
    cdef Py_ssize_t n = values.shape[0]
    if n < 2:
        return float("-inf"), -1
    cdef double total_w = 0.0
    cdef double total_p = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        total_w += weights[i]
        total_p += pos_weights[i]
    cdef double frac_p = total_p / total_w
    cdef double frac_n = (total_w - total_p) / total_w
    cdef double parent = total_w * (1.0 - frac_p * frac_p - frac_n * frac_n)
    cdef double wl = 0.0
    cdef double pl = 0.0
    cdef double wr, pr, fl_p, fl_n, fr_p, fr_n, children, decrease
    cdef double best_dec = float("-inf")
    cdef Py_ssize_t best_pos = -1
    for i in range(n - 1):
        wl += weights[i]
        pl += pos_weights[i]
        if values[i] == values[i + 1]:
            continue
        wr = total_w - wl
        pr = total_p - pl
        fl_p = pl / wl
        fl_n = (wl - pl) / wl
        fr_p = pr / wr
        fr_n = (wr - pr) / wr
        children = wl * (1.0 - fl_p * fl_p - fl_n * fl_n) + wr * (
            1.0 - fr_p * fr_p - fr_n * fr_n
        )
        decrease = parent - children
        if decrease > best_dec:
            best_dec = decrease
            best_pos = i
    return best_dec, best_pos
