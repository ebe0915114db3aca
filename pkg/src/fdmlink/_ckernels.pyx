# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-sample modem loops; see _kernels_py.py for the reference."""

from libc.math cimport log10

import numpy as np

cimport numpy as cnp

cnp.import_array()


def slicer_loop(det, double alpha, double hysteresis, double ref0, int out0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d_arr = np.ascontiguousarray(det, dtype=np.float64)
    cdef Py_ssize_t n = d_arr.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] levels = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] refs = np.empty(n, dtype=np.float64)
    cdef double r = ref0
    cdef int out = 1 if out0 else 0
    cdef double h2 = 0.5 * hysteresis
    cdef double d
    cdef Py_ssize_t i
    for i in range(n):
        d = d_arr[i]
        r += alpha * (d - r)
        if d > r + h2:
            out = 1
        elif d < r - h2:
            out = 0
        levels[i] = out
        refs[i] = r
    return levels, refs


def demod_loop(env, double ref_in, double ref_out, double slope, double floor_v,
               double alpha, double hysteresis, double ref0, int out0,
               double spike_amp, double spike_decay_mult, double spike_cap,
               bint feedback):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e_arr = np.ascontiguousarray(env, dtype=np.float64)
    cdef Py_ssize_t n = e_arr.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] levels = np.empty(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] det = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] refs = np.empty(n, dtype=np.float64)
    cdef double k = 20.0 * slope
    cdef double r = ref0
    cdef int out = 1 if out0 else 0
    cdef double s = 0.0
    cdef double h2 = 0.5 * hysteresis
    cdef double x, d, rr
    cdef int o
    cdef Py_ssize_t i
    for i in range(n):
        s *= spike_decay_mult
        x = e_arr[i]
        if x < floor_v:
            x = floor_v
        d = ref_out + k * log10(x / ref_in) + s
        rr = r + alpha * (d - r)
        if d > rr + h2:
            o = 1
        elif d < rr - h2:
            o = 0
        else:
            o = out
        if feedback and o != out:
            d -= s
            s += spike_amp
            if s > spike_cap:
                s = spike_cap
            d += s
            rr = r + alpha * (d - r)
            if d > rr + h2:
                o = 1
            elif d < rr - h2:
                o = 0
            else:
                o = out
        r = rr
        out = o
        levels[i] = out
        det[i] = d
        refs[i] = rr
    return levels, det, refs
