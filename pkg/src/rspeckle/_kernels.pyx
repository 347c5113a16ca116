# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sub-region kernels (window argmax recentering and shift-and-add
accumulation).  Semantics mirror _kernels_py exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def select_centers(const double[:, ::1] frame, const long long[::1] tops_r,
                   const long long[::1] tops_c, int window):
    cdef Py_ssize_t height = frame.shape[0]
    cdef Py_ssize_t width = frame.shape[1]
    cdef Py_ssize_t count = tops_r.shape[0]
    cdef int half = window // 2
    centers_r_arr = np.empty(count, dtype=np.int64)
    centers_c_arr = np.empty(count, dtype=np.int64)
    valid_arr = np.empty(count, dtype=np.uint8)
    cdef long long[::1] centers_r = centers_r_arr
    cdef long long[::1] centers_c = centers_c_arr
    cdef unsigned char[::1] valid = valid_arr
    cdef Py_ssize_t i, rr, cc, tr, tc, br, bc
    cdef double best, v
    for i in range(count):
        tr = tops_r[i]
        tc = tops_c[i]
        best = frame[tr, tc]
        br = tr
        bc = tc
        for rr in range(tr, tr + window):
            for cc in range(tc, tc + window):
                v = frame[rr, cc]
                if v > best:
                    best = v
                    br = rr
                    bc = cc
        centers_r[i] = br
        centers_c[i] = bc
        valid[i] = (br - half >= 0 and bc - half >= 0 and
                    br + half < height and bc + half < width)
    return centers_r_arr, centers_c_arr, valid_arr


def accumulate_windows(const double[:, ::1] frame, const long long[::1] centers_r,
                       const long long[::1] centers_c, int window,
                       double[:, ::1] accum):
    cdef Py_ssize_t count = centers_r.shape[0]
    cdef int half = window // 2
    cdef Py_ssize_t i, rr, cc, r0, c0
    for i in range(count):
        r0 = centers_r[i] - half
        c0 = centers_c[i] - half
        for rr in range(window):
            for cc in range(window):
                accum[rr, cc] += frame[r0 + rr, c0 + cc]
    return np.asarray(accum)
