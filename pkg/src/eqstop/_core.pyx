# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: hot loops behind the value enclosures.

Mirrors eqstop._kernels_py exactly; the Python wrappers select whichever
implementation imported successfully.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


def first_entry_bounds(Q, stop_masks, f, delta, M, T, tail_weight=None):
    """See eqstop._kernels_py.first_entry_bounds."""
    if T < 1:
        raise ValueError("horizon must be >= 1")
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    masks_arr = np.atleast_2d(np.ascontiguousarray(stop_masks, dtype=np.float64))
    cdef const double[:, ::1] masks = masks_arr
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    cdef Py_ssize_t R = masks.shape[0]
    cdef Py_ssize_t n = q.shape[0]
    cdef double m_cap = M
    cdef Py_ssize_t horizon = T
    if tail_weight is None:
        weight_arr = np.ones((R, n))
    else:
        weight_arr = np.ascontiguousarray(tail_weight, dtype=np.float64)
    cdef const double[:, ::1] weight = weight_arr

    lo_arr = np.zeros((R, n))
    u_arr = np.empty((R, n))
    s_arr = np.empty((R, n))
    tmp_arr = np.empty(n)
    cdef double[:, ::1] lo = lo_arr
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] s = s_arr
    cdef double[::1] tmp = tmp_arr
    cdef double[::1] tmp2 = np.empty(n)
    cdef Py_ssize_t r, x, y, t
    cdef double acc, accs, dt

    with nogil:
        for r in range(R):
            for y in range(n):
                tmp[y] = masks[r, y] * fv[y]
                tmp2[y] = (1.0 - masks[r, y]) * weight[r, y]
            for x in range(n):
                acc = 0.0
                accs = 0.0
                for y in range(n):
                    acc += q[x, y] * tmp[y]
                    accs += q[x, y] * tmp2[y]
                u[r, x] = acc
                s[r, x] = accs
                lo[r, x] = dv[1] * acc
            for t in range(2, horizon + 1):
                dt = dv[t]
                for y in range(n):
                    tmp[y] = (1.0 - masks[r, y]) * u[r, y]
                    tmp2[y] = (1.0 - masks[r, y]) * s[r, y]
                for x in range(n):
                    acc = 0.0
                    accs = 0.0
                    for y in range(n):
                        acc += q[x, y] * tmp[y]
                        accs += q[x, y] * tmp2[y]
                    u[r, x] = acc
                    s[r, x] = accs
                    lo[r, x] += dt * acc
    hi_arr = lo_arr + delta[T + 1] * m_cap * s_arr
    return lo_arr, hi_arr, s_arr


def constrained_sup_bounds(Q, barrier_masks, f, delta, M, T):
    """See eqstop._kernels_py.constrained_sup_bounds."""
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    barr_arr = np.atleast_2d(np.ascontiguousarray(barrier_masks, dtype=np.float64))
    cdef const double[:, ::1] barriers = barr_arr
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    cdef Py_ssize_t R = barriers.shape[0]
    cdef Py_ssize_t n = q.shape[0]
    cdef double m_cap = M
    cdef Py_ssize_t horizon = T

    lo_arr = np.empty((R, n))
    hi_arr = np.empty((R, n))
    cdef double[:, ::1] out_lo = lo_arr
    cdef double[:, ::1] out_hi = hi_arr
    cdef double[::1] v_lo = np.empty(n)
    cdef double[::1] v_hi = np.empty(n)
    cdef double[::1] c_lo = np.empty(n)
    cdef double[::1] c_hi = np.empty(n)
    cdef Py_ssize_t r, x, y, t
    cdef double stop, acc_lo, acc_hi, dt

    with nogil:
        for r in range(R):
            dt = dv[horizon]
            for y in range(n):
                stop = dt * fv[y]
                v_lo[y] = stop
                v_hi[y] = stop if barriers[r, y] != 0.0 else dt * m_cap
            for t in range(horizon - 1, 0, -1):
                dt = dv[t]
                for x in range(n):
                    acc_lo = 0.0
                    acc_hi = 0.0
                    for y in range(n):
                        acc_lo += q[x, y] * v_lo[y]
                        acc_hi += q[x, y] * v_hi[y]
                    c_lo[x] = acc_lo
                    c_hi[x] = acc_hi
                for x in range(n):
                    stop = dt * fv[x]
                    if barriers[r, x] != 0.0:
                        c_lo[x] = stop
                        c_hi[x] = stop
                    else:
                        if stop > c_lo[x]:
                            c_lo[x] = stop
                        if stop > c_hi[x]:
                            c_hi[x] = stop
                v_lo[:] = c_lo
                v_hi[:] = c_hi
            for x in range(n):
                acc_lo = 0.0
                acc_hi = 0.0
                for y in range(n):
                    acc_lo += q[x, y] * v_lo[y]
                    acc_hi += q[x, y] * v_hi[y]
                out_lo[r, x] = acc_lo
                out_hi[r, x] = acc_hi
    return lo_arr, hi_arr


def hitting_mass(Q, stop_mask, x, T):
    """See eqstop._kernels_py.hitting_mass."""
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef const double[::1] mask = np.ascontiguousarray(stop_mask, dtype=np.float64)
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t horizon = T
    cdef Py_ssize_t start = x

    mass_arr = np.zeros((T, n))
    cdef double[:, ::1] mass = mass_arr
    cdef double[::1] alive = np.zeros(n)
    cdef double[::1] arrive = np.empty(n)
    cdef Py_ssize_t t, i, y
    cdef double acc, surv

    alive[start] = 1.0
    with nogil:
        for t in range(horizon):
            for y in range(n):
                acc = 0.0
                for i in range(n):
                    acc += alive[i] * q[i, y]
                arrive[y] = acc
            for y in range(n):
                mass[t, y] = arrive[y] * mask[y]
                alive[y] = arrive[y] * (1.0 - mask[y])
        surv = 0.0
        for y in range(n):
            surv += alive[y]
    return mass_arr, surv
