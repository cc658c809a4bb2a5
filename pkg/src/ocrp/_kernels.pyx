# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Semantics are identical to ``ocrp._pykernels``: the same uniforms produce the
same compositions and trajectories, operation for operation.
"""

import numpy as np

from libc.stdlib cimport malloc, free
from libc.string cimport memmove


cdef Py_ssize_t _up(long long *parts, Py_ssize_t length, long long size,
                    double alpha, double theta, double u) noexcept nogil:
    cdef double total = <double>size + theta
    cdef double w = u * total
    cdef Py_ssize_t i, pos = length
    if w < theta:
        pos = 0
    else:
        w -= theta
        for i in range(length):
            w -= <double>parts[i] - alpha
            if w < 0:
                parts[i] += 1
                return length
            w -= alpha
            if w < 0:
                pos = i + 1
                break
    memmove(&parts[pos + 1], &parts[pos], (length - pos) * sizeof(long long))
    parts[pos] = 1
    return length + 1


cdef Py_ssize_t _down(long long *parts, Py_ssize_t length, long long size,
                      double u) noexcept nogil:
    cdef double w = u * <double>size
    cdef Py_ssize_t i, hit = length - 1
    for i in range(length):
        w -= <double>parts[i]
        if w < 0:
            hit = i
            break
    parts[hit] -= 1
    if parts[hit] == 0:
        memmove(&parts[hit], &parts[hit + 1], (length - hit - 1) * sizeof(long long))
        return length - 1
    return length


def grow(parts, double alpha, double theta, const double[:] u):
    cdef Py_ssize_t length = len(parts), steps = u.shape[0], k
    cdef long long size = sum(parts)
    cdef long long *buf = <long long *>malloc((length + steps + 1) * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    try:
        for k in range(length):
            buf[k] = parts[k]
        with nogil:
            for k in range(steps):
                length = _up(buf, length, size, alpha, theta, u[k])
                size += 1
        return [buf[k] for k in range(length)]
    finally:
        free(buf)


def updown_path(parts, double alpha, double theta, const double[:] u_up,
                const double[:] u_down):
    cdef Py_ssize_t length = len(parts), steps = u_up.shape[0], k
    cdef long long size = sum(parts)
    # the number of parts never exceeds the size, which is at most size + 1
    cdef long long *buf = <long long *>malloc((size + 2) * sizeof(long long))
    out = np.empty(steps + 1, dtype=np.int64)
    cdef long long[:] first = out
    if buf == NULL:
        raise MemoryError()
    try:
        for k in range(length):
            buf[k] = parts[k]
        first[0] = buf[0]
        with nogil:
            for k in range(steps):
                length = _up(buf, length, size, alpha, theta, u_up[k])
                length = _down(buf, length, size + 1, u_down[k])
                first[k + 1] = buf[0]
        return [buf[k] for k in range(length)], out
    finally:
        free(buf)


def q_path(long long i0, const double[:] down_thr, const double[:] up_thr,
           const double[:] cumq, const double[:] u):
    cdef Py_ssize_t steps = u.shape[0], k, lo, hi, mid
    cdef Py_ssize_t n = cumq.shape[0]
    cdef long long i = i0
    cdef double v, r
    out = np.empty(steps + 1, dtype=np.int64)
    cdef long long[:] path = out
    path[0] = i
    with nogil:
        for k in range(steps):
            v = u[k]
            if v < down_thr[i]:
                if i == 1:
                    r = v / down_thr[1]
                    lo = 0
                    hi = n
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if r < cumq[mid]:
                            hi = mid
                        else:
                            lo = mid + 1
                    if lo > n - 1:
                        lo = n - 1
                    i = lo + 1
                else:
                    i -= 1
            elif v < up_thr[i]:
                i += 1
            path[k + 1] = i
    return out
