# cython: language_level=3
"""Compiled Taylor coefficient kernels (same contract as ``_jetcore_py``)."""
from libc.math cimport sqrt as c_sqrt, exp as c_exp, log as c_log, pow as c_pow

cdef enum:
    MAXLEN = 64


cdef int _load(object seq, double *buf) except -1:
    cdef Py_ssize_t m = len(seq)
    cdef Py_ssize_t i
    if m > MAXLEN:
        raise ValueError("jet order too large for compiled kernels")
    for i in range(m):
        buf[i] = seq[i]
    return <int>m


cdef tuple _dump(double *buf, int m):
    cdef int i
    return tuple([buf[i] for i in range(m)])


def mul(a, b):
    cdef double x[MAXLEN]
    cdef double y[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    _load(b, y)
    cdef int i, k
    cdef double acc
    for k in range(m):
        acc = 0.0
        for i in range(k + 1):
            acc += x[i] * y[k - i]
        out[k] = acc
    return _dump(out, m)


def div(a, b):
    cdef double x[MAXLEN]
    cdef double y[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    _load(b, y)
    cdef int i, k
    cdef double acc
    for k in range(m):
        acc = x[k]
        for i in range(1, k + 1):
            acc -= y[i] * out[k - i]
        out[k] = acc / y[0]
    return _dump(out, m)


def sqrt(a):
    cdef double x[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    cdef int j, k
    cdef double acc
    out[0] = c_sqrt(x[0])
    for k in range(1, m):
        acc = x[k]
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out[k] = acc / (2.0 * out[0])
    return _dump(out, m)


def exp(a):
    cdef double x[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    cdef int j, k
    cdef double acc
    out[0] = c_exp(x[0])
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k + 1):
            acc += j * x[j] * out[k - j]
        out[k] = acc / k
    return _dump(out, m)


def log(a):
    cdef double x[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    cdef int j, k
    cdef double acc
    out[0] = c_log(x[0])
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k):
            acc += j * out[j] * x[k - j]
        out[k] = (x[k] - acc / k) / x[0]
    return _dump(out, m)


def powr(a, double r):
    cdef double x[MAXLEN]
    cdef double out[MAXLEN]
    cdef int m = _load(a, x)
    cdef int j, k
    cdef double acc
    out[0] = c_pow(x[0], r)
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k + 1):
            acc += ((r + 1.0) * j - k) * x[j] * out[k - j]
        out[k] = acc / (k * x[0])
    return _dump(out, m)
