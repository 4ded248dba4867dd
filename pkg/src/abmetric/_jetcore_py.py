"""Pure-Python Taylor coefficient kernels.

Every function takes and returns tuples of floats of equal length ``K + 1``
holding normalized Taylor coefficients ``c_k = f^(k)(s0) / k!``.  The
compiled module ``_jetcore`` exposes the same functions with the same
signatures; callers never need to know which one is active.
"""
import math


def mul(a, b):
    m = len(a)
    return tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(m))


def div(a, b):
    m = len(a)
    b0 = b[0]
    out = []
    for k in range(m):
        acc = a[k]
        for i in range(1, k + 1):
            acc -= b[i] * out[k - i]
        out.append(acc / b0)
    return tuple(out)


def sqrt(a):
    m = len(a)
    r0 = math.sqrt(a[0])
    out = [r0]
    for k in range(1, m):
        acc = a[k]
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out.append(acc / (2.0 * r0))
    return tuple(out)


def exp(a):
    m = len(a)
    out = [math.exp(a[0])]
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out.append(acc / k)
    return tuple(out)


def log(a):
    m = len(a)
    a0 = a[0]
    out = [math.log(a0)]
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k):
            acc += j * out[j] * a[k - j]
        out.append((a[k] - acc / k) / a0)
    return tuple(out)


def powr(a, r):
    # Requires a[0] != 0; integer powers with a[0] == 0 go through mul.
    m = len(a)
    a0 = a[0]
    out = [a0 ** r]
    for k in range(1, m):
        acc = 0.0
        for j in range(1, k + 1):
            acc += ((r + 1.0) * j - k) * a[j] * out[k - j]
        out.append(acc / (k * a0))
    return tuple(out)
