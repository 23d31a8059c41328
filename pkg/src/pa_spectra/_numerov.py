"""Compiled Numerov recurrences for phi'' = F(x) phi on a uniform x grid.

Everything is written for the y = (1 - h^2 F / 12) phi form, where the
recurrence is y[i+1] = c[i] y[i] - y[i-1].
"""

import numba
import numpy as np

_BIG = 1e150


@numba.njit(cache=True, nogil=True)
def coefficients(F, h):
    t = h * h * F / 12.0
    return (2.0 + 10.0 * t) / (1.0 - t), 1.0 - t


@numba.njit(cache=True, nogil=True)
def outward(c, y0, y1, stop):
    """y[0..stop] from the two starting values."""
    y = np.empty(stop + 1)
    y[0] = y0
    y[1] = y1
    for i in range(1, stop):
        y[i + 1] = c[i] * y[i] - y[i - 1]
    return y


@numba.njit(cache=True, nogil=True)
def inward(c, start, stop):
    """y[stop..start] with y[start] = 0 and y[start-1] = 1 (decaying tail)."""
    y = np.zeros(start + 1)
    y[start - 1] = 1.0
    for i in range(start - 1, stop, -1):
        y[i - 1] = c[i] * y[i] - y[i + 1]
        if abs(y[i - 1]) > _BIG:
            for j in range(i - 1, start + 1):
                y[j] /= _BIG
    return y


@numba.njit(cache=True, nogil=True)
def count_out(c, y0, y1, stop):
    """Sign changes of the outward solution on [0, stop], rescaled as it grows."""
    a = y0
    b = y1
    n = 0
    last = 1.0 if b > 0 else -1.0
    if a != 0.0 and (a > 0) != (b > 0):
        n += 1
    for i in range(1, stop):
        nxt = c[i] * b - a
        a = b
        b = nxt
        if b != 0.0:
            s = 1.0 if b > 0 else -1.0
            if s != last:
                n += 1
                last = s
        if abs(b) > _BIG:
            a /= _BIG
            b /= _BIG
    return n
