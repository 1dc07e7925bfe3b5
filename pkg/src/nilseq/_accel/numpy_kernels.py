"""Pure-numpy versions of the hot loops.

Every function mirrors one in :mod:`numba_kernels` and must return the same
values up to libm rounding.  Double-double parameters are passed as
``(hi, lo)`` float pairs.
"""
import math

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
TWO_PI = 2.0 * np.pi


def two_prod(a, b):
    """Exact product ``a*b = p + e`` without fma."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def frac_mul(N, hi, lo):
    """``frac(N * (hi + lo))`` for integer-valued float ``N`` with ``|N| < 2**53``."""
    N = np.asarray(N, dtype=np.float64)
    p, e = two_prod(N, hi)
    f = p - np.floor(p)
    r = f + e + N * lo
    r = r - np.floor(r)
    return np.where(r >= 1.0, 0.0, r)


def cis(turns):
    """``e(x) = exp(2 pi i x)``."""
    ang = TWO_PI * np.asarray(turns, dtype=np.float64)
    return np.cos(ang) + 1j * np.sin(ang)


def kappa_centered(s, t0, K):
    """Truncated ``sum_{|k|<=K} exp(-pi (t0+k)^2) e(k s)``; ``t0`` should lie in [-1/2, 1/2)."""
    s = np.asarray(s, dtype=np.float64)
    t0 = np.asarray(t0, dtype=np.float64)
    re = np.zeros(np.broadcast(s, t0).shape)
    im = np.zeros_like(re)
    for k in range(-K, K + 1):
        g = np.exp(-np.pi * (t0 + k) ** 2)
        ang = TWO_PI * k * s
        re += g * np.cos(ang)
        im += g * np.sin(ang)
    return re + 1j * im


def kappa(s, t, K):
    """Kernel on arbitrary real ``t``, recentred by the quasi-periodicity in ``t``."""
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    s = s - np.floor(s)
    j = np.floor(t + 0.5)
    t0 = t - j
    js = j * s
    return cis(-(js - np.floor(js))) * kappa_centered(s, t0, K)


def omega(n, a_hi, a_lo, b_hi, b_lo, ab_hi, ab_lo, K):
    """``kappa(n a, n b) * e(n(n-1)/2 * ab)`` with exact-integer phase bookkeeping."""
    n = np.asarray(n, dtype=np.int64)
    N = n.astype(np.float64)
    N2 = (n * (n - 1) // 2).astype(np.float64)
    s = frac_mul(N, a_hi, a_lo)
    fb = frac_mul(N, b_hi, b_lo)
    jb = np.floor(N * b_hi + N * b_lo - fb + 0.5)
    hi = fb >= 0.5
    t0 = np.where(hi, fb - 1.0, fb)
    j = np.where(hi, jb + 1.0, jb)
    phase = frac_mul(N2, ab_hi, ab_lo) - frac_mul(j * N, a_hi, a_lo)
    return cis(phase) * kappa_centered(s, t0, K)


def floor_mul(n, hi, lo):
    """``floor(n * (hi + lo))`` as integer-valued floats."""
    N = np.asarray(n, dtype=np.float64)
    f = frac_mul(N, hi, lo)
    return np.floor(N * hi + N * lo - f + 0.5)


def block_sums(z, block):
    """Neumaier-compensated sums of consecutive blocks of ``block`` entries."""
    z = np.asarray(z, dtype=np.complex128)
    nb = -(-z.size // block)
    pad = np.zeros(nb * block, dtype=np.complex128)
    pad[: z.size] = z
    out = []
    for part in (pad.real.reshape(nb, block), pad.imag.reshape(nb, block)):
        s = np.zeros(nb)
        c = np.zeros(nb)
        for col in range(block):
            x = part[:, col]
            t = s + x
            big = np.abs(s) >= np.abs(x)
            c += np.where(big, (s - t) + x, (x - t) + s)
            s = t
        out.append(s + c)
    return out[0] + 1j * out[1]


def skew_orbit(a_hi, a_lo, b_hi, b_lo, nmax, step):
    """``e(y_n)`` along the skew map ``(x, y) -> (x + a, y + x + b)`` iterated in
    double-double arithmetic; ``step = -1`` iterates the inverse map."""
    out = np.empty(nmax + 1, dtype=np.complex128)
    xh = xl = yh = yl = 0.0
    out[0] = 1.0
    for i in range(1, nmax + 1):
        if step > 0:
            yh, yl = _dd_add(yh, yl, xh, xl)
            yh, yl = _dd_add(yh, yl, b_hi, b_lo)
            xh, xl = _dd_add(xh, xl, a_hi, a_lo)
        else:
            xh, xl = _dd_add(xh, xl, -a_hi, -a_lo)
            yh, yl = _dd_add(yh, yl, -xh, -xl)
            yh, yl = _dd_add(yh, yl, -b_hi, -b_lo)
        xh, xl = _dd_mod1(xh, xl)
        yh, yl = _dd_mod1(yh, yl)
        ang = TWO_PI * (yh + yl)
        out[i] = complex(math.cos(ang), math.sin(ang))
    return out


def _two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    return _two_sum(s, e)


def _dd_mod1(h, l):
    # h - floor(h) is inexact for negative h, so carry its rounding error
    s, e = _two_sum(h, -math.floor(h))
    h, l = _two_sum(s, e + l)
    if h < 0.0:
        s, e = _two_sum(h, 1.0)
        h, l = _two_sum(s, e + l)
    elif h >= 1.0:
        s, e = _two_sum(h, -1.0)
        h, l = _two_sum(s, e + l)
    return h, l
