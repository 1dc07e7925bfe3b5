"""numba-compiled loops; same signatures and semantics as :mod:`numpy_kernels`."""
import math

import numpy as np
from numba import njit

_SPLIT = 134217729.0
TWO_PI = 2.0 * math.pi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


@njit(cache=True, inline="always")
def _frac_mul1(N, hi, lo):
    p, e = _two_prod(N, hi)
    f = p - math.floor(p)
    r = f + e + N * lo
    r = r - math.floor(r)
    if r >= 1.0:
        r = 0.0
    return r


@njit(cache=True, inline="always")
def _kappa_centered1(s, t0, K):
    re = 0.0
    im = 0.0
    for k in range(-K, K + 1):
        u = t0 + k
        g = math.exp(-math.pi * (u * u))
        ang = TWO_PI * k * s
        re += g * math.cos(ang)
        im += g * math.sin(ang)
    return complex(re, im)


@njit(cache=True, inline="always")
def _cis1(x):
    ang = TWO_PI * x
    return complex(math.cos(ang), math.sin(ang))


@njit(cache=True)
def frac_mul(N, hi, lo):
    out = np.empty(N.shape[0])
    for i in range(N.shape[0]):
        out[i] = _frac_mul1(N[i], hi, lo)
    return out


@njit(cache=True)
def cis(turns):
    out = np.empty(turns.shape[0], dtype=np.complex128)
    for i in range(turns.shape[0]):
        out[i] = _cis1(turns[i])
    return out


@njit(cache=True)
def kappa_centered(s, t0, K):
    out = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(s.shape[0]):
        out[i] = _kappa_centered1(s[i], t0[i], K)
    return out


@njit(cache=True)
def kappa(s, t, K):
    out = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(s.shape[0]):
        sr = s[i] - math.floor(s[i])
        j = math.floor(t[i] + 0.5)
        js = j * sr
        out[i] = _cis1(-(js - math.floor(js))) * _kappa_centered1(sr, t[i] - j, K)
    return out


@njit(cache=True)
def omega(n, a_hi, a_lo, b_hi, b_lo, ab_hi, ab_lo, K):
    out = np.empty(n.shape[0], dtype=np.complex128)
    for i in range(n.shape[0]):
        ni = n[i]
        N = float(ni)
        N2 = float(ni * (ni - 1) // 2)
        s = _frac_mul1(N, a_hi, a_lo)
        fb = _frac_mul1(N, b_hi, b_lo)
        j = math.floor(N * b_hi + N * b_lo - fb + 0.5)
        t0 = fb
        if fb >= 0.5:
            t0 = fb - 1.0
            j += 1.0
        phase = _frac_mul1(N2, ab_hi, ab_lo) - _frac_mul1(j * N, a_hi, a_lo)
        out[i] = _cis1(phase) * _kappa_centered1(s, t0, K)
    return out


@njit(cache=True)
def floor_mul(n, hi, lo):
    out = np.empty(n.shape[0])
    for i in range(n.shape[0]):
        N = float(n[i])
        f = _frac_mul1(N, hi, lo)
        out[i] = math.floor(N * hi + N * lo - f + 0.5)
    return out


@njit(cache=True)
def block_sums(z, block):
    nb = (z.shape[0] + block - 1) // block
    out = np.empty(nb, dtype=np.complex128)
    for b in range(nb):
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        stop = min((b + 1) * block, z.shape[0])
        for i in range(b * block, stop):
            x = z[i].real
            t = sr + x
            if abs(sr) >= abs(x):
                cr += (sr - t) + x
            else:
                cr += (x - t) + sr
            sr = t
            x = z[i].imag
            t = si + x
            if abs(si) >= abs(x):
                ci += (si - t) + x
            else:
                ci += (x - t) + si
            si = t
        out[b] = complex(sr + cr, si + ci)
    return out


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@njit(cache=True, inline="always")
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    return _two_sum(s, e)


@njit(cache=True, inline="always")
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


@njit(cache=True)
def skew_orbit(a_hi, a_lo, b_hi, b_lo, nmax, step):
    out = np.empty(nmax + 1, dtype=np.complex128)
    xh = 0.0
    xl = 0.0
    yh = 0.0
    yl = 0.0
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
        out[i] = _cis1(yh + yl)
    return out
