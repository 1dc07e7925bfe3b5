"""Gaussian periodization kernel ``kappa(s, t) = sum_k exp(-pi (t+k)^2) e(k s)``.

``kappa`` equals ``exp(-pi t^2) * theta(s + i t, i)`` for the Jacobi theta
function with modulus ``i``; :func:`theta3_at_i` evaluates the right-hand side
independently so the two can be checked against each other.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np

from ._accel import K as _K

__all__ = [
    "ConsistencyError",
    "KappaAccuracy",
    "kappa",
    "kappa_abs_sq_mean",
    "kappa_abs_sq_parseval",
    "kappa_abs_sq_quadrature",
    "kappa_array",
    "theta3_at_i",
    "truncation_radius",
]

DEFAULT_TOL = 1e-16
SQRT_HALF = 2.0 ** -0.5


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagreed beyond their tolerance."""


@dataclass(frozen=True)
class KappaAccuracy:
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (0.0 < self.tol <= 1e-3):
            raise ValueError(f"tol must lie in (0, 1e-3], got {self.tol!r}")


def _tol(acc) -> float:
    if acc is None:
        return DEFAULT_TOL
    if isinstance(acc, KappaAccuracy):
        return acc.tol
    return KappaAccuracy(float(acc)).tol


def truncation_radius(tol: float = DEFAULT_TOL) -> int:
    """Smallest ``K`` whose discarded tail is below ``tol`` once ``t`` is recentred
    into ``[-1/2, 1/2)``.

    For ``|k| > K`` the terms are bounded by ``exp(-pi (|k| - 1/2)^2)``; the two
    tails are summed explicitly until they underflow.
    """
    return _radius(_tol(tol))


@functools.lru_cache(maxsize=64)
def _radius(tol: float) -> int:
    K = 0
    while True:
        tail = 0.0
        k = K + 1
        while True:
            term = math.exp(-math.pi * (k - 0.5) ** 2)
            tail += 2.0 * term
            if term < 1e-300 or term < tail * 1e-17:
                break
            k += 1
        if tail < tol:
            return K
        K += 1


def kappa(s: float, t: float, acc=None) -> complex:
    """Scalar kernel value on ``s`` taken mod 1 and any real ``t``."""
    s = float(s)
    t = float(t)
    if not (math.isfinite(s) and math.isfinite(t)):
        raise ValueError("kappa needs finite arguments")
    K = truncation_radius(_tol(acc))
    sr = s - math.floor(s)
    j = math.floor(t + 0.5)
    t0 = t - j
    total = 0j
    for k in range(-K, K + 1):
        total += math.exp(-math.pi * (t0 + k) ** 2) * cmath.exp(2j * math.pi * ((k * sr) % 1.0))
    return cmath.exp(-2j * math.pi * ((j * sr) % 1.0)) * total


def kappa_array(s, t, acc=None) -> np.ndarray:
    """Vectorized :func:`kappa` through the active kernel backend."""
    s, t = np.broadcast_arrays(np.asarray(s, dtype=np.float64), np.asarray(t, dtype=np.float64))
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(t))):
        raise ValueError("kappa needs finite arguments")
    shape = s.shape
    out = _K.kappa(np.ascontiguousarray(s.ravel()), np.ascontiguousarray(t.ravel()), truncation_radius(_tol(acc)))
    return out.reshape(shape)


def theta3_at_i(u: complex) -> complex:
    """``sum_n exp(-pi n^2 + 2 pi i n u)`` summed to a tail below 1e-14."""
    u = complex(u)
    y = u.imag
    if not (math.isfinite(u.real) and math.isfinite(y)):
        raise ValueError("theta3_at_i needs a finite argument")
    if abs(y) > 4.0:
        raise ValueError(f"|Im(u)| must be <= 4, got {y}")
    # |term_n| = exp(pi y^2 - pi (n + y)^2); stop once that is below 1e-16
    N = int(math.ceil(abs(y) + math.sqrt(y * y + 16.0 * math.log(10.0) / math.pi))) + 1
    total = 0j
    for n in range(-N, N + 1):
        total += cmath.exp(-math.pi * n * n + 2j * math.pi * n * u)
    return total


def kappa_abs_sq_quadrature(grid: int = 256) -> float:
    """Mean of ``|kappa|^2`` over a ``grid x grid`` lattice of the unit square.

    ``|kappa|^2`` is smooth and 1-periodic in both variables, so the lattice
    mean is the trapezoidal rule and converges spectrally.
    """
    pts = np.arange(grid, dtype=np.float64) / grid
    s, t = np.meshgrid(pts, pts, indexing="ij")
    vals = kappa_array(s, t)
    return float(np.mean(vals.real**2 + vals.imag**2))


def kappa_abs_sq_parseval(kmax: int | None = None) -> float:
    """``int_0^1 sum_{|k|<=kmax} exp(-2 pi (t+k)^2) dt`` in closed form.

    With ``kmax=None`` the full series, i.e. ``int_R exp(-2 pi u^2) du``.
    """
    if kmax is None:
        return SQRT_HALF
    c = math.sqrt(2.0 * math.pi)
    return (math.erf((kmax + 1) * c) + math.erf(kmax * c)) / (2.0 * math.sqrt(2.0))


def kappa_abs_sq_mean(grid: int = 256, tol: float = 1e-8) -> float:
    """``int_T^2 |kappa|^2``, cross-checked between quadrature and Parseval."""
    quad = kappa_abs_sq_quadrature(grid)
    pars = kappa_abs_sq_parseval()
    if abs(quad - pars) > tol:
        raise ConsistencyError(f"quadrature {quad!r} vs Parseval {pars!r}")
    return pars
