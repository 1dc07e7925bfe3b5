"""Group law and orbits of three concrete 2-step nilsystems.

* the skew product ``(x, y) -> (x + a, y + x + b)`` on the 2-torus,
* the Heisenberg nilmanifold ``N_d = H_d / Lambda_d`` with
  ``(x, y, z)(x', y', z') = (x + x', y + y', z z' e(<x|y'>))``,
* the polarized groups ``R^2d x S^1`` with ``(x, z)(x', z') = (x + x', z z' e(<Ax|x'>))``.

Coordinates may be floats or ``Fraction``; with Fractions every central phase
is reduced mod 1 exactly before it is turned into a unit complex number, which
is what keeps long orbits accurate.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Callable, Sequence

import numpy as np

from ._accel import K as _K
from .exactnum import QAffineReal, independent_mod1, rank
from .theta import ConsistencyError, kappa

__all__ = [
    "AffineSkewSystem",
    "HeisenbergElement",
    "HeisenbergPoint",
    "HeisenbergSystem",
    "PolarizedSystem",
    "affine_orbit_value",
    "affine_orbit_values",
    "c1_gaussian",
    "cis",
    "dd",
    "fiber_fourier",
    "h_commutator",
    "h_identity",
    "h_inv",
    "h_mul",
    "heisenberg_orbit_value",
    "minimality_check",
    "polarized_commutator",
    "polarized_inv",
    "polarized_mul",
    "polarized_tau_pow",
    "reduce_to_fundamental",
    "tau_pow",
]

UNIT_TOL = 1e-12
SNAP = 1e-12


def turns(v) -> float:
    """Representative of ``v`` mod 1 in ``[0, 1)``; exact for Fractions and ints."""
    if isinstance(v, int):
        return 0.0
    if isinstance(v, Fraction):
        return float(v % 1)
    v = float(v)
    return v - math.floor(v)


def cis(v) -> complex:
    """``e(v) = exp(2 pi i v)`` with exact mod-1 reduction for rationals."""
    ang = 2.0 * math.pi * turns(v)
    return complex(math.cos(ang), math.sin(ang))


def dd(x: Fraction) -> tuple[float, float]:
    """Double-double ``(hi, lo)`` with ``hi + lo`` within 2**-106 relative of ``x``."""
    hi = float(x)
    return hi, float(Fraction(x) - Fraction(hi))


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), start=0)


def _unit(z: complex) -> complex:
    return z / abs(z)


# ---------------------------------------------------------------------------
# Heisenberg group
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class HeisenbergElement:
    x: tuple
    y: tuple
    z: complex = 1 + 0j

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        object.__setattr__(self, "z", complex(self.z))
        if not self.x or len(self.x) != len(self.y):
            raise ValueError("x and y must be nonempty vectors of equal length")
        if abs(abs(self.z) - 1.0) > UNIT_TOL:
            raise ValueError(f"central coordinate must be unimodular, got |z| = {abs(self.z)}")

    @property
    def d(self) -> int:
        return len(self.x)

    def as_float(self) -> HeisenbergElement:
        return HeisenbergElement(tuple(map(float, self.x)), tuple(map(float, self.y)), self.z)


@dataclass(frozen=True)
class HeisenbergPoint(HeisenbergElement):
    """Representative in the fundamental domain ``[0,1)^d x [0,1)^d x S^1``."""

    def __post_init__(self):
        super().__post_init__()
        for c in self.x + self.y:
            if not 0 <= c < 1:
                raise ValueError(f"coordinate {c!r} outside [0, 1)")


def h_identity(d: int) -> HeisenbergElement:
    return HeisenbergElement((0,) * d, (0,) * d, 1)


def _same_d(g, h):
    if g.d != h.d:
        raise ValueError(f"dimension mismatch: {g.d} vs {h.d}")


def h_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    _same_d(g, h)
    x = tuple(a + b for a, b in zip(g.x, h.x))
    y = tuple(a + b for a, b in zip(g.y, h.y))
    return HeisenbergElement(x, y, _unit(g.z * h.z * cis(_dot(g.x, h.y))))


def h_inv(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(
        tuple(-a for a in g.x), tuple(-a for a in g.y), _unit(g.z.conjugate() * cis(_dot(g.x, g.y)))
    )


def h_commutator(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    """``g h g^-1 h^-1``; only its central coordinate can be nontrivial."""
    _same_d(g, h)
    zero = (0,) * g.d
    return HeisenbergElement(zero, zero, cis(_dot(g.x, h.y) - _dot(h.x, g.y)))


def _floor(v):
    if isinstance(v, (int, Fraction)):
        return math.floor(v)
    return math.floor(float(v))


def reduce_to_fundamental(g: HeisenbergElement) -> tuple[HeisenbergPoint, tuple[tuple[int, ...], tuple[int, ...]]]:
    """Right-coset representative ``g * (-k, -l, 1)`` with ``x, y`` in ``[0,1)^d``.

    Returns the point and ``(k, l)``; ``h_mul(point, (k, l, 1))`` gives back ``g``.
    """
    k = []
    l = []
    xr = []
    yr = []
    for src, ints, red in ((g.x, k, xr), (g.y, l, yr)):
        for c in src:
            f = _floor(c)
            r = c - f
            if not isinstance(r, (int, Fraction)) and r >= 1.0 - SNAP:
                f += 1
                r = 0.0
            ints.append(int(f))
            red.append(r)
    z = _unit(g.z * cis(-_dot(g.x, l)))
    return HeisenbergPoint(tuple(xr), tuple(yr), z), (tuple(k), tuple(l))


@dataclass(frozen=True)
class HeisenbergSystem:
    """Translation by ``tau = (alpha, beta, e(gamma))`` on ``N_d``."""

    alpha: tuple
    beta: tuple
    gamma: QAffineReal

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        if not self.alpha or len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must be nonempty and of equal length")

    @property
    def d(self) -> int:
        return len(self.alpha)

    def tau(self) -> HeisenbergElement:
        return tau_pow(self, 1)


def tau_pow(sys: HeisenbergSystem, n: int) -> HeisenbergElement:
    """Closed form ``(n a, n b, e(n g) e(n(n-1)/2 <a|b>))`` on rational images."""
    n = int(n)
    a = [v.rational_image() for v in sys.alpha]
    b = [v.rational_image() for v in sys.beta]
    phase = n * sys.gamma.rational_image() + Fraction(n * (n - 1), 2) * _dot(a, b)
    return HeisenbergElement(tuple(n * v for v in a), tuple(n * v for v in b), cis(phase))


def c1_gaussian(g: HeisenbergElement, acc=None) -> complex:
    """``z * prod_j kappa(x_j, y_j)``; right-invariant under ``Lambda_d``."""
    out = g.z
    for xj, yj in zip(g.x, g.y):
        if isinstance(yj, (int, Fraction)):
            # exact recentring keeps the e(-j x) factor accurate for huge y
            j = math.floor(yj + Fraction(1, 2))
            if j:
                out *= cis(-j * xj)
            out *= kappa(turns(xj), float(yj - j), acc)
        else:
            out *= kappa(float(xj), float(yj), acc)
    return out


def _scaled(sys: HeisenbergSystem):
    """Integer numerators of the rational images over their common denominator."""
    cached = sys.__dict__.get("_scaled")
    if cached is None:
        vals = [v.rational_image() for v in sys.alpha + sys.beta + (sys.gamma,)]
        D = math.lcm(*(v.denominator for v in vals))
        ints = [int(v * D) for v in vals]
        d = sys.d
        cached = (D, ints[:d], ints[d:2 * d], ints[-1], sum(a * b for a, b in zip(ints[:d], ints[d:2 * d])))
        object.__setattr__(sys, "_scaled", cached)
    return cached


def heisenberg_orbit_value(sys: HeisenbergSystem, n: int) -> complex:
    """``f(T^n x0)`` computed through the group: reduce ``tau^n`` by the lattice
    element ``(k, l, 1)`` and evaluate at the representative.

    Same arithmetic as :func:`tau_pow` and :func:`reduce_to_fundamental`, done on
    integer numerators over one common denominator ``D`` for speed.
    """
    n = int(n)
    D, A, B, G, AB = _scaled(sys)
    D2 = D * D
    # central phase times D^2: n g D + n(n-1)/2 <a|b> - D <n a | l>
    phase = n * G * D + (n * (n - 1) // 2) * AB
    value = 1.0 + 0j
    for a, b in zip(A, B):
        X, Y = n * a, n * b
        l, yr = divmod(Y, D)
        phase -= D * X * l
        value *= kappa((X % D) / D, yr / D)
    return value * cis(Fraction(phase % D2, D2))


# ---------------------------------------------------------------------------
# affine skew product
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class AffineSkewSystem:
    alpha: QAffineReal
    beta: QAffineReal


ITERATION_LIMIT = 10**5


def _affine_closed(sys: AffineSkewSystem, n: int) -> complex:
    a = sys.alpha.rational_image()
    b = sys.beta.rational_image()
    return cis(Fraction(n * (n - 1), 2) * a + n * b)


def affine_orbit_values(sys: AffineSkewSystem, nmax: int, step: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Iterated and closed-form ``e(y_n)`` for ``n = 0, step, ..., step*nmax``."""
    if step not in (1, -1):
        raise ValueError("step must be +1 or -1")
    ah, al = dd(sys.alpha.rational_image())
    bh, bl = dd(sys.beta.rational_image())
    iterated = _K.skew_orbit(ah, al, bh, bl, int(nmax), step)
    n = step * np.arange(nmax + 1, dtype=np.int64)
    N = n.astype(np.float64)
    N2 = (n * (n - 1) // 2).astype(np.float64)
    closed = _K.cis(
        (_K.frac_mul(N2, ah, al) + _K.frac_mul(N, bh, bl)) % 1.0
    )
    return iterated, closed


def affine_orbit_value(sys: AffineSkewSystem, n: int, check: bool = True, tol: float = 1e-9) -> complex:
    """``f(T^n (0,0))`` for ``f(x, y) = e(y)``.

    The closed form is returned; when ``check`` is set and ``|n|`` is at most
    ``ITERATION_LIMIT`` the map is also iterated and the two must agree.
    """
    n = int(n)
    value = _affine_closed(sys, n)
    if check and abs(n) <= ITERATION_LIMIT:
        iterated, _ = affine_orbit_values(sys, abs(n), 1 if n >= 0 else -1)
        if abs(iterated[-1] - value) > tol:
            raise ConsistencyError(f"iterated {iterated[-1]} vs closed form {value} at n={n}")
    return value


# ---------------------------------------------------------------------------
# polarized connected systems
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PolarizedSystem:
    """``G = R^2d x S^1`` with cocycle ``e(<Ax|x'>)``, translated by ``(delta, e(gamma0))``.

    ``<Ax|x'>`` is the Euclidean pairing of ``A x`` with ``x'``; the commutator
    form is then ``B = A^T - A``, required nonsingular.
    """

    A: tuple
    delta: tuple
    gamma0: QAffineReal

    def __post_init__(self):
        A = tuple(tuple(int(v) for v in row) for row in self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "delta", tuple(self.delta))
        n = len(A)
        if n == 0 or n % 2 or any(len(r) != n for r in A):
            raise ValueError("A must be a nonempty square matrix of even size")
        if len(self.delta) != n:
            raise ValueError("delta must have length 2d")
        if rank(self.B) != n:
            raise ValueError("B = A^T - A is singular")

    @property
    def d(self) -> int:
        return len(self.A) // 2

    @property
    def B(self) -> tuple:
        n = len(self.A)
        return tuple(tuple(self.A[j][i] - self.A[i][j] for j in range(n)) for i in range(n))


def _apply(A, x):
    return tuple(_dot(row, x) for row in A)


def _check_pol(sys, *xs):
    for x in xs:
        if len(x) != 2 * sys.d:
            raise ValueError(f"expected a vector of length {2 * sys.d}, got {len(x)}")


def polarized_mul(sys: PolarizedSystem, g, h):
    (x, z), (xp, zp) = g, h
    _check_pol(sys, x, xp)
    return tuple(a + b for a, b in zip(x, xp)), _unit(z * zp * cis(_dot(_apply(sys.A, x), xp)))


def polarized_inv(sys: PolarizedSystem, g):
    x, z = g
    _check_pol(sys, x)
    return tuple(-a for a in x), _unit(complex(z).conjugate() * cis(_dot(_apply(sys.A, x), x)))


def polarized_commutator(sys: PolarizedSystem, g, h):
    """Central value ``e(x^T B x')`` of ``g h g^-1 h^-1`` with ``B = A^T - A``."""
    (x, _), (xp, _) = g, h
    _check_pol(sys, x, xp)
    return (0,) * len(x), cis(_dot(x, _apply(sys.B, xp)))


def polarized_tau_pow(sys: PolarizedSystem, n: int):
    n = int(n)
    delta = [v.rational_image() for v in sys.delta]
    phase = n * sys.gamma0.rational_image() + Fraction(n * (n - 1), 2) * _dot(_apply(sys.A, delta), delta)
    return tuple(n * v for v in delta), cis(phase)


# ---------------------------------------------------------------------------
def minimality_check(sys) -> bool:
    """Rational independence mod 1 of the translation's horizontal coordinates."""
    if isinstance(sys, HeisenbergSystem):
        return independent_mod1(list(sys.alpha) + list(sys.beta))
    if isinstance(sys, AffineSkewSystem):
        return not sys.alpha.is_rational
    if isinstance(sys, PolarizedSystem):
        return independent_mod1(list(sys.delta))
    raise TypeError(f"unsupported system {type(sys).__name__}")


def fiber_fourier(
    fn: Callable[[HeisenbergElement], complex], point: HeisenbergElement, chi: int, quad_points: int
) -> complex:
    """``int_{S^1} fn(u . point) conj(u^chi) du`` by the ``M``-point rule on the circle.

    Exact for functions whose fiber modes ``w`` all satisfy ``|w| < M - |chi|``.
    """
    chi = int(chi)
    M = int(quad_points)
    if M < 2 * abs(chi) + 2:
        raise ValueError(f"need at least {2 * abs(chi) + 2} quadrature points for chi={chi}, got {M}")
    total = 0j
    for m in range(M):
        u = cis(Fraction(m, M))
        total += fn(HeisenbergElement(point.x, point.y, _unit(u * point.z))) * cis(Fraction(-chi * m, M))
    return total / M
