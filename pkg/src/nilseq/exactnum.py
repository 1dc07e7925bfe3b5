"""Exact reals of the form ``r0 + r1*xi1 + ... + rk*xik``.

The ``xi`` are formal irrational symbols declared in an :class:`IrrationalBasis`
together with a double-precision approximation.  Rational relations between
such values are decidable by exact linear algebra over ``Fraction``; products
of two irrational symbols are deliberately not representable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "BasisMismatchError",
    "IrrationalBasis",
    "QAffineReal",
    "as_rational",
    "default_basis",
    "frac_part",
    "independent_mod1",
    "integer_relation",
    "is_integer",
    "qa_add",
    "qa_mod1",
    "qa_scale",
    "rank",
    "to_float",
]


class BasisMismatchError(ValueError):
    """Two values declared over different irrational bases were combined."""


def as_rational(value) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and exactly representable floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def frac_part(x: Fraction) -> Fraction:
    """Representative of ``x`` mod 1 in ``[0, 1)``."""
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class IrrationalBasis:
    """Ordered formal irrationals, assumed rationally independent together with 1.

    The independence is recorded as a user assertion; nothing here tries to
    prove it.
    """

    name: str
    labels: tuple[str, ...]
    approx: tuple[float, ...]
    definitions: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")
        if len(self.approx) != len(self.labels):
            raise ValueError("one approximation per label is required")
        if not all(math.isfinite(a) for a in self.approx):
            raise ValueError("basis approximations must be finite")
        if not self.definitions:
            object.__setattr__(self, "definitions", tuple("" for _ in self.labels))

    @classmethod
    def from_entries(cls, name: str, entries: Iterable[tuple[str, float, str]]) -> IrrationalBasis:
        entries = list(entries)
        return cls(
            name,
            tuple(e[0] for e in entries),
            tuple(float(e[1]) for e in entries),
            tuple(e[2] for e in entries),
        )

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"basis {self.name!r} has no symbol {label!r}") from None

    def symbol(self, label_or_index, coeff=1) -> QAffineReal:
        i = label_or_index if isinstance(label_or_index, int) else self.index(label_or_index)
        if not 0 <= i < len(self.labels):
            raise IndexError(i)
        return QAffineReal(Fraction(0), {i: as_rational(coeff)}, self)

    def const(self, value) -> QAffineReal:
        return QAffineReal(as_rational(value), {}, self)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "entries": [
                {"label": l, "approx": a, "definition": d}
                for l, a, d in zip(self.labels, self.approx, self.definitions)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> IrrationalBasis:
        return cls.from_entries(
            data["name"],
            ((e["label"], e["approx"], e.get("definition", "")) for e in data["entries"]),
        )


def default_basis() -> IrrationalBasis:
    """``sqrt2, sqrt3, sqrt5`` and the fractional part of pi, labelled ``xi1..xi4``."""
    return _DEFAULT_BASIS


_DEFAULT_BASIS = IrrationalBasis.from_entries(
    "std",
    [
        ("xi1", math.sqrt(2.0), "sqrt(2)"),
        ("xi2", math.sqrt(3.0), "sqrt(3)"),
        ("xi3", math.sqrt(5.0), "sqrt(5)"),
        ("xi4", math.pi - 3.0, "pi - 3"),
    ],
)


@dataclass(frozen=True, eq=False)
class QAffineReal:
    """``const + sum(coeffs[i] * basis.approx[i])`` held exactly."""

    const: Fraction
    coeffs: Mapping[int, Fraction]
    basis: IrrationalBasis = field(default_factory=default_basis)

    def __post_init__(self):
        object.__setattr__(self, "const", as_rational(self.const))
        clean = {}
        for i, c in sorted(self.coeffs.items()):
            if not 0 <= i < len(self.basis):
                raise IndexError(f"basis index {i} out of range")
            c = as_rational(c)
            if c:
                clean[i] = c
        object.__setattr__(self, "coeffs", _FrozenDict(clean))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: QAffineReal):
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatchError(f"bases {self.basis.name!r} and {other.basis.name!r} differ")

    def _coerce(self, other) -> QAffineReal:
        if isinstance(other, QAffineReal):
            self._check(other)
            return other
        return QAffineReal(as_rational(other), {}, self.basis)

    def __add__(self, other):
        return qa_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return qa_scale(-1, self)

    def __sub__(self, other):
        return qa_add(self, -self._coerce(other))

    def __rsub__(self, other):
        return qa_add(self._coerce(other), -self)

    def __mul__(self, c):
        if isinstance(c, QAffineReal):
            if c.is_rational:
                return qa_scale(c.const, self)
            if self.is_rational:
                return qa_scale(self.const, c)
            raise TypeError("products of two irrational values are not represented exactly")
        return qa_scale(as_rational(c), self)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return qa_scale(1 / as_rational(c), self)

    def __eq__(self, other):
        if isinstance(other, QAffineReal):
            if other.basis != self.basis:
                return False
            return self.const == other.const and dict(self.coeffs) == dict(other.coeffs)
        if isinstance(other, (int, Fraction)):
            return not self.coeffs and self.const == other
        return NotImplemented

    def __hash__(self):
        return hash((self.const, tuple(self.coeffs.items()), self.basis.name))

    # -- views ----------------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return not self.coeffs

    def coeff_vector(self) -> list[Fraction]:
        v = [Fraction(0)] * len(self.basis)
        for i, c in self.coeffs.items():
            v[i] = c
        return v

    def rational_image(self) -> Fraction:
        """Exact rational value obtained by reading each approximation as exact."""
        cached = self.__dict__.get("_image")
        if cached is None:
            cached = self.const
            for i, c in self.coeffs.items():
                cached += c * Fraction(self.basis.approx[i])
            object.__setattr__(self, "_image", cached)
        return cached

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"QAffineReal({self})"

    def __str__(self):
        parts = []
        if self.const or not self.coeffs:
            parts.append(str(self.const))
        for i, c in self.coeffs.items():
            lab = self.basis.labels[i]
            term = lab if c == 1 else f"-{lab}" if c == -1 else f"{c}*{lab}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "const": str(self.const),
            "coeffs": {self.basis.labels[i]: str(c) for i, c in self.coeffs.items()},
            "basis": self.basis.name,
        }

    @classmethod
    def from_json(cls, data: Mapping, basis: IrrationalBasis | None = None) -> QAffineReal:
        basis = basis or default_basis()
        if data.get("basis", basis.name) != basis.name:
            raise BasisMismatchError(f"value declared over basis {data['basis']!r}, not {basis.name!r}")
        coeffs = {basis.index(lab): as_rational(c) for lab, c in data.get("coeffs", {}).items()}
        return cls(as_rational(data.get("const", 0)), coeffs, basis)


class _FrozenDict(dict):
    def __setitem__(self, key, value):
        raise TypeError("QAffineReal coefficients are immutable")

    def __delitem__(self, key):
        raise TypeError("QAffineReal coefficients are immutable")

    def __hash__(self):
        return hash(tuple(self.items()))


def qa_add(a: QAffineReal, b: QAffineReal) -> QAffineReal:
    a._check(b)
    coeffs = dict(a.coeffs)
    for i, c in b.coeffs.items():
        coeffs[i] = coeffs.get(i, 0) + c
    return QAffineReal(a.const + b.const, coeffs, a.basis)


def qa_scale(c, a: QAffineReal) -> QAffineReal:
    c = as_rational(c)
    return QAffineReal(c * a.const, {i: c * v for i, v in a.coeffs.items()}, a.basis)


def qa_mod1(a: QAffineReal) -> QAffineReal:
    return QAffineReal(frac_part(a.const), a.coeffs, a.basis)


def is_integer(a: QAffineReal) -> bool:
    return not a.coeffs and a.const.denominator == 1


def to_float(a: QAffineReal) -> float:
    # declaration order of the basis fixes the summation order
    out = float(a.const)
    for i, c in a.coeffs.items():
        out += float(c) * a.basis.approx[i]
    return out


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][col]:
                f = m[i][col] / m[r][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def integer_relation(xs: Sequence[QAffineReal]) -> list[int] | None:
    """A primitive integer vector ``n`` with ``sum(n_i x_i)`` rational, or None."""
    if not xs:
        return None
    basis = xs[0].basis
    for x in xs[1:]:
        xs[0]._check(x)
    k = len(xs)
    # left kernel of the coefficient matrix: solve M^T n = 0
    cols = [x.coeff_vector() for x in xs]  # k columns of length len(basis)
    rows = [[cols[j][i] for j in range(k)] for i in range(len(basis))]
    pivots = []
    m = [list(r) for r in rows]
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(k) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vec = [Fraction(0)] * k
    vec[f] = Fraction(1)
    for row, pc in zip(m, pivots):
        vec[pc] = -row[f]
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def independent_mod1(xs: Sequence[QAffineReal]) -> bool:
    """True iff no nonzero integer combination of ``xs`` is rational."""
    if not xs:
        return True
    for x in xs[1:]:
        xs[0]._check(x)
    return rank([x.coeff_vector() for x in xs]) == len(xs)
