"""Nilsequence expressions and their pointwise evaluation.

Leaves carry :class:`~nilseq.exactnum.QAffineReal` parameters.  Two evaluation
routes exist:

* :func:`eval` works on one index and reduces every phase mod 1 in exact
  rational arithmetic (on the rational images of the parameters);
* :func:`eval_range` evaluates a window through the kernel backend, carrying
  parameters as double-double pairs.  It agrees with :func:`eval` to a few
  ulps and is what the averaging engine uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ._accel import K as _K
from .exactnum import (
    IrrationalBasis,
    QAffineReal,
    as_rational,
    default_basis,
    independent_mod1,
    integer_relation,
)
from .nilsys import (
    AffineSkewSystem,
    HeisenbergSystem,
    affine_orbit_value,
    cis,
    dd,
    heisenberg_orbit_value,
    turns,
)
from .theta import kappa, truncation_radius

__all__ = [
    "Conj",
    "DependentParametersError",
    "Exp",
    "Expr",
    "FloorLinear",
    "FloorQuad",
    "MFamilyParams",
    "Omega",
    "Orbit",
    "Product",
    "Quad",
    "Shift",
    "Sum",
    "eval",
    "eval_range",
    "expr_from_json",
    "expr_to_json",
    "floor_linear_value",
    "floor_quad_value",
    "load_expr",
    "m_sequence",
    "parse_real",
    "shift",
]

N_MAX = 2**52
# largest |n| handled by the kernels: n(n-1)/2 must be an exact double
KERNEL_N_MAX = 2**26


class DependentParametersError(ValueError):
    """The alpha/beta parameters of a family-M sequence are not independent mod 1."""


class Expr:
    """Base node.  ``a * b`` builds a product, ``a.conj()`` a conjugate."""

    def __mul__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return Product((self, other))

    def conj(self):
        return Conj(self)

    def shift(self, k: int):
        return shift(self, k)

    def __call__(self, n: int) -> complex:
        return eval(self, n)


@dataclass(frozen=True)
class Exp(Expr):
    s: QAffineReal


@dataclass(frozen=True)
class Quad(Expr):
    t: QAffineReal


@dataclass(frozen=True)
class Omega(Expr):
    alpha: QAffineReal
    beta: QAffineReal


@dataclass(frozen=True)
class Product(Expr):
    children: tuple

    def __post_init__(self):
        flat = []
        for c in self.children:
            if isinstance(c, Product):
                flat.extend(c.children)
            else:
                flat.append(c)
        object.__setattr__(self, "children", tuple(flat))


@dataclass(frozen=True)
class Sum(Expr):
    """``sum(coef * expr)``; ``Sum(())`` is the zero sequence."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((complex(c), e) for c, e in self.terms))


@dataclass(frozen=True)
class Conj(Expr):
    child: Expr


@dataclass(frozen=True)
class Shift(Expr):
    k: int
    child: Expr


@dataclass(frozen=True)
class Orbit(Expr):
    """Orbit sequence of a concrete system; the observable is fixed by the system.

    Heisenberg systems use the Gaussian weight-one function, affine systems
    use ``e(y)``.
    """

    system: object

    @property
    def tag(self) -> str:
        return "c1_gaussian" if isinstance(self.system, HeisenbergSystem) else "e_y"


@dataclass(frozen=True)
class FloorLinear(Expr):
    """``e(floor(n alpha) beta)``."""

    alpha: QAffineReal
    beta: QAffineReal


@dataclass(frozen=True)
class FloorQuad(Expr):
    """``e(floor(n alpha) n beta)``."""

    alpha: QAffineReal
    beta: QAffineReal


def shift(e: Expr, k: int) -> Expr:
    """``n -> e(n + k)``; nested shifts are merged."""
    k = int(k)
    if isinstance(e, Shift):
        k += e.k
        e = e.child
    return e if k == 0 else Shift(k, e)


# ---------------------------------------------------------------------------
# family M
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MFamilyParams:
    s: QAffineReal
    t: QAffineReal
    pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))

    @property
    def d(self) -> int:
        return len(self.pairs)

    def flat(self) -> list[QAffineReal]:
        return [a for a, _ in self.pairs] + [b for _, b in self.pairs]


def m_sequence(p: MFamilyParams) -> Product:
    """``e(s) q(t) omega(a_1, b_1) ... omega(a_d, b_d)``."""
    params = p.flat()
    if params and not independent_mod1(params):
        rel = integer_relation(params)
        names = [f"alpha{i + 1}" for i in range(p.d)] + [f"beta{i + 1}" for i in range(p.d)]
        terms = " + ".join(f"{c}*{nm}" for c, nm in zip(rel, names) if c)
        raise DependentParametersError(f"rational relation: {terms} is rational")
    children = [Exp(p.s), Quad(p.t)] + [Omega(a, b) for a, b in p.pairs]
    return Product(tuple(children))


# ---------------------------------------------------------------------------
# scalar evaluation
# ---------------------------------------------------------------------------
def _n2(n: int) -> int:
    return n * (n - 1) // 2


def omega_value(alpha: QAffineReal, beta: QAffineReal, n: int) -> complex:
    a = alpha.rational_image()
    b = beta.rational_image()
    s = n * a
    y = n * b
    j = math.floor(y + Fraction(1, 2))
    return cis(_n2(n) * a * b - j * s) * kappa(turns(s), float(y - j))


def floor_linear_value(alpha: QAffineReal, beta: QAffineReal, n: int) -> complex:
    return cis(math.floor(n * alpha.rational_image()) * beta.rational_image())


def floor_quad_value(alpha: QAffineReal, beta: QAffineReal, n: int) -> complex:
    return cis(math.floor(n * alpha.rational_image()) * n * beta.rational_image())


def eval(e: Expr, n: int) -> complex:  # noqa: A001 - mirrors the operation name
    n = int(n)
    if abs(n) > N_MAX:
        raise OverflowError(f"|n| = {abs(n)} exceeds 2**52")
    if isinstance(e, Exp):
        return cis(n * e.s.rational_image())
    if isinstance(e, Quad):
        return cis(_n2(n) * e.t.rational_image())
    if isinstance(e, Omega):
        return omega_value(e.alpha, e.beta, n)
    if isinstance(e, Product):
        out = 1 + 0j
        for c in e.children:
            out *= eval(c, n)
        return out
    if isinstance(e, Sum):
        return sum((c * eval(t, n) for c, t in e.terms), 0j)
    if isinstance(e, Conj):
        return eval(e.child, n).conjugate()
    if isinstance(e, Shift):
        return eval(e.child, n + e.k)
    if isinstance(e, Orbit):
        if isinstance(e.system, HeisenbergSystem):
            return heisenberg_orbit_value(e.system, n)
        return affine_orbit_value(e.system, n, check=False)
    if isinstance(e, FloorLinear):
        return floor_linear_value(e.alpha, e.beta, n)
    if isinstance(e, FloorQuad):
        return floor_quad_value(e.alpha, e.beta, n)
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# window evaluation through the kernels
# ---------------------------------------------------------------------------
def _kernel_safe(e: Expr, lo: int, hi: int) -> bool:
    m = max(abs(lo), abs(hi))
    if m >= KERNEL_N_MAX:
        return False
    if isinstance(e, Omega):
        return m * (m * (abs(float(e.beta)) + 1) + 1) < 2**52
    if isinstance(e, FloorQuad):
        return m * (m * (abs(float(e.alpha)) + 1) + 1) < 2**52
    return True


def _floor_array(alpha: QAffineReal, n: np.ndarray) -> np.ndarray:
    if alpha.is_rational:
        p, q = alpha.const.numerator, alpha.const.denominator
        if int(np.max(np.abs(n), initial=0)) * abs(p) < 2**62:
            return ((n * p) // q).astype(np.float64)
        return np.array([float((int(v) * p) // q) for v in n])
    return _K.floor_mul(n, *dd(alpha.rational_image()))


def eval_range(e: Expr, n0: int, n1: int) -> np.ndarray:
    """Values for ``n0 <= n < n1`` as a complex array."""
    n0, n1 = int(n0), int(n1)
    if n1 < n0:
        raise ValueError("empty range with n1 < n0")
    if isinstance(e, Shift):
        return eval_range(e.child, n0 + e.k, n1 + e.k)
    if isinstance(e, Product):
        out = np.ones(n1 - n0, dtype=np.complex128)
        for c in e.children:
            out *= eval_range(c, n0, n1)
        return out
    if isinstance(e, Sum):
        out = np.zeros(n1 - n0, dtype=np.complex128)
        for c, t in e.terms:
            out += c * eval_range(t, n0, n1)
        return out
    if isinstance(e, Conj):
        return np.conj(eval_range(e.child, n0, n1))
    if isinstance(e, Orbit) or not _kernel_safe(e, n0, n1 - 1):
        return np.array([eval(e, n) for n in range(n0, n1)], dtype=np.complex128)
    n = np.arange(n0, n1, dtype=np.int64)
    N = n.astype(np.float64)
    if isinstance(e, Exp):
        return _K.cis(_K.frac_mul(N, *dd(e.s.rational_image())))
    if isinstance(e, Quad):
        N2 = (n * (n - 1) // 2).astype(np.float64)
        return _K.cis(_K.frac_mul(N2, *dd(e.t.rational_image())))
    if isinstance(e, Omega):
        a = e.alpha.rational_image()
        b = e.beta.rational_image()
        return _K.omega(n, *dd(a), *dd(b), *dd(a * b), truncation_radius())
    if isinstance(e, FloorLinear):
        F = _floor_array(e.alpha, n)
        return _K.cis(_K.frac_mul(F, *dd(e.beta.rational_image())))
    if isinstance(e, FloorQuad):
        F = _floor_array(e.alpha, n)
        return _K.cis(_K.frac_mul(F * N, *dd(e.beta.rational_image())))
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------
def parse_real(leaf, basis: IrrationalBasis, params: Mapping[str, QAffineReal] | None = None) -> QAffineReal:
    """Read a parameter: a name from ``params``, a QAffine JSON object, a number,
    or a linear form such as ``"1/2 + xi1 - 3/4*xi2"``."""
    params = params or {}
    if isinstance(leaf, QAffineReal):
        return leaf
    if isinstance(leaf, dict):
        return QAffineReal.from_json(leaf, basis)
    if isinstance(leaf, bool):
        raise TypeError("bool is not a parameter")
    if isinstance(leaf, int):
        return basis.const(leaf)
    if isinstance(leaf, float):
        return basis.const(Fraction(repr(leaf)))
    if not isinstance(leaf, str):
        raise TypeError(f"cannot read a parameter from {leaf!r}")
    text = leaf.strip()
    if text in params:
        return params[text]
    out = basis.const(0)
    for sign, term in _terms(text):
        if "*" in term:
            c, sym = (p.strip() for p in term.split("*", 1))
            piece = _atom(sym, basis, params) * as_rational(c)
        else:
            piece = _atom(term, basis, params)
        out = out + piece if sign > 0 else out - piece
    return out


def _atom(tok, basis, params):
    if tok in params:
        return params[tok]
    if tok in basis.labels:
        return basis.symbol(tok)
    return basis.const(as_rational(tok))


def _terms(text):
    out = []
    cur = ""
    sign = 1
    for i, ch in enumerate(text):
        if ch in "+-" and cur.strip() and not cur.rstrip().endswith(("*", "/")):
            out.append((sign, cur.strip()))
            cur = ""
            sign = 1 if ch == "+" else -1
        elif ch in "+-" and not cur.strip():
            sign *= 1 if ch == "+" else -1
        else:
            cur += ch
    if not cur.strip():
        raise ValueError(f"cannot parse {text!r}")
    out.append((sign, cur.strip()))
    return out


def _pair(obj, basis, params):
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ValueError(f"expected a two-element list, got {obj!r}")
    return parse_real(obj[0], basis, params), parse_real(obj[1], basis, params)


def _coef(c):
    if isinstance(c, (list, tuple)):
        return complex(float(c[0]), float(c[1]))
    return complex(float(c))


def _system_from_json(obj, basis, params):
    kind = obj.get("system", "heisenberg")
    if kind == "heisenberg":
        alpha = [parse_real(v, basis, params) for v in obj["alpha"]]
        beta = [parse_real(v, basis, params) for v in obj["beta"]]
        return HeisenbergSystem(alpha, beta, parse_real(obj.get("gamma", 0), basis, params))
    if kind == "affine":
        return AffineSkewSystem(parse_real(obj["alpha"], basis, params), parse_real(obj["beta"], basis, params))
    raise ValueError(f"unknown system {kind!r}")


def expr_from_json(obj, basis: IrrationalBasis | None = None, params=None) -> Expr:
    basis = basis or default_basis()
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"expression nodes are single-key objects, got {obj!r}")
    (key, val), = obj.items()
    if key == "exp":
        return Exp(parse_real(val, basis, params))
    if key == "quad":
        return Quad(parse_real(val, basis, params))
    if key == "omega":
        return Omega(*_pair(val, basis, params))
    if key == "prod":
        return Product(tuple(expr_from_json(v, basis, params) for v in val))
    if key == "sum":
        return Sum(tuple((_coef(t.get("coef", 1)), expr_from_json(t["expr"], basis, params)) for t in val))
    if key == "conj":
        return Conj(expr_from_json(val, basis, params))
    if key == "shift":
        return shift(expr_from_json(val["expr"], basis, params), int(val["k"]))
    if key == "orbit":
        return Orbit(_system_from_json(val, basis, params))
    if key == "floor_linear":
        return FloorLinear(*_pair(val, basis, params))
    if key == "floor_quad":
        return FloorQuad(*_pair(val, basis, params))
    raise ValueError(f"unknown expression node {key!r}")


def expr_to_json(e: Expr) -> dict:
    if isinstance(e, Exp):
        return {"exp": e.s.to_json()}
    if isinstance(e, Quad):
        return {"quad": e.t.to_json()}
    if isinstance(e, Omega):
        return {"omega": [e.alpha.to_json(), e.beta.to_json()]}
    if isinstance(e, Product):
        return {"prod": [expr_to_json(c) for c in e.children]}
    if isinstance(e, Sum):
        return {"sum": [{"coef": [c.real, c.imag], "expr": expr_to_json(t)} for c, t in e.terms]}
    if isinstance(e, Conj):
        return {"conj": expr_to_json(e.child)}
    if isinstance(e, Shift):
        return {"shift": {"k": e.k, "expr": expr_to_json(e.child)}}
    if isinstance(e, Orbit):
        s = e.system
        if isinstance(s, HeisenbergSystem):
            return {"orbit": {"system": "heisenberg", "alpha": [v.to_json() for v in s.alpha],
                              "beta": [v.to_json() for v in s.beta], "gamma": s.gamma.to_json()}}
        return {"orbit": {"system": "affine", "alpha": s.alpha.to_json(), "beta": s.beta.to_json()}}
    if isinstance(e, FloorLinear):
        return {"floor_linear": [e.alpha.to_json(), e.beta.to_json()]}
    if isinstance(e, FloorQuad):
        return {"floor_quad": [e.alpha.to_json(), e.beta.to_json()]}
    raise TypeError(f"unknown node {type(e).__name__}")


def load_expr(doc) -> Expr:
    """Read an expression document: either a bare node or
    ``{"schema": ..., "basis": ..., "params": {...}, "expr": node}``."""
    if isinstance(doc, dict) and "expr" in doc:
        basis = IrrationalBasis.from_json(doc["basis"]) if "basis" in doc else default_basis()
        params: dict = {}
        for name, v in doc.get("params", {}).items():
            params[name] = parse_real(v, basis, params)
        return expr_from_json(doc["expr"], basis, params)
    return expr_from_json(doc)
