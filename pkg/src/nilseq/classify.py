"""Exact classification calculus for ``q(t) omega(a_1,b_1) ... omega(a_d,b_d)``.

Two such sequences (parameters independent mod 1) lie in the same class iff
there are ``Q`` in ``Sp_2d(Q)`` and integers ``m >= 1, k, l`` with

    Q (a + k/m, b + l/m) = (a', b')   and   m (t - t') - sum(k_i b_i - l_i a_i) in Z.

Everything here is exact rational arithmetic.  Searching for a witness is only
a semi-decision: a failed search means "none within the bounds".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactnum import (
    BasisMismatchError,
    IrrationalBasis,
    QAffineReal,
    as_rational,
    default_basis,
    independent_mod1,
    is_integer,
    qa_mod1,
)
from .nilsys import HeisenbergSystem, PolarizedSystem, minimality_check

__all__ = [
    "ClassParams",
    "ClassWitness",
    "InternalConsistencyError",
    "RatMatrix",
    "ReductionResult",
    "SearchBounds",
    "SearchOutcome",
    "WitnessError",
    "apply_witness",
    "compose_witness",
    "invert_witness",
    "is_symplectic",
    "j_matrix",
    "polarized_to_heisenberg",
    "search_witness",
    "skew_normal_form",
    "verify_witness",
    "witness_from_shift",
]


class InternalConsistencyError(RuntimeError):
    pass


class WitnessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------
class RatMatrix:
    """Immutable matrix of Fractions."""

    __slots__ = ("rows", "_shape")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(as_rational(v) for v in r) for r in rows)
        if data:
            ncols = len(data[0])
            if any(len(r) != ncols for r in data):
                raise ValueError("ragged matrix")
        self.rows = data
        self._shape = (len(data), ncols or 0)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> RatMatrix:
        return cls([[0] * c for _ in range(r)], c)

    @classmethod
    def block(cls, A, B, C, D) -> RatMatrix:
        top = [ra + rb for ra, rb in zip(A.rows, B.rows)]
        bot = [rc + rd for rc, rd in zip(C.rows, D.rows)]
        return cls(top + bot, A.shape[1] + B.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def sub(self, r0, r1, c0, c1) -> RatMatrix:
        return RatMatrix([r[c0:c1] for r in self.rows[r0:r1]], c1 - c0)

    @property
    def T(self) -> RatMatrix:
        r, c = self.shape
        return RatMatrix([[self.rows[i][j] for i in range(r)] for j in range(c)], r)

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __neg__(self):
        return RatMatrix([[-v for v in r] for r in self.rows], self.shape[1])

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.shape[1])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = as_rational(c)
        return RatMatrix([[c * v for v in r] for r in self.rows], self.shape[1])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.T.rows
            return RatMatrix(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows],
                other.shape[1],
            )
        return self.apply(other)

    def apply(self, vec: Sequence):
        """Matrix times a vector of rationals or :class:`QAffineReal`."""
        if len(vec) != self.shape[1]:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            acc = 0
            for a, v in zip(r, vec):
                if a:
                    acc = v * a + acc
            out.append(acc)
        return out

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def _eliminate(self):
        """Row-reduce ``[self | I]``; returns (det, inverse or None)."""
        n = self.shape[0]
        m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        det = Fraction(1)
        for col in range(n):
            piv = next((i for i in range(col, n) if m[i][col]), None)
            if piv is None:
                return Fraction(0), None
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            p = m[col][col]
            det *= p
            m[col] = [v / p for v in m[col]]
            for i in range(n):
                if i != col and m[i][col]:
                    f = m[i][col]
                    m[i] = [a - f * b for a, b in zip(m[i], m[col])]
        return det, RatMatrix([r[n:] for r in m], n)

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        return self._eliminate()[0]

    def inverse(self) -> RatMatrix:
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        det, inv = self._eliminate()
        if inv is None:
            raise ZeroDivisionError("singular matrix")
        return inv

    def height(self) -> int:
        """Largest ``|numerator|`` or denominator among the entries."""
        return max((max(abs(v.numerator), v.denominator) for r in self.rows for v in r), default=0)

    def to_json(self) -> list:
        return [[str(v) for v in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> RatMatrix:
        return cls(data, len(data[0]) if data else 0)

    def __repr__(self):
        return "RatMatrix(" + repr([[str(v) for v in r] for r in self.rows]) + ")"


def j_matrix(d: int) -> RatMatrix:
    """``[[0, I_d], [-I_d, 0]]``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    I = RatMatrix.identity(d)
    Z = RatMatrix.zeros(d, d)
    return RatMatrix.block(Z, I, -I, Z)


def is_symplectic(M: RatMatrix) -> bool:
    """``M^T J M == J``, cross-checked against the block criteria."""
    r, c = M.shape
    if r != c:
        raise ValueError("symplectic test needs a square matrix")
    if r % 2:
        raise ValueError("symplectic test needs even dimension")
    if r == 0:
        return True
    d = r // 2
    J = j_matrix(d)
    direct = M.T @ J @ M == J
    A, B = M.sub(0, d, 0, d), M.sub(0, d, d, r)
    C, D = M.sub(d, r, 0, d), M.sub(d, r, d, r)
    AtC, BtD = A.T @ C, B.T @ D
    blocks = AtC == AtC.T and BtD == BtD.T and (A.T @ D - C.T @ B) == RatMatrix.identity(d)
    if direct != blocks:
        raise InternalConsistencyError("block criterion disagrees with M^T J M = J")
    return direct


def skew_normal_form(B: RatMatrix) -> RatMatrix:
    """Rational ``Phi`` with ``Phi^T J Phi = B`` for a nonsingular skew ``B``.

    Symplectic Gram-Schmidt for the form ``(u, v) -> u^T B v``: pick ``e`` and a
    partner ``f`` with pairing 1, project the remaining vectors off
    ``span(e, f)``, repeat.  With ``P = [e_1..e_d | f_1..f_d]`` one has
    ``P^T B P = J``, so ``Phi = P^-1``.
    """
    n, c = B.shape
    if n != c or n % 2 or n == 0:
        raise ValueError("B must be square of positive even size")
    if B.T != -B:
        raise ValueError("B is not skew-symmetric")
    if B.det() == 0:
        raise ValueError("B is singular")

    def form(u, v):
        return sum((u[i] * sum((B[i, j] * v[j] for j in range(n) if B[i, j]), Fraction(0)) for i in range(n) if u[i]), Fraction(0))

    pool = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    es, fs = [], []
    while pool:
        e = pool.pop(0)
        idx = next((i for i, v in enumerate(pool) if form(e, v)), None)
        if idx is None:
            raise InternalConsistencyError("no partner vector; B cannot be nonsingular")
        f = pool.pop(idx)
        scale = form(e, f)
        f = [v / scale for v in f]
        es.append(e)
        fs.append(f)
        rest = []
        for w in pool:
            # w <- w - B(w, f) e + B(w, e) f  makes w orthogonal to e and f
            be, bf = form(w, e), form(w, f)
            rest.append([wi + be * fi - bf * ei for wi, ei, fi in zip(w, e, f)])
        pool = rest
    P = RatMatrix([[v[i] for v in es + fs] for i in range(n)], n)
    Phi = P.inverse()
    if Phi.T @ j_matrix(n // 2) @ Phi != B:
        raise InternalConsistencyError("normal form failed exact re-multiplication")
    return Phi


# ---------------------------------------------------------------------------
# class parameters and witnesses
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ClassParams:
    """Canonical data ``(t, [(a_1, b_1), ..., (a_d, b_d)])`` with ``t`` kept mod 1."""

    t: QAffineReal
    pairs: tuple = ()
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "t", qa_mod1(self.t))
        if self.check and self.pairs and not independent_mod1(self.vector()):
            raise ValueError("alpha/beta parameters must be rationally independent mod 1")

    @property
    def d(self) -> int:
        return len(self.pairs)

    def vector(self) -> list[QAffineReal]:
        return [a for a, _ in self.pairs] + [b for _, b in self.pairs]

    def to_json(self) -> dict:
        return {"t": self.t.to_json(), "pairs": [[a.to_json(), b.to_json()] for a, b in self.pairs]}

    @classmethod
    def from_json(cls, data, basis=None, params=None) -> ClassParams:
        from .seq import parse_real

        if basis is None:
            basis = IrrationalBasis.from_json(data["basis"]) if isinstance(data.get("basis"), dict) else default_basis()
        pairs = [(parse_real(a, basis, params), parse_real(b, basis, params)) for a, b in data.get("pairs", [])]
        return cls(parse_real(data.get("t", 0), basis, params), pairs)


@dataclass(frozen=True)
class ClassWitness:
    Q: RatMatrix
    m: int
    k: tuple
    l: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        if int(self.m) < 1:
            raise ValueError("m must be >= 1")
        object.__setattr__(self, "m", int(self.m))
        d = len(self.k)
        if len(self.l) != d or self.Q.shape != (2 * d, 2 * d):
            raise ValueError("witness dimensions disagree")
        if d and not is_symplectic(self.Q):
            raise ValueError("Q is not symplectic")

    @property
    def d(self) -> int:
        return len(self.k)

    @classmethod
    def identity(cls, d: int) -> ClassWitness:
        return cls(RatMatrix.identity(2 * d), 1, (0,) * d, (0,) * d)

    def to_json(self) -> dict:
        return {"Q": self.Q.to_json(), "m": self.m, "k": list(self.k), "l": list(self.l)}

    @classmethod
    def from_json(cls, data) -> ClassWitness:
        d = len(data["k"])
        Q = RatMatrix.from_json(data["Q"]) if data.get("Q") else RatMatrix.zeros(0, 0)
        if d and Q.shape == (0, 0):
            Q = RatMatrix.identity(2 * d)
        return cls(Q, data["m"], data["k"], data["l"])


def _check_dims(p: ClassParams, pp: ClassParams, w: ClassWitness | None = None):
    if p.d != pp.d:
        raise ValueError(f"dimension mismatch: d={p.d} vs d'={pp.d}")
    if w is not None and w.d != p.d:
        raise ValueError(f"witness has d={w.d}, parameters have d={p.d}")
    if p.t.basis != pp.t.basis:
        raise BasisMismatchError("parameters live on different bases")


def _shifted(p: ClassParams, w: ClassWitness) -> list[QAffineReal]:
    shifts = [Fraction(v, w.m) for v in w.k + w.l]
    return [x + s for x, s in zip(p.vector(), shifts)]


def _twist_residual(p: ClassParams, pp: ClassParams, w: ClassWitness) -> QAffineReal:
    """``m (t - t') - sum(k_i b_i - l_i a_i)``; integral iff the twist condition holds."""
    r = (p.t - pp.t) * w.m
    for (a, b), k, l in zip(p.pairs, w.k, w.l):
        r = r - b * k + a * l
    return r


def verify_witness(p: ClassParams, pp: ClassParams, w: ClassWitness) -> bool:
    _check_dims(p, pp, w)
    if p.d and w.Q.apply(_shifted(p, w)) != pp.vector():
        return False
    return is_integer(_twist_residual(p, pp, w))


def apply_witness(p: ClassParams, w: ClassWitness, t_prime) -> ClassParams:
    """Parameters reached from ``p`` through ``w``, with the caller's ``t'``."""
    if w.d != p.d:
        raise ValueError("witness and parameters disagree on d")
    vec = w.Q.apply(_shifted(p, w)) if p.d else []
    d = p.d
    out = ClassParams(t_prime if isinstance(t_prime, QAffineReal) else p.t.basis.const(t_prime),
                      list(zip(vec[:d], vec[d:])))
    if not is_integer(_twist_residual(p, out, w)):
        raise WitnessError("t' violates the twist condition m(t - t') = sum(k b - l a) mod 1")
    return out


def twist_target(p: ClassParams, w: ClassWitness) -> QAffineReal:
    """The ``t'`` (mod 1/m) forced by ``w``: ``t - sum(k_i b_i - l_i a_i)/m``."""
    s = p.t.basis.const(0)
    for (a, b), k, l in zip(p.pairs, w.k, w.l):
        s = s + b * k - a * l
    return qa_mod1(p.t - s / w.m)


def witness_from_shift(p: ClassParams, pp: ClassParams, Q: RatMatrix, shift: Sequence[Fraction]) -> ClassWitness:
    """Smallest witness ``(Q, m, k, l)`` realizing the rational shift vector ``(k, l)/m``.

    ``m`` is the least common denominator of the shift, then multiplied by the
    denominator of the (necessarily rational) twist residual.
    """
    d = p.d
    shift = [as_rational(v) for v in shift]
    m = 1
    for v in shift:
        m = m * v.denominator // math.gcd(m, v.denominator)
    w = ClassWitness(Q, m, [v * m for v in shift[:d]], [v * m for v in shift[d:]])
    r = _twist_residual(p, pp, w)
    if not r.is_rational:
        raise WitnessError("twist residual is irrational: no witness with this Q and shift")
    j = r.const.denominator
    return ClassWitness(Q, m * j, [v * j for v in w.k], [v * j for v in w.l])


def invert_witness(p: ClassParams, pp: ClassParams, w: ClassWitness) -> ClassWitness:
    """Witness carrying ``pp`` back to ``p``; shift solved exactly as ``-Q u``."""
    u = [Fraction(v, w.m) for v in w.k + w.l]
    back = [-v for v in w.Q.apply(u)] if p.d else []
    out = witness_from_shift(pp, p, w.Q.inverse() if p.d else w.Q, back)
    if not verify_witness(pp, p, out):
        raise InternalConsistencyError("inverse witness failed verification")
    return out


def compose_witness(p: ClassParams, pp: ClassParams, ppp: ClassParams,
                    w1: ClassWitness, w2: ClassWitness) -> ClassWitness:
    """Witness ``p -> ppp`` from ``w1: p -> pp`` and ``w2: pp -> ppp``.

    ``Q = Q2 Q1`` and the shift is ``u1 + Q1^-1 u2``, found by exact solve.
    """
    if p.d == 0:
        out = witness_from_shift(p, ppp, w1.Q, [])
    else:
        u1 = [Fraction(v, w1.m) for v in w1.k + w1.l]
        u2 = [Fraction(v, w2.m) for v in w2.k + w2.l]
        u = [a + b for a, b in zip(u1, w1.Q.inverse().apply(u2))]
        out = witness_from_shift(p, ppp, w2.Q @ w1.Q, u)
    if not verify_witness(p, ppp, out):
        raise InternalConsistencyError("composed witness failed verification")
    return out


@dataclass(frozen=True)
class SearchBounds:
    m_max: int = 6
    shift_max: int = 4
    height_max: int = 5


@dataclass(frozen=True)
class SearchOutcome:
    witness: ClassWitness | None
    searched: bool
    candidates: int = 0
    reason: str = ""


def _solve_Q(p: ClassParams, pp: ClassParams) -> RatMatrix | None:
    """The unique rational ``Q`` matching the irrational parts, if any.

    Shifts only move constant terms, so ``Q`` is pinned by the coefficient
    matrix of ``p``, which has full row rank by independence mod 1.
    """
    n = 2 * p.d
    X = RatMatrix([v.coeff_vector() for v in p.vector()])
    Y = RatMatrix([v.coeff_vector() for v in pp.vector()])
    G = X @ X.T
    Q = Y @ X.T @ G.inverse()
    if Q @ X != Y:
        return None
    return Q


def search_witness(p: ClassParams, pp: ClassParams, bounds: SearchBounds | None = None) -> SearchOutcome:
    """Bounded search over ``m <= m_max``, ``|k|, |l| <= shift_max`` and
    symplectic ``Q`` of height at most ``height_max``.

    The result is the first verifying candidate in lexicographic order of
    ``(m, k, l)``.  Once ``Q`` is fixed the shift ``u = Q^-1 v' - v`` is forced,
    so for each ``m`` at most one ``(k, l) = m u`` can succeed; only that one is
    verified.  ``d >= 2`` is not searched.
    """
    bounds = bounds or SearchBounds()
    _check_dims(p, pp)
    d = p.d
    if d >= 2:
        return SearchOutcome(None, False, 0, "exhaustive search only for d <= 1")
    if d == 0:
        Q = RatMatrix.zeros(0, 0)
        u: list[Fraction] = []
    else:
        Q = _solve_Q(p, pp)
        if Q is None:
            return SearchOutcome(None, True, 0, "no rational Q maps the irrational parts")
        if Q.height() > bounds.height_max:
            return SearchOutcome(None, True, 0, f"Q has height {Q.height()} > {bounds.height_max}")
        if not is_symplectic(Q):
            return SearchOutcome(None, True, 0, "the matching Q is not symplectic")
        diff = [b - a for a, b in zip(p.vector(), Q.inverse().apply(pp.vector()))]
        if not all(v.is_rational for v in diff):
            return SearchOutcome(None, True, 0, "shift would have to be irrational")
        u = [v.const for v in diff]
    count = 0
    for m in range(1, bounds.m_max + 1):
        count += 1
        if any((v * m).denominator != 1 or abs(v * m) > bounds.shift_max for v in u):
            continue
        w = ClassWitness(Q, m, [int(v * m) for v in u[:d]], [int(v * m) for v in u[d:]])
        if verify_witness(p, pp, w):
            return SearchOutcome(w, True, count)
    return SearchOutcome(None, True, count, "no witness within bounds")


# ---------------------------------------------------------------------------
# connected systems
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ReductionResult:
    Phi: RatMatrix
    system: HeisenbergSystem
    input_minimal: bool
    output_minimal: bool


def polarized_to_heisenberg(sys: PolarizedSystem) -> ReductionResult:
    """Heisenberg translation ``(Phi delta, 1)`` with ``Phi^T J Phi = A^T - A``."""
    B = RatMatrix(sys.B)
    Phi = skew_normal_form(B)
    image = Phi.apply(list(sys.delta))
    d = sys.d
    basis = sys.gamma0.basis
    image = [v if isinstance(v, QAffineReal) else basis.const(v) for v in image]
    heis = HeisenbergSystem(image[:d], image[d:], basis.const(0))
    before = minimality_check(sys)
    after = minimality_check(heis)
    if before != after:
        raise InternalConsistencyError("an invertible rational map changed minimality")
    return ReductionResult(Phi, heis, before, after)
