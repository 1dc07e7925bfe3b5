from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BASIS
from nilseq.acceptance import _random_sl2, random_independent, random_qaffine, random_symplectic_generator
from nilseq.average import orthogonality_test
from nilseq.classify import (
    ClassParams,
    ClassWitness,
    RatMatrix,
    SearchBounds,
    WitnessError,
    apply_witness,
    compose_witness,
    invert_witness,
    is_symplectic,
    j_matrix,
    polarized_to_heisenberg,
    search_witness,
    skew_normal_form,
    twist_target,
    verify_witness,
)
from nilseq.exactnum import BasisMismatchError, IrrationalBasis
from nilseq.nilsys import PolarizedSystem
from nilseq.seq import MFamilyParams, m_sequence

X1, X2, X3, X4 = (BASIS.symbol(i) for i in range(4))
ZERO = BASIS.const(0)
I2 = RatMatrix.identity(2)
NONE = RatMatrix.zeros(0, 0)


def rng_for(seed):
    return np.random.Generator(np.random.Philox(key=[seed, 99]))


# --- matrices ---------------------------------------------------------------
def test_j_matrix():
    J = j_matrix(1)
    assert J == RatMatrix([[0, 1], [-1, 0]])
    J3 = j_matrix(3)
    assert J3 @ J3 == -RatMatrix.identity(6)
    assert J3.T == -J3
    with pytest.raises(ValueError):
        j_matrix(0)


def test_ratmatrix_basics():
    M = RatMatrix([[1, "1/2"], [3, 4]])
    assert M.det() == Fraction(5, 2)
    assert M @ M.inverse() == I2
    assert RatMatrix.from_json(M.to_json()) == M
    assert M.height() == 4
    with pytest.raises(ValueError):
        RatMatrix([[1, 2], [3]])
    with pytest.raises(ZeroDivisionError):
        RatMatrix([[1, 2], [2, 4]]).inverse()


@pytest.mark.parametrize("rows,expected", [
    ([[0, 1], [-1, 0]], True),
    ([[1, 0], [0, 1]], True),
    ([[1, 1], [0, 1]], True),
    ([[2, 0], [0, 1]], False),
])
def test_is_symplectic_examples(rows, expected):
    assert is_symplectic(RatMatrix(rows)) is expected


def test_is_symplectic_shape_errors():
    with pytest.raises(ValueError):
        is_symplectic(RatMatrix.identity(3))
    with pytest.raises(ValueError):
        is_symplectic(RatMatrix([[1, 0, 0], [0, 1, 0]]))


@given(st.integers(0, 2**32), st.integers(1, 3))
def test_symplectic_group_closure(seed, d):
    rng = rng_for(seed)
    M = RatMatrix.identity(2 * d)
    N = RatMatrix.identity(2 * d)
    for _ in range(3):
        M = M @ random_symplectic_generator(rng, d)
        N = N @ random_symplectic_generator(rng, d)
    assert is_symplectic(M @ N)
    assert is_symplectic(M.inverse())
    assert M.det() == 1


def test_skew_normal_form_examples():
    assert skew_normal_form(j_matrix(2)) == RatMatrix.identity(4)
    c = Fraction(3, 7)
    B = j_matrix(2) * c
    Phi = skew_normal_form(B)
    assert Phi.T @ j_matrix(2) @ Phi == B


@given(st.integers(0, 2**32), st.sampled_from([2, 4, 6]))
def test_skew_normal_form_random(seed, n):
    rng = rng_for(seed)
    while True:
        U = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
                U[i][j], U[j][i] = v, -v
        B = RatMatrix(U)
        if B.det():
            break
    Phi = skew_normal_form(B)
    assert Phi.T @ j_matrix(n // 2) @ Phi == B


def test_skew_normal_form_errors():
    with pytest.raises(ValueError, match="skew"):
        skew_normal_form(RatMatrix([[0, 1], [1, 0]]))
    with pytest.raises(ValueError, match="singular"):
        skew_normal_form(RatMatrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    with pytest.raises(ValueError):
        skew_normal_form(RatMatrix.zeros(3, 3))


# --- witnesses ---------------------------------------------------------------
P_HALF = ClassParams(X2 / 2, [(X1, X2)])
P_SHIFTED = ClassParams(ZERO, [(X1 + Fraction(1, 2), X2)])
W_HALF = ClassWitness(I2, 2, [1], [0])


def test_params_invariants():
    assert ClassParams(X1 + Fraction(7, 2)).t == X1 + Fraction(1, 2)
    with pytest.raises(ValueError):
        ClassParams(ZERO, [(X1, X1 * 2)])
    with pytest.raises(ValueError):
        ClassWitness(RatMatrix([[2, 0], [0, 1]]), 1, [0], [0])
    with pytest.raises(ValueError):
        ClassWitness(I2, 0, [0], [0])


def test_verify_examples():
    assert verify_witness(P_HALF, P_SHIFTED, W_HALF)
    assert verify_witness(P_HALF, P_HALF, ClassWitness.identity(1))
    assert not verify_witness(P_HALF, P_SHIFTED, ClassWitness.identity(1))


def test_verify_d0():
    p, pp = ClassParams(BASIS.const(Fraction(1, 3))), ClassParams(ZERO)
    for m in (3, 6, 9):
        assert verify_witness(p, pp, ClassWitness(NONE, m, [], []))
    assert not verify_witness(p, pp, ClassWitness(NONE, 2, [], []))
    assert not verify_witness(ClassParams(X1), pp, ClassWitness(NONE, 3, [], []))


def test_verify_errors():
    with pytest.raises(ValueError):
        verify_witness(P_HALF, ClassParams(ZERO), W_HALF)
    other = IrrationalBasis.from_entries("e", [("e1", 2.718281828459045, "e"), ("e2", 0.5772156649015329, "g")])
    q = ClassParams(other.const(0), [(other.symbol(0), other.symbol(1))])
    with pytest.raises(BasisMismatchError):
        verify_witness(P_HALF, q, W_HALF)


def test_apply_examples():
    assert apply_witness(P_HALF, ClassWitness.identity(1), P_HALF.t) == P_HALF
    out = apply_witness(P_HALF, W_HALF, ZERO)
    assert out == P_SHIFTED
    with pytest.raises(WitnessError):
        apply_witness(P_HALF, W_HALF, X2)


def test_witness_json():
    assert ClassWitness.from_json(W_HALF.to_json()) == W_HALF


@st.composite
def chains(draw):
    rng = rng_for(draw(st.integers(0, 2**32)))
    a, b = random_independent(rng, 2, BASIS)
    p = ClassParams(random_qaffine(rng, BASIS), [(a, b)])
    ws = [ClassWitness(_random_sl2(rng, 5), int(rng.integers(1, 7)), [int(rng.integers(-4, 5))],
                       [int(rng.integers(-4, 5))]) for _ in range(2)]
    return p, ws


@given(chains())
def test_inverse_round_trip(chain):
    p, (w, _) = chain
    pp = apply_witness(p, w, twist_target(p, w))
    back = invert_witness(p, pp, w)
    assert verify_witness(pp, p, back)
    assert apply_witness(pp, back, p.t) == p


@given(chains())
def test_transitivity(chain):
    p, (w1, w2) = chain
    pp = apply_witness(p, w1, twist_target(p, w1))
    ppp = apply_witness(pp, w2, twist_target(pp, w2))
    w = compose_witness(p, pp, ppp, w1, w2)
    assert w.Q == w2.Q @ w1.Q
    assert verify_witness(p, ppp, w)


@given(chains())
def test_search_recovers_applied_witness(chain):
    p, (w, _) = chain
    pp = apply_witness(p, w, twist_target(p, w))
    out = search_witness(p, pp, SearchBounds(6, 4, 5))
    assert out.searched and out.witness is not None
    assert verify_witness(p, pp, out.witness)
    assert out.witness.m <= w.m


def test_search_examples():
    out = search_witness(P_HALF, P_SHIFTED)
    assert out.witness == W_HALF
    p = ClassParams(ZERO, [(X1, X2)])
    rotated = search_witness(p, ClassParams(ZERO, [(X2, -X1)])).witness
    assert rotated.Q == j_matrix(1) and rotated.m == 1
    # the lift 1 - xi1 needs a k-shift, and then the twist forces t' = xi2
    lifted = search_witness(p, ClassParams(X2, [(X2, 1 - X1)])).witness
    assert lifted.Q == j_matrix(1) and lifted.k == (-1,)
    assert search_witness(p, ClassParams(ZERO, [(X2, 1 - X1)])).witness is None


def test_search_absent_and_unsearched():
    p = ClassParams(ZERO, [(X1, X2)])
    out = search_witness(p, ClassParams(ZERO, [(X3, X4)]))
    assert out.witness is None and out.searched
    out = search_witness(p, ClassParams(ZERO, [(X1 * 7, X2 / 7)]), SearchBounds(6, 4, 5))
    assert out.witness is None and "height" in out.reason
    p2 = ClassParams(ZERO, [(X1, X2), (X3, X4)])
    out = search_witness(p2, p2)
    assert out.witness is None and not out.searched


def test_d0_search():
    out = search_witness(ClassParams(BASIS.const(Fraction(2, 5))), ClassParams(ZERO))
    assert out.witness.m == 5
    assert search_witness(ClassParams(X1), ClassParams(ZERO)).witness is None


# --- connected systems -------------------------------------------------------
def test_reduce_upper_corner():
    sys = PolarizedSystem([[0, 1], [0, 0]], [X1, X2], ZERO)
    red = polarized_to_heisenberg(sys)
    assert red.Phi.T @ j_matrix(1) @ red.Phi == RatMatrix(sys.B)
    assert red.system.alpha == (X1,) and red.system.beta == (-X2,)
    assert red.system.gamma == 0
    assert red.input_minimal and red.output_minimal


def test_reduce_dependent_delta():
    sys = PolarizedSystem([[0, 1], [0, 0]], [X1, X1 * 2 + Fraction(1, 3)], ZERO)
    red = polarized_to_heisenberg(sys)
    assert not red.input_minimal and not red.output_minimal


@given(st.integers(0, 2**32))
def test_reduce_random_d2(seed):
    rng = rng_for(seed)
    while True:
        A = [[int(rng.integers(-3, 4)) for _ in range(4)] for _ in range(4)]
        try:
            sys = PolarizedSystem(A, [X1, X2, X3, X4], ZERO)
            break
        except ValueError:
            continue
    red = polarized_to_heisenberg(sys)
    assert red.Phi.T @ j_matrix(2) @ red.Phi == RatMatrix(sys.B)
    assert red.output_minimal


# --- numeric consequences ----------------------------------------------------
def test_unrelated_classes_are_orthogonal():
    a = m_sequence(MFamilyParams(ZERO, ZERO, ((X1, X2),)))
    b = m_sequence(MFamilyParams(ZERO, ZERO, ((X3, X4),)))
    assert search_witness(ClassParams(ZERO, [(X1, X2)]), ClassParams(ZERO, [(X3, X4)])).witness is None
    assert orthogonality_test(a, b, 200000, 0.05).kind == "consistent_orthogonal"
