import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BASIS
from nilseq.nilsys import AffineSkewSystem, HeisenbergSystem
from nilseq.seq import (
    KERNEL_N_MAX,
    Conj,
    DependentParametersError,
    Exp,
    FloorLinear,
    FloorQuad,
    MFamilyParams,
    Omega,
    Orbit,
    Product,
    Quad,
    Shift,
    Sum,
    eval,
    eval_range,
    expr_from_json,
    expr_to_json,
    load_expr,
    m_sequence,
    parse_real,
    shift,
)

X1, X2, X3, X4 = (BASIS.symbol(i) for i in range(4))

NODES = [
    Exp(X1 / 3),
    Quad(X2 - Fraction(1, 2)),
    Omega(X1, X2),
    Omega(X3 * 2 + 5, X4 / 3),
    FloorLinear(X1, X2),
    FloorLinear(BASIS.const(Fraction(7, 3)), X3),
    FloorQuad(X3, X4),
    Sum(((2 - 1j, Exp(X1)), (0.5, Quad(X2)))),
    Conj(Omega(X2, X3)),
    Shift(17, Omega(X1, X4)),
    Orbit(HeisenbergSystem([X1], [X2], X3)),
    Orbit(AffineSkewSystem(X1, X2)),
    Product((Exp(X3), Quad(X4), Omega(X1, X2))),
]


@pytest.mark.parametrize("node", NODES, ids=lambda e: type(e).__name__)
@given(n0=st.integers(-10**6, 10**6))
def test_window_matches_scalar(node, n0):
    vals = eval_range(node, n0, n0 + 20)
    ref = np.array([eval(node, n) for n in range(n0, n0 + 20)])
    assert np.max(np.abs(vals - ref)) < 1e-9


def test_omega_oracle():
    # mpmath evaluation on the double images of sqrt2, sqrt3
    assert abs(eval(Omega(X1, X2), 1000) - complex(0.112846049024455036, 1.00642797483799785)) < 1e-12


def test_beyond_kernel_range_falls_back():
    n0 = KERNEL_N_MAX + 5
    vals = eval_range(Omega(X1, X2), n0, n0 + 3)
    assert abs(vals[1] - eval(Omega(X1, X2), n0 + 1)) < 1e-15


def test_overflow():
    with pytest.raises(OverflowError):
        eval(Exp(X1), 2**53)


def test_shift_merging():
    e = shift(shift(Exp(X1), 3), -1)
    assert isinstance(e, Shift) and e.k == 2
    assert shift(e, -2) == Exp(X1)
    assert abs(e(5) - eval(Exp(X1), 7)) < 1e-15


def test_product_flattens_and_operators():
    p = Exp(X1) * Quad(X2) * Omega(X1, X2)
    assert len(p.children) == 3
    assert abs(p.conj()(4) - p(4).conjugate()) < 1e-15


def test_m_sequence():
    p = MFamilyParams(X3, X4, ((X1, X2),))
    seq = m_sequence(p)
    assert abs(seq(9) - eval(Exp(X3), 9) * eval(Quad(X4), 9) * eval(Omega(X1, X2), 9)) < 1e-15
    assert p.flat() == [X1, X2]
    with pytest.raises(DependentParametersError, match="alpha1"):
        m_sequence(MFamilyParams(X3, X4, ((X1, X1 * 2 + Fraction(1, 3)),)))


def test_unimodular_pieces():
    for e in (Exp(X1), Quad(X2), FloorLinear(X1, X2), FloorQuad(X1, X3)):
        assert np.allclose(np.abs(eval_range(e, 0, 1000)), 1.0)


@pytest.mark.parametrize("node", NODES, ids=lambda e: type(e).__name__)
def test_json_round_trip(node):
    doc = json.loads(json.dumps(expr_to_json(node)))
    assert expr_from_json(doc) == node


def test_parse_real_forms():
    assert parse_real("1/2 + xi1 - 3/4*xi2", BASIS) == X1 + Fraction(1, 2) - X2 * Fraction(3, 4)
    assert parse_real("-xi3", BASIS) == -X3
    assert parse_real(3, BASIS) == 3
    assert parse_real(0.25, BASIS) == Fraction(1, 4)
    assert parse_real({"const": "1/3", "coeffs": {"xi4": "2"}}, BASIS) == X4 * 2 + Fraction(1, 3)
    with pytest.raises(TypeError):
        parse_real(True, BASIS)


def test_load_document_with_params():
    doc = {
        "schema": "nilseq/1",
        "params": {"s": "xi3", "a": "xi1", "b": "a + xi2"},
        "expr": {"prod": [{"exp": "s"}, {"omega": ["a", "b"]}]},
    }
    e = load_expr(doc)
    assert e == Product((Exp(X3), Omega(X1, X1 + X2)))


def test_bad_json_nodes():
    with pytest.raises(ValueError):
        expr_from_json({"nope": 1})
    with pytest.raises(ValueError):
        expr_from_json({"exp": "xi1", "quad": "xi2"})


def test_small_closed_forms():
    assert abs(eval(Quad(BASIS.const(Fraction(1, 8))), 4) - (-1j)) < 1e-15
    for n in range(-5, 6):
        assert abs(eval(Exp(BASIS.const(Fraction(1, 2))), n) - (-1) ** n) < 1e-15
    from nilseq.theta import kappa
    assert abs(eval(Omega(X1, X2), 1) - kappa(2 ** 0.5, 3 ** 0.5)) < 1e-15
