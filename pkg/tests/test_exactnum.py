import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BASIS, qaffine, small_fracs
from nilseq.exactnum import (
    BasisMismatchError,
    IrrationalBasis,
    QAffineReal,
    as_rational,
    frac_part,
    independent_mod1,
    integer_relation,
    is_integer,
    qa_mod1,
    rank,
    to_float,
)


def test_as_rational_forms():
    assert as_rational("3/4") == Fraction(3, 4)
    assert as_rational(2) == 2
    assert as_rational(0.5) == Fraction(1, 2)
    with pytest.raises(ValueError):
        as_rational(float("nan"))
    with pytest.raises(TypeError):
        as_rational(True)


def test_default_basis_values():
    assert BASIS.labels == ("xi1", "xi2", "xi3", "xi4")
    assert BASIS.approx[0] == 2 ** 0.5
    assert BASIS.approx[3] == pytest.approx(0.14159265358979312)


def test_arithmetic_and_str(xi):
    a = xi[0] + Fraction(1, 2) - xi[1] * Fraction(3, 4)
    assert str(a) == "1/2 + xi1 - 3/4*xi2"
    assert (a - a) == 0
    assert (a * 2).coeffs[1] == Fraction(-3, 2)
    with pytest.raises(TypeError):
        xi[0] * xi[1]


def test_basis_mismatch(xi):
    other = IrrationalBasis.from_entries("other", [("e", 2.718281828459045, "e")])
    with pytest.raises(BasisMismatchError):
        xi[0] + other.symbol("e")


@given(qaffine(), qaffine())
def test_addition_commutes_and_float_matches(a, b):
    assert a + b == b + a
    assert to_float(a + b) == pytest.approx(to_float(a) + to_float(b), abs=1e-12)


@given(qaffine())
def test_json_round_trip(a):
    assert QAffineReal.from_json(json.loads(json.dumps(a.to_json()))) == a


@given(small_fracs)
def test_frac_part_range(x):
    f = frac_part(x)
    assert 0 <= f < 1 and (x - f).denominator == 1


@given(qaffine())
def test_mod1_keeps_irrational_part(a):
    r = qa_mod1(a)
    assert r.coeffs == a.coeffs and 0 <= r.const < 1
    assert is_integer(a - r)


def test_independence(xi):
    assert independent_mod1(xi)
    assert independent_mod1([])
    assert not independent_mod1([xi[0], xi[0] * 2 + Fraction(1, 3)])
    assert not independent_mod1([xi[0], BASIS.const(Fraction(1, 2))])


def test_integer_relation_is_primitive(xi):
    rel = integer_relation([xi[0] / 2, xi[1], xi[0] / 3 + xi[1]])
    assert rel is not None
    total = xi[0] / 2 * rel[0] + xi[1] * rel[1] + (xi[0] / 3 + xi[1]) * rel[2]
    assert total.is_rational
    assert sorted(map(abs, rel)) == [2, 3, 3]
    assert integer_relation(xi) is None


def test_rank():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert rank([]) == 0


def test_rational_image_is_exact(xi):
    a = xi[0] * Fraction(1, 3) + 2
    assert a.rational_image() == Fraction(1, 3) * Fraction(2 ** 0.5) + 2
