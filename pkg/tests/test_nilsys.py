import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BASIS, small_fracs
from nilseq.nilsys import (
    AffineSkewSystem,
    HeisenbergElement,
    HeisenbergPoint,
    HeisenbergSystem,
    PolarizedSystem,
    affine_orbit_value,
    affine_orbit_values,
    c1_gaussian,
    cis,
    fiber_fourier,
    h_commutator,
    h_identity,
    h_inv,
    h_mul,
    heisenberg_orbit_value,
    minimality_check,
    polarized_commutator,
    polarized_inv,
    polarized_mul,
    polarized_tau_pow,
    reduce_to_fundamental,
    tau_pow,
)
from nilseq.seq import Exp, Omega, Product, Quad, eval

# mpmath: kappa(n a, n b) e(n(n-1)/2 a b) on the double images of sqrt2, sqrt3
OMEGA_ORACLE = {
    1: complex(0.218542288906849308, 0.601401379958089438),
    7: complex(-0.602645021097932328, -0.849092319514539098),
    100: complex(0.683596835650287895, 0.305005846319729604),
    -13: complex(0.0523578321002628177, 0.320374557027815981),
    1000: complex(0.112846049024455036, 1.00642797483799785),
}


@st.composite
def elements(draw, d=1):
    vec = st.lists(small_fracs, min_size=d, max_size=d)
    return HeisenbergElement(tuple(draw(vec)), tuple(draw(vec)), cis(draw(small_fracs)))


def close(g, h, tol=1e-12):
    return g.x == h.x and g.y == h.y and abs(g.z - h.z) < tol


@given(elements(), elements(), elements())
def test_associative(a, b, c):
    assert close(h_mul(h_mul(a, b), c), h_mul(a, h_mul(b, c)))


@given(elements(2))
def test_inverse_and_identity(g):
    assert close(h_mul(g, h_inv(g)), h_identity(2))
    assert close(h_mul(h_identity(2), g), g)


@given(elements(), elements())
def test_commutator_is_central(g, h):
    c = h_commutator(g, h)
    direct = h_mul(h_mul(g, h), h_inv(h_mul(h, g)))
    assert close(c, direct)
    assert abs(c.z - cis(g.x[0] * h.y[0] - h.x[0] * g.y[0])) < 1e-12


@given(elements(2))
def test_reduce_round_trip(g):
    point, (k, l) = reduce_to_fundamental(g)
    assert all(0 <= v < 1 for v in point.x + point.y)
    assert close(h_mul(point, HeisenbergElement(k, l, 1)), g)


@given(elements(), st.integers(-3, 3), st.integers(-3, 3))
def test_gaussian_lattice_invariant(g, k, l):
    shifted = h_mul(g, HeisenbergElement((k,), (l,), 1))
    assert abs(c1_gaussian(shifted) - c1_gaussian(g)) < 1e-12


@given(elements(), small_fracs)
def test_gaussian_fiber_weight_one(g, u):
    moved = HeisenbergElement(g.x, g.y, g.z * cis(u))
    assert abs(c1_gaussian(moved) - cis(u) * c1_gaussian(g)) < 1e-12


def test_element_validation():
    with pytest.raises(ValueError):
        HeisenbergElement((0,), (0,), 2.0)
    with pytest.raises(ValueError):
        HeisenbergPoint((Fraction(3, 2),), (0,), 1)
    with pytest.raises(ValueError):
        h_mul(h_identity(1), h_identity(2))


def test_tau_pow_matches_repeated_product(xi):
    sys = HeisenbergSystem([xi[0]], [xi[1]], xi[2] / 5)
    g = h_identity(1)
    for n in range(1, 8):
        g = h_mul(g, sys.tau())
        assert close(tau_pow(sys, n), g, 1e-11)


@pytest.mark.parametrize("n,expected", sorted(OMEGA_ORACLE.items()))
def test_orbit_matches_oracle(xi, n, expected):
    sys = HeisenbergSystem([xi[0]], [xi[1]], BASIS.const(0))
    assert abs(heisenberg_orbit_value(sys, n) - expected) < 1e-12


def test_orbit_fast_path_matches_group_route(xi):
    sys = HeisenbergSystem([xi[0], xi[2] / 3], [xi[1], xi[3] - 2], xi[0] / 7)
    for n in range(-500, 500, 13):
        slow = c1_gaussian(reduce_to_fundamental(tau_pow(sys, n))[0])
        assert abs(heisenberg_orbit_value(sys, n) - slow) < 1e-12


def test_orbit_is_closed_form(xi):
    sys = HeisenbergSystem([xi[0], xi[2]], [xi[1], xi[3]], xi[1] / 2)
    closed = Product((Exp(sys.gamma), Omega(xi[0], xi[1]), Omega(xi[2], xi[3])))
    for n in (-9999, -5, 0, 1, 77, 10000):
        assert abs(heisenberg_orbit_value(sys, n) - eval(closed, n)) < 1e-9


def test_affine_iterated_matches_closed(xi):
    sys = AffineSkewSystem(xi[0] * 3 + Fraction(7, 2), xi[3] - 5)
    for step in (1, -1):
        it, closed = affine_orbit_values(sys, 50000, step)
        assert np.max(np.abs(it - closed)) < 1e-10
    assert abs(affine_orbit_value(sys, 1234) - eval(Quad(sys.alpha) * Exp(sys.beta), 1234)) < 1e-12
    assert abs(affine_orbit_value(sys, -77) - eval(Quad(sys.alpha) * Exp(sys.beta), -77)) < 1e-12


def test_affine_step_validation(xi):
    with pytest.raises(ValueError):
        affine_orbit_values(AffineSkewSystem(xi[0], xi[1]), 5, 2)


def test_polarized_lower_corner_is_heisenberg(xi):
    sys = PolarizedSystem([[0, 0], [1, 0]], [xi[0], xi[1]], BASIS.const(0))
    g = ((Fraction(1, 3), Fraction(2, 7)), cis(Fraction(1, 5)))
    h = ((Fraction(-4, 9), Fraction(5, 2)), 1)
    x, z = polarized_mul(sys, g, h)
    ref = h_mul(HeisenbergElement((g[0][0],), (g[0][1],), g[1]), HeisenbergElement((h[0][0],), (h[0][1],), h[1]))
    assert x == (ref.x[0], ref.y[0]) and abs(z - ref.z) < 1e-12


def test_polarized_group_laws(xi):
    A = [[1, 2, 0, -1], [0, 0, 3, 1], [2, -1, 0, 0], [0, 1, 1, 2]]
    sys = PolarizedSystem(A, xi, BASIS.const(0))
    g = ((Fraction(1, 2), Fraction(1, 3), 0, Fraction(-2, 5)), 1)
    h = ((Fraction(3, 4), 0, Fraction(1, 7), 1), cis(Fraction(1, 9)))
    x, z = polarized_mul(sys, g, polarized_inv(sys, g))
    assert all(v == 0 for v in x) and abs(z - 1) < 1e-12
    gh = polarized_mul(sys, g, h)
    hg_inv = polarized_inv(sys, polarized_mul(sys, h, g))
    x, z = polarized_mul(sys, gh, hg_inv)
    assert all(v == 0 for v in x)
    assert abs(z - polarized_commutator(sys, g, h)[1]) < 1e-12
    # tau^n by repeated product
    tau = polarized_tau_pow(sys, 1)
    acc = ((0,) * 4, 1)
    for _ in range(4):
        acc = polarized_mul(sys, acc, tau)
    ref = polarized_tau_pow(sys, 4)
    assert acc[0] == ref[0] and abs(acc[1] - ref[1]) < 1e-9


def test_polarized_validation(xi):
    with pytest.raises(ValueError):
        PolarizedSystem([[1, 0], [0, 1]], [xi[0], xi[1]], BASIS.const(0))
    with pytest.raises(ValueError):
        PolarizedSystem([[0, 1, 0]], [xi[0]], BASIS.const(0))


def test_minimality(xi):
    assert minimality_check(HeisenbergSystem([xi[0]], [xi[1]], BASIS.const(0)))
    assert not minimality_check(HeisenbergSystem([xi[0]], [xi[0] * 2 + 1], BASIS.const(0)))
    assert not minimality_check(AffineSkewSystem(BASIS.const(Fraction(1, 3)), xi[0]))


@given(elements(2))
def test_fiber_fourier_modes(g):
    assert abs(fiber_fourier(c1_gaussian, g, 1, 8) - c1_gaussian(g)) < 1e-12
    for chi in (0, -1, 2, 3):
        assert abs(fiber_fourier(c1_gaussian, g, chi, 8)) < 1e-12


def test_fiber_fourier_needs_enough_points():
    with pytest.raises(ValueError):
        fiber_fourier(c1_gaussian, h_identity(1), 3, 6)
