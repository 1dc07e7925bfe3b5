from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nilseq.exactnum import QAffineReal, default_basis

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BASIS = default_basis()


@pytest.fixture
def basis():
    return BASIS


@pytest.fixture
def xi():
    return [BASIS.symbol(i) for i in range(len(BASIS))]


small_fracs = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 9))


@st.composite
def qaffine(draw, span=3):
    const = draw(small_fracs)
    coeffs = {i: draw(st.builds(Fraction, st.integers(-span, span), st.integers(1, 4))) for i in range(len(BASIS))}
    return QAffineReal(const, coeffs, BASIS)
