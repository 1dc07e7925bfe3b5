import os
import subprocess
import sys

import numpy as np
import pytest

from nilseq._accel import BACKENDS, get_backend

pytestmark = pytest.mark.skipif("numba" not in BACKENDS, reason="numba unavailable")

NP, NB = get_backend("numpy"), get_backend("numba")
RNG = np.random.default_rng(2024)


def test_frac_mul_parity():
    N = RNG.integers(-2**40, 2**40, 1000).astype(np.float64)
    args = (N, 0.4142135623730951, 1.2e-17)
    assert np.array_equal(NP.frac_mul(*args), NB.frac_mul(*args))


def test_kappa_parity():
    s, t = RNG.random(500), RNG.uniform(-40, 40, 500)
    assert np.max(np.abs(NP.kappa(s, t, 3) - NB.kappa(s, t, 3))) < 1e-14


def test_omega_parity():
    n = np.arange(-5000, 5000, dtype=np.int64)
    args = (n, 1.4142135623730951, 1e-17, 1.7320508075688772, 1e-17, 2.449489742783178, 1e-16, 3)
    assert np.max(np.abs(NP.omega(*args) - NB.omega(*args))) < 1e-13


def test_floor_mul_parity():
    n = np.arange(-10**5, 10**5, 7, dtype=np.int64)
    assert np.array_equal(NP.floor_mul(n, 1.4142135623730951, -9.667e-17), NB.floor_mul(n, 1.4142135623730951, -9.667e-17))


def test_block_sums_parity():
    z = RNG.normal(size=4099) + 1j * RNG.normal(size=4099)
    assert np.array_equal(NP.block_sums(z, 64), NB.block_sums(z, 64))


@pytest.mark.parametrize("step", [1, -1])
def test_skew_orbit_parity(step):
    a = NP.skew_orbit(0.4142135623730951, 1e-17, 0.7320508075688772, -2e-17, 20000, step)
    b = NB.skew_orbit(0.4142135623730951, 1e-17, 0.7320508075688772, -2e-17, 20000, step)
    assert np.max(np.abs(a - b)) < 1e-14


def test_env_flag_selects_numpy():
    env = dict(os.environ, NILSEQ_JIT="0")
    out = subprocess.run([sys.executable, "-c", "import nilseq; print(nilseq.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
