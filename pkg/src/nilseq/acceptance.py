"""Acceptance suite shared by ``nilseq selftest`` and the test-suite.

Each criterion returns its measured statistics plus a verdict.  Randomness is
drawn from a counter-based generator (Philox) keyed by ``(seed, criterion)`` so
every criterion is reproducible on its own.  The JSON report carries no
timings unless asked, which keeps it byte-identical across runs and worker
counts.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .average import cesaro_av, inner_product, quad_norm, shift_compactness_probe
from .classify import (
    ClassParams,
    ClassWitness,
    RatMatrix,
    SearchBounds,
    apply_witness,
    is_symplectic,
    j_matrix,
    search_witness,
    skew_normal_form,
    twist_target,
    verify_witness,
)
from .exactnum import QAffineReal, default_basis, independent_mod1
from .nilsys import (
    AffineSkewSystem,
    HeisenbergElement,
    HeisenbergSystem,
    affine_orbit_values,
    c1_gaussian,
    cis,
    fiber_fourier,
    heisenberg_orbit_value,
)
from .seq import Exp, FloorLinear, Omega, Product, Quad, eval_range
from .theta import kappa, kappa_abs_sq_mean, kappa_array, theta3_at_i

SCHEMA = "nilseq/1"
QUICK_N = 10**5
QUICK_TOL_FACTOR = 3.0


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    quick: bool = False
    workers: int = 1

    def rng(self, key: int) -> np.random.Generator:
        mask = (1 << 64) - 1
        return np.random.Generator(np.random.Philox(key=[self.seed & mask, key]))

    def tol(self, value: float) -> float:
        return value * QUICK_TOL_FACTOR if self.quick else value

    def n(self, full: int) -> int:
        return min(full, QUICK_N) if self.quick else full


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    metrics: dict
    budget: float
    elapsed: float = 0.0
    within_budget: bool = True
    detail: str = ""

    def to_json(self, timings: bool = False) -> dict:
        out = {"id": self.id, "name": self.name, "passed": self.passed, "metrics": self.metrics}
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["elapsed"] = round(self.elapsed, 3)
            out["budget"] = self.budget
        return out

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.id:2d} {self.name}: {_summary(self.metrics)} ({self.elapsed:.2f}s / {self.budget:g}s)"


def _summary(metrics: dict) -> str:
    parts = []
    for k, v in metrics.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.3g}")
        elif isinstance(v, (int, bool, str)):
            parts.append(f"{k}={v}")
    return ", ".join(parts)


def _f(x) -> float:
    """Round-trip a float through 17 significant digits."""
    return float("%.17g" % float(x))


# ---------------------------------------------------------------------------
# random parameters
# ---------------------------------------------------------------------------
def random_qaffine(rng: np.random.Generator, basis=None, span: int = 3) -> QAffineReal:
    basis = basis or default_basis()
    const = Fraction(int(rng.integers(0, 12)), int(rng.integers(1, 7)))
    coeffs = {i: Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 4))) for i in range(len(basis))}
    return QAffineReal(const, coeffs, basis)


def random_independent(rng: np.random.Generator, count: int, basis=None) -> list[QAffineReal]:
    while True:
        xs = [random_qaffine(rng, basis) for _ in range(count)]
        if independent_mod1(xs):
            return xs


def _theta_grid():
    s = np.arange(64) / 64.0
    t = -2.0 + 4.0 * np.arange(64) / 64.0
    return np.meshgrid(s, t, indexing="ij")


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------
def c1_theta_identity(cfg: SuiteConfig):
    S, T = _theta_grid()
    ref = np.array([[math.exp(-math.pi * t * t) * theta3_at_i(complex(s, t)) for s, t in zip(rs, rt)]
                    for rs, rt in zip(S, T)])
    err_kernel = float(np.max(np.abs(kappa_array(S, T) - ref)))
    err_scalar = max(abs(kappa(s, t) - r) for s, t, r in zip(S.ravel(), T.ravel(), ref.ravel()))
    err = max(err_kernel, err_scalar)
    tol = cfg.tol(1e-12)
    return err < tol, {"max_error": _f(err), "tol": tol}


def c2_quasi_periodicity(cfg: SuiteConfig):
    S, T = _theta_grid()
    lhs = kappa_array(S, T + 1.0)
    rhs = np.exp(-2j * np.pi * S) * kappa_array(S, T)
    err = float(np.max(np.abs(lhs - rhs)))
    tol = cfg.tol(1e-12)
    return err < tol, {"max_error": _f(err), "tol": tol}


def c3_orbit_bridge(cfg: SuiteConfig):
    rng = cfg.rng(3)
    basis = default_basis()
    R = 10**4
    worst = 0.0
    for d in (1, 2):
        ab = random_independent(rng, 2 * d, basis)
        gamma = random_qaffine(rng, basis)
        sys = HeisenbergSystem(ab[:d], ab[d:], gamma)
        orbit = np.array([heisenberg_orbit_value(sys, n) for n in range(-R, R + 1)])
        closed = eval_range(Product((Exp(gamma),) + tuple(Omega(a, b) for a, b in zip(ab[:d], ab[d:]))), -R, R + 1)
        worst = max(worst, float(np.max(np.abs(orbit - closed))))
    tol = cfg.tol(1e-9)
    return worst < tol, {"max_error": _f(worst), "tol": tol}


def c4_affine_bridge(cfg: SuiteConfig):
    rng = cfg.rng(4)
    alpha, beta = random_independent(rng, 2)
    sys = AffineSkewSystem(alpha, beta)
    worst = 0.0
    for step in (1, -1):
        it, closed = affine_orbit_values(sys, 10**5, step)
        worst = max(worst, float(np.max(np.abs(it - closed))))
    tol = cfg.tol(1e-9)
    return worst < tol, {"max_error": _f(worst), "tol": tol}


def c5_quad_norm(cfg: SuiteConfig):
    b = default_basis()
    N = cfg.n(10**6)
    target = math.sqrt(kappa_abs_sq_mean())
    val = quad_norm(Omega(b.symbol("xi1"), b.symbol("xi2")), N, cfg.workers)
    tol = cfg.tol(0.01)
    return abs(val - target) <= tol, {"norm": _f(val), "target": _f(target), "N": N, "tol": tol}


def c6_zero_average(cfg: SuiteConfig):
    b = default_basis()
    N = cfg.n(10**6)
    rng = cfg.rng(6)
    av = cesaro_av(Omega(b.symbol("xi1"), b.symbol("xi2")), N, cfg.workers)
    worst = abs(av.value)
    ips = []
    for _ in range(5):
        s = b.const(Fraction(float(rng.random())))
        ip = inner_product(Quad(b.symbol("xi1")), Exp(s), N, cfg.workers)
        ips.append(_f(abs(ip.value)))
    tol = cfg.tol(0.02)
    ok = worst < tol and max(ips) < tol
    return ok, {"omega_average": _f(worst), "max_inner_product": max(ips), "inner_products": ips, "N": N, "tol": tol}


def c7_class_bridge(cfg: SuiteConfig):
    b = default_basis()
    x1, x2 = b.symbol("xi1"), b.symbol("xi2")
    p = ClassParams(x2 / 2, [(x1, x2)])
    w = ClassWitness(RatMatrix.identity(2), 2, [1], [0])
    pp = apply_witness(p, w, b.const(0))
    verified = verify_witness(p, pp, w)
    m = w.m
    nmax = 2 * 10**4
    n = np.arange(0, nmax + 1, m)
    (a1, b1), = p.pairs
    (a2, b2), = pp.pairs
    av = eval_range(Omega(a1, b1), 0, nmax + 1)[n]
    bv = eval_range(Omega(a2, b2), 0, nmax + 1)[n]
    tw = eval_range(Quad(p.t - pp.t), 0, nmax + 1)[n]
    # r_n = b_n conj(q_n(t - t') a_n) / |a_n|^2, kept where |a_n| is not tiny
    mag = np.abs(av)
    r = bv * np.conj(tw * av) / np.maximum(mag, 1e-300) ** 2
    keep = (mag[1:] > 1e-3) & (mag[:-1] > 1e-3)
    prod = (r[1:] * np.conj(r[:-1]))[keep]
    spread = float(np.max(np.abs(prod - prod[0])))
    tol = cfg.tol(1e-6)
    return verified and spread < tol, {"verified": verified, "spread": _f(spread), "points": int(keep.sum()), "tol": tol}


def _random_symmetric(rng, d):
    S = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            S[i][j] = S[j][i] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
    return RatMatrix(S)


def _random_invertible(rng, d):
    while True:
        A = RatMatrix([[Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 3))) for _ in range(d)] for _ in range(d)])
        if A.det() != 0:
            return A


def random_symplectic_generator(rng, d: int) -> RatMatrix:
    I, Z = RatMatrix.identity(d), RatMatrix.zeros(d, d)
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return RatMatrix.block(I, _random_symmetric(rng, d), Z, I)
    if kind == 1:
        return RatMatrix.block(I, Z, _random_symmetric(rng, d), I)
    if kind == 2:
        A = _random_invertible(rng, d)
        return RatMatrix.block(A, Z, Z, A.inverse().T)
    return j_matrix(d)


def _random_sl2(rng, height: int) -> RatMatrix:
    gens = [RatMatrix([[1, 1], [0, 1]]), RatMatrix([[1, 0], [1, 1]]), j_matrix(1),
            RatMatrix([[2, 0], [0, Fraction(1, 2)]]), RatMatrix([[1, Fraction(1, 2)], [0, 1]])]
    while True:
        M = RatMatrix.identity(2)
        for _ in range(int(rng.integers(0, 4))):
            M = M @ gens[int(rng.integers(0, len(gens)))]
        if M.height() <= height:
            return M


def c8_symplectic_suite(cfg: SuiteConfig):
    rng = cfg.rng(8)
    normal_ok = 0
    for _ in range(100):
        while True:
            U = [[Fraction(0)] * 4 for _ in range(4)]
            for i in range(4):
                for j in range(i + 1, 4):
                    v = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
                    U[i][j], U[j][i] = v, -v
            B = RatMatrix(U)
            if B.det() != 0:
                break
        Phi = skew_normal_form(B)
        normal_ok += Phi.T @ j_matrix(2) @ Phi == B
    group_ok = 0
    for _ in range(100):
        M = RatMatrix.identity(4)
        for _ in range(int(rng.integers(1, 6))):
            M = M @ random_symplectic_generator(rng, 2)
        group_ok += is_symplectic(M) and is_symplectic(M.inverse())
    bounds = SearchBounds(m_max=6, shift_max=4, height_max=5)
    trips = 0
    basis = default_basis()
    for _ in range(100):
        a, b = random_independent(rng, 2, basis)
        p = ClassParams(random_qaffine(rng, basis), [(a, b)])
        w = ClassWitness(_random_sl2(rng, bounds.height_max), int(rng.integers(1, bounds.m_max + 1)),
                         [int(rng.integers(-4, 5))], [int(rng.integers(-4, 5))])
        pp = apply_witness(p, w, twist_target(p, w))
        found = search_witness(p, pp, bounds).witness
        trips += found is not None and verify_witness(p, pp, found)
    ok = normal_ok == 100 and group_ok == 100 and trips == 100
    return ok, {"normal_forms": normal_ok, "group_products": group_ok, "round_trips": trips}


PROBE_SHIFTS = (1, 2, 5, 12, 29, 70)


def c9_probe(cfg: SuiteConfig):
    b = default_basis()
    window, grid = 10**4, 1 << 15
    rows = shift_compactness_probe(FloorLinear(b.symbol("xi1"), b.symbol("xi2")), PROBE_SHIFTS, window, grid)
    contrast = shift_compactness_probe(Quad(b.symbol("xi1")), PROBE_SHIFTS, window, grid)
    d2 = [_f(r.d_2) for r in rows]
    dinf = [_f(r.d_inf) for r in rows]
    cinf = [_f(r.d_inf) for r in contrast]
    ok = min(d2) < 0.15 and min(dinf) > 0.3 and max(cinf) < 0.05
    return ok, {"min_d2": min(d2), "min_dinf": min(dinf), "contrast_max_dinf": max(cinf),
                "d2": d2, "dinf": dinf, "contrast_dinf": cinf}


def c10_fiber_fourier(cfg: SuiteConfig):
    rng = cfg.rng(10)
    self_err = other = 0.0
    for d in (1, 2, 1, 2, 1):
        x = tuple(Fraction(int(rng.integers(0, 1 << 20)), 1 << 20) for _ in range(d))
        y = tuple(Fraction(int(rng.integers(0, 1 << 20)), 1 << 20) for _ in range(d))
        pt = HeisenbergElement(x, y, cis(Fraction(int(rng.integers(0, 1000)), 1000)))
        val = c1_gaussian(pt)
        self_err = max(self_err, abs(fiber_fourier(c1_gaussian, pt, 1, 8) - val))
        for chi in (0, -1, 2):
            other = max(other, abs(fiber_fourier(c1_gaussian, pt, chi, 8)))
    tol = cfg.tol(1e-12)
    return self_err < tol and other < tol, {"weight_one_error": _f(self_err), "other_modes": _f(other), "tol": tol}


DETERMINISM_WORKERS = (1, 2, 8)


def c11_determinism(cfg: SuiteConfig):
    blobs = []
    for w in DETERMINISM_WORKERS:
        sub = SuiteConfig(cfg.seed, cfg.quick, w)
        metrics = [c5_quad_norm(sub)[1], c6_zero_average(sub)[1]]
        blobs.append(json.dumps(metrics, sort_keys=True))
    same = all(b == blobs[0] for b in blobs)
    return same, {"identical": same, "workers": list(DETERMINISM_WORKERS)}


@dataclass(frozen=True)
class Criterion:
    id: int
    name: str
    budget: float
    fn: Callable = field(repr=False)


CRITERIA = (
    Criterion(1, "theta identity", 1.0, c1_theta_identity),
    Criterion(2, "quasi-periodicity", 1.0, c2_quasi_periodicity),
    Criterion(3, "orbit bridge", 5.0, c3_orbit_bridge),
    Criterion(4, "affine bridge", 2.0, c4_affine_bridge),
    Criterion(5, "quadratic norm constant", 10.0, c5_quad_norm),
    Criterion(6, "zero averages", 20.0, c6_zero_average),
    Criterion(7, "class-equivalence bridge", 5.0, c7_class_bridge),
    Criterion(8, "exact symplectic suite", 10.0, c8_symplectic_suite),
    Criterion(9, "shift probe", 30.0, c9_probe),
    Criterion(10, "fiber Fourier", 1.0, c10_fiber_fourier),
    Criterion(11, "determinism", 60.0, c11_determinism),
)


def warm_up() -> None:
    """Compile every kernel once so that budgets measure steady-state cost."""
    b = default_basis()
    x1, x2 = b.symbol("xi1"), b.symbol("xi2")
    e = Product((Exp(x1), Quad(x2), Omega(x1, x2), FloorLinear(x1, x2)))
    eval_range(e, 0, 1000)
    cesaro_av(e, 1000, 1)
    kappa_array(np.zeros(4), np.zeros(4))
    affine_orbit_values(AffineSkewSystem(x1, x2), 10)
    shift_compactness_probe(Quad(x1), (1,), 1000, 1024)


def run_criterion(c: Criterion, cfg: SuiteConfig) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        ok, metrics = c.fn(cfg)
        detail = ""
    except Exception as exc:  # a crash is a failure, reported rather than raised
        ok, metrics, detail = False, {}, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    within = elapsed < c.budget
    return CriterionResult(c.id, c.name, bool(ok) and within, metrics, c.budget, elapsed, within, detail)


def run_suite(cfg: SuiteConfig | None = None, ids=None) -> list[CriterionResult]:
    cfg = cfg or SuiteConfig()
    warm_up()
    chosen = [c for c in CRITERIA if ids is None or c.id in ids]
    return [run_criterion(c, cfg) for c in chosen]


def report(results: list[CriterionResult], cfg: SuiteConfig, timings: bool = False) -> str:
    doc = {
        "schema": SCHEMA,
        "seed": cfg.seed,
        "quick": cfg.quick,
        "all_passed": all(r.passed for r in results),
        "criteria": [r.to_json(timings) for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=False)
