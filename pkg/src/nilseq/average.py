"""Cesaro averages, inner products and quadratic norms of expressions.

Sums are formed deterministically: the index window is cut into fixed chunks
(independent of the worker count), each chunk into 64-term blocks summed with
Neumaier compensation, and the block sums are combined by a fixed pairwise
tree.  Workers only change who evaluates which chunk, never the arithmetic.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._accel import K as _K
from .seq import Conj, Expr, Product, eval_range

__all__ = [
    "AvResult",
    "OrthoVerdict",
    "ProbeRow",
    "cesaro_av",
    "default_workers",
    "inner_product",
    "orthogonality_test",
    "pairwise_total",
    "quad_norm",
    "shift_compactness_probe",
]

BLOCK = 64
CHUNK = 1 << 16


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("NILSEQ_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class AvResult:
    value: complex
    n_used: int
    error_estimate: float

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "n_used": self.n_used,
            "error_estimate": self.error_estimate,
        }


@dataclass(frozen=True)
class OrthoVerdict:
    kind: str  # consistent_orthogonal | correlated | inconclusive
    statistic: float
    threshold: float
    error_estimate: float


def pairwise_total(parts: np.ndarray) -> complex:
    """Fixed-shape pairwise reduction: adjacent pairs, odd tail carried."""
    parts = np.asarray(parts, dtype=np.complex128)
    if parts.size == 0:
        return 0j
    while parts.size > 1:
        if parts.size % 2:
            parts = np.concatenate([parts[:-1:2] + parts[1::2], parts[-1:]])
        else:
            parts = parts[0::2] + parts[1::2]
    return complex(parts[0])


Evaluator = Callable[[int, int], np.ndarray]


def _segment_sums(f: Evaluator, lo: int, hi: int, workers: int) -> np.ndarray:
    bounds = [(a, min(a + CHUNK, hi)) for a in range(lo, hi, CHUNK)]
    job = lambda ab: _K.block_sums(np.ascontiguousarray(f(*ab), dtype=np.complex128), BLOCK)  # noqa: E731
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]
    if not parts:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate(parts)


def _average(f: Evaluator, N: int, start: int, workers: int | None) -> AvResult:
    N = int(N)
    if N < 2:
        raise ValueError("need N >= 2")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    h = N // 2
    first = pairwise_total(_segment_sums(f, start, start + h, workers))
    second = pairwise_total(_segment_sums(f, start + h, start + N, workers))
    av_n = (first + second) / N
    av_h = first / h
    return AvResult(av_n, N, abs(av_n - av_h))


def cesaro_av(e: Expr, N: int, workers: int | None = None, start: int = 0) -> AvResult:
    """``(1/N) sum_{start <= n < start+N} e(n)`` with a half-window error estimate."""
    return _average(lambda a, b: eval_range(e, a, b), N, start, workers)


def inner_product(a: Expr, b: Expr, N: int, workers: int | None = None, start: int = 0) -> AvResult:
    return cesaro_av(Product((a, Conj(b))), N, workers, start)


def quad_norm(a: Expr, N: int, workers: int | None = None, start: int = 0) -> float:
    """``sqrt((1/N) sum |a_n|^2)``."""
    def f(lo, hi):
        v = eval_range(a, lo, hi)
        return (v.real**2 + v.imag**2).astype(np.complex128)

    return math.sqrt(max(0.0, _average(f, N, start, workers).value.real))


def orthogonality_test(a: Expr, b: Expr, N: int, threshold: float, workers: int | None = None) -> OrthoVerdict:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    ip = inner_product(a, b, N, workers)
    stat = abs(ip.value)
    err = ip.error_estimate
    if stat > threshold + err:
        kind = "correlated"
    elif stat + err < threshold:
        kind = "consistent_orthogonal"
    else:
        kind = "inconclusive"
    return OrthoVerdict(kind, stat, threshold, err)


# ---------------------------------------------------------------------------
# shift compactness probe
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ProbeRow:
    k: int
    best_t: float
    d_inf: float
    d_2: float

    def to_json(self) -> dict:
        return {"k": self.k, "best_t": self.best_t, "d_inf": self.d_inf, "d_2": self.d_2}


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
UNIMODULAR_TOL = 1e-9


def _correlation(w: np.ndarray, t: float) -> complex:
    n = np.arange(w.size, dtype=np.float64)
    return complex(np.sum(_K.cis((n * t) % 1.0) * w))


def _golden_max(fn, lo: float, hi: float, iters: int = 80) -> float:
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def _min_sup_unimodular(phases: np.ndarray) -> float:
    """``min_c max_n |c e(phi_n) - 1|`` over unit ``c``: half the shortest arc
    covering all phases (in turns)."""
    p = np.sort(phases % 1.0)
    gaps = np.diff(np.concatenate([p, p[:1] + 1.0]))
    arc = 1.0 - float(np.max(gaps))
    return 2.0 * math.sin(math.pi * arc / 2.0)


def _distances(x: np.ndarray, y: np.ndarray, t: float) -> tuple[float, float]:
    n = np.arange(x.size, dtype=np.float64)
    u = _K.cis((n * t) % 1.0) * x
    S = complex(np.sum(u * np.conj(y)))
    c = S.conjugate() / abs(S) if abs(S) > 0 else 1.0
    resid = c * u - y
    d2 = math.sqrt(float(np.mean(resid.real**2 + resid.imag**2)))
    if np.all(np.abs(np.abs(u) - 1.0) < UNIMODULAR_TOL) and np.all(np.abs(np.abs(y) - 1.0) < UNIMODULAR_TOL):
        dinf = _min_sup_unimodular(np.angle(u * np.conj(y)) / (2.0 * math.pi))
    else:
        dinf = float(np.max(np.abs(resid)))
    return dinf, d2


def shift_compactness_probe(a: Expr, shifts: Sequence[int], window: int, t_grid: int) -> list[ProbeRow]:
    """How well twisted shifts ``c e(n t) a_{n+k}`` approximate ``a_n`` on a window.

    For each ``k`` the twist ``t`` is located on a grid of ``t_grid`` points by
    the FFT of ``a_{n+k} conj(a_n)``, then refined by golden-section search on
    the correlation modulus (which minimizes the quadratic distance over the
    unit constant ``c``).  ``d_inf`` is the sup distance at that ``t``, with
    ``c`` chosen optimally when both sequences are unimodular and by least
    squares otherwise; ``d_2`` is the quadratic distance at the same ``t``.
    """
    window = int(window)
    t_grid = int(t_grid)
    if window < 1000:
        raise ValueError("window must be at least 1000")
    if t_grid < 2:
        raise ValueError("t_grid must be at least 2")
    y = eval_range(a, 0, window)
    rows = []
    for k in shifts:
        k = int(k)
        x = eval_range(a, k, k + window)
        w = x * np.conj(y)
        if t_grid >= window:
            spectrum = np.fft.ifft(np.concatenate([w, np.zeros(t_grid - window)])) * t_grid
        else:
            folded = np.zeros(t_grid, dtype=np.complex128)
            np.add.at(folded, np.arange(window) % t_grid, w)
            spectrum = np.fft.ifft(folded) * t_grid
        j = int(np.argmax(np.abs(spectrum)))
        t0 = j / t_grid
        t_best = _golden_max(lambda t: abs(_correlation(w, t)), t0 - 1.0 / t_grid, t0 + 1.0 / t_grid)
        t_best %= 1.0
        dinf, d2 = _distances(x, y, t_best)
        rows.append(ProbeRow(k, t_best, dinf, d2))
    return rows
