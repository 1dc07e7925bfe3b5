"""Backend selection for the hot loops.

``NILSEQ_JIT=0`` (or an absent numba) selects the pure-numpy kernels; anything
else uses the numba-compiled ones.  Both expose the same functions, so callers
only ever touch :data:`K`.
"""
import os

from . import numpy_kernels

try:
    from . import numba_kernels
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba_kernels = None

BACKENDS = {"numpy": numpy_kernels}
if numba_kernels is not None:
    BACKENDS["numba"] = numba_kernels


def _pick() -> str:
    flag = os.environ.get("NILSEQ_JIT", "1").strip().lower()
    if flag in ("0", "false", "no", "off") or numba_kernels is None:
        return "numpy"
    return "numba"


BACKEND = _pick()
K = BACKENDS[BACKEND]


def get_backend(name: str):
    return BACKENDS[name]
