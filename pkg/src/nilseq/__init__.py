"""Two-step nilsequences: theta-kernel sequences, Heisenberg orbits, averages
and exact class calculus."""
from ._accel import BACKEND
from .average import cesaro_av, inner_product, orthogonality_test, quad_norm, shift_compactness_probe
from .classify import (
    ClassParams,
    ClassWitness,
    RatMatrix,
    is_symplectic,
    j_matrix,
    polarized_to_heisenberg,
    search_witness,
    skew_normal_form,
    verify_witness,
)
from .exactnum import IrrationalBasis, QAffineReal, default_basis
from .nilsys import AffineSkewSystem, HeisenbergSystem, PolarizedSystem, heisenberg_orbit_value
from .seq import Exp, FloorLinear, FloorQuad, Omega, Orbit, Product, Quad, eval, eval_range, m_sequence
from .theta import kappa, kappa_array

__version__ = "0.1.0"

__all__ = [
    "AffineSkewSystem",
    "BACKEND",
    "ClassParams",
    "ClassWitness",
    "Exp",
    "FloorLinear",
    "FloorQuad",
    "HeisenbergSystem",
    "IrrationalBasis",
    "Omega",
    "Orbit",
    "PolarizedSystem",
    "Product",
    "QAffineReal",
    "Quad",
    "RatMatrix",
    "cesaro_av",
    "default_basis",
    "eval",
    "eval_range",
    "heisenberg_orbit_value",
    "inner_product",
    "is_symplectic",
    "j_matrix",
    "kappa",
    "kappa_array",
    "m_sequence",
    "orthogonality_test",
    "polarized_to_heisenberg",
    "quad_norm",
    "search_witness",
    "shift_compactness_probe",
    "skew_normal_form",
    "verify_witness",
]
