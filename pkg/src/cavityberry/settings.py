"""Numeric tolerances shared by the solver and the Berry-phase machinery."""
from dataclasses import dataclass


@dataclass(frozen=True)
class NumericSettings:
    hermitian_tol: float = 1e-10
    residual_tol: float = 1e-10   # relative to ||H||_F
    orthonormal_tol: float = 1e-10
    max_iter: int = 50            # QL sweeps per eigenvalue
    overlap_floor: float = 0.5
    ambiguity_margin: float = 0.1
    gap_floor_rel: float = 1e-8   # relative to the spectral range
    leak_levels: int = 5
    leak_threshold: float = 1e-8
    zero_overlap: float = 1e-6


DEFAULT_SETTINGS = NumericSettings()
