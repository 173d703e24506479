"""Solvable one-dimensional diffusions and their stochastic transformations."""

from ._backend import BACKEND
from .boundary import BoundaryClass, classify_endpoint, classify_transformed
from .fundamental import fundamental_pair, green_function, hitting_laplace
from .invariants import bose_invariant, equivalent, invariant_I, invariant_J
from .montecarlo import SimConfig, SimResult, ks_statistic, simulate, simulate_transformed
from .processes import BM, CIR, OU, Bessel, DiffusionSpec, Interval, Jacobi
from .transform import build_transform, density_y, invert_y, sigma_y

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BM", "Bessel", "BoundaryClass", "CIR", "DiffusionSpec", "Interval", "Jacobi", "OU", "SimConfig",
    "SimResult", "bose_invariant", "build_transform", "classify_endpoint", "classify_transformed", "density_y",
    "equivalent", "fundamental_pair", "green_function", "hitting_laplace", "invariant_I", "invariant_J", "invert_y",
    "ks_statistic", "sigma_y", "simulate", "simulate_transformed",
]
