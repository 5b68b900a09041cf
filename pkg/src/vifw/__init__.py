"""Projection-free Frank-Wolfe solver for monotone variational inequalities."""

from .dynamics import Trajectory, decay_check, integrate_br, interpolate, perturbation_bound
from .feasible_sets import Box, FeasibleSet, Product, Simplex, TieRule, VertexPolytope
from .operators import Affine, FictitiousPlay, LpSaddle, Operator, SaddleQuadratic, check_monotone, jacobian_fd
from .oracle import OracleResult, brute_force_gap, extragradient, uniqueness_check
from .solver import Explicit, Harmonic, PowerLaw, SolverTrace, fw_gap, fw_step, solve, step_size

__version__ = "0.1.0"

__all__ = [
    "Affine", "Box", "Explicit", "FeasibleSet", "FictitiousPlay", "Harmonic", "LpSaddle",
    "Operator", "OracleResult", "PowerLaw", "Product", "SaddleQuadratic", "Simplex",
    "SolverTrace", "TieRule", "Trajectory", "VertexPolytope", "brute_force_gap",
    "check_monotone", "decay_check", "extragradient", "fw_gap", "fw_step", "integrate_br",
    "interpolate", "jacobian_fd", "perturbation_bound", "solve", "step_size",
    "uniqueness_check",
]
