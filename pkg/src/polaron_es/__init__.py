"""Exact diagonalization and ground-state entanglement spectra for a single
excitation with Peierls and breathing-mode phonon coupling on a ring."""

__version__ = "0.1.0"

from .eigensolver import (
    ConvergenceError,
    GroundStateRecord,
    SolverSettings,
    dense_oracle,
    ground_state_over_K,
    lowest_eigenpair,
)
from .entanglement import (
    EntanglementSpectrum,
    ReducedDensityMatrix,
    analyze,
    entropy,
    reduced_density,
    spectrum,
    svd_cross_check,
)
from .fock import FockBasis, enumerate_basis, overlap_translated, translate_config
from .hamiltonian import Momentum, SectorHamiltonian, allowed_momenta, apply, assemble
from .model import ModelParams, g_P_from_lambda, lambda_BM, lambda_P, lambda_total, vertex_total

__all__ = [
    "ConvergenceError", "GroundStateRecord", "SolverSettings", "dense_oracle",
    "ground_state_over_K", "lowest_eigenpair", "EntanglementSpectrum", "ReducedDensityMatrix",
    "analyze", "entropy", "reduced_density", "spectrum", "svd_cross_check", "FockBasis",
    "enumerate_basis", "overlap_translated", "translate_config", "Momentum",
    "SectorHamiltonian", "allowed_momenta", "apply", "assemble", "ModelParams",
    "g_P_from_lambda", "lambda_BM", "lambda_P", "lambda_total", "vertex_total",
]
