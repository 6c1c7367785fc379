"""Coupled Stokes-Darcy finite-element solver on rectangular domains with
an optimized two-sided (Neumann-Neumann type) interface preconditioner."""

from .assembly import (ConfigurationError, CoupledSystem, apply_boundary_conditions,
                       assemble_case_raw, assemble_coupling, assemble_darcy,
                       assemble_stokes, build_system)
from .krylov import IndefiniteOperatorError, SolveReport, cg, pcg, richardson
from .manufactured import (ExactSolution, error_norms, exact_solution,
                           forcing_terms, interface_residuals)
from .mesh import (InterfaceTrace, RectDomain, StructuredMesh, build_mesh,
                   extract_interface)
from .params import (CASE_PARAMS, CaseConfig, ProblemParams, REFERENCE_TABLE,
                     all_cases, isotropic_params)
from .schur import FullSolution, SchurSystem
from .weights import (AnalysisParams, FrequencyBand, WeightPair,
                      asymptotic_weights, endpoint_balanced_weights,
                      frequency_band, k_star, minmax_oracle,
                      mode_composition_oracle, optimal_weights,
                      reduction_factor, rho_peak, rho_zeros)

__version__ = "0.1.0"

__all__ = [
    "AnalysisParams", "CASE_PARAMS", "CaseConfig", "ConfigurationError",
    "CoupledSystem", "ExactSolution", "FrequencyBand", "FullSolution",
    "IndefiniteOperatorError", "InterfaceTrace", "ProblemParams",
    "REFERENCE_TABLE", "RectDomain", "SchurSystem", "SolveReport",
    "StructuredMesh", "WeightPair", "all_cases", "apply_boundary_conditions",
    "assemble_case_raw", "assemble_coupling", "assemble_darcy",
    "assemble_stokes", "asymptotic_weights", "build_mesh", "build_system",
    "cg", "endpoint_balanced_weights", "error_norms", "exact_solution",
    "extract_interface", "forcing_terms", "frequency_band",
    "interface_residuals", "isotropic_params", "k_star", "minmax_oracle",
    "mode_composition_oracle", "optimal_weights", "pcg", "reduction_factor",
    "rho_peak", "rho_zeros", "richardson",
]
