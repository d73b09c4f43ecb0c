"""Tsunami run-up in power-shaped bays: forward problem and recovery of initial data from R(t)."""
from runup.core import (
    BayGeometry, BreakingError, ConvergenceError, DomainRangeError, Grid1D, InvalidParameterError, PhysicalIC,
    RunupError, ScalingParams, ShorelineSeries, dimensionalize, make_bay, nondimensionalize,
)
from runup.transforms import QuadratureConfig, SpectralMoments, abel_recover, bessel_j, hankel_moment, spectral_moments
from runup.cgt import (
    GammaCurve, HodographIC, ShorelineTrace, breaking_check, inverse_cgt_on_gamma, physical_to_hodograph_ic,
    runup_from_shoreline, shoreline_from_runup,
)
from runup.projection import project_ic
from runup.forward import (
    ForwardResult, HodographField, SpectralSolution, default_sigma_grid, default_tau_grid, forward_runup,
    forward_solution, shoreline_phi_series, shoreline_psi_series, solve_fields,
)
from runup.inverse import (
    GaussianSum, InverseResult, even_odd_split, fit_gaussian_sum, inverse_pipeline, recover_gamma,
    recover_projected_ic,
)
from runup.cases import make_case

__version__ = "0.1.0"

__all__ = [
    "BayGeometry", "BreakingError", "ConvergenceError", "DomainRangeError", "Grid1D", "InvalidParameterError",
    "PhysicalIC", "RunupError", "ScalingParams", "ShorelineSeries", "dimensionalize", "make_bay",
    "nondimensionalize", "QuadratureConfig", "SpectralMoments", "abel_recover", "bessel_j", "hankel_moment",
    "spectral_moments", "GammaCurve", "HodographIC", "ShorelineTrace", "breaking_check",
    "inverse_cgt_on_gamma", "physical_to_hodograph_ic", "runup_from_shoreline", "shoreline_from_runup",
    "project_ic", "ForwardResult", "HodographField", "SpectralSolution", "default_sigma_grid",
    "default_tau_grid", "forward_runup", "forward_solution", "shoreline_phi_series", "shoreline_psi_series",
    "solve_fields", "GaussianSum", "InverseResult", "even_odd_split", "fit_gaussian_sum", "inverse_pipeline",
    "recover_gamma", "recover_projected_ic", "make_case",
]
