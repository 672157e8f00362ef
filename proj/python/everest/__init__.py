"""Ensemble verification workbench for steady supersonic flow solvers."""

from everest._everest import (
    EverestError,
    alpha_from_beta,
    angle_bound,
    hypercircle_estimate,
    max_deflection_deg,
    mc_orthogonality,
    normal_shock_pressure_ratio,
    pair_bound,
    prandtl_meyer_mach,
    prandtl_meyer_nu_deg,
    run_experiment,
    run_solve,
    scheme_names,
    theta_beta_m,
    validate_case,
)

__version__ = "1.0.0"

__all__ = [
    "EverestError",
    "alpha_from_beta",
    "angle_bound",
    "hypercircle_estimate",
    "max_deflection_deg",
    "mc_orthogonality",
    "normal_shock_pressure_ratio",
    "pair_bound",
    "prandtl_meyer_mach",
    "prandtl_meyer_nu_deg",
    "run_experiment",
    "run_solve",
    "scheme_names",
    "theta_beta_m",
    "validate_case",
]
