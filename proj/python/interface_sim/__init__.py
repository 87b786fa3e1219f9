"""Multipass light-atom interface simulator (Gaussian covariance model)."""

from ._interface_sim import (
    ConfigError,
    InvalidStateError,
    NumericalFailure,
    ParameterError,
    crude_single_pass,
    epr_variance,
    geof,
    log_negativity,
    magic_kappa,
    optimal_homodyne_variance,
    optimize_eta,
    physical_params,
    run_figure,
    run_protocol,
    scattering_matrix,
    standard_form,
    symplectic_eigenvalues,
)

__all__ = [
    "ConfigError",
    "InvalidStateError",
    "NumericalFailure",
    "ParameterError",
    "crude_single_pass",
    "epr_variance",
    "geof",
    "log_negativity",
    "magic_kappa",
    "optimal_homodyne_variance",
    "optimize_eta",
    "physical_params",
    "run_figure",
    "run_protocol",
    "scattering_matrix",
    "standard_form",
    "symplectic_eigenvalues",
]
