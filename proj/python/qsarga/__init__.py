"""Genetic search for multiple linear regression models over descriptor families."""

from ._qsarga import (
    ConfigError,
    DataError,
    Error,
    InsufficientViable,
    SingularFit,
    chi2_homogeneity,
    chi2_sf,
    genome_size,
    log_gamma,
    ols_fit,
    run,
    run_grid,
    search_space_size,
    student_t_two_tail,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "InsufficientViable",
    "SingularFit",
    "chi2_homogeneity",
    "chi2_sf",
    "genome_size",
    "log_gamma",
    "ols_fit",
    "run",
    "run_grid",
    "search_space_size",
    "student_t_two_tail",
]
