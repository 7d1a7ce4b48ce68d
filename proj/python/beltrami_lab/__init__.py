"""Degenerate Beltrami equations: truncation solver and verification harness."""

from ._core import (
    ContractionViolation,
    DomainError,
    Error,
    GridSpec,
    K_Ip,
    K_mu,
    NonConvergence,
    ValidationError,
    annulus_modulus,
    beurling_transform,
    cauchy_transform,
    example3_map,
    example3_truncation_radius,
    example4_KIp_bound,
    example4_KIp_integral,
    example4_map,
    example4_truncation_radius,
    holder_scan,
    inverse_poletsky_check,
    l1_norm,
    mu_example3,
    mu_example4,
    mu_of_inverse,
    profile_value,
    run_cli,
    solve,
)

__version__ = "0.1.0"
