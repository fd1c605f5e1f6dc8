"""Python access to the slotune controller, objective and testbeds."""

from ._core import (
    ConfigError,
    Denoiser,
    DomainError,
    Error,
    NumericError,
    ParseError,
    ShapeError,
    aitchison_distance,
    analytic_system,
    compliant,
    expected_improvement,
    fairness,
    lse,
    mixed_distance,
    objective,
    ratios,
    run_scenario,
)

__all__ = [
    "ConfigError",
    "Denoiser",
    "DomainError",
    "Error",
    "NumericError",
    "ParseError",
    "ShapeError",
    "aitchison_distance",
    "analytic_system",
    "compliant",
    "expected_improvement",
    "fairness",
    "lse",
    "mixed_distance",
    "objective",
    "ratios",
    "run_scenario",
]
