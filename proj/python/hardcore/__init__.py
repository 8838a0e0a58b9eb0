"""Hard-core thinnings of Boolean models: simulation, quadrature and asymptotics."""

from ._hardcore import (
    ConfigError,
    ModelSpec,
    RadiusLaw,
    ThinnedModel,
    WeightKernel,
    asymptotic_prediction,
    ball_intersection_volume,
    ball_volume,
    c_alpha_d,
    config_hash,
    fit_tail_exponent,
    parse_config,
    parse_kernel,
    simulate,
    unit_ball_volume,
    weight_survival,
)

__all__ = [
    "ConfigError",
    "ModelSpec",
    "RadiusLaw",
    "ThinnedModel",
    "WeightKernel",
    "asymptotic_prediction",
    "ball_intersection_volume",
    "ball_volume",
    "c_alpha_d",
    "config_hash",
    "fit_tail_exponent",
    "parse_config",
    "parse_kernel",
    "simulate",
    "unit_ball_volume",
    "weight_survival",
]
