"""Dispersion analysis and FEM verification for the convected Helmholtz equation."""

from convhelm.dispersion import (
    DispersionError,
    DispersionPoint,
    Element,
    FlowParams,
    Formulation,
    LeadingCoefficient,
    QuadraticInOmega,
    SchemeId,
    WaveProbe,
    a1_closed,
    a1_numeric,
    continuous_omega,
    dispersion_quotients,
    helmholtz_k3,
    transformed_wave_residual,
    scheme_omega,
    scheme_quadratic,
)

__version__ = "0.1.0"

__all__ = [
    "DispersionError",
    "DispersionPoint",
    "Element",
    "FlowParams",
    "Formulation",
    "LeadingCoefficient",
    "QuadraticInOmega",
    "SchemeId",
    "WaveProbe",
    "a1_closed",
    "a1_numeric",
    "continuous_omega",
    "dispersion_quotients",
    "helmholtz_k3",
    "transformed_wave_residual",
    "scheme_omega",
    "scheme_quadratic",
]
