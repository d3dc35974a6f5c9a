"""Heston forward-start options: exact Fourier prices and small-maturity asymptotics."""

from .asymptotics import (
    CoefficientSet,
    SmileExpansion,
    extrinsic_expansion,
    otm_coefficients,
    price_expansion,
    rate_function,
    smile_coefficients,
    smile_expansion,
)
from .atm_asymptotics import AtmExpansion, Regime, atm_expansion, delta_moment, kummer_m
from .bsm import bs_call, implied_vol
from .exceptions import (
    BranchError,
    ConfigError,
    DegenerateInputError,
    DomainError,
    FwdSmileError,
    GateError,
    QuadratureError,
    SolverError,
)
from .fourier_pricer import (
    PriceResult,
    QuadratureSettings,
    forward_call,
    forward_digital,
    forward_put,
    forward_smile,
)
from .heston_core import ForwardTenor, HestonParams, beta_t, forward_lmgf, saddlepoint

__version__ = "0.1.0"

__all__ = [
    "AtmExpansion",
    "BranchError",
    "CoefficientSet",
    "ConfigError",
    "DegenerateInputError",
    "DomainError",
    "ForwardTenor",
    "FwdSmileError",
    "GateError",
    "HestonParams",
    "PriceResult",
    "QuadratureError",
    "QuadratureSettings",
    "Regime",
    "SmileExpansion",
    "SolverError",
    "atm_expansion",
    "beta_t",
    "bs_call",
    "delta_moment",
    "forward_call",
    "forward_digital",
    "forward_lmgf",
    "forward_put",
    "forward_smile",
    "implied_vol",
    "kummer_m",
    "extrinsic_expansion",
    "otm_coefficients",
    "price_expansion",
    "rate_function",
    "saddlepoint",
    "smile_coefficients",
    "smile_expansion",
]
