"""Drift-implicit square-root Euler simulation of CIR processes."""

from ._cirsim import (
    CirParams,
    Error,
    ErrorReport,
    IoError,
    NumericalError,
    RateReport,
    RegimeError,
    RegimeReport,
    ValidationError,
    brownian_increments,
    cir_exact_moment,
    cir_moment_bound_oracle,
    classify_regime,
    fit_rate,
    implicit_additive_step,
    implicit_sqrt_euler_step,
    inverse_moment_exact_cir,
    lamperti_inv,
    lamperti_phi,
    simulate,
    strong_error,
    theoretical_rate,
)

__version__ = "0.1.0"
