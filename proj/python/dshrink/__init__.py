"""LASSO with Stein-type post-shrinkage (SL, PRSL, SL2, SL3)."""

from ._dshrink import (
    ConfigError,
    DataError,
    DomainError,
    NumericalError,
    __version__,
    analyze_prostate,
    fit,
    lasso,
    lasso_path,
    load_prostate,
    shrinkage_factor,
    simulate,
    soft_threshold,
    stein_constant,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "NumericalError",
    "__version__",
    "analyze_prostate",
    "fit",
    "lasso",
    "lasso_path",
    "load_prostate",
    "shrinkage_factor",
    "simulate",
    "soft_threshold",
    "stein_constant",
]
