"""Morlet wavelet transform, wavelet coherence and red-noise significance testing.

Arrays are numpy float64; matrices are (scales, time). Positive phase means the
first series leads the second.
"""

from ._wavecoh import (
    Ar1Params,
    CoherenceField,
    ConfigError,
    CwtMatrix,
    InputError,
    MorletParams,
    ScaleGrid,
    SignificanceField,
    __version__,
    coi,
    cwt,
    default_grid,
    energy,
    fit_ar1,
    lead_time,
    load_csv,
    log_returns,
    mc_significance,
    morlet_params,
    normalized_log_price,
    pair,
    reconstruct,
    simulate_ar1,
    standardize,
    transform,
    wct,
    xwt,
)

__all__ = [
    "Ar1Params",
    "CoherenceField",
    "ConfigError",
    "CwtMatrix",
    "InputError",
    "MorletParams",
    "ScaleGrid",
    "SignificanceField",
    "__version__",
    "coi",
    "cwt",
    "default_grid",
    "energy",
    "fit_ar1",
    "lead_time",
    "load_csv",
    "log_returns",
    "mc_significance",
    "morlet_params",
    "normalized_log_price",
    "pair",
    "reconstruct",
    "simulate_ar1",
    "standardize",
    "transform",
    "wct",
    "xwt",
]
