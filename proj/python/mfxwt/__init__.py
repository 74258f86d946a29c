"""Joint multifractal analysis of paired series with wavelet partition functions."""

from ._mfxwt import (
    BinomialTheory,
    MfxwtError,
    analyze,
    binomial_mass_exponent,
    binomial_scaling_exponent,
    compare_wt_pf,
    cwt,
    default_scales,
    diagonal,
    gen_bfbm,
    gen_binomial,
    load_price_csv,
    make_surrogate,
    pearson,
    surrogate_ensemble,
)

__all__ = [
    "BinomialTheory",
    "MfxwtError",
    "analyze",
    "binomial_mass_exponent",
    "binomial_scaling_exponent",
    "compare_wt_pf",
    "cwt",
    "default_scales",
    "diagonal",
    "gen_bfbm",
    "gen_binomial",
    "load_price_csv",
    "make_surrogate",
    "pearson",
    "surrogate_ensemble",
]
