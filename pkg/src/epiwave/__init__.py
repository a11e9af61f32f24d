"""Epidemic wave modelling.

Model a daily-reported-cases curve as a positive mixture of epidemic
wavelets, fit the mixture to the 7-day-smoothed series with multi-start
Levenberg-Marquardt, validate on a holdout window with the relative
percentage difference, and forecast by extrapolating the mixture.
"""

from .data import (
    DailySeries,
    EdgePolicy,
    RawTimeSeries,
    SeriesKind,
    cumulative_to_daily,
    moving_average,
    parse_timeseries_csv,
    train_validation_split,
)
from .metrics import (
    ValidationRow,
    make_validation_rows,
    mean_validation_error,
    relative_percentage_difference,
)
from .model import (
    FitConfig,
    MixtureFit,
    WaveletMixture,
    decompose,
    fit,
    forecast,
    initialize,
    mixture_from_record,
    mixture_to_record,
)
from .sir import SirParams, SirState, SirTrajectory, integrate_sir, sir_wavelet, synth_daily_cases
from .solver import (
    Convergence,
    FitReport,
    LeastSquaresProblem,
    LmOptions,
    jacobian_fd,
    levenberg_marquardt,
)
from .wavelets import (
    BetaPrimeWavelet,
    GaussianWavelet,
    GompertzWavelet,
    LogNormalWavelet,
    SirWavelet,
    TruncatedGaussianWavelet,
    Wavelet,
    WaveletFamily,
    admissibility_sanity,
    is_epidemic_fitted,
)

__version__ = "0.1.0"

__all__ = [
    "BetaPrimeWavelet",
    "Convergence",
    "DailySeries",
    "EdgePolicy",
    "FitConfig",
    "FitReport",
    "GaussianWavelet",
    "GompertzWavelet",
    "LeastSquaresProblem",
    "LmOptions",
    "LogNormalWavelet",
    "MixtureFit",
    "RawTimeSeries",
    "SeriesKind",
    "SirParams",
    "SirState",
    "SirTrajectory",
    "SirWavelet",
    "TruncatedGaussianWavelet",
    "ValidationRow",
    "Wavelet",
    "WaveletFamily",
    "WaveletMixture",
    "admissibility_sanity",
    "cumulative_to_daily",
    "decompose",
    "fit",
    "forecast",
    "initialize",
    "integrate_sir",
    "is_epidemic_fitted",
    "jacobian_fd",
    "levenberg_marquardt",
    "make_validation_rows",
    "mean_validation_error",
    "mixture_from_record",
    "mixture_to_record",
    "moving_average",
    "parse_timeseries_csv",
    "relative_percentage_difference",
    "sir_wavelet",
    "synth_daily_cases",
    "train_validation_split",
]
