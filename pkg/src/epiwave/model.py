"""Wave-mixture model of a daily-case curve.

The model is ``W(t) = sum_i a_i * psi_{b_i, c_i}(t)``: a positive linear
combination of N epidemic wavelets from one family. Fitting minimizes the
square loss against the smoothed daily series with multi-start
Levenberg-Marquardt; each fitted component reads as one sub-epidemic wave,
so a fit decomposes the epidemic and extrapolating the mixture forecasts it.
"""

from __future__ import annotations

import datetime as dt
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import DailySeries, SeriesKind
from .errors import ConfigurationError, FitFailureError, SolverFailureError
from .solver import (
    FitReport,
    LeastSquaresProblem,
    LmOptions,
    chain_jacobian,
    levenberg_marquardt,
    to_internal_params,
    to_model_params,
)
from .wavelets import (
    BetaPrimeWavelet,
    GaussianWavelet,
    GompertzWavelet,
    LogNormalWavelet,
    TruncatedGaussianWavelet,
    Wavelet,
    WaveletFamily,
)

# Components whose amplitude falls below this fraction of the largest one
# are reported as redundant (kept in the mixture, flagged in diagnostics).
REDUNDANT_AMPLITUDE_RTOL = 1e-3

_FAMILY_CLASSES: dict[WaveletFamily, type[Wavelet]] = {
    WaveletFamily.LOG_NORMAL: LogNormalWavelet,
    WaveletFamily.GAUSSIAN: GaussianWavelet,
    WaveletFamily.GAUSSIAN_TRUNCATED: TruncatedGaussianWavelet,
    WaveletFamily.GOMPERTZ: GompertzWavelet,
    WaveletFamily.BETA_PRIME: BetaPrimeWavelet,
}

FITTABLE_FAMILIES = tuple(_FAMILY_CLASSES)

MIXTURE_FORMAT = "epiwave-mixture/1"


@dataclass(frozen=True, eq=False)
class WaveletMixture:
    """Ordered positive combination of wavelets; ``origin_date`` dates ``t = 1``.

    Components are kept in canonical order (ascending peak time, ties broken
    by descending amplitude then ascending width) so that fits of the same
    curve are comparable regardless of the optimizer's labelling.
    """

    components: tuple[Wavelet, ...]
    origin_date: dt.date

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ConfigurationError("a mixture needs at least one component")
        comps = tuple(sorted(comps, key=_canonical_key))
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def eval(self, t):
        """Mixture value ``W(t)``, scalar or array matching ``t``."""
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        total = np.zeros(flat.size)
        for w in self.components:
            total += w.eval(flat)
        return float(total[0]) if arr.ndim == 0 else total


def _canonical_key(w: Wavelet) -> tuple[float, float, float]:
    return (w.peak(), -w.amplitude, getattr(w, "c", math.inf))


def redundant_components(mixture: WaveletMixture) -> tuple[int, ...]:
    """Indices of components with amplitude below the redundancy threshold."""
    amps = [w.amplitude for w in mixture.components]
    cutoff = REDUNDANT_AMPLITUDE_RTOL * max(amps)
    return tuple(i for i, a in enumerate(amps) if a < cutoff)


@dataclass(frozen=True)
class FitConfig:
    """Knobs for :func:`fit`. The defaults fit 5 log-normal waves."""

    n_wavelets: int = 5
    n_starts: int = 16
    jitter: float = 0.2
    family: WaveletFamily = WaveletFamily.LOG_NORMAL
    lm: LmOptions = field(default_factory=LmOptions)
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.n_wavelets < 1:
            raise ConfigurationError("n_wavelets must be >= 1")
        if self.n_starts < 1:
            raise ConfigurationError("n_starts must be >= 1")
        if self.jitter < 0:
            raise ConfigurationError("jitter must be >= 0")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        if self.family not in _FAMILY_CLASSES:
            raise ConfigurationError(f"family {self.family} cannot be fitted")


@dataclass(frozen=True, eq=False)
class MixtureFit:
    """Fit outcome: the winning mixture plus multi-start diagnostics."""

    mixture: WaveletMixture
    report: FitReport
    start_index: int
    start_sses: tuple[float | None, ...]  # None where a start failed

    @property
    def redundant(self) -> tuple[int, ...]:
        return redundant_components(self.mixture)


# --- parameter packing -----------------------------------------------------
#
# Model space is the concatenation of (a, p1, p2) per component, where p1/p2
# are the family's shape parameters except that the beta-prime b is stored
# as b - 1 so every constrained entry is "strictly positive" and the shared
# exponential transform applies.


def _positivity_mask(family: WaveletFamily, n: int) -> np.ndarray:
    per = {
        WaveletFamily.LOG_NORMAL: (True, False, True),
        WaveletFamily.GAUSSIAN: (True, False, True),
        WaveletFamily.GAUSSIAN_TRUNCATED: (True, False, True),
        WaveletFamily.GOMPERTZ: (True, True, True),
        WaveletFamily.BETA_PRIME: (True, True, True),
    }[family]
    return np.array(per * n)

def _pack(components: tuple[Wavelet, ...], family: WaveletFamily) -> np.ndarray:
    out = []
    for w in components:
        b, c = w.shape_params
        if family is WaveletFamily.BETA_PRIME:
            b = b - 1.0
        out.extend((w.amplitude, b, c))
    return np.array(out)


def _unpack(theta_model: np.ndarray, family: WaveletFamily) -> tuple[Wavelet, ...]:
    cls = _FAMILY_CLASSES[family]
    comps = []
    for a, b, c in np.asarray(theta_model, dtype=float).reshape(-1, 3):
        if family is WaveletFamily.BETA_PRIME:
            b = b + 1.0
        comps.append(cls(amplitude=float(a), b=float(b), c=float(c)))
    return tuple(comps)


def _make_problem(t: np.ndarray, y: np.ndarray, family: WaveletFamily, n: int) -> LeastSquaresProblem:
    mask = _positivity_mask(family, n)

    def residual(u: np.ndarray) -> np.ndarray:
        try:
            comps = _unpack(to_model_params(u, mask), family)
        except ConfigurationError:
            # overflowing trial point (e.g. exp of a huge internal amplitude);
            # report it as non-finite so the solver rejects the step
            return np.full(t.size, np.inf)
        total = np.zeros(t.size)
        for w in comps:
            total += w.eval(t)
        return total - y

    def jacobian(u: np.ndarray) -> np.ndarray:
        comps = _unpack(to_model_params(u, mask), family)
        jac_model = np.empty((t.size, 3 * n))
        for k, w in enumerate(comps):
            jac_model[:, 3 * k : 3 * k + 3] = w.grad_params(t).T
        return chain_jacobian(jac_model, u, mask)

    return LeastSquaresProblem(residual=residual, jacobian=jacobian, n_params=3 * n, n_residuals=t.size)


def initialize(series: DailySeries, config: FitConfig) -> WaveletMixture:
    """Spread N starting waves over the series by cumulative-mass quantiles.

    Peak ``i`` goes to the first day where the running total of the series
    reaches the quantile ``(i - 1/2) / N`` of its mass; the starting
    amplitude is the series value on that day (scaled so the component's
    peak matches it), and the starting width is a moderate default.
    """
    v = series.values
    if v.size == 0 or v.sum() <= 0:
        raise ConfigurationError("cannot initialize a fit on an all-zero series")
    cum = np.cumsum(v)
    total = cum[-1]
    n = config.n_wavelets
    cls = _FAMILY_CLASSES[config.family]
    comps = []
    for i in range(1, n + 1):
        q = (i - 0.5) / n
        idx = int(np.searchsorted(cum, q * total))
        day = float(idx + 1)
        if config.family is WaveletFamily.LOG_NORMAL:
            shape = {"b": math.log(day), "c": 0.3}
        elif config.family in (WaveletFamily.GAUSSIAN, WaveletFamily.GAUSSIAN_TRUNCATED):
            shape = {"b": day, "c": 0.3 * day}
        elif config.family is WaveletFamily.GOMPERTZ:
            shape = {"b": 3.0 / day, "c": math.exp(-3.0)}
        else:  # beta prime: peak (b - 1) / (c + 1) at the chosen day
            shape = {"b": 1.0 + 3.0 * day, "c": 2.0}
        probe = cls(amplitude=1.0, **shape)
        peak_value = probe.eval(probe.peak())
        comps.append(cls(amplitude=float(v[idx]) / max(peak_value, 1e-300), **shape))
    return WaveletMixture(components=tuple(comps), origin_date=series.origin_date)


def fit(series: DailySeries, config: FitConfig | None = None) -> MixtureFit:
    """Multi-start least-squares fit of the mixture to a daily series.

    Start 0 is :func:`initialize`; the remaining ``n_starts - 1`` starts
    perturb its internal parameters with multiplicative log-normal jitter
    drawn from ``config.seed``. Starts run independently (optionally on a
    thread pool) and the lowest-SSE result wins, ties broken by start index
    so the outcome never depends on scheduling.

    Raises
    ------
    FitFailureError
        Every start failed; carries the per-start errors.
    """
    config = config or FitConfig()
    n = config.n_wavelets
    if len(series) < 3 * n:
        raise ConfigurationError(
            f"need at least {3 * n} days to fit {n} wavelets, got {len(series)}"
        )
    mask = _positivity_mask(config.family, n)
    u0 = to_internal_params(_pack(initialize(series, config).components, config.family), mask)

    rng = np.random.default_rng(config.seed)
    starts = [u0]
    for _ in range(config.n_starts - 1):
        starts.append(u0 * np.exp(config.jitter * rng.standard_normal(u0.size)))

    problem = _make_problem(series.day_indices, series.values, config.family, n)

    def solve(u: np.ndarray) -> FitReport | Exception:
        try:
            return levenberg_marquardt(problem, u, config.lm)
        except (SolverFailureError, ConfigurationError) as exc:
            return exc

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(solve, starts))
    else:
        outcomes = [solve(u) for u in starts]

    best_index = None
    for i, outcome in enumerate(outcomes):
        if isinstance(outcome, FitReport):
            if best_index is None or outcome.sse < outcomes[best_index].sse:
                best_index = i
    if best_index is None:
        raise FitFailureError(
            f"all {config.n_starts} starts failed", start_errors=outcomes
        )

    best = outcomes[best_index]
    components = _unpack(to_model_params(best.theta, mask), config.family)
    return MixtureFit(
        mixture=WaveletMixture(components=components, origin_date=series.origin_date),
        report=best,
        start_index=best_index,
        start_sses=tuple(o.sse if isinstance(o, FitReport) else None for o in outcomes),
    )


def forecast(mixture: WaveletMixture, last_observed: int, horizon: int) -> DailySeries:
    """Evaluate the mixture on the ``horizon`` days after ``last_observed``."""
    if horizon < 1:
        raise ConfigurationError("horizon must be >= 1")
    t = np.arange(last_observed + 1, last_observed + horizon + 1, dtype=float)
    return DailySeries(
        origin_date=mixture.origin_date + dt.timedelta(days=int(last_observed)),
        values=mixture.eval(t),
        kind=SeriesKind.SMOOTHED,
    )


def decompose(mixture: WaveletMixture, t_range: tuple[int, int]) -> list[DailySeries]:
    """Per-component daily series over day indices ``first..last`` inclusive.

    The pointwise sum of the returned series reproduces the mixture.
    """
    first, last = int(t_range[0]), int(t_range[1])
    if first > last:
        raise ConfigurationError(f"need first <= last, got {t_range}")
    t = np.arange(first, last + 1, dtype=float)
    origin = mixture.origin_date + dt.timedelta(days=first - 1)
    return [
        DailySeries(origin_date=origin, values=w.eval(t), kind=SeriesKind.SMOOTHED)
        for w in mixture.components
    ]


# --- serialization ----------------------------------------------------------


def mixture_to_record(mixture: WaveletMixture, seed: int, extra: dict[str, str] | None = None) -> str:
    """Serialize to the versioned plain-text record (diff-friendly, full precision)."""
    families = {w.family for w in mixture.components}
    if len(families) != 1 or next(iter(families)) not in _FAMILY_CLASSES:
        raise ConfigurationError("only single-family (a, b, c) mixtures serialize to records")
    family = next(iter(families))
    tokens = [
        MIXTURE_FORMAT,
        f"family={family.value}",
        f"n={len(mixture)}",
        f"origin={mixture.origin_date.isoformat()}",
        f"seed={seed}",
    ]
    tokens.extend(f"{k}={v}" for k, v in sorted((extra or {}).items()))
    lines = [" ".join(tokens)]
    for w in mixture.components:
        b, c = w.shape_params
        lines.append(f"a={float(w.amplitude)!r} b={float(b)!r} c={float(c)!r}")
    return "\n".join(lines) + "\n"


def mixture_from_record(text: str) -> tuple[WaveletMixture, dict[str, str]]:
    """Parse a record written by :func:`mixture_to_record`; returns (mixture, header fields)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(MIXTURE_FORMAT + " "):
        raise ConfigurationError(f"not a {MIXTURE_FORMAT} record")
    meta = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    try:
        family = WaveletFamily(meta["family"])
        n = int(meta["n"])
        origin = dt.date.fromisoformat(meta["origin"])
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed mixture header: {exc}") from None
    if len(lines) - 1 != n:
        raise ConfigurationError(f"header declares {n} components, found {len(lines) - 1}")
    cls = _FAMILY_CLASSES[family]
    comps = []
    for ln in lines[1:]:
        fields = dict(tok.split("=", 1) for tok in ln.split())
        comps.append(cls(amplitude=float(fields["a"]), b=float(fields["b"]), c=float(fields["c"])))
    return WaveletMixture(components=tuple(comps), origin_date=origin), meta
