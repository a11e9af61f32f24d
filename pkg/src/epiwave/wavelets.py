"""Epidemic wavelet families.

An epidemic wavelet is a nonnegative integrable pulse with start-peak-stop
behavior: it vanishes toward both ends of its interval and has a single
interior maximum, modelling one sub-epidemic wave of daily cases. Every
family here is parameterized by an amplitude ``a`` plus family-specific
shape parameters, and evaluates on the day-index axis ``t`` (``t = 1`` is
the first data day; log-time families are zero for ``t <= 0``).

Families:

- ``LogNormalWavelet``: ``a * exp(-(log t - b)^2 / (2 c^2))``, peak at
  ``e**b``. The workhorse family: symmetric in log-time, hence skewed in
  real time with a steep rise and a long, slowly decaying tail.
- ``GaussianWavelet``: ``a * exp(-(t - b)^2 / (2 c^2))``.
- ``TruncatedGaussianWavelet``: Gaussian minus its value at ``t = 0``,
  clipped at zero, so the pulse starts at zero like a fresh outbreak.
- ``GompertzWavelet``: ``a * b * c * exp(c + b t - c e^(b t))``, the
  Gompertz probability density.
- ``BetaPrimeWavelet``: ``a * t^(b-1) (1+t)^(-b-c) / B(b, c)``.
- ``SirWavelet``: the infectious-compartment curve ``I(t)`` of a simulated
  SIR epidemic, normalized to unit peak and amplitude-scaled.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar

import numpy as np

from .errors import ConfigurationError

# Central-difference step factor for families without analytic gradients.
FD_STEP = 1e-6

# A wavelet counts as vanishing at an interval endpoint when its value there
# is below this fraction of its maximum on the interval.
ENDPOINT_DECAY_RTOL = 1e-3


class WaveletFamily(Enum):
    LOG_NORMAL = "log_normal"
    GAUSSIAN = "gaussian"
    GAUSSIAN_TRUNCATED = "gaussian_truncated"
    GOMPERTZ = "gompertz"
    BETA_PRIME = "beta_prime"
    SIR_WAVE = "sir_wave"


@dataclass(frozen=True)
class Wavelet:
    """Base class: an amplitude plus family-specific shape parameters.

    Instances are immutable and all methods are pure, so wavelets are safe
    to share across threads. ``eval`` and ``grad_params`` accept a scalar
    day index or a 1-d array of them.
    """

    amplitude: float

    family: ClassVar[WaveletFamily]
    param_names: ClassVar[tuple[str, ...]] = ("a",)

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ConfigurationError(f"amplitude must be finite and >= 0, got {self.amplitude}")

    # family shape at unit amplitude; takes and returns a 1-d array
    def _shape(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # d eval / d shape-param, stacked rows in param_names[1:] order; the
    # default is the central finite difference pinned to step FD_STEP
    def _shape_grads(self, t: np.ndarray) -> np.ndarray:
        rows = []
        for name in self.param_names[1:]:
            theta = getattr(self, name)
            h = FD_STEP * max(1.0, abs(theta))
            hi = dataclasses.replace(self, **{name: theta + h})
            lo = dataclasses.replace(self, **{name: theta - h})
            rows.append((hi.amplitude * hi._shape(t) - lo.amplitude * lo._shape(t)) / (2.0 * h))
        return np.vstack(rows) if rows else np.empty((0, t.size))

    def eval(self, t):
        """Wavelet value ``a * psi(t)`` in cases/day; 0 outside the domain."""
        arr = np.asarray(t, dtype=float)
        # extreme parameters may overflow to inf/nan; callers treat those
        # points as invalid, so suppress the warnings rather than the values
        with np.errstate(over="ignore", invalid="ignore"):
            vals = self.amplitude * self._shape(np.atleast_1d(arr))
        return float(vals[0]) if arr.ndim == 0 else vals

    def grad_params(self, t):
        """Gradient of ``eval`` w.r.t. ``(a, *shape_params)``.

        Returns shape ``(n_params,)`` for scalar ``t`` and
        ``(n_params, len(t))`` for an array.
        """
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)
        g = np.empty((len(self.param_names), flat.size))
        with np.errstate(over="ignore", invalid="ignore"):
            g[0] = self._shape(flat)
            g[1:] = self._shape_grads(flat)
        return g[:, 0] if arr.ndim == 0 else g

    def peak(self) -> float:
        """Day index of the wavelet's maximum."""
        raise NotImplementedError

    @property
    def shape_params(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in self.param_names[1:])


def _positive_domain(t: np.ndarray, inner) -> np.ndarray:
    """Evaluate ``inner`` on the t > 0 part of the grid, zero elsewhere."""
    out = np.zeros(t.size)
    pos = t > 0
    if np.any(pos):
        out[pos] = inner(t[pos])
    return out


@dataclass(frozen=True)
class LogNormalWavelet(Wavelet):
    """Gaussian in log-time: ``a * exp(-(log t - b)^2 / (2 c^2))`` for t > 0.

    ``b`` is the log of the peak day, ``c`` the width in log-time. The pulse
    is inherently asymmetric: for equal-height points x1 < e^b < x2,
    |psi'(x1)| = (x2/x1) |psi'(x2)|, so the rise is steeper than the fall
    and the decay stretches into a long right tail.
    """

    b: float
    c: float

    family = WaveletFamily.LOG_NORMAL
    param_names = ("a", "b", "c")

    def __post_init__(self):
        super().__post_init__()
        _require_positive_width(self.c)

    def _shape(self, t):
        def inner(x):
            z = (np.log(x) - self.b) / self.c
            return np.exp(-0.5 * z * z)
        return _positive_domain(t, inner)

    def _shape_grads(self, t):
        g = np.zeros((2, t.size))
        pos = t > 0
        if np.any(pos):
            x = t[pos]
            u = np.log(x) - self.b
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                psi = np.exp(-0.5 * (u / self.c) ** 2)
                gb = self.amplitude * psi * u / self.c**2
                gc = self.amplitude * psi * u**2 / self.c**3
            # where psi underflowed, the exact gradient limit is 0, not 0*inf
            dead = psi == 0.0
            gb[dead] = 0.0
            gc[dead] = 0.0
            g[0, pos] = gb
            g[1, pos] = gc
        return g

    def time_derivative(self, t):
        """d eval / dt: ``a * psi(t) * (b - log t) / (c^2 t)`` for t > 0."""
        arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(arr)

        def inner(x):
            u = np.log(x) - self.b
            psi = np.exp(-0.5 * (u / self.c) ** 2)
            return self.amplitude * psi * (-u) / (self.c**2 * x)

        out = _positive_domain(flat, inner)
        return float(out[0]) if arr.ndim == 0 else out

    def peak(self):
        return math.exp(self.b)


@dataclass(frozen=True)
class GaussianWavelet(Wavelet):
    """Plain Gaussian pulse ``a * exp(-(t - b)^2 / (2 c^2))``, peak at ``b``."""

    b: float
    c: float

    family = WaveletFamily.GAUSSIAN
    param_names = ("a", "b", "c")

    def __post_init__(self):
        super().__post_init__()
        _require_positive_width(self.c)

    def _shape(self, t):
        z = (t - self.b) / self.c
        return np.exp(-0.5 * z * z)

    def _shape_grads(self, t):
        u = t - self.b
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            psi = np.exp(-0.5 * (u / self.c) ** 2)
            g = np.vstack([
                self.amplitude * psi * u / self.c**2,
                self.amplitude * psi * u**2 / self.c**3,
            ])
        g[:, psi == 0.0] = 0.0
        return g

    def peak(self):
        return self.b


@dataclass(frozen=True)
class TruncatedGaussianWavelet(Wavelet):
    """Gaussian rebased to start at zero: ``a * max(psi(t) - psi(0), 0)``."""

    b: float
    c: float

    family = WaveletFamily.GAUSSIAN_TRUNCATED
    param_names = ("a", "b", "c")

    def __post_init__(self):
        super().__post_init__()
        _require_positive_width(self.c)

    def _base(self, t):
        z = (t - self.b) / self.c
        return np.exp(-0.5 * z * z)

    def _base0(self) -> float:
        return math.exp(-0.5 * (self.b / self.c) ** 2)

    def _shape(self, t):
        return np.maximum(self._base(t) - self._base0(), 0.0)

    def _shape_grads(self, t):
        base = self._base(t)
        base0 = self._base0()
        active = base - base0 > 0.0
        u = t - self.b
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            db = (base * u + base0 * self.b) / self.c**2
            dc = (base * u**2 - base0 * self.b**2) / self.c**3
            g = np.vstack([
                np.where(active, self.amplitude * db, 0.0),
                np.where(active, self.amplitude * dc, 0.0),
            ])
        g[:, base == 0.0] = 0.0
        return g

    def peak(self):
        return self.b


@dataclass(frozen=True)
class GompertzWavelet(Wavelet):
    """Gompertz density ``a * b c * exp(c + b t - c e^(b t))`` for t > 0.

    Integrates to ``a`` over t >= 0; maximum at ``-log(c) / b`` (inside the
    domain only when c < 1). Shape-parameter gradients use the pinned
    central finite difference.
    """

    b: float
    c: float

    family = WaveletFamily.GOMPERTZ
    param_names = ("a", "b", "c")

    def __post_init__(self):
        super().__post_init__()
        if not (math.isfinite(self.b) and self.b > 0):
            raise ConfigurationError(f"Gompertz rate b must be > 0, got {self.b}")
        _require_positive_width(self.c)

    def _shape(self, t):
        def inner(x):
            bx = self.b * x
            with np.errstate(over="ignore"):
                expo = self.c + bx - self.c * np.exp(bx)
            return self.b * self.c * np.exp(np.minimum(expo, 700.0))
        return _positive_domain(t, inner)

    def peak(self):
        return -math.log(self.c) / self.b


@dataclass(frozen=True)
class BetaPrimeWavelet(Wavelet):
    """Beta-prime density ``a * t^(b-1) (1+t)^(-b-c) / B(b, c)`` for t > 0.

    Requires b > 1 so the pulse starts at zero; maximum at ``(b-1)/(c+1)``.
    The tail decays like ``t^(-1-c)``, so small c gives long epidemic tails.
    """

    b: float
    c: float

    family = WaveletFamily.BETA_PRIME
    param_names = ("a", "b", "c")

    def __post_init__(self):
        super().__post_init__()
        if not (math.isfinite(self.b) and self.b > 1):
            raise ConfigurationError(f"beta-prime shape b must be > 1, got {self.b}")
        _require_positive_width(self.c)

    def _log_beta(self) -> float:
        return math.lgamma(self.b) + math.lgamma(self.c) - math.lgamma(self.b + self.c)

    def _shape(self, t):
        lbeta = self._log_beta()

        def inner(x):
            return np.exp((self.b - 1.0) * np.log(x) - (self.b + self.c) * np.log1p(x) - lbeta)
        return _positive_domain(t, inner)

    def peak(self):
        return (self.b - 1.0) / (self.c + 1.0)


@dataclass(frozen=True, eq=False)
class SirWavelet(Wavelet):
    """Infectious-compartment pulse sampled from a simulated SIR trajectory.

    ``times``/``infectious`` hold the trajectory samples; the stored curve is
    normalized to unit peak at construction so ``amplitude`` is the peak
    value in cases/day, comparable with the other families. Evaluation
    interpolates linearly and clamps to the boundary samples outside the
    stored time range.
    """

    times: np.ndarray
    infectious: np.ndarray

    family = WaveletFamily.SIR_WAVE
    param_names = ("a",)

    def __post_init__(self):
        super().__post_init__()
        times = np.asarray(self.times, dtype=float)
        curve = np.asarray(self.infectious, dtype=float)
        if times.size != curve.size or times.size == 0:
            raise ConfigurationError("times and infectious must be equally sized and nonempty")
        if not (np.all(np.isfinite(curve)) and np.all(np.isfinite(times))):
            raise ConfigurationError("trajectory samples must be finite")
        if np.any(np.diff(times) <= 0):
            raise ConfigurationError("times must be strictly increasing")
        peak = curve.max()
        if peak <= 0:
            raise ConfigurationError("infectious curve is identically zero")
        curve = curve / peak
        times = times.copy()
        times.flags.writeable = False
        curve.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "infectious", curve)

    def _shape(self, t):
        return np.interp(t, self.times, self.infectious)

    def peak(self):
        return float(self.times[int(np.argmax(self.infectious))])


def _require_positive_width(c: float) -> None:
    if not (math.isfinite(c) and c > 0):
        raise ConfigurationError(f"width parameter c must be finite and > 0, got {c}")


def is_epidemic_fitted(wavelet: Wavelet, interval: tuple[float, float], grid_size: int = 256) -> bool:
    """Check start-peak-stop behavior on a uniform grid over ``interval``.

    True iff the sampled values are strictly positive in the interior,
    both endpoint values are below ``ENDPOINT_DECAY_RTOL`` times the
    maximum, and the sequence is unimodal (rises to a single maximal run,
    then falls; plateaus from floating-point ties are tolerated).
    """
    a0, b0 = interval
    if not a0 < b0:
        raise ConfigurationError(f"interval must satisfy a0 < b0, got {interval}")
    if grid_size < 16:
        raise ConfigurationError("grid_size must be >= 16")
    v = wavelet.eval(np.linspace(a0, b0, grid_size))
    vmax = v.max()
    if vmax <= 0 or not np.all(v[1:-1] > 0):
        return False
    if v[0] >= ENDPOINT_DECAY_RTOL * vmax or v[-1] >= ENDPOINT_DECAY_RTOL * vmax:
        return False
    dv = np.diff(v)
    rises = np.flatnonzero(dv > 0)
    falls = np.flatnonzero(dv < 0)
    if rises.size and falls.size and rises.max() > falls.min():
        return False
    return True


@dataclass(frozen=True)
class AdmissibilityCheck:
    """Numeric sanity report for the odd extension of a wavelet.

    ``odd_extension_mean`` is the trapezoid integral of the odd extension
    over the symmetric window (zero mean is what makes the extension an
    admissible mother wavelet). ``first_moment_finite`` reports whether
    ``integral |psi~(x)| (1 + |x|) dx`` converges numerically: the outer 10%
    of the window must contribute less than 1% of the total.
    """

    odd_extension_mean: float
    first_moment_finite: bool


def admissibility_sanity(wavelet: Wavelet, half_width: float, grid_size: int = 20001) -> AdmissibilityCheck:
    """Integrate the odd extension ``psi~(x) = sign(x) * psi(|x|)`` numerically."""
    if half_width <= 0:
        raise ConfigurationError("half_width must be > 0")
    x = np.linspace(-half_width, half_width, grid_size)
    tilde = np.sign(x) * wavelet.eval(np.abs(x))
    mean = float(np.trapezoid(tilde, x))

    weighted = np.abs(tilde) * (1.0 + np.abs(x))
    total = float(np.trapezoid(weighted, x))
    tail_mask = np.abs(x) >= 0.9 * half_width
    left, right = tail_mask & (x < 0), tail_mask & (x > 0)
    tail = float(np.trapezoid(weighted[left], x[left]) + np.trapezoid(weighted[right], x[right]))
    finite = total == 0.0 or tail < 0.01 * total
    return AdmissibilityCheck(odd_extension_mean=mean, first_moment_finite=finite)
