"""SIR compartmental dynamics and synthetic daily-case generation.

The infectious-compartment curve I(t) of the classic
susceptible/infectious/recovered system

    dS/dt = -beta * I * S / N
    dI/dt =  beta * I * S / N - gamma * I
    dR/dt =  gamma * I

is itself an epidemic wavelet whenever the outbreak takes off and dies out,
so trajectories double as a wavelet family (via :func:`sir_wavelet`) and as
ground truth for fitting experiments (via :func:`synth_daily_cases`).
Integration is classic fixed-step RK4; the sum S + I + R is conserved by the
equations and drifts only at floating-point level.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .data import DailySeries, SeriesKind
from .errors import ConfigurationError
from .wavelets import SirWavelet

DEFAULT_DT = 0.05  # days per RK4 step; far below the day-scale noise in data


@dataclass(frozen=True)
class SirParams:
    """Contact rate ``beta`` (1/day), recovery rate ``gamma`` (1/day), population ``N``."""

    beta: float
    gamma: float
    population: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ConfigurationError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ConfigurationError(f"gamma must be finite and > 0, got {self.gamma}")
        if not (math.isfinite(self.population) and self.population > 0):
            raise ConfigurationError(f"population must be finite and > 0, got {self.population}")


@dataclass(frozen=True)
class SirState:
    susceptible: float
    infectious: float
    recovered: float

    def __post_init__(self):
        for name in ("susceptible", "infectious", "recovered"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be finite and >= 0, got {v}")

    @property
    def total(self) -> float:
        return self.susceptible + self.infectious + self.recovered


@dataclass(frozen=True, eq=False)
class SirTrajectory:
    """Uniform-grid SIR trajectory: ``dt`` days between consecutive states."""

    dt: float
    susceptible: np.ndarray
    infectious: np.ndarray
    recovered: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.susceptible.size)

    def state_at(self, index: int) -> SirState:
        return SirState(
            float(self.susceptible[index]),
            float(self.infectious[index]),
            float(self.recovered[index]),
        )


def integrate_sir(params: SirParams, state0: SirState, dt: float = DEFAULT_DT, steps: int = 2000) -> SirTrajectory:
    """Integrate the SIR system with classic 4th-order Runge-Kutta.

    ``steps`` RK4 steps of length ``dt`` days; the trajectory includes the
    initial state, so it holds ``steps + 1`` samples. Rejects ``dt * beta > 1``
    (a step long enough for the contact dynamics to go unstable).
    """
    if dt <= 0:
        raise ConfigurationError("dt must be > 0")
    if steps < 1:
        raise ConfigurationError("steps must be >= 1")
    if dt * params.beta > 1.0:
        raise ConfigurationError(
            f"dt * beta = {dt * params.beta:.3g} > 1; shrink the step for stability"
        )

    n_pop = params.population
    beta, gamma = params.beta, params.gamma

    def deriv(y: np.ndarray) -> np.ndarray:
        s, i, _ = y
        new_infections = beta * i * s / n_pop
        return np.array([-new_infections, new_infections - gamma * i, gamma * i])

    out = np.empty((steps + 1, 3))
    out[0] = (state0.susceptible, state0.infectious, state0.recovered)
    y = out[0].copy()
    for k in range(steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return SirTrajectory(dt=dt, susceptible=out[:, 0], infectious=out[:, 1], recovered=out[:, 2])


def sir_wavelet(trajectory: SirTrajectory, amplitude: float) -> SirWavelet:
    """Wrap a trajectory's I(t) as a unit-peak wavelet scaled by ``amplitude``."""
    return SirWavelet(
        amplitude=amplitude,
        times=trajectory.times,
        infectious=trajectory.infectious,
    )


def synth_daily_cases(mixture, days: int, noise_cv: float = 0.0, seed: int = 0) -> DailySeries:
    """Sample a mixture on days 1..``days`` with multiplicative Gaussian noise.

    ``values[i] = max(0, W(i+1) * (1 + eps))`` with ``eps ~ N(0, noise_cv^2)``
    drawn from a generator seeded with ``seed``, so identical arguments give
    identical series.
    """
    if days < 1:
        raise ConfigurationError("days must be >= 1")
    if noise_cv < 0:
        raise ConfigurationError("noise_cv must be >= 0")
    t = np.arange(1, days + 1, dtype=float)
    clean = mixture.eval(t)
    if noise_cv > 0:
        eps = np.random.default_rng(seed).normal(0.0, noise_cv, size=days)
        clean = clean * (1.0 + eps)
    origin = getattr(mixture, "origin_date", None) or dt.date(2020, 1, 22)
    return DailySeries(origin_date=origin, values=np.maximum(clean, 0.0), kind=SeriesKind.RAW)
