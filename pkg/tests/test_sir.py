"""SIR integration, trajectory wavelets, and synthetic series generation."""

import datetime as dt
import math

import numpy as np
import pytest

from epiwave import (
    GaussianWavelet,
    SirParams,
    SirState,
    WaveletMixture,
    integrate_sir,
    is_epidemic_fitted,
    sir_wavelet,
    synth_daily_cases,
)
from epiwave.errors import ConfigurationError

POP = 1e6


def classic_params(beta=0.3, gamma=0.1):
    return SirParams(beta=beta, gamma=gamma, population=POP)


class TestIntegrator:
    def test_disease_free_equilibrium(self):
        traj = integrate_sir(classic_params(), SirState(POP, 0.0, 0.0), dt=0.05, steps=500)
        assert np.all(traj.infectious == 0.0)
        assert np.all(traj.susceptible == POP)
        assert np.all(traj.recovered == 0.0)

    def test_pure_decay_matches_exponential(self):
        traj = integrate_sir(SirParams(0.0, 0.1, POP), SirState(POP - 100, 100.0, 0.0),
                             dt=0.05, steps=200)
        assert traj.infectious[-1] == pytest.approx(100.0 * math.exp(-1.0), rel=1e-9)

    def test_fourth_order_convergence_on_decay(self):
        errs = []
        for step in (0.1, 0.05):
            traj = integrate_sir(SirParams(0.0, 0.5, POP), SirState(POP - 100, 100.0, 0.0),
                                 dt=step, steps=int(round(10.0 / step)))
            errs.append(abs(traj.infectious[-1] - 100.0 * math.exp(-5.0)))
        ratio = errs[0] / errs[1]
        assert 8.0 <= ratio <= 24.0  # 16 +- 50%

    def test_susceptibles_at_infection_peak(self):
        traj = integrate_sir(classic_params(), SirState(POP - 1, 1.0, 0.0), dt=0.01, steps=20_000)
        s_peak = traj.susceptible[np.argmax(traj.infectious)]
        assert s_peak == pytest.approx(0.1 * POP / 0.3, rel=1e-3)

    def test_conservation_over_ten_thousand_steps(self):
        traj = integrate_sir(classic_params(), SirState(POP - 10, 10.0, 0.0), dt=0.05, steps=10_000)
        drift = np.abs(traj.susceptible + traj.infectious + traj.recovered - POP)
        assert drift.max() < 1e-9 * POP

    def test_monotone_compartments(self):
        traj = integrate_sir(classic_params(), SirState(POP - 10, 10.0, 0.0), dt=0.05, steps=5000)
        assert np.all(np.diff(traj.susceptible) <= 1e-12 * POP)
        assert np.all(np.diff(traj.recovered) >= -1e-12 * POP)

    def test_stability_guard_rejects_long_steps(self):
        with pytest.raises(ConfigurationError):
            integrate_sir(SirParams(2.0, 0.5, POP), SirState(POP - 1, 1.0, 0.0), dt=0.6, steps=10)

    def test_state_invariants(self):
        with pytest.raises(ConfigurationError):
            SirState(-1.0, 0.0, 0.0)
        with pytest.raises(ConfigurationError):
            SirParams(0.1, 0.0, POP)


class TestSirWavelet:
    def test_outbreak_wave_is_epidemic_fitted(self):
        # takes off (beta S0 / (gamma N) > 1) and dies out within the window
        traj = integrate_sir(classic_params(), SirState(POP - 1, 1.0, 0.0), dt=0.05, steps=4000)
        w = sir_wavelet(traj, amplitude=1000.0)
        assert is_epidemic_fitted(w, (0.0, traj.times[-1]), 1024)

    def test_rejects_all_zero_curve(self):
        traj = integrate_sir(classic_params(), SirState(POP, 0.0, 0.0), dt=0.05, steps=100)
        with pytest.raises(ConfigurationError):
            sir_wavelet(traj, amplitude=1.0)


class TestSynthDailyCases:
    @pytest.fixture
    def mixture(self, three_wave_truth):
        return three_wave_truth

    def test_noiseless_equals_mixture(self, mixture):
        series = synth_daily_cases(mixture, days=90, noise_cv=0.0, seed=3)
        np.testing.assert_array_equal(series.values, mixture.eval(series.day_indices))
        assert series.origin_date == mixture.origin_date

    def test_same_seed_reproduces(self, mixture):
        s1 = synth_daily_cases(mixture, days=90, noise_cv=0.2, seed=11)
        s2 = synth_daily_cases(mixture, days=90, noise_cv=0.2, seed=11)
        np.testing.assert_array_equal(s1.values, s2.values)
        s3 = synth_daily_cases(mixture, days=90, noise_cv=0.2, seed=12)
        assert not np.array_equal(s1.values, s3.values)

    def test_noise_level_statistics(self):
        # near-constant positive signal so the noise ratio is directly observable
        flat = WaveletMixture(
            components=(GaussianWavelet(1000.0, 5000.0, 1e7),),
            origin_date=dt.date(2020, 1, 1),
        )
        days = 10_000
        series = synth_daily_cases(flat, days=days, noise_cv=0.1, seed=2)
        clean = flat.eval(series.day_indices)
        eps = series.values / clean - 1.0
        assert abs(eps.std() - 0.1) < 0.005  # within 5% of 0.1

    def test_values_clipped_at_zero(self, mixture):
        series = synth_daily_cases(mixture, days=120, noise_cv=3.0, seed=5)
        assert series.values.min() >= 0.0

    def test_preconditions(self, mixture):
        with pytest.raises(ConfigurationError):
            synth_daily_cases(mixture, days=0)
        with pytest.raises(ConfigurationError):
            synth_daily_cases(mixture, days=10, noise_cv=-0.1)
