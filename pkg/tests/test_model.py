"""Mixture model: evaluation, initialization, fitting, forecasting."""

import datetime as dt
import math

import numpy as np
import pytest

from conftest import balanced_three_waves
from epiwave import (
    FitConfig,
    LogNormalWavelet,
    WaveletFamily,
    WaveletMixture,
    decompose,
    fit,
    forecast,
    initialize,
    mixture_from_record,
    mixture_to_record,
    synth_daily_cases,
)
from epiwave.data import DailySeries, SeriesKind
from epiwave.errors import ConfigurationError
from epiwave.model import redundant_components

ORIGIN = dt.date(2020, 3, 1)


def series_of(values, kind=SeriesKind.SMOOTHED):
    return DailySeries(origin_date=ORIGIN, values=np.asarray(values, dtype=float), kind=kind)


def single_wave(a=1.0, peak=20.0, c=0.4):
    return WaveletMixture(
        components=(LogNormalWavelet(a, math.log(peak), c),), origin_date=ORIGIN
    )


class TestMixtureEval:
    def test_zero_amplitudes_give_zero_curve(self):
        mix = WaveletMixture(
            components=(LogNormalWavelet(0.0, 1.0, 0.5), LogNormalWavelet(0.0, 2.0, 0.5)),
            origin_date=ORIGIN,
        )
        t = np.linspace(1, 100, 57)
        assert np.all(mix.eval(t) == 0.0)

    def test_single_component_reduces_to_wavelet(self):
        w = LogNormalWavelet(1.0, 0.0, 1.0)
        mix = WaveletMixture(components=(w,), origin_date=ORIGIN)
        assert mix.eval(1.0) == 1.0

    def test_two_identical_components_equal_doubled_amplitude(self):
        w = LogNormalWavelet(3.0, 2.0, 0.4)
        twice = WaveletMixture(components=(w, w), origin_date=ORIGIN)
        doubled = WaveletMixture(
            components=(LogNormalWavelet(6.0, 2.0, 0.4),), origin_date=ORIGIN
        )
        t = np.linspace(1, 60, 91)
        np.testing.assert_allclose(twice.eval(t), doubled.eval(t), rtol=1e-12)

    def test_components_kept_in_canonical_order(self):
        late = LogNormalWavelet(1.0, math.log(90.0), 0.3)
        early = LogNormalWavelet(2.0, math.log(10.0), 0.3)
        mix = WaveletMixture(components=(late, early), origin_date=ORIGIN)
        assert mix.components[0].peak() < mix.components[1].peak()

    def test_needs_at_least_one_component(self):
        with pytest.raises(ConfigurationError):
            WaveletMixture(components=(), origin_date=ORIGIN)


class TestInitialize:
    def test_single_wave_peak_at_mass_median(self, rng):
        values = LogNormalWavelet(100.0, math.log(40.0), 0.3).eval(np.arange(1.0, 121.0))
        series = series_of(values)
        mix = initialize(series, FitConfig(n_wavelets=1))
        # independent oracle: first index where the running sum crosses half the mass
        cum = np.cumsum(values)
        median_day = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
        assert mix.components[0].peak() == pytest.approx(median_day, abs=1e-9)

    def test_constant_series_quarter_quantiles(self):
        series = series_of(np.full(100, 7.0))
        mix = initialize(series, FitConfig(n_wavelets=2))
        peaks = sorted(w.peak() for w in mix.components)
        assert abs(peaks[0] - 25.0) <= 1.0
        assert abs(peaks[1] - 75.0) <= 1.0

    def test_amplitudes_equal_series_values_at_peak_days(self, rng):
        values = rng.uniform(1.0, 500.0, size=90)
        series = series_of(values)
        mix = initialize(series, FitConfig(n_wavelets=3))
        for w in mix.components:
            day = int(round(w.peak()))
            assert w.amplitude == values[day - 1]

    def test_all_zero_series_rejected(self):
        with pytest.raises(ConfigurationError):
            initialize(series_of(np.zeros(30)), FitConfig(n_wavelets=1))


class TestFit:
    def test_noiseless_three_wave_recovery(self, three_wave_truth):
        y = synth_daily_cases(three_wave_truth, days=120, noise_cv=0.0, seed=7)
        out = fit(y, FitConfig(n_wavelets=3, n_starts=16, seed=42))
        assert out.report.sse < 1e-6 * float(y.values @ y.values)
        for w_true, w_hat in zip(three_wave_truth.components, out.mixture.components):
            assert w_hat.amplitude == pytest.approx(w_true.amplitude, rel=0.01)
            assert w_hat.b == pytest.approx(w_true.b, rel=0.01)
            assert w_hat.c == pytest.approx(w_true.c, rel=0.01)

    def test_extra_components_do_not_hurt(self):
        y = synth_daily_cases(single_wave(a=500.0, peak=40.0), days=100, noise_cv=0.0, seed=1)
        sse1 = fit(y, FitConfig(n_wavelets=1, n_starts=8, seed=3)).report.sse
        sse3 = fit(y, FitConfig(n_wavelets=3, n_starts=8, seed=3)).report.sse
        assert sse3 <= sse1 + 1e-9 * float(y.values @ y.values)

    def test_deterministic_given_seed(self, three_wave_truth):
        y = synth_daily_cases(three_wave_truth, days=120, noise_cv=0.05, seed=7)
        a = fit(y, FitConfig(n_wavelets=3, n_starts=8, seed=5))
        b = fit(y, FitConfig(n_wavelets=3, n_starts=8, seed=5))
        for wa, wb in zip(a.mixture.components, b.mixture.components):
            assert (wa.amplitude, wa.b, wa.c) == (wb.amplitude, wb.b, wb.c)

    def test_thread_count_does_not_change_result(self, three_wave_truth):
        y = synth_daily_cases(three_wave_truth, days=120, noise_cv=0.05, seed=7)
        seq = fit(y, FitConfig(n_wavelets=3, n_starts=8, seed=5, threads=1))
        par = fit(y, FitConfig(n_wavelets=3, n_starts=8, seed=5, threads=4))
        assert seq.start_index == par.start_index
        for wa, wb in zip(seq.mixture.components, par.mixture.components):
            assert (wa.amplitude, wa.b, wa.c) == (wb.amplitude, wb.b, wb.c)

    def test_fit_never_worse_than_initialization(self, three_wave_truth):
        y = synth_daily_cases(three_wave_truth, days=120, noise_cv=0.1, seed=9)
        cfg = FitConfig(n_wavelets=3, n_starts=4, seed=0)
        init_curve = initialize(y, cfg).eval(y.day_indices)
        init_sse = float(((init_curve - y.values) ** 2).sum())
        assert fit(y, cfg).report.sse <= init_sse

    def test_scaling_equivariance(self, three_wave_truth):
        y = synth_daily_cases(three_wave_truth, days=120, noise_cv=0.0, seed=7)
        scaled = series_of(123.0 * y.values, kind=y.kind)
        cfg = FitConfig(n_wavelets=3, n_starts=8, seed=4)
        base = fit(y, cfg).mixture
        big = fit(scaled, cfg).mixture
        for wb, ws in zip(base.components, big.components):
            assert ws.amplitude == pytest.approx(123.0 * wb.amplitude, rel=0.01)
            assert ws.b == pytest.approx(wb.b, abs=1e-3)
            assert ws.c == pytest.approx(wb.c, abs=1e-3)

    def test_time_shift_covariance(self):
        # the family has no shift parameter, so a k-day-shifted series is fit
        # by *different* log-normals; the refit curve, shifted back, must
        # still track the original fit within fit tolerance
        k = 5
        base = balanced_three_waves()
        y1 = synth_daily_cases(base, days=120, noise_cv=0.0, seed=7)
        y2 = series_of(np.concatenate([np.zeros(k), y1.values]), kind=y1.kind)
        cfg = FitConfig(n_wavelets=3, n_starts=16, seed=42)
        fit_base = fit(y1, cfg).mixture
        fit_shift = fit(y2, cfg).mixture
        t = np.arange(1.0, 121.0)
        curve_base = fit_base.eval(t)
        curve_shift = fit_shift.eval(t + k)
        assert np.max(np.abs(curve_shift - curve_base)) <= 0.02 * curve_base.max()

    def test_too_short_series_rejected(self):
        with pytest.raises(ConfigurationError):
            fit(series_of(np.ones(8)), FitConfig(n_wavelets=3))

    def test_redundant_components_flagged(self):
        mix = WaveletMixture(
            components=(
                LogNormalWavelet(1000.0, math.log(30.0), 0.3),
                LogNormalWavelet(0.5, math.log(60.0), 0.3),
            ),
            origin_date=ORIGIN,
        )
        assert redundant_components(mix) == (1,)


class TestForecast:
    def test_sixty_day_projection_length(self):
        out = forecast(single_wave(), last_observed=100, horizon=60)
        assert len(out) == 60
        assert out.origin_date == ORIGIN + dt.timedelta(days=100)

    def test_zero_mixture_forecasts_zeros(self):
        mix = WaveletMixture(components=(LogNormalWavelet(0.0, 1.0, 0.5),), origin_date=ORIGIN)
        out = forecast(mix, last_observed=10, horizon=60)
        assert np.all(out.values == 0.0)

    def test_first_forecast_value_is_next_day_eval(self):
        mix = single_wave(a=250.0, peak=30.0)
        out = forecast(mix, last_observed=50, horizon=1)
        assert out.values[0] == mix.eval(51.0)

    def test_forecasts_are_nonnegative(self, three_wave_truth):
        out = forecast(three_wave_truth, last_observed=120, horizon=60)
        assert out.values.min() >= 0.0

    def test_horizon_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            forecast(single_wave(), last_observed=10, horizon=0)


class TestDecompose:
    def test_single_component_equals_total(self):
        mix = single_wave(a=400.0, peak=25.0)
        parts = decompose(mix, (1, 90))
        np.testing.assert_allclose(parts[0].values, mix.eval(np.arange(1.0, 91.0)), rtol=1e-15)

    def test_components_sum_to_mixture(self, three_wave_truth):
        parts = decompose(three_wave_truth, (1, 500))
        total = sum(p.values for p in parts)
        expected = three_wave_truth.eval(np.arange(1.0, 501.0))
        np.testing.assert_allclose(total, expected, rtol=1e-10)

    def test_component_peaks_match_wavelet_peaks(self, three_wave_truth):
        parts = decompose(three_wave_truth, (1, 200))
        for w, part in zip(three_wave_truth.components, parts):
            grid_peak_day = 1 + int(np.argmax(part.values))
            assert abs(grid_peak_day - w.peak()) <= 1.0

    def test_range_validation(self):
        with pytest.raises(ConfigurationError):
            decompose(single_wave(), (10, 5))


class TestMixtureRecord:
    def test_round_trip(self, three_wave_truth):
        record = mixture_to_record(three_wave_truth, seed=42, extra={"config": "abc"})
        back, meta = mixture_from_record(record)
        assert meta["seed"] == "42"
        assert meta["config"] == "abc"
        assert back.origin_date == three_wave_truth.origin_date
        for wa, wb in zip(three_wave_truth.components, back.components):
            assert (wa.amplitude, wa.b, wa.c) == (wb.amplitude, wb.b, wb.c)

    def test_serialization_is_deterministic(self, three_wave_truth):
        assert mixture_to_record(three_wave_truth, seed=1) == mixture_to_record(
            three_wave_truth, seed=1
        )

    def test_rejects_malformed_header(self):
        with pytest.raises(ConfigurationError):
            mixture_from_record("not-a-record v0\n")

    def test_rejects_component_count_mismatch(self, three_wave_truth):
        record = mixture_to_record(three_wave_truth, seed=1)
        truncated = "\n".join(record.splitlines()[:-1]) + "\n"
        with pytest.raises(ConfigurationError):
            mixture_from_record(truncated)


class TestFitConfigValidation:
    def test_bad_values_rejected(self):
        with pytest.raises(ConfigurationError):
            FitConfig(n_wavelets=0)
        with pytest.raises(ConfigurationError):
            FitConfig(n_starts=0)
        with pytest.raises(ConfigurationError):
            FitConfig(family=WaveletFamily.SIR_WAVE)
