"""Shared fixtures: bundled data paths and synthetic ground truths."""

from __future__ import annotations

import datetime as dt
import math
from pathlib import Path

import numpy as np
import pytest

from epiwave import LogNormalWavelet, WaveletMixture

DATA_DIR = Path(__file__).parent / "data"

# Reference holdout-error tables for three regions, late October 2020:
# (smoothed actual, model prediction, expected error in percent). The means
# below are the corresponding published averages.
REFERENCE_TABLES = {
    "Czechia": [
        (dt.date(2020, 10, 20), 11173.0, 10730.0, 3.96),
        (dt.date(2020, 10, 21), 11710.0, 11161.0, 4.68),
        (dt.date(2020, 10, 22), 12030.0, 11564.0, 3.87),
        (dt.date(2020, 10, 23), 12689.0, 11934.0, 5.95),
        (dt.date(2020, 10, 24), 12830.0, 12269.0, 4.37),
        (dt.date(2020, 10, 25), 12295.0, 12564.0, 2.18),
    ],
    "Germany": [
        (dt.date(2020, 10, 20), 9472.0, 8346.0, 11.88),
        (dt.date(2020, 10, 21), 10019.0, 8763.0, 12.53),
        (dt.date(2020, 10, 22), 9861.0, 9164.0, 7.06),
        (dt.date(2020, 10, 23), 10105.0, 9545.0, 5.54),
        (dt.date(2020, 10, 24), 10421.0, 9902.0, 4.98),
        (dt.date(2020, 10, 25), 9944.0, 10231.0, 2.88),
    ],
    "Italy": [
        (dt.date(2020, 10, 20), 13322.0, 13000.0, 2.41),
        (dt.date(2020, 10, 21), 14567.0, 14080.0, 3.34),
        (dt.date(2020, 10, 22), 15934.0, 15203.0, 4.58),
        (dt.date(2020, 10, 23), 17034.0, 16364.0, 3.93),
        (dt.date(2020, 10, 24), 18266.0, 17557.0, 3.88),
        (dt.date(2020, 10, 25), 19033.0, 18777.0, 1.34),
    ],
}
REFERENCE_MEANS_PCT = {"Czechia": 4.17, "Germany": 7.48, "Italy": 3.25}


def balanced_three_waves(peaks=(25.0, 60.0, 95.0), widths=(0.25, 0.2, 0.3), mass=25000.0):
    """Three log-normal waves carrying roughly equal case mass each."""
    comps = tuple(
        LogNormalWavelet(mass / (p * c), math.log(p), c) for p, c in zip(peaks, widths)
    )
    return WaveletMixture(components=comps, origin_date=dt.date(2020, 3, 1))


@pytest.fixture
def three_wave_truth():
    return balanced_three_waves()


@pytest.fixture
def jhu_csv_path() -> Path:
    return DATA_DIR / "jhu_synthetic.csv"


@pytest.fixture
def three_wave_dir() -> Path:
    return DATA_DIR / "three_wave"


@pytest.fixture
def rng():
    return np.random.default_rng(20201025)
