#!/usr/bin/env python3
"""Regenerate the bundled test fixtures under tests/data/.

Everything here is deterministic (fixed seeds, fixed dates), so rerunning
the script reproduces the committed fixtures byte for byte.

- jhu_synthetic.csv: a wide cumulative-cases snapshot in the JHU global
  layout for three fictional regions. "Arcadia" has two province rows, a
  three-wave epidemic, a weekly reporting pattern, multiplicative noise,
  and one three-day reporting freeze followed by a catch-up jump.
- three_wave/: a noiseless simulated series plus manifest and the ground
  truth mixture record, produced through the CLI's simulate command.
"""

from __future__ import annotations

import datetime as dt
import math
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from epiwave import LogNormalWavelet, WaveletMixture, mixture_to_record  # noqa: E402
from epiwave.cli import main as cli_main  # noqa: E402

DATA_DIR = REPO / "tests" / "data"
START = dt.date(2020, 1, 22)
N_DAYS = 284  # through 2020-10-31

# weekend under-reporting pattern, mean exactly 1 after normalization
WEEKLY = np.array([1.08, 1.12, 1.06, 1.01, 0.97, 0.85, 0.79])
WEEKLY = WEEKLY / WEEKLY.mean()


def arcadia_truth() -> WaveletMixture:
    return WaveletMixture(
        components=(
            LogNormalWavelet(3000.0, math.log(70.0), 0.25),
            LogNormalWavelet(2000.0, math.log(150.0), 0.30),
            LogNormalWavelet(8000.0, math.log(245.0), 0.22),
        ),
        origin_date=START,
    )


def borduria_truth() -> WaveletMixture:
    return WaveletMixture(
        components=(
            LogNormalWavelet(900.0, math.log(120.0), 0.35),
            LogNormalWavelet(1500.0, math.log(240.0), 0.2),
        ),
        origin_date=START,
    )


def noisy_daily(mix: WaveletMixture, rng: np.random.Generator, cv: float) -> np.ndarray:
    t = np.arange(1, N_DAYS + 1, dtype=float)
    clean = mix.eval(t)
    pattern = WEEKLY[np.arange(N_DAYS) % 7]
    noisy = clean * pattern * (1.0 + rng.normal(0.0, cv, N_DAYS))
    return np.maximum(np.round(noisy), 0.0).astype(int)


def freeze_and_catch_up(cumulative: np.ndarray, start: int, days: int) -> np.ndarray:
    """Hold the cumulative total flat for `days` days; the backlog lands on the next day."""
    out = cumulative.copy()
    out[start : start + days] = out[start - 1]
    return np.maximum.accumulate(out)


def build_jhu_csv() -> str:
    rng = np.random.default_rng(20201031)
    dates = [START + dt.timedelta(days=i) for i in range(N_DAYS)]
    header = ["Province/State", "Country/Region", "Lat", "Long"] + [
        f"{d.month}/{d.day}/{d.strftime('%y')}" for d in dates
    ]

    arcadia = noisy_daily(arcadia_truth(), rng, cv=0.06)
    north_share = rng.binomial(arcadia, 0.6)
    south = arcadia - north_share
    north_cum = freeze_and_catch_up(np.cumsum(north_share), start=150, days=3)
    south_cum = np.cumsum(south)

    borduria_cum = np.cumsum(noisy_daily(borduria_truth(), rng, cv=0.08))

    # tiny single-row region with a quoted, comma-bearing name
    slavonia = np.cumsum(rng.poisson(2.0, N_DAYS))

    rows = [
        ["North Arcadia", "Arcadia", "46.05", "14.51"] + [str(v) for v in north_cum],
        ["South Arcadia", "Arcadia", "45.81", "15.98"] + [str(v) for v in south_cum],
        ["", "Borduria", "47.16", "27.58"] + [str(v) for v in borduria_cum],
        ["", "Slavonia, Upper", "45.16", "18.01"] + [str(v) for v in slavonia],
    ]

    def quote(cell: str) -> str:
        return f'"{cell}"' if "," in cell else cell

    lines = [",".join(header)]
    lines += [",".join(quote(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def build_three_wave() -> None:
    out_dir = DATA_DIR / "three_wave"
    out_dir.mkdir(parents=True, exist_ok=True)
    truth = WaveletMixture(
        components=(
            LogNormalWavelet(4000.0, math.log(25.0), 0.25),
            LogNormalWavelet(2100.0, math.log(60.0), 0.20),
            LogNormalWavelet(900.0, math.log(95.0), 0.30),
        ),
        origin_date=dt.date(2020, 3, 1),
    )
    record_path = out_dir / "mixture.txt"
    record_path.write_text(mixture_to_record(truth, seed=42), encoding="utf-8")
    rc = cli_main([
        "simulate",
        "--mixture", str(record_path),
        "--days", "120",
        "--noise-cv", "0",
        "--seed", "42",
        "--origin", "2020-03-01",
        "--out-dir", str(out_dir),
    ])
    if rc != 0:
        raise SystemExit(f"simulate failed with exit code {rc}")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    (DATA_DIR / "jhu_synthetic.csv").write_text(build_jhu_csv(), encoding="utf-8")
    build_three_wave()
    print(f"fixtures written under {DATA_DIR}")


if __name__ == "__main__":
    main()
