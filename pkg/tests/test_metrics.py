"""Relative-percentage-difference metric and its table helpers."""

import datetime as dt
import logging

import pytest

from conftest import REFERENCE_MEANS_PCT, REFERENCE_TABLES
from epiwave import (
    ValidationRow,
    make_validation_rows,
    mean_validation_error,
    relative_percentage_difference,
)
from epiwave.errors import ConfigurationError, UndefinedMetricError
from epiwave.metrics import validation_table_csv


class TestRelativePercentageDifference:
    def test_reference_row_czechia(self):
        assert 100 * relative_percentage_difference(11173.0, 10730.0) == pytest.approx(3.96, abs=0.01)

    def test_reference_row_germany(self):
        assert 100 * relative_percentage_difference(9944.0, 10231.0) == pytest.approx(2.88, abs=0.01)

    def test_exact_prediction_scores_zero(self):
        assert relative_percentage_difference(123.4, 123.4) == 0.0

    def test_zero_iff_exact(self, rng):
        for _ in range(50):
            y = rng.uniform(1, 1e5)
            y_hat = y * (1 + rng.normal(0, 0.1))
            err = relative_percentage_difference(y, y_hat)
            assert (err == 0.0) == (y == y_hat)

    def test_scale_invariance(self, rng):
        for _ in range(50):
            y, y_hat, s = rng.uniform(1, 1e4), rng.uniform(1, 1e4), rng.uniform(1e-3, 1e3)
            assert relative_percentage_difference(s * y, s * y_hat) == pytest.approx(
                relative_percentage_difference(y, y_hat), rel=1e-12
            )

    def test_nonpositive_actual_is_undefined(self):
        with pytest.raises(UndefinedMetricError):
            relative_percentage_difference(0.0, 5.0)
        with pytest.raises(UndefinedMetricError):
            relative_percentage_difference(-1.0, 5.0)


class TestMeanValidationError:
    def test_reference_means_reproduced(self):
        for region, rows in REFERENCE_TABLES.items():
            table = make_validation_rows(
                [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]
            )
            assert 100 * mean_validation_error(table) == pytest.approx(
                REFERENCE_MEANS_PCT[region], abs=0.01
            )

    def test_identical_errors_average_to_themselves(self):
        rows = [ValidationRow(dt.date(2020, 1, 1 + i), 100.0, 90.0, 0.1) for i in range(5)]
        assert mean_validation_error(rows) == pytest.approx(0.1, rel=1e-12)

    def test_permutation_invariance(self):
        rows = make_validation_rows(
            [dt.date(2020, 1, d) for d in (1, 2, 3)], [10.0, 20.0, 30.0], [11.0, 18.0, 33.0]
        )
        assert mean_validation_error(rows) == pytest.approx(
            mean_validation_error(rows[::-1]), rel=1e-15
        )

    def test_empty_table_rejected(self):
        with pytest.raises(ConfigurationError):
            mean_validation_error([])


class TestRowBuilding:
    def test_zero_actual_days_excluded_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="epiwave.metrics"):
            rows = make_validation_rows(
                [dt.date(2020, 1, 1), dt.date(2020, 1, 2)], [0.0, 50.0], [5.0, 55.0]
            )
        assert len(rows) == 1
        assert rows[0].actual == 50.0
        assert len(caplog.records) == 1

    def test_length_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            make_validation_rows([dt.date(2020, 1, 1)], [1.0, 2.0], [1.0])


class TestTableCsv:
    def test_five_columns_and_percent_formatting(self):
        rows = make_validation_rows([dt.date(2020, 10, 20)], [11173.0], [10730.0])
        text = validation_table_csv(rows, raw_values=[11984.0], comments=["seed=0"])
        lines = text.strip().splitlines()
        assert lines[0] == "# seed=0"
        assert lines[1] == "date,reported,smoothed,predicted,error_pct"
        fields = lines[2].split(",")
        assert fields[0] == "2020-10-20"
        assert float(fields[1]) == 11984.0
        assert fields[4] == "3.96"
