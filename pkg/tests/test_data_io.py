"""Price loading, percent log-returns, outlier filters, moment summaries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtsfit.data_io import (
    AbsThreshold,
    PriceSeries,
    ReturnSeries,
    SigmaMultiple,
    load_prices,
    log_returns,
    remove_outliers,
    summary_stats,
)
from gtsfit.errors import DataError, DomainError


def write_csv(path, text):
    path.write_text(text)
    return path


class TestLoadPrices:
    def test_rows_sorted_by_date(self, tmp_path):
        p = write_csv(
            tmp_path / "p.csv",
            "date,price\n2020-01-03,102.0\n2020-01-01,100.0\n2020-01-02,101.0\n",
        )
        s = load_prices(p)
        assert [d.isoformat() for d in s.dates] == [
            "2020-01-01", "2020-01-02", "2020-01-03",
        ]
        assert np.array_equal(s.prices, [100.0, 101.0, 102.0])

    def test_custom_column_names(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "Day,Close\n2020-01-01,5.0\n2020-01-02,6.0\n")
        s = load_prices(p, date_column="Day", price_column="Close")
        assert len(s) == 2

    def test_missing_column_named_in_error(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,close\n2020-01-01,5.0\n")
        with pytest.raises(DataError, match="price"):
            load_prices(p)

    def test_duplicate_date_reports_rows(self, tmp_path):
        p = write_csv(
            tmp_path / "p.csv",
            "date,price\n2020-01-01,5.0\n2020-01-01,6.0\n",
        )
        with pytest.raises(DataError, match="duplicate"):
            load_prices(p)

    def test_bad_price_reports_row_number(self, tmp_path):
        p = write_csv(
            tmp_path / "p.csv",
            "date,price\n2020-01-01,5.0\n2020-01-02,zero\n",
        )
        with pytest.raises(DataError, match="row 3"):
            load_prices(p)

    def test_nonpositive_price_rejected(self, tmp_path):
        p = write_csv(
            tmp_path / "p.csv",
            "date,price\n2020-01-01,5.0\n2020-01-02,-1.0\n",
        )
        with pytest.raises(DataError, match="positive"):
            load_prices(p)

    def test_bad_date_rejected(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,price\n01/02/2020,5.0\n")
        with pytest.raises(DataError, match="bad date"):
            load_prices(p)

    def test_empty_file_rejected(self, tmp_path):
        p = write_csv(tmp_path / "p.csv", "date,price\n")
        with pytest.raises(DataError, match="no data"):
            load_prices(p)


class TestLogReturns:
    def test_percent_log_scale(self):
        from datetime import date

        s = PriceSeries(
            (date(2020, 1, 1), date(2020, 1, 2), date(2020, 1, 3)),
            np.array([100.0, 101.0, 99.5]),
        )
        r = log_returns(s)
        expected = 100.0 * np.diff(np.log([100.0, 101.0, 99.5]))
        assert np.allclose(r.values, expected, rtol=1e-15)
        assert r.source_dates == s.dates[1:]

    def test_single_price_rejected(self):
        from datetime import date

        s = PriceSeries((date(2020, 1, 1),), np.array([100.0]))
        with pytest.raises(DataError):
            log_returns(s)

    def test_return_series_validation(self):
        with pytest.raises(DataError):
            ReturnSeries(np.array([1.0, np.nan]))
        with pytest.raises(DataError):
            ReturnSeries(np.ones((2, 2)))


class TestOutlierFilters:
    def test_abs_threshold(self):
        r = ReturnSeries(np.array([0.5, -3.0, 1.0, 2.9, -0.1]))
        kept, removed = remove_outliers(r, AbsThreshold(2.95))
        assert np.array_equal(kept.values, [0.5, 1.0, 2.9, -0.1])
        assert np.array_equal(removed, [1])

    def test_sigma_multiple_single_pass(self):
        """The cut uses the unfiltered mean and sd, not a refreshed one."""
        y = np.array([0.0] * 10 + [50.0])
        r = ReturnSeries(y)
        mu, sd = y.mean(), y.std()
        kept, removed = remove_outliers(r, SigmaMultiple(3.0))
        expected_drop = np.abs(y - mu) > 3.0 * sd
        assert np.array_equal(removed, np.nonzero(expected_drop)[0])
        # after one pass the remaining points would all survive a recut only
        # if the filter re-estimated; a second application may cut again
        assert kept.values.size == y.size - removed.size

    def test_all_removed_rejected(self):
        r = ReturnSeries(np.array([10.0, -12.0]))
        with pytest.raises(DataError):
            remove_outliers(r, AbsThreshold(1.0))

    def test_policy_validation(self):
        with pytest.raises(DomainError):
            AbsThreshold(0.0)
        with pytest.raises(DomainError):
            SigmaMultiple(-2.0)
        with pytest.raises(DomainError):
            remove_outliers(ReturnSeries(np.array([1.0])), policy="trim")

    def test_dates_follow_kept_values(self):
        from datetime import date

        dates = tuple(date(2020, 1, d) for d in (2, 3, 4))
        r = ReturnSeries(np.array([0.1, 9.0, -0.2]), dates)
        kept, _ = remove_outliers(r, AbsThreshold(1.0))
        assert kept.source_dates == (dates[0], dates[2])


class TestSummaryStats:
    def test_hand_values(self):
        s = summary_stats(np.array([1.0, 2.0, 3.0, 4.0]))
        assert s.m == 4
        assert s.mean == pytest.approx(2.5, rel=1e-15)
        assert s.variance == pytest.approx(1.25, rel=1e-15)
        assert s.skewness == pytest.approx(0.0, abs=1e-15)
        assert s.kurtosis == pytest.approx(1.64, rel=1e-12)

    def test_accepts_return_series(self):
        r = ReturnSeries(np.array([1.0, 2.0, 3.0, 4.0]))
        assert summary_stats(r) == summary_stats(r.values)

    def test_zero_variance_rejected(self):
        with pytest.raises(DataError):
            summary_stats(np.array([2.0, 2.0, 2.0]))

    def test_short_sample_rejected(self):
        with pytest.raises(DataError):
            summary_stats(np.array([1.0]))

    @given(
        st.lists(st.floats(-50.0, 50.0), min_size=5, max_size=60).filter(
            lambda v: max(v) - min(v) > 1e-3
        ),
        st.floats(-10.0, 10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_shift_moves_only_the_mean(self, vals, shift):
        a = summary_stats(np.array(vals))
        b = summary_stats(np.array(vals) + shift)
        assert b.mean == pytest.approx(a.mean + shift, rel=1e-9, abs=1e-9)
        assert b.variance == pytest.approx(a.variance, rel=1e-9)
        assert b.skewness == pytest.approx(a.skewness, rel=1e-6, abs=1e-7)
        assert b.kurtosis == pytest.approx(a.kurtosis, rel=1e-6)

    @given(
        st.lists(st.floats(-50.0, 50.0), min_size=5, max_size=60).filter(
            lambda v: max(v) - min(v) > 1e-3
        ),
        st.floats(0.1, 20.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_scale_acts_by_power(self, vals, c):
        a = summary_stats(np.array(vals))
        b = summary_stats(c * np.array(vals))
        assert b.mean == pytest.approx(c * a.mean, rel=1e-9, abs=1e-12)
        assert b.variance == pytest.approx(c * c * a.variance, rel=1e-9)
        assert b.skewness == pytest.approx(a.skewness, rel=1e-6, abs=1e-7)
        assert b.kurtosis == pytest.approx(a.kurtosis, rel=1e-6)

    def test_shipped_summary_fixture_consistency(self, summary_stats_fixture):
        """The frozen per-asset summaries keep their variance/sd relation."""
        for asset, rec in summary_stats_fixture.items():
            if asset == "schema_version":
                continue
            assert rec["m"] > 2500
            assert rec["variance"] > 0
            assert 1.0 < rec["kurtosis"] < 12.0
