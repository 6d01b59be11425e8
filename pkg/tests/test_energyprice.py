from datetime import date

import pytest

from helpers import constant_prices
from wattshop import PriceSeries, generate_synthetic_prices, load_prices, save_prices
from wattshop.energyprice import PriceSeriesError


def test_constant_series_price_everywhere():
    series = constant_prices(100.0, days=2)
    for t in [0.0, 59.9, 60.0, 1440.0, 2879.9]:
        assert series.price_at(t) == 100.0


def test_hour_boundary_lookup():
    series = PriceSeries([50.0, 70.0])
    assert series.price_at(59.999) == 50.0
    assert series.price_at(60.0) == 70.0
    assert series.price_at(61.0) == 70.0


def test_day_night_profile_lookup():
    hourly = [30.0] * 24
    hourly[13] = 95.0  # midday spike
    series = PriceSeries(hourly)
    midday_minute = 13 * 60 + 30
    assert series.price_at(midday_minute) == hourly[13]


def test_out_of_range_times_rejected():
    series = PriceSeries([10.0] * 24)
    with pytest.raises(PriceSeriesError):
        series.price_at(-1.0)
    with pytest.raises(PriceSeriesError):
        series.price_at(24 * 60.0)


def test_threshold_is_month_average_times_factor():
    series = constant_prices(100.0, days=10)
    assert series.energy_threshold(500.0, 0.9) == pytest.approx(90.0, rel=1e-12)
    assert series.energy_threshold(500.0, 1.0) == series.monthly_average_at(500.0)


def test_two_month_series_uses_month_of_query():
    # January at 80, February at 120 (starts 2023-01-01)
    hours = [80.0] * (31 * 24) + [120.0] * (28 * 24)
    series = PriceSeries(hours, date(2023, 1, 1))
    feb_minute = 31 * 1440 + 7 * 60
    expected_avg = sum(hours[31 * 24:]) / (28 * 24)
    assert series.monthly_average_at(feb_minute) == expected_avg
    assert series.energy_threshold(feb_minute, 0.5) == pytest.approx(0.5 * expected_avg,
                                                                     rel=1e-12)
    assert series.monthly_average_at(100.0) == sum(hours[: 31 * 24]) / (31 * 24)


def test_month_average_equals_mean_of_hourly_queries(synthetic_prices):
    month = synthetic_prices.month_averages()[1]
    # hours of the second covered month (Feb 2023)
    start_hour = 31 * 24
    n_hours = 28 * 24
    sampled = [synthetic_prices.price_at((start_hour + h) * 60.0) for h in range(n_hours)]
    assert sum(sampled) / len(sampled) == month.avg_price


def test_threshold_homogeneous_in_factor(synthetic_prices):
    t = 200 * 1440.0
    base = synthetic_prices.energy_threshold(t, 1.0)
    for k in [0.25, 0.5, 2.0, 4.0]:
        assert synthetic_prices.energy_threshold(t, k) == pytest.approx(k * base, rel=1e-12)


def test_price_scaling_scales_thresholds_exactly(synthetic_prices):
    scaled = synthetic_prices.scaled(2.0)
    for t in [0.0, 99 * 1440.0, 399 * 1440.0 + 600]:
        assert scaled.price_at(t) == 2.0 * synthetic_prices.price_at(t)
        assert scaled.energy_threshold(t, 0.9) == 2.0 * synthetic_prices.energy_threshold(t, 0.9)


def test_load_rejects_gaps_and_duplicates(tmp_path):
    good = tmp_path / "good.csv"
    good.write_text("hour,price\n" + "".join(f"{h},100\n" for h in range(24)))
    series = load_prices(good)
    assert series.n_hours == 24
    assert series.month_averages()[0].avg_price == 100.0

    gap = tmp_path / "gap.csv"
    gap.write_text("hour,price\n" + "".join(f"{h},100\n" for h in range(24) if h != 5))
    with pytest.raises(PriceSeriesError):
        load_prices(gap)

    dup = tmp_path / "dup.csv"
    dup.write_text("hour,price\n0,100\n1,100\n1,90\n")
    with pytest.raises(PriceSeriesError):
        load_prices(dup)


def test_load_rejects_malformed_rows(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("hour,price\n0,abc\n")
    with pytest.raises(PriceSeriesError):
        load_prices(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("hour,price\n")
    with pytest.raises(PriceSeriesError):
        load_prices(empty)


def test_save_load_round_trip(tmp_path, synthetic_prices):
    path = tmp_path / "prices.csv"
    save_prices(synthetic_prices, path)
    loaded = load_prices(path)
    assert loaded.n_hours == synthetic_prices.n_hours
    assert loaded.start_date == synthetic_prices.start_date
    # prices survive the 4-decimal formatting
    assert loaded.price_at(1234.0) == pytest.approx(synthetic_prices.price_at(1234.0),
                                                    abs=5e-5)


def test_generator_covers_requested_days(synthetic_prices):
    assert synthetic_prices.n_hours == 400 * 24
    assert synthetic_prices.horizon_minutes == 400 * 1440
    assert synthetic_prices.prices.min() >= 0.0
    # deterministic in the seed
    again = generate_synthetic_prices(400, base_seed=7)
    assert (again.prices == synthetic_prices.prices).all()
    other = generate_synthetic_prices(400, base_seed=8)
    assert (other.prices != synthetic_prices.prices).any()


def test_generator_has_winter_peak_and_midday_dip(synthetic_prices):
    averages = [m.avg_price for m in synthetic_prices.month_averages()]
    jan, jul = averages[0], averages[6]
    assert jan > 1.5 * jul
    day = 180
    midday = synthetic_prices.price_at((day * 24 + 14) * 60.0)
    evening = synthetic_prices.price_at((day * 24 + 19) * 60.0)
    assert evening > midday
