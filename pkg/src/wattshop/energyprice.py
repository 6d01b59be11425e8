"""Hourly energy price series, monthly averages, and the dispatch price threshold.

Simulation time is minutes; prices are piecewise-constant per hour in cost
units per megawatt hour (CU/MWh). Simulation day 0 is anchored to a calendar
date so each hour belongs to a real calendar month; the dispatch threshold
for an instant is that month's arithmetic mean price times the energy factor.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .stochastics import RngStream

MINUTES_PER_HOUR = 60
HOURS_PER_DAY = 24

DEFAULT_START_DATE = date(2023, 1, 1)


class PriceSeriesError(ValueError):
    """Malformed or insufficient price data."""


@dataclass(frozen=True)
class MonthlyAverage:
    month_index: int
    avg_price: float


class PriceSeries:
    """Immutable hourly price series anchored to a calendar start date."""

    def __init__(self, hourly_prices: Sequence[float], start_date: date = DEFAULT_START_DATE):
        prices = [float(p) for p in hourly_prices]
        if not prices:
            raise PriceSeriesError("price series is empty")
        for i, p in enumerate(prices):
            if not math.isfinite(p):
                raise PriceSeriesError(f"non-finite price at hour {i}")
        self.start_date = start_date
        self._prices = np.asarray(prices, dtype=np.float64)
        self._month_of_hour = self._build_month_index(len(prices), start_date)
        self._month_averages = self._build_month_averages(prices, self._month_of_hour)

    @staticmethod
    def _build_month_index(n_hours: int, start: date) -> np.ndarray:
        # month ordinal per hour, 0 for the month containing the start date
        out = np.empty(n_hours, dtype=np.int32)
        month = 0
        current = (start.year, start.month)
        n_days = (n_hours + HOURS_PER_DAY - 1) // HOURS_PER_DAY
        for d in range(n_days):
            day = start + timedelta(days=d)
            if (day.year, day.month) != current:
                current = (day.year, day.month)
                month += 1
            lo = d * HOURS_PER_DAY
            out[lo : min(lo + HOURS_PER_DAY, n_hours)] = month
        return out

    @staticmethod
    def _build_month_averages(prices: list[float], month_of_hour: np.ndarray) -> list[float]:
        n_months = int(month_of_hour[-1]) + 1
        sums = [0.0] * n_months
        counts = [0] * n_months
        for p, m in zip(prices, month_of_hour):
            sums[m] += p
            counts[m] += 1
        return [s / c for s, c in zip(sums, counts)]

    @property
    def n_hours(self) -> int:
        return len(self._prices)

    @property
    def horizon_minutes(self) -> float:
        return self.n_hours * MINUTES_PER_HOUR

    @property
    def prices(self) -> np.ndarray:
        return self._prices

    def _hour_index(self, sim_minutes: float) -> int:
        if sim_minutes < 0 or sim_minutes >= self.horizon_minutes:
            raise PriceSeriesError(
                f"time {sim_minutes} min outside price series coverage "
                f"[0, {self.horizon_minutes}) min"
            )
        return int(sim_minutes // MINUTES_PER_HOUR)

    def price_at(self, sim_minutes: float) -> float:
        """Price of the hour containing ``sim_minutes``."""
        return float(self._prices[self._hour_index(sim_minutes)])

    def monthly_average_at(self, sim_minutes: float) -> float:
        """Arithmetic mean price of the calendar month containing ``sim_minutes``."""
        return self._month_averages[int(self._month_of_hour[self._hour_index(sim_minutes)])]

    def energy_threshold(self, sim_minutes: float, energy_factor: float) -> float:
        """Dispatch price threshold: monthly average price times the energy factor."""
        return self.monthly_average_at(sim_minutes) * energy_factor

    def month_averages(self) -> list[MonthlyAverage]:
        return [MonthlyAverage(i, avg) for i, avg in enumerate(self._month_averages)]

    def scaled(self, k: float) -> "PriceSeries":
        """New series with every price multiplied by ``k``."""
        return PriceSeries((self._prices * k).tolist(), self.start_date)


def load_prices(path: str | Path) -> PriceSeries:
    """Load an hourly price CSV (header ``hour,price``).

    Hours must be the contiguous sequence 0..n-1; gaps and duplicates are
    rejected. A comment line ``# start=YYYY-MM-DD`` anchors the series to a
    calendar date (default 2023-01-01). Negative prices pass through
    unmodified.
    """
    path = Path(path)
    start = DEFAULT_START_DATE
    rows: list[tuple[int, float]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header_seen = False
        for lineno, row in enumerate(reader, start=1):
            if not row or not row[0].strip():
                continue
            first = row[0].strip()
            if first.startswith("#"):
                text = ",".join(row).lstrip("#").strip()
                if text.startswith("start="):
                    start = date.fromisoformat(text[len("start=") :].strip())
                continue
            if not header_seen:
                if [c.strip().lower() for c in row[:2]] != ["hour", "price"]:
                    raise PriceSeriesError(f"{path}:{lineno}: expected header 'hour,price'")
                header_seen = True
                continue
            try:
                rows.append((int(first), float(row[1])))
            except (IndexError, ValueError) as exc:
                raise PriceSeriesError(f"{path}:{lineno}: malformed row {row!r}") from exc
    if not rows:
        raise PriceSeriesError(f"{path}: no price rows")
    prices = [0.0] * len(rows)
    seen = [False] * len(rows)
    for hour, price in rows:
        if hour < 0 or hour >= len(rows) or seen[hour]:
            raise PriceSeriesError(f"{path}: hours must be contiguous 0..{len(rows) - 1} "
                                   f"without duplicates (offending hour {hour})")
        seen[hour] = True
        prices[hour] = price
    return PriceSeries(prices, start)


def save_prices(series: PriceSeries, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# start={series.start_date.isoformat()}\n")
        fh.write("hour,price\n")
        for hour, price in enumerate(series.prices):
            fh.write(f"{hour},{price:.4f}\n")


# Hour-of-day shape of the synthetic series: morning and evening peaks, a
# midday solar dip, and a night trough. Normalized to mean 1.0 at build time.
_DAY_SHAPE = [
    0.82, 0.78, 0.75, 0.74, 0.76, 0.84,
    0.95, 1.10, 1.25, 1.18, 1.05, 0.95,
    0.85, 0.78, 0.74, 0.78, 0.90, 1.05,
    1.22, 1.32, 1.24, 1.10, 0.98, 0.88,
]


def generate_synthetic_prices(
    days: int = 400,
    *,
    base_seed: int = 1,
    start_date: date = DEFAULT_START_DATE,
    base_price: float = 20000.0,
    seasonal_amplitude: float = 0.35,
    noise_cv: float = 0.05,
) -> PriceSeries:
    """Synthetic hourly series: daily price shape x winter-peaking seasonality x noise.

    Deterministic in ``base_seed``. Prices are clipped at zero. The default
    level is chosen so energy and production-logistics costs are of
    comparable magnitude for the bundled scenario, which is the regime where
    the dispatching trade-off is interesting.
    """
    if days <= 0:
        raise PriceSeriesError("days must be positive")
    shape = np.asarray(_DAY_SHAPE)
    shape = shape / shape.mean()
    stream = RngStream(base_seed, 0, "synthetic-prices")
    noise = stream.standard_normal_many(days * HOURS_PER_DAY)
    prices: list[float] = []
    for d in range(days):
        day = start_date + timedelta(days=d)
        doy = day.timetuple().tm_yday
        seasonal = 1.0 + seasonal_amplitude * math.cos(2.0 * math.pi * (doy - 15) / 365.0)
        for h in range(HOURS_PER_DAY):
            eps = noise[d * HOURS_PER_DAY + h]
            p = base_price * seasonal * shape[h] * (1.0 + noise_cv * eps)
            prices.append(max(0.0, p))
    return PriceSeries(prices, start_date)
