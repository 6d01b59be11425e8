"""Figure rendering for sweep output CSVs.

Four figure kinds, all pure presentation: parameter-vs-cost curves from the
best-partner marginals file, switch-off bars, the Pareto scatter with an
optional front overlay, and the hourly price profile. Rendering never
computes new numbers; every plotted value is read verbatim from the input
CSV (filtering and selection only), and ``render`` returns the plotted
series so tests can compare them against the file instead of diffing pixels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

KIND_PARAM_CURVE = "param-curve"
KIND_SWITCHOFF_BARS = "switchoff-bars"
KIND_PARETO_SCATTER = "pareto-scatter"
KIND_PRICE_PROFILE = "price-profile"
KINDS = (KIND_PARAM_CURVE, KIND_SWITCHOFF_BARS, KIND_PARETO_SCATTER, KIND_PRICE_PROFILE)


class FigureError(ValueError):
    """Unusable figure specification or input data."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: Path
    output_image: Path
    x: Optional[str] = None  # parameter selection for the marginals-based kinds
    cutoff: Optional[float] = None  # prod-logistics cutoff, or days for price-profile
    front_csv: Optional[Path] = None  # Pareto front overlay rows

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {', '.join(KINDS)}")


def _read_rows(path: Path, required: tuple[str, ...]) -> list[dict[str, str]]:
    path = Path(path)
    if not path.exists():
        raise FigureError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise FigureError(f"{path}: missing columns {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise FigureError(f"{path}: no data rows")
    return rows


def _floats(rows: list[dict[str, str]], column: str) -> list[float]:
    return [float(r[column]) for r in rows]


def render(spec: FigureSpec) -> dict[str, list[float]]:
    """Write the figure and return the plotted data series by name."""
    if spec.kind == KIND_PARAM_CURVE:
        series, plot = _param_curve(spec)
    elif spec.kind == KIND_SWITCHOFF_BARS:
        series, plot = _switchoff_bars(spec)
    elif spec.kind == KIND_PARETO_SCATTER:
        series, plot = _pareto_scatter(spec)
    else:
        series, plot = _price_profile(spec)
    fig = plot()
    fig.savefig(spec.output_image, dpi=120)
    plt.close(fig)
    return series


def _marginal_rows(spec: FigureSpec) -> list[dict[str, str]]:
    if not spec.x:
        raise FigureError(f"{spec.kind} needs an --x parameter name")
    rows = _read_rows(spec.input_csv,
                      ("parameter", "value", "overall_per_day", "energy_per_day",
                       "price_exceed_total", "switch_off_total"))
    selected = [r for r in rows if r["parameter"] == spec.x]
    if not selected:
        known = sorted({r["parameter"] for r in rows})
        raise FigureError(f"{spec.input_csv}: no rows for parameter {spec.x!r} "
                          f"(file has: {', '.join(known)})")
    return sorted(selected, key=lambda r: float(r["value"]))


def _param_curve(spec: FigureSpec):
    rows = _marginal_rows(spec)
    series = {
        "value": _floats(rows, "value"),
        "overall_per_day": _floats(rows, "overall_per_day"),
        "energy_per_day": _floats(rows, "energy_per_day"),
    }

    def plot():
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(series["value"], series["overall_per_day"], "o-", label="overall cost")
        ax.plot(series["value"], series["energy_per_day"], "s--", label="energy cost")
        ax.set_xlabel(spec.x)
        ax.set_ylabel("cost per day [CU]")
        ax.set_title(f"Cost per day vs {spec.x} (best partner settings)")
        ax.legend()
        fig.tight_layout()
        return fig

    return series, plot


def _switchoff_bars(spec: FigureSpec):
    rows = _marginal_rows(spec)
    series = {
        "value": _floats(rows, "value"),
        "switch_off_total": _floats(rows, "switch_off_total"),
        "price_exceed_total": _floats(rows, "price_exceed_total"),
    }

    def plot():
        fig, ax = plt.subplots(figsize=(6, 4))
        positions = range(len(series["value"]))
        width = 0.4
        ax.bar([p - width / 2 for p in positions], series["price_exceed_total"],
               width=width, label="price exceeded threshold")
        ax.bar([p + width / 2 for p in positions], series["switch_off_total"],
               width=width, label="machine switch-offs")
        ax.set_xticks(list(positions), [f"{v:g}" for v in series["value"]])
        ax.set_xlabel(spec.x)
        ax.set_ylabel("occasions per run")
        ax.set_title(f"Switch-off behavior vs {spec.x}")
        ax.legend()
        fig.tight_layout()
        return fig

    return series, plot


def _pareto_scatter(spec: FigureSpec):
    rows = _read_rows(spec.input_csv,
                      ("mean_energy_per_day", "mean_prod_logistics_per_day"))
    if spec.cutoff is not None:
        rows = [r for r in rows
                if float(r["mean_prod_logistics_per_day"]) <= spec.cutoff]
        if not rows:
            raise FigureError(f"{spec.input_csv}: cutoff {spec.cutoff} removed all rows")
    series = {
        "energy_per_day": _floats(rows, "mean_energy_per_day"),
        "prod_logistics_per_day": _floats(rows, "mean_prod_logistics_per_day"),
    }
    if spec.front_csv is not None:
        front = _read_rows(spec.front_csv,
                           ("mean_energy_per_day", "mean_prod_logistics_per_day"))
        series["front_energy_per_day"] = _floats(front, "mean_energy_per_day")
        series["front_prod_logistics_per_day"] = _floats(
            front, "mean_prod_logistics_per_day")

    def plot():
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter(series["energy_per_day"], series["prod_logistics_per_day"],
                   s=12, alpha=0.6, label="parameter combinations")
        if "front_energy_per_day" in series:
            ax.plot(series["front_energy_per_day"],
                    series["front_prod_logistics_per_day"], "r^-",
                    label="Pareto front")
        ax.set_xlabel("energy cost per day [CU]")
        ax.set_ylabel("production logistics cost per day [CU]")
        ax.set_title("Energy vs production logistics costs")
        ax.legend()
        fig.tight_layout()
        return fig

    return series, plot


def _price_profile(spec: FigureSpec):
    rows = _read_rows(spec.input_csv, ("hour", "price"))
    days = spec.cutoff if spec.cutoff is not None else 7.0
    rows = [r for r in rows if float(r["hour"]) < days * 24.0]
    if not rows:
        raise FigureError(f"{spec.input_csv}: no hours below the {days}-day cutoff")
    series = {"hour": _floats(rows, "hour"), "price": _floats(rows, "price")}

    def plot():
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.step(series["hour"], series["price"], where="post", linewidth=0.9)
        ax.set_xlabel("hour")
        ax.set_ylabel("price [CU/MWh]")
        ax.set_title(f"Hourly energy price, first {days:g} days")
        fig.tight_layout()
        return fig

    return series, plot
