"""End-to-end: render every figure kind from real sweep outputs produced by
the simulator CLI, and verify the plotted series appear verbatim in the CSVs.

Needs the `wattshop` command on PATH; skipped otherwise.
"""

import csv
import shutil
import subprocess
from pathlib import Path

import pytest
from click.testing import CliRunner

from plotkit.cli import main as plotkit_main

wattshop = shutil.which("wattshop")
SCENARIO = Path(__file__).resolve().parents[2] / "src" / "wattshop" / "data" / "default.scn"
pytestmark = pytest.mark.skipif(wattshop is None or not SCENARIO.exists(),
                                reason="wattshop CLI or bundled scenario not available")


def _run(*args):
    proc = subprocess.run([wattshop, *args], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def sweep_outputs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("pipeline")
    prices = tmp / "prices.csv"
    results = tmp / "results.csv"
    aggregates = tmp / "aggregates.csv"
    marginals = tmp / "marginals.csv"
    front = tmp / "front.csv"
    _run("gen-prices", "--out", str(prices), "--days", "60", "--seed", "7")
    _run("sweep", "--scenario", str(SCENARIO), "--prices", str(prices),
         "--reps", "1", "--days", "60", "--warmup", "20", "--parallelism", "2",
         "--out", str(results))
    _run("aggregate", "--in", str(results), "--out", str(aggregates),
         "--marginals", str(marginals))
    _run("pareto", "--in", str(aggregates), "--out", str(front))
    return {"prices": prices, "aggregates": aggregates, "marginals": marginals,
            "front": front, "dir": tmp}


runner = CliRunner()


def test_all_four_kinds_render_from_sweep_outputs(sweep_outputs):
    tmp = sweep_outputs["dir"]
    jobs = [
        (["param-curve", "--in", str(sweep_outputs["marginals"]),
          "--out", str(tmp / "fig_lead_time.png"), "--x", "lead_time"],
         tmp / "fig_lead_time.png"),
        (["switchoff-bars", "--in", str(sweep_outputs["marginals"]),
          "--out", str(tmp / "fig_switchoffs.png"), "--x", "energy_factor"],
         tmp / "fig_switchoffs.png"),
        (["pareto-scatter", "--in", str(sweep_outputs["aggregates"]),
          "--out", str(tmp / "fig_pareto.png"), "--front", str(sweep_outputs["front"]),
          "--cutoff", "8000"],
         tmp / "fig_pareto.png"),
        (["price-profile", "--in", str(sweep_outputs["prices"]),
          "--out", str(tmp / "fig_prices.png"), "--cutoff", "7"],
         tmp / "fig_prices.png"),
    ]
    for args, image in jobs:
        result = runner.invoke(plotkit_main, args)
        assert result.exit_code == 0, f"{args[0]}: {result.output}"
        assert image.exists() and image.stat().st_size > 1000, args[0]
    print("ACCEPTANCE PASS: plotkit renders all four figure kinds from sweep outputs")


def test_extracted_series_match_csv_values_exactly(sweep_outputs):
    from plotkit import FigureSpec, render

    tmp = sweep_outputs["dir"]
    marginal_rows = list(csv.DictReader(sweep_outputs["marginals"].open()))
    series = render(FigureSpec("param-curve", sweep_outputs["marginals"],
                               tmp / "check1.png", x="capacity_factor"))
    expected = sorted((r for r in marginal_rows if r["parameter"] == "capacity_factor"),
                      key=lambda r: float(r["value"]))
    assert series["value"] == [float(r["value"]) for r in expected]
    assert series["overall_per_day"] == [float(r["overall_per_day"]) for r in expected]
    assert series["energy_per_day"] == [float(r["energy_per_day"]) for r in expected]

    agg_rows = list(csv.DictReader(sweep_outputs["aggregates"].open()))
    scatter = render(FigureSpec("pareto-scatter", sweep_outputs["aggregates"],
                                tmp / "check2.png", front_csv=sweep_outputs["front"]))
    assert scatter["energy_per_day"] == [float(r["mean_energy_per_day"])
                                         for r in agg_rows]
    assert scatter["prod_logistics_per_day"] == [
        float(r["mean_prod_logistics_per_day"]) for r in agg_rows]
    front_rows = list(csv.DictReader(sweep_outputs["front"].open()))
    assert scatter["front_energy_per_day"] == [float(r["mean_energy_per_day"])
                                               for r in front_rows]

    bars = render(FigureSpec("switchoff-bars", sweep_outputs["marginals"],
                             tmp / "check3.png", x="energy_factor"))
    ef_rows = sorted((r for r in marginal_rows if r["parameter"] == "energy_factor"),
                     key=lambda r: float(r["value"]))
    assert bars["switch_off_total"] == [float(r["switch_off_total"]) for r in ef_rows]
    assert bars["price_exceed_total"] == [float(r["price_exceed_total"]) for r in ef_rows]

    price_rows = [r for r in csv.DictReader(
        line for line in sweep_outputs["prices"].open() if not line.startswith("#"))]
    profile = render(FigureSpec("price-profile", sweep_outputs["prices"],
                                tmp / "check4.png", cutoff=3))
    assert profile["price"] == [float(r["price"]) for r in price_rows[: 3 * 24]]
    print("ACCEPTANCE PASS: plotted series match the input CSV values exactly")
