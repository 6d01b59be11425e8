"""Command-line surface.

Exit codes: 0 success, 1 validation findings (or failed sweep runs),
2 usage, I/O, or specification errors. Human-readable progress goes to
stderr; data goes to files or stdout only.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import replace
from datetime import date
from importlib import resources
from pathlib import Path

import click

from . import experiment
from .energyprice import (PriceSeriesError, generate_synthetic_prices, load_prices,
                          save_prices)
from .scenario import (DispatchParams, PlanningParams, ScenarioError, load_scenario,
                       validate_scenario)
from .shopfloor import Simulation

_DATA_ERRORS = (ScenarioError, PriceSeriesError, experiment.GridSpecError,
                OSError, ValueError)


def _abort(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="")


@click.group()
def main() -> None:
    """Energy-price-aware job-shop simulator."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              help="Scenario file to check.")
@click.option("--out", default="-", show_default=True,
              help="Findings CSV destination ('-' for stdout).")
def validate(scenario_path: str, out: str) -> None:
    """Validate a scenario file; exit 1 when findings exist."""
    try:
        scenario = load_scenario(scenario_path)
        findings = validate_scenario(scenario)
    except _DATA_ERRORS as exc:
        _abort(exc)
    fh = _open_out(out)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["severity", "subject", "message"])
    for f in findings:
        writer.writerow([f.severity, f.subject, f.message])
    if fh is not sys.stdout:
        fh.close()
    click.echo(f"{len(findings)} finding(s)", err=True)
    sys.exit(1 if findings else 0)


_param_options = [
    click.option("--lead-time", type=int, required=True, help="Planned lead time [days]."),
    click.option("--safety-stock", type=float, required=True,
                 help="Safety stock [proportion of expected order quantity]."),
    click.option("--fop", type=int, required=True, help="Fixed order period [days]."),
    click.option("--energy-factor", type=float, required=True,
                 help="Energy price threshold factor."),
    click.option("--capacity-factor", type=float, required=True,
                 help="Workload threshold factor."),
]


def _with(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@main.command()
@click.option("--scenario", "scenario_path", required=True, help="Scenario file.")
@click.option("--prices", "prices_path", required=True, help="Hourly price CSV.")
@_with(_param_options)
@click.option("--seed", type=int, default=1, show_default=True, help="Base seed.")
@click.option("--replication", type=int, default=0, show_default=True,
              help="Replication index (selects the demand realization).")
@click.option("--days", type=int, default=400, show_default=True, help="Run length [days].")
@click.option("--warmup", type=int, default=150, show_default=True,
              help="Warm-up [days]; statistics reset at its end.")
@click.option("--out", default="-", show_default=True, help="Result CSV destination.")
@click.option("--event-log", "event_log_path", default=None,
              help="Write an event trace CSV to this path.")
@click.option("--mrp-dump", "mrp_dump_path", default=None,
              help="Write per-run MRP tables (item, day, gross, projected, net, lot).")
@click.option("--setup-energy", is_flag=True, default=False,
              help="Charge energy during setup phases as well.")
@click.option("--proc-cv", type=float, default=None,
              help="CV of realized processing/setup times (default: scenario value).")
def simulate(scenario_path: str, prices_path: str, lead_time: int, safety_stock: float,
             fop: int, energy_factor: float, capacity_factor: float, seed: int,
             replication: int, days: int, warmup: int, out: str,
             event_log_path: str | None, mrp_dump_path: str | None,
             setup_energy: bool, proc_cv: float | None) -> None:
    """Run one simulation and write its KPI row."""
    try:
        scenario = load_scenario(scenario_path)
        prices = load_prices(prices_path)
        planning = PlanningParams(planned_lead_time=lead_time, fop_period=fop,
                                  safety_stock_prop=safety_stock)
        dispatching = DispatchParams(energy_factor=energy_factor,
                                     capacity_factor=capacity_factor)
        log_fh = open(event_log_path, "w", newline="") if event_log_path else None
        log_writer = csv.writer(log_fh, lineterminator="\n") if log_fh else None
        if log_writer:
            log_writer.writerow(["time", "event", "entity", "detail"])
        dump_fh = open(mrp_dump_path, "w", newline="") if mrp_dump_path else None
        dump_writer = csv.writer(dump_fh, lineterminator="\n") if dump_fh else None
        if dump_writer:
            dump_writer.writerow(["run_day", "item", "day", "gross", "projected",
                                  "net", "lot"])
        sim = Simulation(
            scenario, planning, dispatching, prices, base_seed=seed,
            replication=replication, days=days, warmup=warmup, proc_cv=proc_cv,
            setup_energy=setup_energy,
            event_log=(lambda t, kind, entity, detail:
                       log_writer.writerow([f"{t:.4f}", kind, entity, detail]))
            if log_writer else None,
            mrp_dump=(lambda *row: dump_writer.writerow(row)) if dump_writer else None)
        result = sim.run()
        if log_fh:
            log_fh.close()
        if dump_fh:
            dump_fh.close()
    except _DATA_ERRORS as exc:
        _abort(exc)
    machine_ids = sorted(m.machine_id for m in scenario.machines)
    row = replace(result, params={"lead_time": lead_time, "safety_stock": safety_stock,
                                  "fop_period": fop, "energy_factor": energy_factor,
                                  "capacity_factor": capacity_factor})
    fh = _open_out(out)
    experiment.write_results_to([row], machine_ids, fh)
    if fh is not sys.stdout:
        fh.close()
    click.echo(f"overall {result.overall_per_day:.2f} CU/day, "
               f"service level {result.service_level:.3f}", err=True)


@main.command()
@click.option("--scenario", "scenario_path", required=True, help="Scenario file.")
@click.option("--prices", "prices_path", required=True, help="Hourly price CSV.")
@click.option("--grid", "grid_path", default=None,
              help="Grid file [default: bundled desk-scale grid].")
@click.option("--full-study", is_flag=True, default=False,
              help="Use the full factorial study grid (30,000 points).")
@click.option("--seed", type=int, default=1, show_default=True, help="Base seed.")
@click.option("--reps", type=int, default=3, show_default=True,
              help="Replications per grid point.")
@click.option("--days", type=int, default=400, show_default=True, help="Run length [days].")
@click.option("--warmup", type=int, default=150, show_default=True, help="Warm-up [days].")
@click.option("--parallelism", type=int, default=1, show_default=True,
              help="Worker processes.")
@click.option("--out", required=True, help="Results CSV path.")
@click.option("--setup-energy", is_flag=True, default=False,
              help="Charge energy during setup phases as well.")
@click.option("--proc-cv", type=float, default=None,
              help="CV of realized processing/setup times (default: scenario value).")
def sweep(scenario_path: str, prices_path: str, grid_path: str | None, full_study: bool,
          seed: int, reps: int, days: int, warmup: int, parallelism: int, out: str,
          setup_energy: bool, proc_cv: float | None) -> None:
    """Run the full-factorial sweep and write one row per (point, replication)."""
    try:
        scenario = load_scenario(scenario_path)
        prices = load_prices(prices_path)
        if full_study:
            grid_spec = experiment.table_grid()
        elif grid_path is not None:
            grid_spec = experiment.load_grid(grid_path)
        else:
            grid_spec = experiment.load_grid(default_grid_path())
        grid = experiment.grid_generate(grid_spec)
        click.echo(f"{len(grid)} grid points x {reps} replications", err=True)

        def progress(done: int, total: int) -> None:
            if done % 50 == 0 or done == total:
                click.echo(f"  {done}/{total} runs", err=True)

        results = experiment.run_sweep(
            scenario, prices, grid, reps, seed, parallelism=parallelism, days=days,
            warmup=warmup, proc_cv=proc_cv, setup_energy=setup_energy,
            progress=progress)
        machine_ids = sorted(m.machine_id for m in scenario.machines)
        experiment.write_results(results, machine_ids, out)
    except _DATA_ERRORS as exc:
        _abort(exc)
    failures = [r for r in results if r.status != "ok"]
    for r in failures:
        click.echo(f"failed: {r.param_point_id} rep {r.replication}: {r.status}", err=True)
    click.echo(f"wrote {out}", err=True)
    sys.exit(1 if failures else 0)


@main.command()
@click.option("--in", "in_path", required=True, help="Results CSV from sweep.")
@click.option("--out", required=True, help="Aggregates CSV path.")
@click.option("--marginals", "marginals_path", default=None,
              help="Also write best-partner marginals to this path.")
def aggregate(in_path: str, out: str, marginals_path: str | None) -> None:
    """Aggregate replications into per-point means and standard deviations."""
    warnings: list[str] = []
    try:
        results, _ = experiment.read_results(in_path)
        aggregates = experiment.aggregate(results, warn=warnings.append)
        experiment.write_aggregates(aggregates, out)
        if marginals_path:
            experiment.write_marginals(
                experiment.best_partner_marginals(aggregates), marginals_path)
    except _DATA_ERRORS as exc:
        _abort(exc)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    click.echo(f"wrote {out}", err=True)
    sys.exit(1 if warnings else 0)


@main.command()
@click.option("--in", "in_path", required=True,
              help="Aggregates CSV (or raw results CSV; aggregated on the fly).")
@click.option("--out", required=True, help="Pareto front CSV path.")
def pareto(in_path: str, out: str) -> None:
    """Extract the non-dominated (energy, production-logistics) front."""
    try:
        try:
            aggregates = experiment.read_aggregates(in_path)
        except ValueError:
            results, _ = experiment.read_results(in_path)
            aggregates = experiment.aggregate(results)
        front = experiment.pareto_front(aggregates)
        experiment.write_aggregates(front, out)
    except _DATA_ERRORS as exc:
        _abort(exc)
    click.echo(f"front: {len(front)} of {len(aggregates)} points", err=True)


@main.command(name="gen-prices")
@click.option("--out", required=True, help="Destination price CSV.")
@click.option("--seed", type=int, default=1, show_default=True, help="Noise seed.")
@click.option("--days", type=int, default=400, show_default=True, help="Days covered.")
@click.option("--start", default="2023-01-01", show_default=True,
              help="Calendar date of simulation day 0 (anchors months).")
def gen_prices(out: str, seed: int, days: int, start: str) -> None:
    """Generate the synthetic hourly price series."""
    try:
        series = generate_synthetic_prices(days, base_seed=seed,
                                           start_date=date.fromisoformat(start))
        save_prices(series, out)
    except _DATA_ERRORS as exc:
        _abort(exc)
    click.echo(f"wrote {out} ({series.n_hours} hours)", err=True)


def default_grid_path() -> Path:
    """Path of the bundled desk-scale grid file."""
    return Path(str(resources.files("wattshop").joinpath("data/ci.grid")))


if __name__ == "__main__":
    main()
