"""Full-factorial experiment harness: grid generation, replicated parallel
execution with common random numbers, aggregation, best-partner marginals,
and Pareto-front extraction over (energy, production-logistics) cost rates.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .costing import MachineStats, RunResult
from .energyprice import PriceSeries
from .scenario import DispatchParams, PlanningParams, Scenario
from .shopfloor import Simulation

# Grid dimensions in canonical order; point ids and output ordering follow it.
DIMENSIONS = ("lead_time", "safety_stock", "fop_period", "energy_factor", "capacity_factor")
_INT_DIMENSIONS = {"lead_time", "fop_period"}


class GridSpecError(ValueError):
    """Inconsistent grid specification."""


@dataclass(frozen=True)
class ParamPoint:
    lead_time: int
    safety_stock: float
    fop_period: int
    energy_factor: float
    capacity_factor: float

    @property
    def point_id(self) -> str:
        """Stable identifier; fixed-width so lexicographic order is value order."""
        return (f"lt{self.lead_time:03d}-ss{self.safety_stock:05.2f}"
                f"-fop{self.fop_period:03d}-ef{self.energy_factor:05.2f}"
                f"-cf{self.capacity_factor:05.2f}")

    def value(self, dimension: str) -> float:
        return getattr(self, dimension)

    def planning(self) -> PlanningParams:
        return PlanningParams(planned_lead_time=self.lead_time,
                              fop_period=self.fop_period,
                              safety_stock_prop=self.safety_stock)

    def dispatching(self, check_interval: float = 60.0) -> DispatchParams:
        return DispatchParams(energy_factor=self.energy_factor,
                              capacity_factor=self.capacity_factor,
                              check_interval=check_interval)

    def as_dict(self) -> dict[str, float]:
        return {d: self.value(d) for d in DIMENSIONS}


@dataclass(frozen=True)
class GridSpec:
    """Inclusive (min, max, step) range per dimension, in canonical order."""

    ranges: tuple[tuple[str, float, float, float], ...]

    def __post_init__(self) -> None:
        names = [r[0] for r in self.ranges]
        if names != list(DIMENSIONS):
            raise GridSpecError(f"grid must define exactly the dimensions "
                                f"{', '.join(DIMENSIONS)} in that order; got {names}")
        for name, lo, hi, step in self.ranges:
            if step <= 0 or lo > hi:
                raise GridSpecError(f"dimension {name}: need min <= max and step > 0")

    def values(self, dimension: str) -> list[float]:
        for name, lo, hi, step in self.ranges:
            if name == dimension:
                return _range_values(name, lo, hi, step)
        raise KeyError(dimension)


def _range_values(name: str, lo: float, hi: float, step: float) -> list[float]:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    values = [round(lo + i * step, 9) for i in range(n)]
    if name in _INT_DIMENSIONS:
        return [int(v) for v in values]
    return values


def table_grid() -> GridSpec:
    """The full study grid (30,000 points)."""
    return GridSpec((
        ("lead_time", 1, 10, 1),
        ("safety_stock", 0.0, 2.0, 0.5),
        ("fop_period", 1, 6, 1),
        ("energy_factor", 0.5, 1.4, 0.1),
        ("capacity_factor", 0.25, 2.5, 0.25),
    ))


def ci_grid() -> GridSpec:
    """Desk-scale subsample used by the test profile (192 points)."""
    return GridSpec((
        ("lead_time", 4, 10, 3),
        ("safety_stock", 0.0, 1.0, 1.0),
        ("fop_period", 1, 3, 2),
        ("energy_factor", 0.7, 1.3, 0.2),
        ("capacity_factor", 0.25, 2.5, 0.75),
    ))


def grid_generate(spec: GridSpec) -> list[ParamPoint]:
    """Cartesian product with inclusive endpoints, ordered lexicographically
    by the canonical dimension order."""
    points = []
    for lt in spec.values("lead_time"):
        for ss in spec.values("safety_stock"):
            for fop in spec.values("fop_period"):
                for ef in spec.values("energy_factor"):
                    for cf in spec.values("capacity_factor"):
                        points.append(ParamPoint(int(lt), ss, int(fop), ef, cf))
    return points


def load_grid(path: str | Path) -> GridSpec:
    """Read a grid file: a ``[grid]`` section with rows (name, min, max, step)."""
    path = Path(path)
    rows: dict[str, tuple[float, float, float]] = {}
    in_section = False
    header_seen = False
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if line.lower() != "[grid]":
                    raise GridSpecError(f"{path}:{lineno}: expected [grid] section")
                in_section = True
                header_seen = False
                continue
            if not in_section:
                raise GridSpecError(f"{path}:{lineno}: data before [grid] section")
            cells = [c.strip() for c in line.split(",")]
            if not header_seen:
                if cells != ["name", "min", "max", "step"]:
                    raise GridSpecError(f"{path}:{lineno}: header must be name,min,max,step")
                header_seen = True
                continue
            if len(cells) != 4:
                raise GridSpecError(f"{path}:{lineno}: expected 4 columns")
            name = cells[0]
            if name in rows:
                raise GridSpecError(f"{path}:{lineno}: duplicate dimension {name}")
            try:
                rows[name] = (float(cells[1]), float(cells[2]), float(cells[3]))
            except ValueError as exc:
                raise GridSpecError(f"{path}:{lineno}: malformed numbers") from exc
    missing = [d for d in DIMENSIONS if d not in rows]
    if missing:
        raise GridSpecError(f"{path}: missing dimensions {', '.join(missing)}")
    extra = [d for d in rows if d not in DIMENSIONS]
    if extra:
        raise GridSpecError(f"{path}: unknown dimensions {', '.join(extra)}")
    return GridSpec(tuple((d, *rows[d]) for d in DIMENSIONS))


def save_grid(spec: GridSpec, path: str | Path) -> None:
    lines = ["[grid]", "name,min,max,step"]
    for name, lo, hi, step in spec.ranges:
        lines.append(f"{name},{lo:g},{hi:g},{step:g}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# sweep execution
# ---------------------------------------------------------------------------

_worker_ctx: dict = {}


def _init_worker(scenario: Scenario, prices: PriceSeries, base_seed: int,
                 days: int, warmup: int, proc_cv: Optional[float],
                 setup_energy: bool, dispatch_enabled: bool) -> None:
    _worker_ctx.update(scenario=scenario, prices=prices, base_seed=base_seed,
                       days=days, warmup=warmup, proc_cv=proc_cv,
                       setup_energy=setup_energy, dispatch_enabled=dispatch_enabled)


def _run_one(task: tuple[int, ParamPoint, int]) -> tuple[int, int, RunResult]:
    index, point, rep = task
    ctx = _worker_ctx
    try:
        sim = Simulation(ctx["scenario"], point.planning(), point.dispatching(),
                         ctx["prices"], base_seed=ctx["base_seed"], replication=rep,
                         days=ctx["days"], warmup=ctx["warmup"], proc_cv=ctx["proc_cv"],
                         setup_energy=ctx["setup_energy"],
                         dispatch_enabled=ctx["dispatch_enabled"],
                         param_point_id=point.point_id)
        result = replace(sim.run(), params=point.as_dict())
    except Exception as exc:  # noqa: BLE001 - a failed run must not kill the sweep
        result = RunResult(param_point_id=point.point_id, replication=rep,
                           wip_per_day=math.nan, fgi_per_day=math.nan,
                           tardiness_per_day=math.nan, energy_per_day=math.nan,
                           service_level=math.nan, per_machine=(),
                           status=f"error: {type(exc).__name__}: {exc}",
                           params=point.as_dict())
    return index, rep, result


def run_sweep(scenario: Scenario, prices: PriceSeries, grid: Sequence[ParamPoint],
              reps: int, base_seed: int, *, parallelism: int = 1, days: int = 400,
              warmup: int = 150, proc_cv: Optional[float] = None,
              setup_energy: bool = False, dispatch_enabled: bool = True,
              progress=None) -> list[RunResult]:
    """Run reps x |grid| simulations; output order is (grid position, replication)
    regardless of execution order or parallelism.

    Demand streams are keyed by replication only, so all grid points of one
    replication face identical customer orders. Failed runs are captured as
    error-status rows and the sweep continues.
    """
    tasks = [(i, point, rep) for i, point in enumerate(grid) for rep in range(reps)]
    results: dict[tuple[int, int], RunResult] = {}
    if parallelism <= 1:
        _init_worker(scenario, prices, base_seed, days, warmup, proc_cv,
                     setup_energy, dispatch_enabled)
        for n, task in enumerate(tasks):
            index, rep, result = _run_one(task)
            results[(index, rep)] = result
            if progress is not None:
                progress(n + 1, len(tasks))
    else:
        with ProcessPoolExecutor(
                max_workers=parallelism, initializer=_init_worker,
                initargs=(scenario, prices, base_seed, days, warmup, proc_cv,
                          setup_energy, dispatch_enabled)) as pool:
            for n, (index, rep, result) in enumerate(pool.map(_run_one, tasks, chunksize=4)):
                results[(index, rep)] = result
                if progress is not None:
                    progress(n + 1, len(tasks))
    return [results[(i, rep)] for i in range(len(grid)) for rep in range(reps)]


# ---------------------------------------------------------------------------
# results CSV
# ---------------------------------------------------------------------------

_RESULT_FIXED_COLS = ["param_point", "replication", "status", "lead_time", "safety_stock",
                      "fop_period", "energy_factor", "capacity_factor", "wip_per_day",
                      "fgi_per_day", "tardiness_per_day", "energy_per_day",
                      "prod_logistics_per_day", "overall_per_day", "service_level"]
_MACHINE_COLS = ["decisions", "price_exceed", "switch_offs", "utilization"]


def results_header(machine_ids: Sequence[str]) -> list[str]:
    cols = list(_RESULT_FIXED_COLS)
    for mid in machine_ids:
        cols.extend(f"{mid}:{c}" for c in _MACHINE_COLS)
    return cols


def write_results_to(results: Iterable[RunResult], machine_ids: Sequence[str], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(results_header(machine_ids))
    for r in results:
        row = [r.param_point_id, r.replication, r.status]
        row += [_fmt(r.params.get(d, math.nan)) for d in DIMENSIONS]
        row += [_fmt(v) for v in (r.wip_per_day, r.fgi_per_day, r.tardiness_per_day,
                                  r.energy_per_day, r.prod_logistics_per_day,
                                  r.overall_per_day, r.service_level)]
        by_id = {s.machine_id: s for s in r.per_machine}
        for mid in machine_ids:
            s = by_id.get(mid)
            if s is None:
                row += ["", "", "", ""]
            else:
                row += [s.decisions, s.price_exceed_count, s.switch_off_count,
                        _fmt(s.utilization)]
        writer.writerow(row)


def write_results(results: Iterable[RunResult], machine_ids: Sequence[str],
                  path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        write_results_to(results, machine_ids, fh)


def _fmt(x: float) -> str:
    return repr(float(x))


def read_results(path: str | Path) -> tuple[list[RunResult], list[str]]:
    """Read a results CSV back; returns (results, machine ids)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        machine_ids = []
        for col in header[len(_RESULT_FIXED_COLS):]:
            mid = col.rsplit(":", 1)[0]
            if mid not in machine_ids:
                machine_ids.append(mid)
        results = []
        for row in reader:
            fixed = dict(zip(header, row))
            per_machine = []
            for mid in machine_ids:
                if fixed.get(f"{mid}:decisions", "") == "":
                    continue
                per_machine.append(MachineStats(
                    machine_id=mid,
                    decisions=int(fixed[f"{mid}:decisions"]),
                    price_exceed_count=int(fixed[f"{mid}:price_exceed"]),
                    switch_off_count=int(fixed[f"{mid}:switch_offs"]),
                    utilization=float(fixed[f"{mid}:utilization"]),
                ))
            results.append(RunResult(
                param_point_id=fixed["param_point"],
                replication=int(fixed["replication"]),
                status=fixed["status"],
                wip_per_day=float(fixed["wip_per_day"]),
                fgi_per_day=float(fixed["fgi_per_day"]),
                tardiness_per_day=float(fixed["tardiness_per_day"]),
                energy_per_day=float(fixed["energy_per_day"]),
                service_level=float(fixed["service_level"]),
                per_machine=tuple(per_machine),
                params={d: float(fixed[d]) for d in DIMENSIONS},
            ))
    return results, machine_ids


# ---------------------------------------------------------------------------
# aggregation, marginals, Pareto front
# ---------------------------------------------------------------------------

_RATE_FIELDS = ("wip_per_day", "fgi_per_day", "tardiness_per_day", "energy_per_day",
                "prod_logistics_per_day", "overall_per_day", "service_level")


@dataclass(frozen=True)
class AggregateResult:
    param_point_id: str
    params: dict
    replication_count: int
    means: dict  # field -> mean over replications
    stds: dict  # field -> sample standard deviation
    price_exceed_total: float  # mean over reps of the sum across machines
    switch_off_total: float

    def mean(self, name: str) -> float:
        return self.means[name]

    def std(self, name: str) -> float:
        return self.stds[name]


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _sample_std(xs: Sequence[float]) -> float:
    if len(xs) < 2:
        return 0.0
    m = _mean(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def aggregate(results: Sequence[RunResult], *, expected_reps: Optional[int] = None,
              warn=None) -> list[AggregateResult]:
    """Per-point means and sample standard deviations over replications.

    Error-status rows are excluded (with a warning); a point whose runs all
    failed is dropped. When ``expected_reps`` is given, incomplete points
    raise ``ValueError``.
    """
    groups: dict[str, list[RunResult]] = {}
    order: list[str] = []
    for r in results:
        if r.status != "ok":
            if warn is not None:
                warn(f"excluding failed run {r.param_point_id} rep {r.replication}: {r.status}")
            continue
        if r.param_point_id not in groups:
            order.append(r.param_point_id)
        groups.setdefault(r.param_point_id, []).append(r)
    out = []
    for pid in order:
        rs = groups[pid]
        if expected_reps is not None and len(rs) != expected_reps:
            raise ValueError(f"point {pid}: expected {expected_reps} replications, "
                             f"got {len(rs)}")
        means = {f: _mean([getattr(r, f) for r in rs]) for f in _RATE_FIELDS}
        stds = {f: _sample_std([getattr(r, f) for r in rs]) for f in _RATE_FIELDS}
        out.append(AggregateResult(
            param_point_id=pid, params=dict(rs[0].params), replication_count=len(rs),
            means=means, stds=stds,
            price_exceed_total=_mean([sum(s.price_exceed_count for s in r.per_machine)
                                      for r in rs]),
            switch_off_total=_mean([sum(s.switch_off_count for s in r.per_machine)
                                    for r in rs]),
        ))
    return out


@dataclass(frozen=True)
class MarginalRow:
    """Best-partner marginal: the cheapest point having one parameter fixed."""

    dimension: str
    value: float
    best_point_id: str
    overall_per_day: float
    energy_per_day: float
    prod_logistics_per_day: float
    price_exceed_total: float
    switch_off_total: float


def best_partner_marginals(aggregates: Sequence[AggregateResult]) -> list[MarginalRow]:
    """For each value of each parameter, the minimum mean overall cost over
    all combinations of the remaining parameters."""
    rows: list[MarginalRow] = []
    for dim in DIMENSIONS:
        values = sorted({a.params[dim] for a in aggregates})
        for v in values:
            candidates = [a for a in aggregates if a.params[dim] == v]
            best = min(candidates, key=lambda a: (a.mean("overall_per_day"),
                                                  a.param_point_id))
            rows.append(MarginalRow(
                dimension=dim, value=v, best_point_id=best.param_point_id,
                overall_per_day=best.mean("overall_per_day"),
                energy_per_day=best.mean("energy_per_day"),
                prod_logistics_per_day=best.mean("prod_logistics_per_day"),
                price_exceed_total=best.price_exceed_total,
                switch_off_total=best.switch_off_total))
    return rows


def pareto_front(aggregates: Sequence[AggregateResult]) -> list[AggregateResult]:
    """Non-dominated subset in the (energy, production-logistics) mean plane.

    A point is dominated when another has both objectives <= and at least one
    strictly <; exact ties are all retained. Sorted by energy ascending.
    """
    if not aggregates:
        raise ValueError("pareto_front needs at least one aggregate")
    decorated = sorted(
        aggregates,
        key=lambda a: (a.mean("energy_per_day"), a.mean("prod_logistics_per_day"),
                       a.param_point_id))
    front: list[AggregateResult] = []
    best_pl = math.inf  # best production-logistics cost among strictly cheaper energy
    i = 0
    while i < len(decorated):
        # group of equal energy cost
        j = i
        e = decorated[i].mean("energy_per_day")
        while j < len(decorated) and decorated[j].mean("energy_per_day") == e:
            j += 1
        group = decorated[i:j]
        group_min = min(a.mean("prod_logistics_per_day") for a in group)
        if group_min < best_pl:
            front.extend(a for a in group
                         if a.mean("prod_logistics_per_day") == group_min)
            best_pl = group_min
        i = j
    return front


# ---------------------------------------------------------------------------
# aggregates / marginals / front CSV
# ---------------------------------------------------------------------------

_AGG_COLS = (["param_point"] + list(DIMENSIONS) + ["replications"]
             + [f"mean_{f}" for f in _RATE_FIELDS] + [f"std_{f}" for f in _RATE_FIELDS]
             + ["price_exceed_total", "switch_off_total"])


def write_aggregates(aggregates: Sequence[AggregateResult], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_AGG_COLS)
        for a in aggregates:
            row = [a.param_point_id]
            row += [_fmt(a.params[d]) for d in DIMENSIONS]
            row += [a.replication_count]
            row += [_fmt(a.means[f]) for f in _RATE_FIELDS]
            row += [_fmt(a.stds[f]) for f in _RATE_FIELDS]
            row += [_fmt(a.price_exceed_total), _fmt(a.switch_off_total)]
            writer.writerow(row)


def read_aggregates(path: str | Path) -> list[AggregateResult]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != _AGG_COLS:
            raise ValueError(f"{path}: not an aggregates file")
        out = []
        for row in reader:
            rec = dict(zip(header, row))
            out.append(AggregateResult(
                param_point_id=rec["param_point"],
                params={d: float(rec[d]) for d in DIMENSIONS},
                replication_count=int(rec["replications"]),
                means={f: float(rec[f"mean_{f}"]) for f in _RATE_FIELDS},
                stds={f: float(rec[f"std_{f}"]) for f in _RATE_FIELDS},
                price_exceed_total=float(rec["price_exceed_total"]),
                switch_off_total=float(rec["switch_off_total"]),
            ))
    return out


def write_marginals(rows: Sequence[MarginalRow], path: str | Path) -> None:
    cols = ["parameter", "value", "best_point", "overall_per_day", "energy_per_day",
            "prod_logistics_per_day", "price_exceed_total", "switch_off_total"]
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for r in rows:
            writer.writerow([r.dimension, _fmt(r.value), r.best_point_id,
                             _fmt(r.overall_per_day), _fmt(r.energy_per_day),
                             _fmt(r.prod_logistics_per_day),
                             _fmt(r.price_exceed_total), _fmt(r.switch_off_total)])
