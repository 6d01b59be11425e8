"""Continuous-time cost accrual and KPI aggregation.

Inventory-type costs (WIP, FGI, tardiness) accrue as pieces x days x rate
over explicit time spans; energy cost is the machine's power draw times the
realized processing hours times the price frozen when the order entered the
machine. All accruals clamp to the active accounting window, which starts at
the warm-up reset and ends at the horizon, so spans straddling the reset
contribute only their post-reset share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .energyprice import PriceSeries
from .scenario import MINUTES_PER_DAY

CATEGORY_WIP = "wip"
CATEGORY_FGI = "fgi"
CATEGORY_TARDINESS = "tardiness"


@dataclass
class MachineStats:
    machine_id: str
    decisions: int = 0
    price_exceed_count: int = 0  # decisions where the price reached the threshold
    switch_off_count: int = 0  # decisions that actually turned the machine off
    busy_minutes: float = 0.0
    utilization: float = 0.0  # busy share of capacity over the accounting window

    def reset(self) -> None:
        self.decisions = 0
        self.price_exceed_count = 0
        self.switch_off_count = 0
        self.busy_minutes = 0.0
        self.utilization = 0.0


class CostLedger:
    """Per-run cost accumulators with a warm-up reset.

    Accumulators only grow between resets; ``reset`` zeroes them exactly once
    at the end of the warm-up and moves the accounting window start.
    """

    def __init__(self, window_start: float = 0.0):
        self.window_start = window_start
        self.wip_cu = 0.0
        self.fgi_cu = 0.0
        self.tardiness_cu = 0.0
        self.energy_cu = 0.0
        self.piece_days = {CATEGORY_WIP: 0.0, CATEGORY_FGI: 0.0, CATEGORY_TARDINESS: 0.0}
        self.on_time_count = 0
        self.total_due = 0

    def reset(self, now: float) -> None:
        self.__init__(window_start=now)

    def _clamped_days(self, from_minute: float, to_minute: float) -> float:
        if to_minute < from_minute:
            raise ValueError(f"negative accrual span [{from_minute}, {to_minute}]")
        lo = max(from_minute, self.window_start)
        return max(0.0, to_minute - lo) / MINUTES_PER_DAY

    def accrue_inventory(self, category: str, pieces: int, from_minute: float,
                         to_minute: float, rate: float) -> None:
        """Add pieces x span(days) x rate to one inventory cost category."""
        if category not in self.piece_days:
            raise ValueError(f"unknown cost category {category!r}")
        days = self._clamped_days(from_minute, to_minute)
        if days == 0.0:
            return
        self.piece_days[category] += pieces * days
        cu = pieces * days * rate
        if category == CATEGORY_WIP:
            self.wip_cu += cu
        elif category == CATEGORY_FGI:
            self.fgi_cu += cu
        else:
            self.tardiness_cu += cu

    def accrue_energy(self, power_kw: float, entry_minute: float,
                      processing_minutes: float, prices: PriceSeries) -> None:
        """Energy cost for one processing phase at the price frozen on entry.

        The price is CU/MWh, so one kW over one hour costs price/1000 CU.
        Only minutes inside the accounting window are charged; the frozen
        price applies to the whole phase either way.
        """
        if processing_minutes < 0:
            raise ValueError("processing_minutes must be >= 0")
        if processing_minutes == 0:
            return
        price = prices.price_at(entry_minute)
        lo = max(entry_minute, self.window_start)
        minutes = max(0.0, entry_minute + processing_minutes - lo)
        self.energy_cu += power_kw * (minutes / 60.0) * (price / 1000.0)

    def record_due(self, on_time: bool) -> None:
        self.total_due += 1
        if on_time:
            self.on_time_count += 1


@dataclass(frozen=True)
class RunResult:
    """Per-day KPI record of one (parameter point, replication) run."""

    param_point_id: str
    replication: int
    wip_per_day: float
    fgi_per_day: float
    tardiness_per_day: float
    energy_per_day: float
    service_level: float
    per_machine: tuple[MachineStats, ...]
    status: str = "ok"
    params: dict = field(default_factory=dict)  # the five swept parameter values

    @property
    def prod_logistics_per_day(self) -> float:
        return self.wip_per_day + self.fgi_per_day + self.tardiness_per_day

    @property
    def overall_per_day(self) -> float:
        return self.prod_logistics_per_day + self.energy_per_day

    def machine(self, machine_id: str) -> MachineStats:
        for stats in self.per_machine:
            if stats.machine_id == machine_id:
                return stats
        raise KeyError(machine_id)


def finalize(ledger: CostLedger, days: int, warmup: int, *, param_point_id: str,
             replication: int, machine_stats: list[MachineStats],
             params: dict | None = None) -> RunResult:
    """Normalize accumulators to per-day rates over the post-warm-up window.

    Service level is the on-time fraction of orders due in the window, or 1.0
    when nothing came due.
    """
    window_days = days - warmup
    if window_days <= 0:
        raise ValueError("post-warm-up horizon must be positive")
    service = 1.0 if ledger.total_due == 0 else ledger.on_time_count / ledger.total_due
    return RunResult(
        param_point_id=param_point_id,
        replication=replication,
        wip_per_day=ledger.wip_cu / window_days,
        fgi_per_day=ledger.fgi_cu / window_days,
        tardiness_per_day=ledger.tardiness_cu / window_days,
        energy_per_day=ledger.energy_cu / window_days,
        service_level=service,
        per_machine=tuple(machine_stats),
        params=dict(params or {}),
    )
