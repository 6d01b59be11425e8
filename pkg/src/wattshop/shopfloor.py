"""Discrete-event shop-floor engine.

Drives customer demand, the periodic MRP run, order release, machine queues,
setup/processing, routing, completion, and delivery. One simulation run is
strictly single-threaded and deterministic: its KPIs are a pure function of
(scenario, parameters, base seed, replication index).

Events execute in (time, priority, sequence) order. Priorities at one
timestamp: day boundary, MRP run, release checks, customer arrivals,
processing-phase starts, completions, deliveries, dispatch ticks, accounting.
The day boundary (every 1440 minutes) therefore fires the MRP run and then
the release checks before anything else that minute.

Machine semantics: machines start switched on. The operational state gates
the start of orders only: an off decision never preempts an order already in
setup or processing, which runs to completion even if a periodic check
switches the machine off meanwhile. Decisions are evaluated on completions
and on check ticks whenever work is waiting in the queue; a machine whose
queue is empty keeps its last state and consumes no energy while idle.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import dispatch as dispatch_rule
from .costing import (CATEGORY_FGI, CATEGORY_TARDINESS, CATEGORY_WIP, CostLedger,
                      MachineStats, RunResult, finalize)
from .energyprice import PriceSeries
from .mrp import InventoryState, PlannedOrder, release_check, run_mrp
from .scenario import (MINUTES_PER_DAY, DemandParams, DispatchParams, ItemSpec,
                       PlanningParams, Scenario)
from .stochastics import LognormalSpec, RngStream, lognormal_from_mean_cv, sample

# Event priorities; smaller executes first at equal timestamps.
PRI_DAY = 0
PRI_MRP = 1
PRI_RELEASE = 2
PRI_ARRIVAL = 3
PRI_PROC_START = 4
PRI_COMPLETION = 5
PRI_DELIVERY = 6
PRI_TICK = 7
PRI_ACCOUNTING = 8

STATE_QUEUED = "queued"
STATE_IN_SETUP = "in-setup"
STATE_IN_PROCESS = "in-process"
STATE_FINISHED = "finished"


@dataclass
class CustomerOrderRuntime:
    item_id: str
    quantity: int
    arrival_min: float
    due_min: float
    covered_min: Optional[float] = None  # when finished stock was reserved for it
    delivered_min: Optional[float] = None


@dataclass
class ProductionOrderRuntime:
    order_id: str
    item_id: str
    quantity: int
    planned_end: int  # day
    routing_position: int = 0
    state: str = STATE_QUEUED
    release_min: float = 0.0
    completion_min: Optional[float] = None
    per_step_entry: list[float] = field(default_factory=list)
    planned_work: float = 0.0  # current step's planned setup + processing, minutes


@dataclass
class _InService:
    order: ProductionOrderRuntime
    setup_start: float
    setup_minutes: float
    proc_start: float
    proc_minutes: float


class MachineRuntime:
    def __init__(self, spec):
        self.spec = spec
        self.queue: deque[ProductionOrderRuntime] = deque()
        self.queued_workload = 0.0  # running sum of planned_work over the queue
        self.on = True
        self.busy = False
        self.current: Optional[_InService] = None
        self.last_eval = -1.0  # timestamp of the last dispatch evaluation
        self.stats = MachineStats(machine_id=spec.machine_id)


def _round_pieces(x: float) -> int:
    """Nearest piece, ties up, floor at one."""
    return max(1, int(x + 0.5))


def generate_demand(gap_stream: RngStream, qty_stream: RngStream, lead_stream: RngStream,
                    params: DemandParams, item: ItemSpec,
                    horizon_minutes: float) -> list[CustomerOrderRuntime]:
    """Customer order arrivals for one item over the horizon.

    Interarrival gaps, order quantities, and the variable lead-time part are
    lognormal around the configured means; quantities round to at least one
    piece; the due date is arrival + fixed lead + variable lead.
    """
    gap_spec = lognormal_from_mean_cv(params.mean_interarrival_days, params.cv_interarrival)
    qty_spec = lognormal_from_mean_cv(item.expected_order_qty, params.cv_quantity)
    lead_spec = lognormal_from_mean_cv(params.mean_var_lead_days, params.cv_var_lead)
    orders: list[CustomerOrderRuntime] = []
    t = 0.0
    while True:
        t += sample(gap_stream, gap_spec) * MINUTES_PER_DAY
        if t >= horizon_minutes:
            break
        quantity = _round_pieces(sample(qty_stream, qty_spec))
        variable_lead = sample(lead_stream, lead_spec) * MINUTES_PER_DAY
        due = t + params.fixed_lead_days * MINUTES_PER_DAY + variable_lead
        orders.append(CustomerOrderRuntime(item.item_id, quantity, t, due))
    return orders


EventLogFn = Callable[[float, str, str, str], None]


class Simulation:
    """One deterministic shop-floor run; ``run()`` returns the KPI record.

    The instance keeps its final state (orders, machines, ledger) for
    inspection after the run.
    """

    def __init__(self, scenario: Scenario, planning: PlanningParams,
                 dispatch_params: DispatchParams, prices: PriceSeries, *,
                 base_seed: int, replication: int, days: int = 400, warmup: int = 150,
                 proc_cv: Optional[float] = None, setup_energy: bool = False,
                 dispatch_enabled: bool = True, param_point_id: str = "single",
                 event_log: Optional[EventLogFn] = None,
                 mrp_dump=None):
        if warmup < 0 or warmup >= days:
            raise ValueError("need 0 <= warmup < days")
        self.scenario = scenario
        self.planning = planning
        self.dispatch_params = dispatch_params
        self.prices = prices
        self.days = days
        self.warmup = warmup
        self.horizon_min = days * MINUTES_PER_DAY
        if prices.horizon_minutes < self.horizon_min:
            raise ValueError(
                f"price series covers {prices.horizon_minutes:.0f} min but the run "
                f"needs {self.horizon_min:.0f} min")
        self.proc_cv = scenario.proc_cv if proc_cv is None else proc_cv
        self.setup_energy = setup_energy
        self.dispatch_enabled = dispatch_enabled
        self.param_point_id = param_point_id
        self.replication = replication
        self.base_seed = base_seed
        self.event_log = event_log
        self.mrp_dump = mrp_dump

        self.items = {i.item_id: i for i in scenario.items}
        self.machines = {m.machine_id: MachineRuntime(m) for m in scenario.machines}
        self._machine_order = sorted(self.machines)
        self.ledger = CostLedger()

        self.stock_free: dict[str, int] = {i.item_id: 0 for i in scenario.items}
        self.fgi_batches: dict[str, deque[tuple[int, float]]] = {
            i.item_id: deque() for i in scenario.items}
        self.pending_customers: dict[str, deque[CustomerOrderRuntime]] = {
            i.item_id: deque() for i in scenario.items}
        self.customer_orders: list[CustomerOrderRuntime] = []
        self.planned_orders: list[PlannedOrder] = []
        self.live_orders: list[ProductionOrderRuntime] = []
        self.finished_orders: list[ProductionOrderRuntime] = []

        # Planned-time specs reused on every draw.
        self._proc_specs: dict[tuple[str, int], LognormalSpec] = {}
        self._setup_specs: dict[tuple[str, int], LognormalSpec] = {}
        for item in scenario.items:
            for pos, step in enumerate(item.routing):
                self._proc_specs[(item.item_id, pos)] = lognormal_from_mean_cv(
                    step.mean_proc_per_unit, self.proc_cv)
                if step.mean_setup > 0:
                    self._setup_specs[(item.item_id, pos)] = lognormal_from_mean_cv(
                        step.mean_setup, self.proc_cv)
        self._proc_streams = {m: RngStream(base_seed, replication, "proc", m)
                              for m in self.machines}
        self._setup_streams = {m: RngStream(base_seed, replication, "setup", m)
                               for m in self.machines}

        self._heap: list[tuple[float, int, int, object]] = []
        self._seq = 0
        self.now = 0.0

        # Demand streams are keyed by (replication, item) only, so every
        # parameter combination of a replication sees the same customer orders.
        for item in scenario.demand_items():
            arrivals = generate_demand(
                RngStream(base_seed, replication, "demand-gap", item.item_id),
                RngStream(base_seed, replication, "demand-qty", item.item_id),
                RngStream(base_seed, replication, "demand-lead", item.item_id),
                scenario.demand, item, self.horizon_min)
            for co in arrivals:
                self.customer_orders.append(co)
                self._schedule(co.arrival_min, PRI_ARRIVAL, co)

        self._schedule(0.0, PRI_DAY, 0)
        tick = dispatch_params.check_interval
        if tick < self.horizon_min:
            self._schedule(tick, PRI_TICK, None)
        if warmup > 0:
            self._schedule(warmup * MINUTES_PER_DAY, PRI_ACCOUNTING, None)

    # ------------------------------------------------------------------
    # event machinery
    # ------------------------------------------------------------------

    def _schedule(self, time: float, priority: int, payload: object) -> None:
        assert time >= self.now, "event scheduled in the past"
        heapq.heappush(self._heap, (time, priority, self._seq, payload))
        self._seq += 1

    def _log(self, kind: str, entity: str, detail: str = "") -> None:
        if self.event_log is not None:
            self.event_log(self.now, kind, entity, detail)

    def run(self) -> RunResult:
        while self._heap and self._heap[0][0] <= self.horizon_min:
            time, priority, _, payload = heapq.heappop(self._heap)
            assert time >= self.now, "event loop time went backwards"
            self.now = time
            if priority == PRI_DAY:
                self._on_day(payload)
            elif priority == PRI_MRP:
                self._on_mrp()
            elif priority == PRI_RELEASE:
                self._on_release()
            elif priority == PRI_ARRIVAL:
                self._on_arrival(payload)
            elif priority == PRI_PROC_START:
                self._on_proc_start(payload)
            elif priority == PRI_COMPLETION:
                self._on_completion(payload)
            elif priority == PRI_DELIVERY:
                self._on_delivery(payload)
            elif priority == PRI_TICK:
                self._on_tick()
            elif priority == PRI_ACCOUNTING:
                self._on_warmup_reset()
        self.now = self.horizon_min
        return self._finalize()

    # ------------------------------------------------------------------
    # handlers
    # ------------------------------------------------------------------

    def _on_day(self, day: int) -> None:
        self._schedule(self.now, PRI_MRP, None)
        self._schedule(self.now, PRI_RELEASE, None)
        if day + 1 < self.days:
            self._schedule((day + 1) * MINUTES_PER_DAY, PRI_DAY, day + 1)

    def _today(self) -> int:
        return int(self.now // MINUTES_PER_DAY)

    def _on_mrp(self) -> None:
        state = InventoryState(
            on_hand=dict(self.stock_free),
            scheduled_receipts=[(o.item_id, o.quantity, o.planned_end)
                                for o in self.live_orders],
            booked_demand=[(co.item_id, co.quantity, int(co.due_min // MINUTES_PER_DAY))
                           for q in self.pending_customers.values() for co in q],
        )
        self.planned_orders = run_mrp(self.scenario, state, self.planning,
                                      self._today(), dump=self.mrp_dump)
        self._log("mrp", f"day-{self._today()}", f"planned={len(self.planned_orders)}")

    def _on_release(self) -> None:
        today = self._today()
        for order in self.planned_orders:
            if order.released:
                continue
            if release_check(order, today, self.stock_free, self.scenario):
                item = self.items[order.item_id]
                for child_id, qty_per in item.bom_children:
                    if self.items[child_id].always_available:
                        continue
                    self._consume_fgi(child_id, int(math.ceil(order.quantity * qty_per)))
                runtime = ProductionOrderRuntime(
                    order_id=order.order_id, item_id=order.item_id,
                    quantity=order.quantity, planned_end=order.planned_end,
                    release_min=self.now)
                self.live_orders.append(runtime)
                self._log("release", order.order_id,
                          f"item={order.item_id};qty={order.quantity}")
                self._enqueue(runtime)

    def _enqueue(self, order: ProductionOrderRuntime) -> None:
        step = self.items[order.item_id].routing[order.routing_position]
        machine = self.machines[step.machine_id]
        order.state = STATE_QUEUED
        order.planned_work = order.quantity * step.mean_proc_per_unit + step.mean_setup
        order.per_step_entry.append(self.now)
        machine.queue.append(order)
        machine.queued_workload += order.planned_work
        self._try_start(machine)

    def _on_arrival(self, co: CustomerOrderRuntime) -> None:
        self.pending_customers[co.item_id].append(co)
        self._log("arrival", co.item_id, f"qty={co.quantity};due={co.due_min:.1f}")
        self._try_allocate(co.item_id)

    def _try_start(self, machine: MachineRuntime) -> None:
        if machine.busy or not machine.on or not machine.queue:
            return
        order = machine.queue.popleft()
        machine.queued_workload -= order.planned_work
        if not machine.queue:
            machine.queued_workload = 0.0  # re-anchor against float drift
        pos = order.routing_position
        setup_spec = self._setup_specs.get((order.item_id, pos))
        setup_minutes = 0.0
        if setup_spec is not None:
            setup_minutes = sample(self._setup_streams[machine.spec.machine_id], setup_spec)
        per_unit = sample(self._proc_streams[machine.spec.machine_id],
                          self._proc_specs[(order.item_id, pos)])
        proc_minutes = order.quantity * per_unit
        service = _InService(order, setup_start=self.now, setup_minutes=setup_minutes,
                             proc_start=self.now + setup_minutes, proc_minutes=proc_minutes)
        machine.busy = True
        machine.current = service
        order.state = STATE_IN_SETUP
        self._log("start-step", order.order_id,
                  f"machine={machine.spec.machine_id};pos={pos};"
                  f"setup={setup_minutes:.2f};proc={proc_minutes:.2f}")
        self._schedule(service.proc_start, PRI_PROC_START, machine.spec.machine_id)
        self._schedule(service.proc_start + proc_minutes, PRI_COMPLETION,
                       machine.spec.machine_id)

    def _on_proc_start(self, machine_id: str) -> None:
        machine = self.machines[machine_id]
        if machine.current is not None:
            machine.current.order.state = STATE_IN_PROCESS
            self._log("start-process", machine.current.order.order_id,
                      f"machine={machine_id}")

    def _on_completion(self, machine_id: str) -> None:
        machine = self.machines[machine_id]
        service = machine.current
        assert service is not None
        order = service.order
        machine.busy = False
        machine.current = None

        self.ledger.accrue_energy(machine.spec.power_kw, service.proc_start,
                                  service.proc_minutes, self.prices)
        if self.setup_energy and service.setup_minutes > 0:
            self.ledger.accrue_energy(machine.spec.power_kw, service.setup_start,
                                      service.setup_minutes, self.prices)
        busy_from = max(service.setup_start, self.ledger.window_start)
        machine.stats.busy_minutes += max(0.0, self.now - busy_from)
        self._log("complete-step", order.order_id,
                  f"machine={machine_id};pos={order.routing_position}")

        order.routing_position += 1
        if order.routing_position < len(self.items[order.item_id].routing):
            self._enqueue(order)
        else:
            self._finish_order(order)

        if self.dispatch_enabled and machine.queue and self.now < self.horizon_min:
            self._decide(machine)
        self._try_start(machine)

    def _finish_order(self, order: ProductionOrderRuntime) -> None:
        order.state = STATE_FINISHED
        order.completion_min = self.now
        self.live_orders.remove(order)
        self.finished_orders.append(order)
        self.ledger.accrue_inventory(CATEGORY_WIP, order.quantity, order.release_min,
                                     self.now, self.scenario.costs.wip_rate)
        self.stock_free[order.item_id] += order.quantity
        self.fgi_batches[order.item_id].append((order.quantity, self.now))
        self._log("finish-order", order.order_id,
                  f"item={order.item_id};qty={order.quantity}")
        self._try_allocate(order.item_id)

    def _try_allocate(self, item_id: str) -> None:
        pending = self.pending_customers[item_id]
        while pending and self.stock_free[item_id] >= pending[0].quantity:
            co = pending.popleft()
            self.stock_free[item_id] -= co.quantity
            co.covered_min = self.now
            self._schedule(max(co.due_min, self.now), PRI_DELIVERY, co)

    def _consume_fgi(self, item_id: str, quantity: int) -> None:
        """Debit finished-stock batches FIFO, accruing their holding spans."""
        batches = self.fgi_batches[item_id]
        remaining = quantity
        while remaining > 0:
            batch_qty, credited = batches[0]
            take = min(batch_qty, remaining)
            self.ledger.accrue_inventory(CATEGORY_FGI, take, credited, self.now,
                                         self.scenario.costs.fgi_rate)
            if take == batch_qty:
                batches.popleft()
            else:
                batches[0] = (batch_qty - take, credited)
            remaining -= take

    def _on_delivery(self, co: CustomerOrderRuntime) -> None:
        # service outcomes count where they are observed: deliveries during the
        # warm-up are wiped by the reset, deliveries after it always count, so
        # tardiness accrued in the window always has a late order behind it
        co.delivered_min = self.now
        self._consume_fgi(co.item_id, co.quantity)
        if self.now > co.due_min:
            self.ledger.accrue_inventory(CATEGORY_TARDINESS, co.quantity, co.due_min,
                                         self.now, self.scenario.costs.tardiness_rate)
        self.ledger.record_due(on_time=self.now <= co.due_min)
        self._log("deliver", co.item_id,
                  f"qty={co.quantity};late={max(0.0, self.now - co.due_min):.1f}")

    def _decide(self, machine: MachineRuntime) -> None:
        decision = dispatch_rule.decide_from_workload(
            self.now, machine.spec, machine.queued_workload, self.prices,
            self.dispatch_params)
        stats = machine.stats
        stats.decisions += 1
        if decision.reason != dispatch_rule.REASON_PRICE_LOW:
            stats.price_exceed_count += 1
        if machine.on and not decision.machine_on:
            stats.switch_off_count += 1
        machine.on = decision.machine_on
        machine.last_eval = self.now
        self._log("decision", machine.spec.machine_id,
                  f"on={int(decision.machine_on)};reason={decision.reason};"
                  f"price={decision.price_checked:.2f};thr={decision.energy_threshold:.2f};"
                  f"workload={decision.workload:.1f}")

    def _on_tick(self) -> None:
        next_tick = self.now + self.dispatch_params.check_interval
        if next_tick < self.horizon_min:
            self._schedule(next_tick, PRI_TICK, None)
        if not self.dispatch_enabled:
            return
        for machine_id in self._machine_order:
            machine = self.machines[machine_id]
            if machine.queue and machine.last_eval != self.now:
                self._decide(machine)
                self._try_start(machine)

    def _on_warmup_reset(self) -> None:
        self.ledger.reset(self.now)
        for machine in self.machines.values():
            machine.stats.reset()
        self._log("warmup-reset", "statistics")

    # ------------------------------------------------------------------
    # horizon close-out
    # ------------------------------------------------------------------

    def _finalize(self) -> RunResult:
        end = self.horizon_min
        costs = self.scenario.costs
        for machine in self.machines.values():
            service = machine.current
            if service is not None:
                busy_from = max(service.setup_start, self.ledger.window_start)
                machine.stats.busy_minutes += max(0.0, end - busy_from)
                if service.proc_start < end:
                    self.ledger.accrue_energy(
                        machine.spec.power_kw, service.proc_start,
                        min(service.proc_minutes, end - service.proc_start), self.prices)
                if self.setup_energy and service.setup_start < end and service.setup_minutes > 0:
                    self.ledger.accrue_energy(
                        machine.spec.power_kw, service.setup_start,
                        min(service.setup_minutes, end - service.setup_start), self.prices)
        for order in self.live_orders:
            self.ledger.accrue_inventory(CATEGORY_WIP, order.quantity,
                                         order.release_min, end, costs.wip_rate)
        for item_id, batches in self.fgi_batches.items():
            for qty, credited in batches:
                self.ledger.accrue_inventory(CATEGORY_FGI, qty, credited, end,
                                             costs.fgi_rate)
        for pending in self.pending_customers.values():
            for co in pending:
                if co.due_min <= end:
                    self.ledger.accrue_inventory(CATEGORY_TARDINESS, co.quantity,
                                                 co.due_min, end, costs.tardiness_rate)
                    self.ledger.record_due(on_time=False)

        window_days = self.days - self.warmup
        stats_rows = []
        for machine_id in self._machine_order:
            machine = self.machines[machine_id]
            machine.stats.utilization = machine.stats.busy_minutes / (
                window_days * machine.spec.daily_capacity)
            stats_rows.append(machine.stats)
        return finalize(self.ledger, self.days, self.warmup,
                        param_point_id=self.param_point_id,
                        replication=self.replication, machine_stats=stats_rows,
                        params={})

    # ------------------------------------------------------------------
    # diagnostics used by tests and verification tooling
    # ------------------------------------------------------------------

    def released_quantity(self) -> int:
        return sum(o.quantity for o in self.live_orders) + \
            sum(o.quantity for o in self.finished_orders)

    def finished_quantity(self) -> int:
        return sum(o.quantity for o in self.finished_orders)

    def residual_wip_quantity(self) -> int:
        return sum(o.quantity for o in self.live_orders)


def run_simulation(scenario: Scenario, planning: PlanningParams,
                   dispatch_params: DispatchParams, prices: PriceSeries, *,
                   base_seed: int, replication: int, days: int = 400,
                   warmup: int = 150, **kwargs) -> RunResult:
    """Build and run one simulation; see :class:`Simulation` for options."""
    sim = Simulation(scenario, planning, dispatch_params, prices,
                     base_seed=base_seed, replication=replication, days=days,
                     warmup=warmup, **kwargs)
    return sim.run()
