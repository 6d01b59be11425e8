"""Energy-price-and-workload machine on/off rule.

A machine with work waiting is switched on while the current energy price is
below its threshold (the running month's average price times the energy
factor). At higher prices it stays on only if the queued workload exceeds
the workload threshold (daily capacity times the capacity factor); otherwise
it is switched off and the queue waits for cheaper hours.

Both comparisons are strict: a price exactly at the threshold falls through
to the workload check, and a workload exactly at its threshold switches off.

The engine triggers a decision for a machine (a) when it completes a
production order and (b) on the periodic check tick, in both cases only when
at least one order is waiting in the queue.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .energyprice import PriceSeries
from .scenario import DispatchParams, MachineSpec

REASON_PRICE_LOW = "price-low"
REASON_WORKLOAD_HIGH = "workload-high"
REASON_OFF = "off"


@dataclass(frozen=True)
class QueuedWork:
    """Planned (expected-mean) time content of one waiting production order."""

    order_id: str
    planned_processing: float  # lot quantity x mean processing per unit, minutes
    planned_setup: float  # the machine's mean setup, minutes


@dataclass(frozen=True)
class DispatchDecision:
    machine_on: bool
    price_checked: float
    energy_threshold: float
    workload: float
    workload_threshold: float
    reason: str


def current_workload(queue: Sequence[QueuedWork]) -> float:
    """Total planned processing plus setup minutes over the waiting orders."""
    return sum(w.planned_processing + w.planned_setup for w in queue)


def decide_from_workload(now: float, machine: MachineSpec, workload: float,
                         prices: PriceSeries, params: DispatchParams) -> DispatchDecision:
    """The rule applied to an already-summed queue workload (minutes)."""
    price = prices.price_at(now)
    threshold = prices.energy_threshold(now, params.energy_factor)
    workload_threshold = machine.daily_capacity * params.capacity_factor
    if price < threshold:
        return DispatchDecision(True, price, threshold, workload,
                                workload_threshold, REASON_PRICE_LOW)
    if workload > workload_threshold:
        return DispatchDecision(True, price, threshold, workload,
                                workload_threshold, REASON_WORKLOAD_HIGH)
    return DispatchDecision(False, price, threshold, workload,
                            workload_threshold, REASON_OFF)


def decide_state(now: float, machine: MachineSpec, queue: Sequence[QueuedWork],
                 prices: PriceSeries, params: DispatchParams) -> DispatchDecision:
    """Operational-state decision for one machine with a non-empty queue."""
    return decide_from_workload(now, machine, current_workload(queue), prices, params)
