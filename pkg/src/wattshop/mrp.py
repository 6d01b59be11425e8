"""Periodic MRP run: netting, fixed-order-period lot sizing, backward scheduling,
and BoM explosion, plus the order release check.

The run is regenerative: every period all unreleased planned orders are
discarded and replanned from booked customer demand, while released orders
appear as scheduled receipts. Quantities are integer pieces; dates are day
indices (1 day = 1440 minutes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .scenario import PlanningParams, Scenario

DEFAULT_HORIZON_DAYS = 40


@dataclass
class PlannedOrder:
    order_id: str
    item_id: str
    quantity: int
    planned_start: int  # day
    planned_end: int  # day
    released: bool = False
    late_plan: bool = False  # start was clamped to the current day


@dataclass
class InventoryState:
    """Planning snapshot handed to one MRP run.

    ``on_hand`` counts unallocated finished stock per item. Stock already
    reserved for a booked customer order is excluded, and so is that order:
    the matched pair is planning-neutral.
    """

    on_hand: dict[str, int] = field(default_factory=dict)
    # released production orders still on the shop floor: (item, qty, end day)
    scheduled_receipts: list[tuple[str, int, int]] = field(default_factory=list)
    # undelivered, unallocated customer orders: (item, qty, due day)
    booked_demand: list[tuple[str, int, int]] = field(default_factory=list)


def safety_stock_pieces(prop: float, expected_order_qty: float) -> int:
    """Safety stock in pieces: proportion of the expected order quantity,
    rounded to the nearest piece (ties up)."""
    return int(math.floor(prop * expected_order_qty + 0.5))


def net_requirements(gross: Sequence[int], on_hand: int,
                     receipts: Sequence[int], safety_stock: int) -> list[int]:
    """Per-day net requirements restoring projected inventory to the safety stock.

    Projects ``on_hand`` plus receipts minus gross cumulatively; each day's
    net requirement is the shortfall of the projection below the safety
    stock, and the matching planned receipt lifts the projection back to it.
    """
    if len(gross) != len(receipts):
        raise ValueError("gross and receipts must cover the same horizon")
    net = [0] * len(gross)
    projected = on_hand
    for d in range(len(gross)):
        projected += receipts[d] - gross[d]
        shortfall = safety_stock - projected
        if shortfall > 0:
            net[d] = shortfall
            projected = safety_stock
    return net


def fop_lots(net: Sequence[int], fop_period: int) -> list[tuple[int, int]]:
    """Aggregate net requirements into fixed-order-period lots.

    Scanning forward, the first day with a positive net requirement opens a
    window of ``fop_period`` days; the lot covers the window's total net and
    is due on the window's first day. ``fop_period`` of 1 is lot-for-lot.
    """
    if fop_period < 1:
        raise ValueError("fop_period must be >= 1")
    lots: list[tuple[int, int]] = []
    d = 0
    while d < len(net):
        if net[d] > 0:
            qty = sum(net[d : d + fop_period])
            lots.append((qty, d))
            d += fop_period
        else:
            d += 1
    return lots


def backward_schedule(quantity: int, due_day: int, planned_lead_time: int,
                      today: int, item_id: str, order_id: str) -> PlannedOrder:
    """Plan an order ending on its due day, starting a lead time earlier.

    Starts that would fall before today are clamped to today and flagged as
    late plans (their realized lead time is shorter than planned).
    """
    start = due_day - planned_lead_time
    late = start < today
    if late:
        start = today
    return PlannedOrder(order_id=order_id, item_id=item_id, quantity=quantity,
                        planned_start=start, planned_end=due_day, late_plan=late)


DumpFn = Callable[[int, str, int, int, int, int, int], None]
# dump signature: (run_day, item, day, gross, projected, net, lot)


def run_mrp(scenario: Scenario, state: InventoryState, params: PlanningParams,
            today: int, horizon: int | None = None,
            dump: DumpFn | None = None) -> list[PlannedOrder]:
    """One regenerative MRP run at day ``today``; returns fresh unreleased orders.

    Items are planned parents-before-children; each level-0 lot explodes into
    child gross requirements on the parent's planned start day.
    Always-available children are skipped. Demand or receipts dated in the
    past are treated as due today. Re-running with unchanged state yields an
    identical order list.
    """
    if horizon is None:
        horizon = max(DEFAULT_HORIZON_DAYS, params.planned_lead_time + params.fop_period + 16)
    gross: dict[str, list[int]] = {
        item.item_id: [0] * horizon for item in scenario.items if not item.always_available
    }

    def _bucket(day: int) -> int:
        return min(max(day - today, 0), horizon - 1)

    for item_id, qty, due_day in state.booked_demand:
        if item_id in gross and due_day - today < horizon:
            gross[item_id][_bucket(due_day)] += qty

    receipts: dict[str, list[int]] = {item_id: [0] * horizon for item_id in gross}
    for item_id, qty, end_day in state.scheduled_receipts:
        if item_id in receipts and end_day - today < horizon:
            receipts[item_id][_bucket(end_day)] += qty

    orders: list[PlannedOrder] = []
    seq = 0
    for item in scenario.plannable_items_by_level():
        item_gross = gross[item.item_id]
        ss = safety_stock_pieces(params.safety_stock_prop, item.expected_order_qty)
        net = net_requirements(item_gross, state.on_hand.get(item.item_id, 0),
                               receipts[item.item_id], ss)
        lots = fop_lots(net, params.fop_period)
        lot_by_day = dict((d, q) for q, d in lots)
        if dump is not None:
            projected = state.on_hand.get(item.item_id, 0)
            for d in range(horizon):
                projected += receipts[item.item_id][d] - item_gross[d]
                net_d = net[d]
                if net_d > 0:
                    projected = ss
                dump(today, item.item_id, today + d, item_gross[d], projected,
                     net_d, lot_by_day.get(d, 0))
        for qty, rel_due in lots:
            order = backward_schedule(qty, today + rel_due, params.planned_lead_time,
                                      today, item.item_id, f"mrp-{today}-{seq}")
            seq += 1
            orders.append(order)
            for child_id, qty_per in item.bom_children:
                child = scenario.item(child_id)
                if child.always_available:
                    continue
                need = int(math.ceil(qty * qty_per))
                child_bucket = order.planned_start - today
                gross[child_id][min(child_bucket, horizon - 1)] += need
    return orders


def release_check(order: PlannedOrder, today: int, on_hand: dict[str, int],
                  scenario: Scenario) -> bool:
    """Release an order when its start day is reached and input material is there.

    On success the order is marked released and child stock is consumed
    (always-available children pass without consuming anything). A failed
    check leaves everything untouched; it is retried next period.
    """
    if order.released:
        raise ValueError(f"order {order.order_id} already released")
    if today < order.planned_start:
        return False
    item = scenario.item(order.item_id)
    needs: list[tuple[str, int]] = []
    for child_id, qty_per in item.bom_children:
        if scenario.item(child_id).always_available:
            continue
        need = int(math.ceil(order.quantity * qty_per))
        if on_hand.get(child_id, 0) < need:
            return False
        needs.append((child_id, need))
    for child_id, need in needs:
        on_hand[child_id] -= need
    order.released = True
    return True
