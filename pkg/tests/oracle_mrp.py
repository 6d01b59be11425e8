"""Brute-force MRP oracle.

Recomputes one planning run from first principles with a different structure
than the engine: netting via the cumulative minimum of the inventory
projection (cumulative net requirement through day d equals the shortfall of
the worst projection seen so far below the safety stock), windows by an
explicit day walk, and explosion by recursion over BoM levels.
"""

from __future__ import annotations

import math


def oracle_net(gross: list[int], on_hand: int, receipts: list[int], ss: int) -> list[int]:
    # Cumulative net through day d is the shortfall of the worst unplanned
    # inventory balance seen so far below the safety stock.
    balance = on_hand
    min_balance = math.inf
    cumulative = 0
    net = []
    for d in range(len(gross)):
        balance += receipts[d] - gross[d]
        min_balance = min(min_balance, balance)
        total_needed = max(0, ss - min_balance)
        net.append(total_needed - cumulative)
        cumulative = total_needed
    return net


def oracle_lots(net: list[int], fop: int) -> list[tuple[int, int]]:
    lots = []
    d = 0
    n = len(net)
    while d < n:
        if net[d] <= 0:
            d += 1
            continue
        total = 0
        for k in range(d, min(d + fop, n)):
            total += net[k]
        lots.append((total, d))
        d += fop
    return lots


def oracle_run(scenario, state, params, today: int, horizon: int):
    """Full planning run; returns [(item, qty, start, end, late)] in the same
    deterministic order as the engine (levels ascending, then item id, then due)."""
    items = {i.item_id: i for i in scenario.items}

    def level_of(item_id: str) -> int:
        parents = [p for p in scenario.items if any(c == item_id for c, _ in p.bom_children)]
        if not parents:
            return 0
        return 1 + max(level_of(p.item_id) for p in parents)

    plannable = sorted((i for i in scenario.items if not i.always_available),
                       key=lambda i: (level_of(i.item_id), i.item_id))

    gross: dict[str, list[int]] = {i.item_id: [0] * horizon for i in plannable}
    for item_id, qty, due in state.booked_demand:
        if item_id in gross and due - today < horizon:
            gross[item_id][max(0, due - today)] += qty
    receipts: dict[str, list[int]] = {i.item_id: [0] * horizon for i in plannable}
    for item_id, qty, end in state.scheduled_receipts:
        if item_id in receipts and end - today < horizon:
            receipts[item_id][max(0, end - today)] += qty

    plan = []
    for item in plannable:
        ss = int(math.floor(params.safety_stock_prop * item.expected_order_qty + 0.5))
        net = oracle_net(gross[item.item_id], state.on_hand.get(item.item_id, 0),
                         receipts[item.item_id], ss)
        for qty, rel_due in oracle_lots(net, params.fop_period):
            due = today + rel_due
            start = due - params.planned_lead_time
            late = start < today
            if late:
                start = today
            plan.append((item.item_id, qty, start, due, late))
            for child_id, qty_per in item.bom_children:
                if items[child_id].always_available:
                    continue
                gross[child_id][min(start - today, horizon - 1)] += int(math.ceil(qty * qty_per))
    return plan
