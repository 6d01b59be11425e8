"""Shared builders for toy scenarios and price series."""

from __future__ import annotations

from wattshop import (CostParams, DemandParams, ItemSpec, MachineSpec, PriceSeries,
                      RoutingStep, Scenario)
from wattshop.energyprice import DEFAULT_START_DATE


def constant_prices(level: float, days: int = 60) -> PriceSeries:
    return PriceSeries([level] * (days * 24), DEFAULT_START_DATE)


def single_machine_scenario(*, proc: float = 2.0, setup: float = 30.0,
                            order_qty: float = 10.0, cv_interarrival: float = 0.0,
                            cv_quantity: float = 0.0, cv_var_lead: float = 0.0,
                            proc_cv: float = 0.0) -> Scenario:
    """One item routed over one machine; deterministic by default."""
    return Scenario(
        machines=(MachineSpec("M1", 1440.0, 1.0),),
        items=(ItemSpec("A", (RoutingStep("M1", proc, setup, 0),), order_qty),),
        demand=DemandParams(10.0, cv_interarrival, cv_quantity, 10.0, 5.0, cv_var_lead),
        costs=CostParams(1.0, 2.0, 38.0),
        proc_cv=proc_cv,
    )


def small_random_scenario(rng) -> Scenario:
    """Random 2-item, 2-machine scenario for conservation-style checks."""
    machines = (MachineSpec("M1", 1440.0, 1.0), MachineSpec("M2", 1440.0, 1.0))
    items = []
    for item_id in ("A", "B"):
        order = ["M1", "M2"] if rng.random() < 0.5 else ["M2", "M1"]
        steps = tuple(
            RoutingStep(mid, round(rng.uniform(1.0, 8.0), 2),
                        round(rng.uniform(0.0, 120.0), 1), seq)
            for seq, mid in enumerate(order[: rng.integers(1, 3)]))
        items.append(ItemSpec(item_id, steps, float(rng.integers(5, 40))))
    demand = DemandParams(float(rng.uniform(4.0, 12.0)), 0.3, 0.5, 10.0, 5.0, 0.5)
    return Scenario(machines=machines, items=tuple(items), demand=demand,
                    costs=CostParams(1.0, 2.0, 38.0), proc_cv=0.25)


def random_planning_instance(rng):
    """Random small multi-level planning instance (items, state, params, horizon)."""
    from wattshop import InventoryState, PlanningParams

    n_items = int(rng.integers(1, 4))
    ids = ["I%d" % k for k in range(n_items)]
    items = []
    for k, item_id in enumerate(ids):
        children = ()
        if k > 0 and rng.random() < 0.5:
            children = ((ids[int(rng.integers(0, k))], float(rng.integers(1, 4))),)
        # BoM edges point from later ids to earlier ones, so no cycles
        items.append(ItemSpec(item_id, (RoutingStep("M1", 2.0, 0.0, 0),),
                              float(rng.integers(5, 60)), children))
    items = items[::-1]
    sc = Scenario(machines=(MachineSpec("M1", 1440.0, 1.0),), items=tuple(items))
    horizon = int(rng.integers(5, 21))
    state = InventoryState(
        on_hand={i: int(rng.integers(0, 40)) for i in ids if rng.random() < 0.7},
        scheduled_receipts=[(ids[int(rng.integers(0, n_items))], int(rng.integers(1, 30)),
                             int(rng.integers(0, horizon)))
                            for _ in range(int(rng.integers(0, 4)))],
        booked_demand=[(ids[int(rng.integers(0, n_items))], int(rng.integers(1, 50)),
                        int(rng.integers(0, horizon)))
                       for _ in range(int(rng.integers(0, 8)))],
    )
    params = PlanningParams(int(rng.integers(1, 6)), int(rng.integers(1, 5)),
                            float(rng.choice([0.0, 0.5, 1.0, 2.0])))
    return sc, state, params, horizon


def plan_tuples(orders):
    return [(o.item_id, o.quantity, o.planned_start, o.planned_end, o.late_plan)
            for o in orders]
