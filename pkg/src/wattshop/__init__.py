"""Energy-price-aware job-shop simulator.

Couples a periodic MRP planning engine with a shop-floor dispatching rule
that switches machines on or off from the current energy price and the
queued workload, plus a full-factorial experiment harness with Pareto
analysis of energy versus production-logistics costs.
"""

from .costing import CostLedger, MachineStats, RunResult
from .dispatch import DispatchDecision, QueuedWork, current_workload, decide_state
from .energyprice import PriceSeries, generate_synthetic_prices, load_prices, save_prices
from .experiment import (AggregateResult, GridSpec, ParamPoint, aggregate,
                         best_partner_marginals, ci_grid, grid_generate, load_grid,
                         pareto_front, run_sweep, table_grid)
from .mrp import (InventoryState, PlannedOrder, backward_schedule, fop_lots,
                  net_requirements, release_check, run_mrp, safety_stock_pieces)
from .scenario import (CostParams, DemandParams, DispatchParams, ItemSpec, MachineSpec,
                       PlanningParams, RoutingStep, Scenario, ScenarioError,
                       expected_machine_load, load_default_scenario, load_scenario,
                       save_scenario, validate_scenario)
from .shopfloor import CustomerOrderRuntime, Simulation, generate_demand, run_simulation
from .stochastics import LognormalSpec, RngStream, lognormal_from_mean_cv, sample, sample_many

__version__ = "0.1.0"
