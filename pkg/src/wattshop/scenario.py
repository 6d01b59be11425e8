"""Static production-system description: items, machines, routings, BoM, demand, costs.

A scenario is immutable after loading and safe to share across concurrent
simulation runs. Time unit conventions: 1 period = 1 day = 1440 minutes; all
durations are stored in minutes except where a field name says days.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

MINUTES_PER_DAY = 1440.0

# Share of daily capacity assumed to be consumed by setups when projecting
# machine load (the scenario's nominal setup allowance).
DEFAULT_SETUP_SHARE = 0.10


class ScenarioError(ValueError):
    """Parse or semantic error in a scenario definition."""


@dataclass(frozen=True)
class MachineSpec:
    machine_id: str
    daily_capacity: float = 1440.0
    power_kw: float = 1.0

    def __post_init__(self) -> None:
        if self.daily_capacity <= 0:
            raise ScenarioError(f"machine {self.machine_id}: daily_capacity must be > 0")
        if self.power_kw <= 0:
            raise ScenarioError(f"machine {self.machine_id}: power_kw must be > 0")


@dataclass(frozen=True)
class RoutingStep:
    machine_id: str
    mean_proc_per_unit: float  # minutes per piece
    mean_setup: float  # minutes per lot
    sequence_index: int

    def __post_init__(self) -> None:
        if self.mean_proc_per_unit <= 0:
            raise ScenarioError(f"routing step on {self.machine_id}: proc time must be > 0")
        if self.mean_setup < 0:
            raise ScenarioError(f"routing step on {self.machine_id}: setup must be >= 0")


@dataclass(frozen=True)
class ItemSpec:
    item_id: str
    routing: tuple[RoutingStep, ...]
    expected_order_qty: float
    bom_children: tuple[tuple[str, float], ...] = ()
    always_available: bool = False

    def __post_init__(self) -> None:
        if self.always_available:
            return
        if not self.routing:
            raise ScenarioError(f"item {self.item_id}: routing must be non-empty")
        if self.expected_order_qty <= 0:
            raise ScenarioError(f"item {self.item_id}: expected_order_qty must be > 0")
        seq = [s.sequence_index for s in self.routing]
        if sorted(seq) != list(range(len(seq))):
            raise ScenarioError(f"item {self.item_id}: sequence indices must be 0..n-1 with no gaps")
        for child, qty_per in self.bom_children:
            if qty_per <= 0:
                raise ScenarioError(f"item {self.item_id}: qty_per for child {child} must be > 0")


@dataclass(frozen=True)
class DemandParams:
    mean_interarrival_days: float = 10.0
    cv_interarrival: float = 0.2
    cv_quantity: float = 0.5
    fixed_lead_days: float = 10.0
    mean_var_lead_days: float = 5.0
    cv_var_lead: float = 0.5

    def __post_init__(self) -> None:
        if self.mean_interarrival_days <= 0 or self.fixed_lead_days <= 0 or self.mean_var_lead_days <= 0:
            raise ScenarioError("demand means must be > 0")
        if min(self.cv_interarrival, self.cv_quantity, self.cv_var_lead) < 0:
            raise ScenarioError("demand CVs must be >= 0")


@dataclass(frozen=True)
class CostParams:
    wip_rate: float = 1.0  # CU per piece per day
    fgi_rate: float = 2.0
    tardiness_rate: float = 38.0

    def __post_init__(self) -> None:
        if min(self.wip_rate, self.fgi_rate, self.tardiness_rate) < 0:
            raise ScenarioError("cost rates must be >= 0")


@dataclass(frozen=True)
class PlanningParams:
    planned_lead_time: int  # days
    fop_period: int  # days
    safety_stock_prop: float  # ratio of expected_order_qty

    def __post_init__(self) -> None:
        if self.planned_lead_time < 1 or int(self.planned_lead_time) != self.planned_lead_time:
            raise ScenarioError("planned_lead_time must be an integer >= 1")
        if self.fop_period < 1 or int(self.fop_period) != self.fop_period:
            raise ScenarioError("fop_period must be an integer >= 1")
        if self.safety_stock_prop < 0:
            raise ScenarioError("safety_stock_prop must be >= 0")


@dataclass(frozen=True)
class DispatchParams:
    energy_factor: float
    capacity_factor: float
    check_interval: float = 60.0  # minutes

    def __post_init__(self) -> None:
        if self.energy_factor <= 0:
            raise ScenarioError("energy_factor must be > 0")
        if self.capacity_factor < 0:
            raise ScenarioError("capacity_factor must be >= 0")
        if self.check_interval <= 0:
            raise ScenarioError("check_interval must be > 0")


@dataclass(frozen=True)
class Scenario:
    machines: tuple[MachineSpec, ...]
    items: tuple[ItemSpec, ...]
    demand: DemandParams = DemandParams()
    costs: CostParams = CostParams()
    proc_cv: float = 0.25  # CV of realized processing/setup times around planned means

    def __post_init__(self) -> None:
        _check_references(self)

    def machine(self, machine_id: str) -> MachineSpec:
        return self._machine_map[machine_id]

    def item(self, item_id: str) -> ItemSpec:
        return self._item_map[item_id]

    @property
    def _machine_map(self) -> dict[str, MachineSpec]:
        return {m.machine_id: m for m in self.machines}

    @property
    def _item_map(self) -> dict[str, ItemSpec]:
        return {i.item_id: i for i in self.items}

    def demand_items(self) -> tuple[ItemSpec, ...]:
        """Items that receive customer demand: BoM roots that are plannable."""
        children = {c for i in self.items for c, _ in i.bom_children}
        return tuple(i for i in self.items if not i.always_available and i.item_id not in children)

    def plannable_items_by_level(self) -> tuple[ItemSpec, ...]:
        """Plannable items ordered parents-before-children (BoM level ascending)."""
        level: dict[str, int] = {}

        def _level(item_id: str, trail: tuple[str, ...]) -> int:
            if item_id in trail:
                raise ScenarioError(f"BoM cycle involving {item_id}")
            if item_id in level:
                return level[item_id]
            parents = [i for i in self.items if any(c == item_id for c, _ in i.bom_children)]
            lvl = 0 if not parents else 1 + max(_level(p.item_id, trail + (item_id,)) for p in parents)
            level[item_id] = lvl
            return lvl

        plannable = [i for i in self.items if not i.always_available]
        return tuple(sorted(plannable, key=lambda i: (_level(i.item_id, ()), i.item_id)))


def _check_references(sc: Scenario) -> None:
    machine_ids = [m.machine_id for m in sc.machines]
    if len(set(machine_ids)) != len(machine_ids):
        raise ScenarioError("duplicate machine id")
    item_ids = [i.item_id for i in sc.items]
    if len(set(item_ids)) != len(item_ids):
        raise ScenarioError("duplicate item id")
    if not sc.items:
        raise ScenarioError("scenario has no items")
    if not sc.machines:
        raise ScenarioError("scenario has no machines")
    known_machines = set(machine_ids)
    known_items = set(item_ids)
    for item in sc.items:
        for step in item.routing:
            if step.machine_id not in known_machines:
                raise ScenarioError(f"item {item.item_id}: routing references unknown machine "
                                    f"{step.machine_id}")
        for child, _ in item.bom_children:
            if child not in known_items:
                raise ScenarioError(f"item {item.item_id}: BoM references unknown item {child}")
    sc.plannable_items_by_level()  # raises on BoM cycles


def expected_machine_load(scenario: Scenario, setup_share: float = DEFAULT_SETUP_SHARE) -> dict[str, float]:
    """Expected load per machine in minutes/day.

    Processing load is the sum over items of
    ``expected_order_qty / mean_interarrival * mean_proc_per_unit``; the
    setup load defaults to ``setup_share`` of the machine's daily capacity.
    """
    load = {m.machine_id: setup_share * m.daily_capacity for m in scenario.machines}
    rate = 1.0 / scenario.demand.mean_interarrival_days
    for item in scenario.items:
        if item.always_available:
            continue
        daily_pieces = item.expected_order_qty * rate
        for step in item.routing:
            load[step.machine_id] += daily_pieces * step.mean_proc_per_unit
    return load


@dataclass(frozen=True)
class Finding:
    severity: str  # "warning" | "error"
    subject: str
    message: str


def validate_scenario(scenario: Scenario) -> list[Finding]:
    """Sanity findings for a loaded scenario; empty list when clean."""
    findings: list[Finding] = []
    load = expected_machine_load(scenario)
    for machine in scenario.machines:
        expected = load[machine.machine_id]
        if expected > machine.daily_capacity:
            findings.append(Finding(
                "warning", machine.machine_id,
                f"expected load {expected:.1f} min/day exceeds capacity "
                f"{machine.daily_capacity:.1f} min/day"))
    if not scenario.demand_items():
        findings.append(Finding("error", "items", "no item receives customer demand"))
    return findings


# ---------------------------------------------------------------------------
# Sectioned-CSV scenario files
#
# Sections appear as "[name]" lines followed by one header row and data rows;
# "#" starts a comment. Column orders are documented in the README.
# ---------------------------------------------------------------------------

_SECTION_HEADERS = {
    "machines": ["machine", "daily_capacity", "power_kw"],
    "items": ["item", "order_qty", "always_available"],
    "routing": ["item", "seq", "machine", "proc_per_unit", "setup"],
    "bom": ["parent", "child", "qty_per"],
    "demand": ["mean_interarrival_days", "cv_interarrival", "cv_quantity",
               "fixed_lead_days", "mean_var_lead_days", "cv_var_lead"],
    "costs": ["wip_rate", "fgi_rate", "tardiness_rate"],
    "stochastics": ["proc_cv"],
}

_REQUIRED_SECTIONS = ("machines", "items", "routing")


def _read_sections(path: Path) -> dict[str, list[list[str]]]:
    sections: dict[str, list[list[str]]] = {}
    current: str | None = None
    expect_header = False
    with path.open(newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in _SECTION_HEADERS:
                    raise ScenarioError(f"{path}:{lineno}: unknown section [{current}]")
                if current in sections:
                    raise ScenarioError(f"{path}:{lineno}: duplicate section [{current}]")
                sections[current] = []
                expect_header = True
                continue
            if current is None:
                raise ScenarioError(f"{path}:{lineno}: data before any [section]")
            cells = [c.strip() for c in next(csv.reader([line]))]
            if expect_header:
                if cells != _SECTION_HEADERS[current]:
                    raise ScenarioError(
                        f"{path}:{lineno}: [{current}] header must be "
                        f"{','.join(_SECTION_HEADERS[current])}")
                expect_header = False
                continue
            if len(cells) != len(_SECTION_HEADERS[current]):
                raise ScenarioError(f"{path}:{lineno}: expected "
                                    f"{len(_SECTION_HEADERS[current])} columns, got {len(cells)}")
            sections[current].append(cells)
    for name in _REQUIRED_SECTIONS:
        if name not in sections:
            raise ScenarioError(f"{path}: missing required section [{name}]")
    return sections


def _parse_num(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise ScenarioError(f"{where}: not a number: {cell!r}") from exc


def load_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario file; defaults are filled in."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    sections = _read_sections(path)

    machines = tuple(
        MachineSpec(row[0],
                    _parse_num(row[1], f"[machines] {row[0]}") if row[1] else 1440.0,
                    _parse_num(row[2], f"[machines] {row[0]}") if row[2] else 1.0)
        for row in sections["machines"])

    routing_rows: dict[str, list[RoutingStep]] = {}
    for row in sections["routing"]:
        item_id, seq, machine_id, proc, setup = row
        routing_rows.setdefault(item_id, []).append(RoutingStep(
            machine_id=machine_id,
            mean_proc_per_unit=_parse_num(proc, f"[routing] {item_id}"),
            mean_setup=_parse_num(setup, f"[routing] {item_id}"),
            sequence_index=int(_parse_num(seq, f"[routing] {item_id}")),
        ))

    bom_rows: dict[str, list[tuple[str, float]]] = {}
    for row in sections.get("bom", []):
        parent, child, qty_per = row
        bom_rows.setdefault(parent, []).append((child, _parse_num(qty_per, f"[bom] {parent}")))

    items = []
    for row in sections["items"]:
        item_id, qty, always = row
        always_available = bool(int(always)) if always else False
        routing = tuple(sorted(routing_rows.get(item_id, []), key=lambda s: s.sequence_index))
        items.append(ItemSpec(
            item_id=item_id,
            routing=routing,
            expected_order_qty=_parse_num(qty, f"[items] {item_id}") if qty else 0.0,
            bom_children=tuple(bom_rows.get(item_id, [])),
            always_available=always_available,
        ))
    known_items = {i.item_id for i in items}
    for item_id in routing_rows:
        if item_id not in known_items:
            raise ScenarioError(f"{path}: [routing] references unknown item {item_id}")
    for parent in bom_rows:
        if parent not in known_items:
            raise ScenarioError(f"{path}: [bom] references unknown parent {parent}")

    demand = DemandParams()
    if sections.get("demand"):
        vals = [_parse_num(c, "[demand]") for c in sections["demand"][0]]
        demand = DemandParams(*vals)
    costs = CostParams()
    if sections.get("costs"):
        vals = [_parse_num(c, "[costs]") for c in sections["costs"][0]]
        costs = CostParams(*vals)
    proc_cv = 0.25
    if sections.get("stochastics"):
        proc_cv = _parse_num(sections["stochastics"][0][0], "[stochastics]")

    return Scenario(machines=tuple(machines), items=tuple(items),
                    demand=demand, costs=costs, proc_cv=proc_cv)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario back to the sectioned-CSV format (round-trips load_scenario)."""
    path = Path(path)
    lines: list[str] = []
    lines.append("[machines]")
    lines.append(",".join(_SECTION_HEADERS["machines"]))
    for m in scenario.machines:
        lines.append(f"{m.machine_id},{m.daily_capacity:g},{m.power_kw:g}")
    lines.append("[items]")
    lines.append(",".join(_SECTION_HEADERS["items"]))
    for i in scenario.items:
        lines.append(f"{i.item_id},{i.expected_order_qty:g},{int(i.always_available)}")
    lines.append("[routing]")
    lines.append(",".join(_SECTION_HEADERS["routing"]))
    for i in scenario.items:
        for s in i.routing:
            lines.append(f"{i.item_id},{s.sequence_index},{s.machine_id},"
                         f"{s.mean_proc_per_unit:g},{s.mean_setup:g}")
    lines.append("[bom]")
    lines.append(",".join(_SECTION_HEADERS["bom"]))
    for i in scenario.items:
        for child, qty_per in i.bom_children:
            lines.append(f"{i.item_id},{child},{qty_per:g}")
    d = scenario.demand
    lines.append("[demand]")
    lines.append(",".join(_SECTION_HEADERS["demand"]))
    lines.append(f"{d.mean_interarrival_days:g},{d.cv_interarrival:g},{d.cv_quantity:g},"
                 f"{d.fixed_lead_days:g},{d.mean_var_lead_days:g},{d.cv_var_lead:g}")
    c = scenario.costs
    lines.append("[costs]")
    lines.append(",".join(_SECTION_HEADERS["costs"]))
    lines.append(f"{c.wip_rate:g},{c.fgi_rate:g},{c.tardiness_rate:g}")
    lines.append("[stochastics]")
    lines.append(",".join(_SECTION_HEADERS["stochastics"]))
    lines.append(f"{scenario.proc_cv:g}")
    path.write_text("\n".join(lines) + "\n")


def default_scenario_path() -> Path:
    """Path of the bundled default scenario (8 items, 4 machines)."""
    return Path(str(resources.files("wattshop").joinpath("data/default.scn")))


def load_default_scenario() -> Scenario:
    return load_scenario(default_scenario_path())
