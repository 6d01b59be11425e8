import dataclasses

import pytest

from wattshop import (DemandParams, ItemSpec, MachineSpec, RoutingStep, Scenario,
                      ScenarioError, expected_machine_load, load_scenario, save_scenario,
                      validate_scenario)
from wattshop.scenario import default_scenario_path


def test_default_scenario_shape(default_scenario):
    assert len(default_scenario.machines) == 4
    level0 = default_scenario.demand_items()
    assert len(level0) == 8
    always = [i for i in default_scenario.items if i.always_available]
    assert [i.item_id for i in always] == ["201"]
    # every sellable item consumes the always-available component
    for item in level0:
        assert ("201", 1.0) in item.bom_children


def test_default_scenario_load_near_1024(default_scenario):
    load = expected_machine_load(default_scenario)
    for machine_id, minutes in load.items():
        assert minutes == pytest.approx(1024.0, rel=0.01), machine_id


def test_default_scenario_validates_clean(default_scenario):
    assert validate_scenario(default_scenario) == []


def test_single_item_load_arithmetic():
    sc = Scenario(
        machines=(MachineSpec("M1", 1440.0, 1.0),),
        items=(ItemSpec("A", (RoutingStep("M1", 1.0, 0.0, 0),), 10.0),),
        demand=DemandParams(10.0, 0.0, 0.0, 10.0, 5.0, 0.0),
    )
    assert expected_machine_load(sc, setup_share=0.0)["M1"] == pytest.approx(1.0)


def _scale_processing(scenario, machine_id, factor):
    items = []
    for item in scenario.items:
        steps = tuple(
            dataclasses.replace(s, mean_proc_per_unit=s.mean_proc_per_unit * factor)
            if s.machine_id == machine_id else s
            for s in item.routing)
        items.append(dataclasses.replace(item, routing=steps))
    return dataclasses.replace(scenario, items=tuple(items))


def test_processing_load_is_linear_in_proc_times(default_scenario):
    base = expected_machine_load(default_scenario)["M1.1"]
    doubled = _scale_processing(default_scenario, "M1.1", 2.0)
    after = expected_machine_load(doubled)["M1.1"]
    setup = 0.10 * 1440.0
    assert after - setup == pytest.approx(2.0 * (base - setup), rel=1e-12)


def test_overload_flagged_on_scaled_machine(default_scenario):
    heavy = _scale_processing(default_scenario, "M1.2", 2.0)
    assert expected_machine_load(heavy)["M1.2"] > 1440.0
    findings = validate_scenario(heavy)
    assert [f.subject for f in findings] == ["M1.2"]
    assert findings[0].severity == "warning"


def test_load_is_additive_over_items(default_scenario):
    stripped = [dataclasses.replace(i, bom_children=()) for i in default_scenario.items]
    halves = [stripped[:5], stripped[5:]]
    partial_sum = 0.0
    for items in halves:
        sc = dataclasses.replace(default_scenario, items=tuple(items))
        partial_sum += expected_machine_load(sc, setup_share=0.0)["M1.3"]
    assert partial_sum == pytest.approx(
        expected_machine_load(default_scenario, setup_share=0.0)["M1.3"], rel=1e-12)


def test_zero_capacity_machine_rejected():
    with pytest.raises(ScenarioError):
        MachineSpec("M1", 0.0, 1.0)


def test_unknown_machine_reference_rejected(tmp_path):
    text = default_scenario_path().read_text().replace("101,0,M1.1", "101,0,M9")
    bad = tmp_path / "bad.scn"
    bad.write_text(text)
    with pytest.raises(ScenarioError, match="unknown machine"):
        load_scenario(bad)


def test_empty_items_rejected(tmp_path):
    bad = tmp_path / "empty.scn"
    bad.write_text("[machines]\nmachine,daily_capacity,power_kw\nM1,1440,1\n"
                   "[items]\nitem,order_qty,always_available\n"
                   "[routing]\nitem,seq,machine,proc_per_unit,setup\n")
    with pytest.raises(ScenarioError):
        load_scenario(bad)


def test_duplicate_item_rejected(tmp_path):
    text = default_scenario_path().read_text().replace(
        "101,50,0", "101,50,0\n101,50,0", 1)
    bad = tmp_path / "dup.scn"
    bad.write_text(text)
    with pytest.raises(ScenarioError, match="duplicate"):
        load_scenario(bad)


def test_bom_cycle_rejected():
    with pytest.raises(ScenarioError, match="cycle"):
        Scenario(
            machines=(MachineSpec("M1"),),
            items=(
                ItemSpec("A", (RoutingStep("M1", 1.0, 0.0, 0),), 10.0, (("B", 1.0),)),
                ItemSpec("B", (RoutingStep("M1", 1.0, 0.0, 0),), 10.0, (("A", 1.0),)),
            ),
        )


def test_round_trip_preserves_scenario(tmp_path, default_scenario):
    path = tmp_path / "copy.scn"
    save_scenario(default_scenario, path)
    again = load_scenario(path)
    assert again == default_scenario


def test_missing_file_is_error(tmp_path):
    with pytest.raises(ScenarioError, match="not found"):
        load_scenario(tmp_path / "nope.scn")


def test_gapped_sequence_rejected():
    with pytest.raises(ScenarioError, match="sequence"):
        ItemSpec("A", (RoutingStep("M1", 1.0, 0.0, 0), RoutingStep("M2", 1.0, 0.0, 2)),
                 10.0)
