"""
Tests for region/world loading, distance and validation
"""
import json

import pytest

from conftest import make_region, make_world
from topophase.errors import ConfigError, ParseError
from topophase.world import (EnvironmentReading, distance, load_world, validate_world, world_from_dict,
                             world_to_dict)


def _region_record(region_id, **overrides):
    record = {
        "id": region_id,
        "name": region_id,
        "position": [0, 0],
        "factors": {"labor": 1, "logistics": 1, "land": 1, "energy": 1, "market_distance": 1, "regulatory": 1},
        "environment": {"humidity": 40, "dust": 1, "thermal_cycling": 1, "irradiance": 2000,
                        "precipitation_days": 50},
        "habitable": True,
        "energy_access": True,
        "demand": 100,
    }
    record.update(overrides)
    return record


def _document(*records, rate=0.01):
    return json.dumps({"world": {"regions": list(records), "transport_rate": rate}})


def test_load_minimal_world():
    w = load_world(_document(_region_record("A")))
    assert len(w.regions) == 1
    assert w.regions[0].id == "A"
    assert w.total_demand == 100.0


def test_load_preserves_region_order():
    w = load_world(_document(_region_record("z"), _region_record("a"), _region_record("m")))
    assert w.ids == ("z", "a", "m")


def test_duplicate_id_is_reported():
    with pytest.raises(ConfigError) as excinfo:
        load_world(_document(_region_record("A"), _region_record("A")))
    assert "A" in str(excinfo.value)
    assert [(i.region_id, i.field) for i in excinfo.value.issues] == [("A", "id")]


def test_missing_field_names_region_and_field():
    record = _region_record("B")
    del record["demand"]
    with pytest.raises(ConfigError) as excinfo:
        load_world(_document(record))
    assert "'B'" in str(excinfo.value) and "demand" in str(excinfo.value)


def test_malformed_json_is_a_parse_error():
    with pytest.raises(ParseError):
        load_world('{"world": ')


def test_nan_is_rejected():
    with pytest.raises(ParseError):
        load_world('{"world": {"regions": [], "transport_rate": NaN}}')


def test_bundled_two_metro_world(two_metro):
    assert len(two_metro.world.regions) == 4
    assert validate_world(two_metro.world) == []


def test_distance_examples():
    a = make_region("a", position=(0, 0))
    assert distance(a, make_region("b", position=(0, 0))) == 0.0
    assert distance(a, make_region("b", position=(3, 4))) == 5.0
    assert distance(make_region("c", position=(1, 1)), make_region("d", position=(4, 5))) == 5.0


def test_validate_humidity_out_of_range():
    bad = make_region("wet", environment=EnvironmentReading(150.0, 0.0, 0.0, 2000.0, 10.0))
    issues = validate_world(make_world(bad))
    assert len(issues) == 1
    assert (issues[0].region_id, issues[0].field) == ("wet", "humidity")
    assert "range" in issues[0].reason


def test_validate_shared_id_is_one_entry():
    issues = validate_world(make_world(make_region("A"), make_region("A")))
    assert len(issues) == 1
    assert issues[0].field == "id"


def test_validate_negative_demand_and_rate():
    issues = validate_world(make_world(make_region("A", demand=-1), transport_rate=-0.5))
    assert {issue.field for issue in issues} == {"demand", "transport_rate"}


def test_world_round_trip():
    w = load_world(_document(_region_record("A", position=[10.5, -3]), _region_record("B", habitable=False)))
    assert world_from_dict(world_to_dict(w)) == w
