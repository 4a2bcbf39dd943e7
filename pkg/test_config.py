"""
Tests for configuration loading, dotted-key overrides and serialization
"""
import json

import pytest

from topophase.config import (apply_overrides, bundle_from_document, bundle_to_document, bundled_names,
                              dump_config, load_config, load_config_file, read_document)
from topophase.errors import ConfigError, ParseError
from topophase.topology import MIN_METRO_DEMAND


def test_bundled_documents_are_listed():
    assert {"two-metro", "mca-demo", "desert-frontier"} <= set(bundled_names())
    assert "industries" not in bundled_names()


def test_two_metro_bundle(two_metro):
    assert two_metro.world.ids == ("metro-west", "metro-east", "hub", "desert")
    assert two_metro.weights.w_phi == 2.0
    assert two_metro.product.n_star_rule == MIN_METRO_DEMAND
    assert two_metro.default_industry == "food"
    assert [p.name for p in two_metro.industries] == ["electronics", "aerospace", "food"]
    assert two_metro.solver.jump_threshold == 0.1


def test_industry_presets(two_metro):
    electronics = two_metro.industry("electronics")
    assert electronics.current.as_tuple() == (0.7, 0.3, 0.99, 0.4)
    assert electronics.metadata["primary_pathway"] == "sigma_w"
    assert two_metro.thresholds().sigma_h.tau_min == 0.7


def test_unknown_document_name():
    with pytest.raises(ConfigError):
        read_document("no-such-world")
    with pytest.raises(ConfigError):
        read_document("industries")


def test_document_from_file(tmp_path, two_metro):
    target = tmp_path / "custom.json"
    target.write_text(dump_config(two_metro), encoding="utf-8")
    assert load_config_file(str(target)) == two_metro


def test_round_trip(two_metro, desert_frontier):
    for bundle in (two_metro, desert_frontier):
        assert bundle_from_document(bundle_to_document(bundle)) == bundle


def test_overrides_replace_nested_values():
    doc = read_document("two-metro")
    changed = apply_overrides(doc, [
        "cost_constants.c_switch_0=100",
        "world.regions.hub.demand=250",
        "world.regions.0.habitable=false",
        "product.n_star_rule=4000",
    ])
    bundle = bundle_from_document(changed)
    assert bundle.cost_constants.c_switch_0 == 100
    assert bundle.world.region("hub").demand == 250.0
    assert not bundle.world.region("metro-west").habitable
    assert bundle.product.n_star_rule == 4000.0
    # the source document is untouched
    assert doc["cost_constants"]["c_switch_0"] == 20000


def test_overrides_seed_optional_sections():
    doc = read_document("two-metro")
    bundle = bundle_from_document(apply_overrides(doc, [
        "solver.jump_threshold=0.3",
        "presets.default=electronics",
        "presets.industries.food.current.tau=0.9",
    ]))
    assert bundle.solver.jump_threshold == 0.3
    assert bundle.default_industry == "electronics"
    assert bundle.industry("food").current.tau == 0.9


def test_bad_overrides():
    doc = read_document("two-metro")
    for override in ("cost_constants.c_switch=1", "world.regions.atlantis.demand=1", "product",
                     "product.price.value=3"):
        with pytest.raises(ConfigError):
            apply_overrides(doc, [override])


def test_override_can_make_the_document_invalid():
    doc = apply_overrides(read_document("two-metro"), ["product.variable_cost=12"])
    with pytest.raises(ConfigError):
        bundle_from_document(doc)


def test_missing_and_unknown_sections():
    doc = read_document("two-metro")
    del doc["mca_model"]
    with pytest.raises(ConfigError) as excinfo:
        bundle_from_document(doc)
    assert "mca_model" in str(excinfo.value)
    doc = read_document("two-metro")
    doc["extras"] = {}
    with pytest.raises(ConfigError):
        bundle_from_document(doc)


def test_invalid_weights_and_solver_settings():
    doc = read_document("two-metro")
    doc["weights"]["baseline"]["labor"] = 0.9
    with pytest.raises(ConfigError):
        bundle_from_document(doc)
    doc = read_document("two-metro")
    doc["solver"] = {"exact_limit": "many"}
    with pytest.raises(ConfigError):
        bundle_from_document(doc)
    doc["solver"] = {"turbo": True}
    with pytest.raises(ConfigError):
        bundle_from_document(doc)
    doc = apply_overrides(read_document("two-metro"), ["weights.fusion_exponents=[0, 1]"])
    with pytest.raises(ConfigError):
        bundle_from_document(doc)


def test_load_config_parses_text(two_metro):
    assert load_config(json.dumps(bundle_to_document(two_metro))) == two_metro
    with pytest.raises(ParseError):
        load_config("{not json")
