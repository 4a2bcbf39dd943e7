"""
Tests for the command-line surface: CSV on stdout, summaries on stderr, exit codes
"""
import io
import json
from pathlib import Path

import pandas as pd
import pytest

import topophase
from topophase.cli import main
from topophase.config import read_document

WORKED_EXAMPLE = [
    "--set", "cost_constants.c_switch_0=100",
    "--set", "cost_constants.labor_baseline=1000",
    "--set", "cost_constants.supervision_baseline=200",
    "--c", "0.7,0.5,0.99,0.5",
]


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _frame(text):
    return pd.read_csv(io.StringIO(text))


def test_yield_output_is_exact(capsys):
    code, out, _ = _run(capsys, "yield", "--rho", "0.99")
    assert code == 0
    assert out == "rho,n,yield\n0.990000,50,0.605006\n"


def test_mebs_worked_example(capsys):
    code, out, err = _run(capsys, "mebs", *WORKED_EXAMPLE)
    assert code == 0
    row = _frame(out).iloc[0]
    assert row["mebs"] == pytest.approx(1851.0, abs=0.01)
    assert row["n_star"] == 5000.0
    assert row["regime"] == "Distributed"
    assert "MINIMUM ECONOMIC BATCH SIZE" in err


def test_mebs_uses_preset_state(capsys):
    code, out, _ = _run(capsys, "mebs", "--preset", "electronics")
    assert code == 0
    row = _frame(out).iloc[0]
    assert row["mebs"] == pytest.approx(5111.997, abs=0.01)
    assert row["regime"] == "Centralized"


def test_allocate_distributes_at_full_capability(capsys):
    code, out, err = _run(capsys, "allocate", "--c", "1,1,1,1")
    assert code == 0
    frame = _frame(out)
    assert set(frame.loc[frame["is_facility"], "region_id"]) == {"metro-west", "metro-east"}
    assert frame["volume"].sum() == pytest.approx(10000.0)
    assert "FACILITY ALLOCATION" in err


def test_allocate_exact_agrees(capsys):
    _, heuristic, _ = _run(capsys, "allocate", "--c", "0.5,0.5,0.5,0.5")
    _, exact, _ = _run(capsys, "allocate", "--c", "0.5,0.5,0.5,0.5", "--exact")
    assert heuristic == exact


def test_select_site_modes(capsys):
    argv = ["select-site", "--config", "desert-frontier", "--c", "0.98,0.9,0.99,0.9", "--feasible-only"]
    _, classic, _ = _run(capsys, *argv)
    _, mca, _ = _run(capsys, *argv, "--mode", "mca")
    assert _frame(classic)["region_id"].iloc[0] == "metro"
    assert _frame(mca)["region_id"].iloc[0] == "frontier"
    assert _frame(mca)["score"].iloc[0] == pytest.approx(2.7036, abs=1e-4)


def test_select_site_below_decoupling_excludes_frontier(capsys):
    code, out, _ = _run(capsys, "select-site", "--config", "desert-frontier", "--feasible-only", "--mode", "mca")
    assert code == 0
    assert list(_frame(out)["region_id"]) == ["metro"]


def test_mca_rank(capsys):
    code, out, _ = _run(capsys, "mca-rank", "--config", "mca-demo")
    assert code == 0
    frame = _frame(out)
    assert list(frame["region_id"]) == ["arid", "coastal"]
    assert frame["phi"].iloc[0] == pytest.approx(0.670320, abs=1e-6)


def test_sweep_and_critical(capsys):
    code, out, err = _run(capsys, "sweep", "--steps", "5")
    assert code == 0
    assert len(_frame(out)) == 5
    assert "SigmaW" in err
    code, out, _ = _run(capsys, "critical", "--detector", "SigmaW")
    assert code == 0
    assert _frame(out)["t"].iloc[0] == pytest.approx(0.72112, abs=2e-4)


def test_phase_diagram(capsys):
    code, out, _ = _run(capsys, "phase-diagram", "--rows", "3", "--cols", "3")
    assert code == 0
    assert list(_frame(out)["phase"]) == ["PhaseI"] * 5 + ["PhaseII", "PhaseI", "PhaseII", "PhaseIII"]


def test_presets(capsys):
    code, out, err = _run(capsys, "presets")
    assert code == 0
    frame = _frame(out)
    assert list(frame["name"]) == ["electronics", "aerospace", "food"]
    assert frame.loc[frame["name"] == "food", "default"].item()
    assert "INDUSTRY PRESETS" in err


def test_validate_bundled_document(capsys):
    code, out, _ = _run(capsys, "validate")
    assert code == 0
    assert out == "region_id,field,reason\n"


def test_validate_reports_issues(capsys, tmp_path):
    doc = read_document("two-metro")
    doc["world"]["regions"][0]["environment"]["humidity"] = 150
    target = tmp_path / "wet.json"
    target.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = _run(capsys, "validate", "--config", str(target))
    assert code == 2
    frame = _frame(out)
    assert list(frame["region_id"]) == ["metro-west"]
    assert list(frame["field"]) == ["humidity"]


def test_out_writes_a_file(capsys, tmp_path):
    target = tmp_path / "yield.csv"
    code, out, _ = _run(capsys, "yield", "--rho", "0.9999", "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text(encoding="utf-8") == "rho,n,yield\n0.999900,50,0.995012\n"


def test_oracle_harness(capsys):
    code, out, err = _run(capsys, "oracle", "--cases", "5", "--max-regions", "5", "--c", "1,1,1,1", "--seed", "3")
    assert code == 0
    frame = _frame(out)
    assert len(frame) == 5
    assert frame["rel_gap"].fillna(0.0).abs().max() < 1e-9
    assert "ORACLE" in err


def test_exit_codes(capsys):
    assert _run(capsys, "mebs", "--set", "cost_constants.nope=1")[0] == 2
    assert _run(capsys, "mebs", "--config", "no-such-world")[0] == 2
    assert _run(capsys, "mebs", "--set", "weights.fusion_exponents=[0,1]")[0] == 2
    assert _run(capsys, "allocate", "--set", "product.facility_fixed=1000000")[0] == 3
    assert _run(capsys, "mebs", "--c", "1.5,0,0,0")[0] == 4
    assert _run(capsys, "mebs", "--preset", "textiles")[0] == 4
    assert _run(capsys, "yield")[0] == 4
    assert _run(capsys, "teleport")[0] == 4


def test_errors_go_to_stderr(capsys):
    code, out, err = _run(capsys, "allocate", "--set", "product.facility_fixed=1000000")
    assert code == 3
    assert out == ""
    assert err.startswith("error:")


def test_presets_match_the_shipped_table(capsys):
    shipped = json.loads((Path(topophase.__file__).parent / "presets" / "industries.json").read_text(encoding="utf-8"))
    code, out, _ = _run(capsys, "presets")
    assert code == 0
    rows = _frame(out).set_index("name")
    assert list(rows.index) == [entry["name"] for entry in shipped["industries"]]
    for entry in shipped["industries"]:
        row = rows.loc[entry["name"]]
        for dim, value in entry["current"].items():
            assert row[dim] == pytest.approx(value, abs=1e-6)
        for surface in ("sigma_w", "sigma_n"):
            for key, value in entry["thresholds"][surface].items():
                assert row[f"{surface}_{key}"] == pytest.approx(value, abs=1e-6)
            assert not row[f"meets_{surface}"]
        for key, value in entry["thresholds"]["sigma_h"].items():
            assert row[key] == pytest.approx(value, abs=1e-6)
        assert row["primary_pathway"] == entry["metadata"]["primary_pathway"]


@pytest.mark.parametrize("argv", [
    ["yield", "--rho", "0.97"],
    ["mebs"],
    ["select-site", "--config", "desert-frontier", "--c", "0.98,0.9,0.99,0.9", "--mode", "mca"],
    ["mca-rank", "--config", "mca-demo"],
    ["allocate", "--c", "1,1,1,1"],
    ["sweep", "--steps", "6"],
    ["phase-diagram", "--rows", "3", "--cols", "3"],
    ["presets"],
    ["validate"],
    ["critical", "--detector", "SigmaH"],
    ["oracle", "--cases", "3", "--max-regions", "4", "--seed", "1"],
])
def test_repeated_runs_are_byte_identical(capsys, argv):
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first[0] == 0
    assert first[1] == second[1]


def test_constant_paths_sweep_cleanly(capsys):
    code, out, err = _run(capsys, "sweep", "--path", "constant:0.1,0.2,0.3,0.4", "--steps", "11")
    assert code == 0
    frame = _frame(out)
    assert set(frame["mci"]) == {1.0}
    assert "critical points: none" in err
    code, out, _ = _run(capsys, "critical", "--path", "constant:0.1,0.2,0.3,0.4", "--detector", "SigmaW")
    assert code == 0
    assert _frame(out)["t"].isna().all()
    code, _, _ = _run(capsys, "sweep", "--path", "linear:0.1,0.3,0.3,0.7->1,0.3,1,1", "--steps", "11")
    assert code == 0


def test_sweep_writes_critical_points(capsys, tmp_path):
    target = tmp_path / "critical.csv"
    code, out, err = _run(capsys, "sweep", "--steps", "11", "--critical-out", str(target))
    assert code == 0
    assert "path: linear:0,0,0,0->1,1,1,1" in err
    critical = _frame(target.read_text(encoding="utf-8"))
    assert list(critical.columns) == ["t", "kind", "magnitude"]
    assert set(critical["kind"]) == {"MciJump", "SigmaW", "SigmaN", "SigmaH"}


def test_sigma_h_follows_the_preset(capsys):
    found = {}
    for name in ("electronics", "aerospace", "food"):
        code, out, _ = _run(capsys, "critical", "--detector", "SigmaH", "--preset", name)
        assert code == 0
        found[name] = _frame(out)["t"].iloc[0]
    assert len(set(round(t, 4) for t in found.values())) == 3
    assert found["aerospace"] > found["electronics"] > found["food"]
