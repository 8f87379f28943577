import csv
import json
import os

import pytest

from pupcm.cli import main
from pupcm.config import config_from_dict, reference_building_document
from pupcm.errors import ConfigError

SMALL = {"rve": {"target_volume_fraction": 0.1, "rng_seed": 2},
         "solver": {"n_per_axis": 12}, "ensemble": {"seeds": [1, 2]}}


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture
def out(tmp_path):
    d = tmp_path / "out"
    d.mkdir()
    return d


def run(tmp_path, out, command, doc, *extra):
    return main([command, "--config", write_config(tmp_path, doc), "--out", str(out),
                 "--workers", "1", *extra])


def test_rve_gen_writes_geometry(tmp_path, out):
    assert run(tmp_path, out, "rve-gen", SMALL) == 0
    spheres = json.loads((out / "spheres.json").read_text())
    assert len(spheres["centers"]) == 24
    header = json.loads((out / "voxels.bin").read_bytes().split(b"\n", 1)[0])
    assert header["n_per_axis"] == 12 and header["payload_bytes"] == 12**3


def test_infeasible_packing_exit_3(tmp_path, out, capsys):
    doc = {"rve": {"sphere_radius": 25, "target_volume_fraction": 0.5}}
    assert run(tmp_path, out, "rve-gen", doc) == 3
    assert "target_volume_fraction" in capsys.readouterr().err
    assert os.listdir(out) == []


def test_missing_output_dir_exit_2(tmp_path):
    assert main(["rve-gen", "--out", str(tmp_path / "nope")]) == 2


@pytest.mark.parametrize("doc", [
    {"solver": {"bc": "robin"}},
    {"solver": {"n_per_axis": 1}},
    {"rve": {"edge_length": -5}},
    {"materials": {"matrix_conductivity": 0}},
    {"macro": {"weighting": "mass"}},
    {"weather": {"source": "file", "path": "missing.csv"}},
    {"weather": {"sead": 3}},
    {"building": {"dt": 7}},
    {"building": {"model": "nope.json"}},
    {"ensemble": {"seeds": []}},
])
def test_validation_errors_exit_2_without_artifacts(tmp_path, out, doc):
    assert run(tmp_path, out, "homogenize", doc) == 2
    assert os.listdir(out) == []


def test_malformed_config_file_exit_2(tmp_path, out):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["mix", "--config", str(p), "--out", str(out)]) == 2


def test_solve_writes_field_and_diagnostics(tmp_path, out):
    assert run(tmp_path, out, "solve", dict(SMALL, solver={"n_per_axis": 12, "axis": "y"})) == 0
    diag = json.loads((out / "solve_y.json").read_text())
    assert diag["mean_flux"][1] == pytest.approx(1.0, rel=1e-6)
    assert diag["residual"] <= 1e-8
    assert (out / "field_y.bin").exists()


def test_nonconvergence_exit_4(tmp_path, out):
    doc = dict(SMALL, solver={"n_per_axis": 12, "tol": 1e-300})
    assert run(tmp_path, out, "solve", doc) == 4


def test_uniform_material_homogenize(tmp_path, out, capsys):
    doc = dict(SMALL, materials={"inclusion_conductivity": 0.036,
                                 "interface_conductance": None})
    assert run(tmp_path, out, "homogenize", doc) == 0
    rep = json.loads((out / "ensemble.json").read_text())
    for row in rep["per_seed"]:
        for c in ("kxx", "kyy", "kzz"):
            assert row[c] == pytest.approx(0.036, rel=1e-6)
    assert "bounds" in capsys.readouterr().out


def test_reference_homogenize_within_bounds(tmp_path, out, capsys):
    doc = {"solver": {"n_per_axis": 16}, "ensemble": {"seeds": [1]}}
    assert run(tmp_path, out, "homogenize", doc) == 0
    text = capsys.readouterr().out
    assert "ok" in text and "VIOLATED" not in text
    rows = list(csv.DictReader((out / "ensemble.csv").open()))
    assert 0.0443 <= float(rows[0]["kxx"]) <= 0.1408


def test_repeated_seed_rows_identical(tmp_path, out):
    assert run(tmp_path, out, "homogenize", dict(SMALL, ensemble={"seeds": [1, 1]})) == 0
    rows = json.loads((out / "ensemble.json").read_text())["per_seed"]
    assert rows[0] == rows[1]


def test_mix_after_homogenize(tmp_path, out):
    assert run(tmp_path, out, "homogenize", SMALL) == 0
    assert run(tmp_path, out, "mix", SMALL) == 0
    doc = json.loads((out / "k_macro.json").read_text())
    rep = json.loads((out / "ensemble.json").read_text())
    assert doc["weighting"] == "uniform"
    assert doc["k_macro"]["kxx"] == pytest.approx(rep["mean"]["kxx"], rel=1e-12)


def test_mix_without_report_exit_2(tmp_path, out):
    assert run(tmp_path, out, "mix", SMALL) == 2


def test_k_macro_feeds_building_layer(tmp_path, out):
    (out / "k_macro.json").write_text(json.dumps(
        {"k_macro": {"kxx": 0.05, "kyy": 0.06, "kzz": 0.07}, "weighting": "uniform"}))
    cfg = config_from_dict({"building": {"k_macro": str(out / "k_macro.json")}})
    assert cfg.pcm_layer.conductivity == pytest.approx(0.06)


def test_weather_synth_and_file_roundtrip(tmp_path, out):
    assert run(tmp_path, out, "weather-synth", {"weather": {"seed": 3}}) == 0
    rows = (out / "weather.csv").read_text().splitlines()
    assert rows[0] == "hour,temp_c" and len(rows) == 8761
    doc = {"weather": {"source": "file", "path": str(out / "weather.csv")}}
    assert run(tmp_path, out, "building-run", doc) == 0


def test_short_weather_exit_5(tmp_path, out):
    p = tmp_path / "short.csv"
    p.write_text("hour,temp_c\n" + "".join(f"{h},0.0\n" for h in range(8759)))
    doc = {"weather": {"source": "file", "path": str(p)}}
    assert run(tmp_path, out, "building-run", doc) == 5


def test_diverging_simulation_exit_6(tmp_path, out):
    b = reference_building_document()
    for z in b["zones"]:
        z["capacitance"] = 1.0
        z["heating"]["kp"] = 1e9
        z["heating"]["max_power"] = 1e12
    model = tmp_path / "unstable.json"
    model.write_text(json.dumps(b))
    doc = {"building": {"model": str(model), "dt": 3600}}
    assert run(tmp_path, out, "building-run", doc) == 6


def test_building_run_outputs(tmp_path, out):
    assert run(tmp_path, out, "building-run", {"building": {"include_pcm": True}}) == 0
    ledger = json.loads((out / "ledger.json").read_text())
    assert ledger["kwh"]["grand_total"] > ledger["kwh"]["total"]
    comfort = json.loads((out / "comfort.json").read_text())
    assert sum(comfort[b] for b in ("optimal", "good", "acceptable", "unacceptable")) == 8760
    header = (out / "trace.csv").open().readline().strip()
    assert header == "hour,zone,temp_c,heat_w,outdoor_c"
    assert [r.split(",")[0] for r in (out / "ledger.csv").read_text().splitlines()][:2] == [
        "category", "lighting_facility"]


def test_building_compare_direction(tmp_path, out):
    assert run(tmp_path, out, "building-compare", {}) == 0
    d = json.loads((out / "compare.json").read_text())["delta"]
    assert d["fuel_heating_kwh"] < 0 and d["comfort_hours"]["optimal"] > 0
    for name in ("ledger_base.json", "ledger_pcm.json", "trace_base.csv", "trace_pcm.csv",
                 "comfort_base.json", "comfort_pcm.json"):
        assert (out / name).exists()


def test_no_pcm_walls_gives_zero_delta(tmp_path, out):
    assert run(tmp_path, out, "building-compare", {"building": {"pcm_walls": []}}) == 0
    d = json.loads((out / "compare.json").read_text())["delta"]
    assert d["fuel_heating_kwh"] == 0.0 and d["fuel_heating_pct"] == 0.0
    assert set(d["comfort_hours"].values()) == {0}


def test_seed_override_changes_seeds(tmp_path):
    cfg = config_from_dict(SMALL, seed_override=9)
    assert cfg.seeds == [9] and cfg.rve.rng_seed == 9 and cfg.weather["seed"] == 9


def test_include_pcm_without_layer_rejected(tmp_path):
    doc = reference_building_document()
    doc.pop("pcm_layer")
    model = tmp_path / "plain.json"
    model.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        config_from_dict({"building": {"model": str(model), "include_pcm": True}})


COMMANDS = [
    ("rve-gen", SMALL, ["spheres.json", "voxels.bin"]),
    ("solve", SMALL, ["field_x.bin", "solve_x.json"]),
    ("homogenize", SMALL, ["ensemble.json", "ensemble.csv"]),
    ("weather-synth", {}, ["weather.csv"]),
    ("building-compare", {}, ["compare.json", "ledger_pcm.csv", "trace_base.csv"]),
]


@pytest.mark.parametrize("command, doc, files", COMMANDS)
def test_outputs_are_byte_identical_across_runs(tmp_path, command, doc, files):
    dirs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        d.mkdir()
        assert run(tmp_path, d, command, doc) == 0
        dirs.append(d)
    for f in files:
        assert (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes(), f
