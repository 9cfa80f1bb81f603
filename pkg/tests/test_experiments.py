"""Experiment configs, presets, CSV output, and the command line."""

import json

import pytest

from cantorlab import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    PRESET_NAMES,
    UnknownPreset,
    preset,
    rows_to_csv,
    run_experiment,
)
from cantorlab.cli import main


def _minimal_config(**over) -> dict:
    d = {
        "name": "tiny",
        "base": {"kind": "constant", "q": 2},
        "map": {"family": "geometric", "beta": 0.5, "g": [0.0, 1.0]},
        "reference": {"kind": "uniform", "lo": 0.0, "hi": 2.0},
        "ns": [16, 64],
        "regime": "B",
        "rho_inf": 1.0,
    }
    d.update(over)
    return d


# -- config validation and serialization ---------------------------------------


def test_config_json_round_trip_is_bit_exact():
    cfg = ExperimentConfig.from_dict(_minimal_config())
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg
    assert json.loads(cfg.to_json()) == json.loads(again.to_json())


def test_all_presets_validate_and_round_trip():
    for name in PRESET_NAMES:
        cfg = preset(name)
        assert cfg.name == name
        assert ExperimentConfig.from_json(cfg.to_json()) == cfg
        assert len(cfg.heights()) >= 3
    with pytest.raises(UnknownPreset):
        preset("no-such-preset")


def test_heights_ladder_and_ns():
    cfg = ExperimentConfig.from_dict(_minimal_config())
    assert cfg.heights() == [16, 64]
    lad = ExperimentConfig.from_dict(_minimal_config(
        ns=None, ladder={"start": 16, "stop": 256, "factor": 4}))
    assert lad.heights() == [16, 64, 256]


@pytest.mark.parametrize("mutate, path_hint", [
    ({"surprise": 1}, "surprise"),
    ({"name": ""}, "name"),
    ({"ns": None}, "ns"),                                    # neither ns nor ladder
    ({"ns": [16], "ladder": {"start": 2, "stop": 4, "factor": 2}}, "ladder"),
    ({"regime": "Z"}, "regime"),
    ({"ns": [0]}, "ns"),
    ({"seed": -1}, "seed"),
    ({"base": {"kind": "constant", "q": 1}}, "base"),
    ({"map": {"family": "nope"}}, "map"),
    ({"reference": {"kind": "gaussian"}}, "reference"),
    ({"reference": {"kind": "grid"}}, "grid"),               # grid ref needs a grid
    ({"reference": {"kind": "grid"},
      "grid": {"x0": 1.0, "x1": 0.0, "w": 0.1}}, "grid"),
    ({"reference": {"kind": "grid"},
      "grid": {"x0": 0.0, "x1": 1.0, "w": 0.1, "depth": 0}}, "depth"),
    ({"rate_family": {"family": "example-I", "alpha": 1.0}}, "alpha"),
    ({"rate_family": {"family": "example-II", "beta": 1.0}}, "beta"),
])
def test_config_rejections(mutate, path_hint):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_dict(_minimal_config(**mutate))
    assert path_hint in str(exc.value)


# -- rows and CSV -----------------------------------------------------------------


def test_zero_map_rows_are_exact():
    cfg = preset("zero-map")
    rows = run_experiment(cfg)
    assert [r["N"] for r in rows] == cfg.heights()
    for r in rows:
        assert r["regime"] == "B"
        assert r["dk_lo"] == 0.0 and r["dk_hi"] == 0.0
        assert r["w1"] == 0.0
        assert r["dstar"] is None                 # not a radical-inverse map
        assert r["total"] > 0.0                   # the bridge never vanishes
        assert not r["conditional"]


def test_rows_to_csv_schema_and_float_round_trip():
    cfg = preset("zero-map")
    rows = run_experiment(cfg)
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(rows)
    first = lines[1].split(",")
    assert len(first) == len(CSV_COLUMNS)
    assert int(first[0]) == rows[0]["N"]
    # repr-formatted floats parse back bit-identically
    col = CSV_COLUMNS.index("total")
    assert float(first[col]) == rows[0]["total"]
    assert first[CSV_COLUMNS.index("dstar")] == ""


def test_run_experiment_writes_outputs(tmp_path):
    out = tmp_path / "rows.csv"
    trace = tmp_path / "cf.csv"
    d = _minimal_config(out=str(out), trace_out=str(trace))
    rows = run_experiment(ExperimentConfig.from_dict(d))
    got = out.read_text().strip().split("\n")
    assert got[0] == ",".join(CSV_COLUMNS)
    assert len(got) == 1 + len(rows)
    tr = trace.read_text().strip().split("\n")
    assert tr[0] == "t,re_phi,im_phi,abs_phi,truncation_bound,depth"
    assert len(tr) == 1 + 201
    t0, re0, im0, a0, err0, depth0 = tr[1 + 100].split(",")   # t = 0 midpoint
    assert float(t0) == 0.0
    assert float(re0) == 1.0 and float(im0) == 0.0            # phi(0) = 1
    assert float(err0) <= 1e-12
    assert int(depth0) >= 1


def test_run_experiment_threads_preserve_rows():
    cfg = preset("vdc-q2")
    seq = run_experiment(cfg, threads=1)
    par = run_experiment(cfg, threads=4)
    assert seq == par


def test_vdc_q2_rows_reproduce_known_discrepancy():
    rows = run_experiment(preset("vdc-q2"))
    for r in rows:
        assert r["dstar"] == 2.0 ** -(r["N"].bit_length() - 1) \
            or r["N"] & (r["N"] - 1)              # exact at powers of two
        assert r["dk_lo"] == r["dk_hi"] == r["dstar"]


# -- command line ------------------------------------------------------------------


def test_cli_preset_list(capsys):
    assert main(["preset-list"]) == 0
    out = capsys.readouterr().out
    for name in PRESET_NAMES:
        assert name in out


def test_cli_expand_round_trip(capsys):
    assert main(["expand", "100", "--base",
                 '{"kind": "periodic", "pattern": [2, 3]}']) == 0
    assert "[0, 2, 0, 2, 0, 1]" in capsys.readouterr().out


def test_cli_eval_and_stats(capsys, tmp_path):
    assert main(["eval", "7", "--map",
                 '{"family": "geometric", "beta": 0.5, "g": [0.0, 1.0]}']) == 0
    assert "f(7) = 1.75" in capsys.readouterr().out
    out = tmp_path / "stats.csv"
    assert main(["stats", "--levels", "4", "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "j,m,s2,omega,mu3"
    assert len(lines) == 5
    assert float(lines[1].split(",")[1]) == 0.25     # vdc level-0 mean


def test_cli_empirical_star_discrepancy(capsys):
    assert main(["empirical", "--n", "1024", "--smoothing-rho", "1.0"]) == 0
    out = capsys.readouterr().out
    assert "D*_n = 0.0009765625" in out              # exact 2^-10
    assert "ok" in out


def test_cli_bound_and_optimize_json(capsys):
    assert main(["bound", "--n", "4096", "--window", "4", "--regime", "B",
                 "--rho-inf", "1.0"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["regime"] == "B" and rep["h"] == 4
    assert main(["optimize", "--n", "4096", "--regime", "B",
                 "--rho-inf", "1.0"]) == 0
    rep2 = json.loads(capsys.readouterr().out)
    assert rep2["total"] <= rep["total"]


def test_cli_exit_codes(tmp_path, capsys):
    # unparseable JSON descriptor
    assert main(["eval", "3", "--map", "{nope"]) == 2
    # resource cap: conv lattice far beyond the knot budget
    assert main(["limit", "--x0", "0", "--x1", "1", "--w", "1e-12",
                 "--depth", "5"]) == 3
    # config file with an unknown field
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(_minimal_config(surprise=1)))
    assert main(["experiment", "--config", str(bad)]) == 2
    # bad reference spec
    assert main(["empirical", "--n", "64", "--ref", "gaussian:0:1"]) == 2
    capsys.readouterr()


def test_cli_experiment_conditional_exit(tmp_path, capsys):
    # a bare table has no certified tail: every row is conditional -> 4
    cfg = _minimal_config(
        map={"family": "custom-table", "values": [[0.0, 1.0]] * 8},
        reference={"kind": "uniform", "lo": 0.0, "hi": 8.0},
        regime="A", rho_inf=None, ns=[16, 64])
    path = tmp_path / "cond.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "cond.csv"
    assert main(["experiment", "--config", str(path), "--out", str(out)]) == 4
    capsys.readouterr()


def test_cli_experiment_preset_to_file(tmp_path, capsys):
    out = tmp_path / "zero.csv"
    assert main(["experiment", "--preset", "zero-map", "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) > 3
    capsys.readouterr()
