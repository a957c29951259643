"""Tests for the JSON config front end and the byte-stable CSV emitter."""

import json
import math

import numpy as np
import pytest

import relaysim
from relaysim.cli import (
    _CSV_FIELDS,
    _fmt,
    emit_results,
    entry,
    parse_config,
    run_id_for,
    spec_to_dict,
    to_network_config,
)
from relaysim.errors import ConfigError


def _write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# ------------------------------------------------------------ parse_config


def test_parse_config_defaults():
    spec = parse_config({})
    assert spec.relays == 3
    assert spec.antennas == 2
    assert spec.snr_db == 10.0
    assert spec.var_sr_db == 0.0 and spec.var_rd_db == 0.0
    assert spec.var_rr_db == 0.0
    assert math.isinf(spec.buffer_size)
    assert spec.schemes == ("mmse",)
    assert spec.axis == "snr"
    assert spec.points == (10.0,)  # defaults to the configured snr
    assert spec.slots == 10000
    assert spec.pretraining_slots == 5000
    assert spec.repetitions == 3
    assert spec.alpha_mode == "subgradient"
    assert spec.seed == 0
    assert spec.out == "results"


def test_parse_config_reads_files(tmp_path):
    path = _write_config(tmp_path, {"relays": 2, "scheme": "zf"})
    spec = parse_config(path)
    assert spec.relays == 2
    assert spec.schemes == ("zf",)


def test_parse_config_per_link_variance_vectors():
    spec = parse_config({
        "relays": 3,
        "var_sr_db": [0.0, -3.0, -6.0],
        "var_rd_db": [-6.0, -3.0, 0.0],
        "var_rr_db": [[0.0, -10.0, -20.0],
                      [-10.0, 0.0, -10.0],
                      [-20.0, -10.0, 0.0]],
    })
    assert spec.var_sr_db == (0.0, -3.0, -6.0)
    assert spec.var_rd_db == (-6.0, -3.0, 0.0)
    assert spec.var_rr_db[0] == (0.0, -10.0, -20.0)
    net = to_network_config(spec)
    np.testing.assert_allclose(net.var_sr, [1.0, 10.0 ** -0.3, 10.0 ** -0.6])
    np.testing.assert_allclose(net.var_rr[0, 1], 0.1)
    assert np.all(np.diag(net.var_rr) == 0.0)  # self-interference never drawn


def test_parse_config_round_trips_exactly():
    payloads = [
        {},
        {"buffer_size": "inf", "schemes": ["ideal", "hd_brs"], "seed": 9},
        {"relays": 2, "var_sr_db": [1.0, 2.0], "axis": "buffer_size",
         "points": [10.0, "inf"]},
        {"var_rr_db": [[0.0, -10.0], [-5.0, 0.0]], "relays": 2},
    ]
    for payload in payloads:
        spec = parse_config(payload)
        again = parse_config(spec_to_dict(spec))
        assert again == spec


def test_parse_config_rejects_unknown_key_by_name():
    with pytest.raises(ConfigError, match="warp"):
        parse_config({"warp": 9})


def test_parse_config_scheme_and_schemes_are_exclusive():
    with pytest.raises(ConfigError, match="exclusive"):
        parse_config({"scheme": "zf", "schemes": ["zf"]})


def test_parse_config_value_validation():
    bad = [
        {"relays": 1},
        {"antennas": 0},
        {"relays": 2.5},
        {"snr_db": True},
        {"snr_db": "loud"},
        {"buffer_size": 0},
        {"buffer_size": -3},
        {"schemes": []},
        {"schemes": ["warp"]},
        {"scheme": 7},
        {"axis": "voltage"},
        {"points": []},
        {"points": ["x"]},
        {"axis": "antennas", "points": [2.5]},
        {"axis": "relays", "points": [1]},
        {"slots": 0},
        {"slots": 10.5},
        {"pretraining_slots": -1},
        {"repetitions": 0},
        {"alpha_mode": "momentum"},
        {"seed": 1.5},
        {"out": ""},
        {"var_sr_db": [0.0]},
        {"var_rd_db": [0.0, 0.0]},
        {"var_rr_db": [[0.0, 0.0]]},
        {"var_rr_db": [[0.0], [0.0]]},
    ]
    for payload in bad:
        with pytest.raises(ConfigError):
            parse_config(payload)


def test_parse_config_axis_defaults_track_base_values():
    spec = parse_config({"axis": "antennas", "antennas": 4})
    assert spec.points == (4.0,)
    spec = parse_config({"axis": "buffer_size", "buffer_size": 12.5})
    assert spec.points == (12.5,)
    spec = parse_config({"axis": "iri_variance", "var_rr_db": -7.0})
    assert spec.points == (-7.0,)
    with pytest.raises(ConfigError, match="points"):
        parse_config({"axis": "iri_variance", "relays": 2,
                      "var_rr_db": [[0.0, 1.0], [1.0, 0.0]]})


def test_parse_config_infinite_buffer_spellings():
    for spelling in ("inf", "Infinity", "INF"):
        assert math.isinf(parse_config({"buffer_size": spelling}).buffer_size)


def test_parse_config_bad_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "missing.json")
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="valid JSON"):
        parse_config(path)
    path2 = tmp_path / "list.json"
    path2.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        parse_config(path2)


# ----------------------------------------------------- run ids and formats


def test_run_id_is_stable_and_ignores_output_dir():
    a = parse_config({"seed": 4, "out": "here"})
    b = parse_config({"seed": 4, "out": "there"})
    c = parse_config({"seed": 5, "out": "here"})
    assert run_id_for(a) == run_id_for(b)
    assert run_id_for(a) != run_id_for(c)
    assert len(run_id_for(a)) == 12
    assert run_id_for(a) == run_id_for(a)


def test_float_formatting_is_nine_significant_digits():
    assert _fmt(0.12345678912345) == "0.123456789"
    assert _fmt(2.0) == "2"
    assert _fmt(np.float64(1e-7)) == "1e-07"
    assert _fmt(float("nan")) == "nan"
    assert _fmt(True) == "1"
    assert _fmt(False) == "0"
    assert _fmt(np.int64(17)) == "17"
    assert _fmt("zf") == "zf"


def test_csv_header_layout():
    headers = [h for h, _ in _CSV_FIELDS]
    assert headers[:7] == ["run_id", "scheme", "axis", "point", "rep", "seed",
                           "slots"]
    assert "avg_rate_D" in headers and "avg_rate_D_stderr" in headers
    assert "delay_defined" in headers
    assert len(headers) == 21


# ------------------------------------------------------------- end to end


_E2E_CONFIG = {
    "relays": 2,
    "antennas": 2,
    "schemes": ["mmse", "hd_brs"],
    "axis": "snr",
    "points": [0.0, 10.0],
    "slots": 40,
    "pretraining_slots": 10,
    "repetitions": 2,
    "seed": 3,
}


def test_cli_run_writes_byte_identical_outputs(tmp_path):
    cfg = _write_config(tmp_path, _E2E_CONFIG)
    outs = [tmp_path / f"out{n}" for n in range(3)]
    assert entry(["run", "--config", str(cfg), "--out", str(outs[0])]) == 0
    assert entry(["run", "--config", str(cfg), "--out", str(outs[1])]) == 0
    assert entry(["run", "--config", str(cfg), "--out", str(outs[2]),
                  "--threads", "4"]) == 0
    blobs = [(d / "results.csv").read_bytes() for d in outs]
    assert blobs[0] == blobs[1] == blobs[2]
    text = blobs[0].decode()
    assert "\r" not in text
    lines = text.strip().split("\n")
    assert len(lines) == 1 + 2 * 2 * 2  # header + schemes x points x reps
    assert lines[0].split(",") == [h for h, _ in _CSV_FIELDS]
    # rerunning into the same directory reproduces the manifest bytes too
    manifest_before = (outs[0] / "run-manifest.json").read_bytes()
    assert entry(["run", "--config", str(cfg), "--out", str(outs[0])]) == 0
    assert (outs[0] / "run-manifest.json").read_bytes() == manifest_before


def test_cli_run_manifest_contents(tmp_path):
    cfg = _write_config(tmp_path, _E2E_CONFIG)
    out = tmp_path / "res"
    assert entry(["run", "--config", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "run-manifest.json").read_text())
    spec = parse_config(dict(_E2E_CONFIG, out=str(out)))
    assert manifest["run_id"] == run_id_for(spec)
    assert manifest["version"] == relaysim.__version__
    assert manifest["root_seed"] == 3
    assert manifest["rows"] == 8
    assert manifest["config"]["schemes"] == ["mmse", "hd_brs"]
    assert not any("time" in key.lower() for key in manifest)
    csv_rows = (out / "results.csv").read_text().strip().split("\n")[1:]
    assert all(row.startswith(manifest["run_id"] + ",") for row in csv_rows)


def test_cli_seed_override_changes_run_id(tmp_path):
    cfg = _write_config(tmp_path, _E2E_CONFIG)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert entry(["run", "--config", str(cfg), "--out", str(out_a)]) == 0
    assert entry(["run", "--config", str(cfg), "--out", str(out_b),
                  "--seed", "99"]) == 0
    id_a = (out_a / "results.csv").read_text().split(",", 1)[0]
    manifest_b = json.loads((out_b / "run-manifest.json").read_text())
    assert manifest_b["config"]["seed"] == 99
    assert manifest_b["run_id"] != id_a


def test_cli_benchmark_alpha_cells_are_nan(tmp_path):
    cfg = _write_config(tmp_path, _E2E_CONFIG)
    out = tmp_path / "nan"
    assert entry(["run", "--config", str(cfg), "--out", str(out)]) == 0
    header, *rows = (out / "results.csv").read_text().strip().split("\n")
    cols = header.split(",")
    for row in rows:
        cells = dict(zip(cols, row.split(",")))
        if cells["scheme"] == "hd_brs":
            assert cells["alpha_mean"] == "nan"
            assert cells["delay_defined"] == "0"
        else:
            assert cells["alpha_mean"] != "nan"
            assert cells["delay_defined"] == "1"


def test_cli_exit_codes(tmp_path, capsys):
    bad_cfg = _write_config(tmp_path, {"warp": 1}, name="bad.json")
    assert entry(["run", "--config", str(bad_cfg)]) == 2
    assert "warp" in capsys.readouterr().err
    assert entry(["run", "--config", str(tmp_path / "nope.json")]) == 2
    # runtime (non-config) failure: output directory cannot be created
    blocker = tmp_path / "file"
    blocker.write_text("x")
    ok_cfg = _write_config(tmp_path, dict(_E2E_CONFIG, slots=5,
                                          pretraining_slots=2,
                                          repetitions=1, points=[0.0]))
    assert entry(["run", "--config", str(ok_cfg),
                  "--out", str(blocker / "sub")]) == 1


def test_cli_schemes_listing(capsys):
    assert entry(["schemes"]) == 0
    out = capsys.readouterr().out
    for name in ("ideal", "sinr", "zf", "mmse", "ob", "optimal", "hd_brs",
                 "hd_mmrs", "hd_mlrs", "sfd_mmrs", "sfd_mmrs_iri"):
        assert name in out
