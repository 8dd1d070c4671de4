"""Command-line interface: configs, CSV contract, exit codes, plotting."""
import csv
import json
import re

import pytest

from chancrit.cli import (
    CSV_COLUMNS,
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    axis_vector,
    load_config,
    main,
)

import numpy as np


def write_cfg(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(json.dumps(body))
    return str(path)


def tiny_entropy_cfg(tmp_path, **overrides):
    body = {
        "scenario": "tiny",
        "model": {"L": 8, "periodic": True},
        "channel": {"kind": "dephasing", "p": 1.0, "axis": {"theta_tilde": 0.0}},
        "renyi_n": [2],
        "regions": {"type": "whole"},
        "chi_max": 8,
        "seed": 0,
    }
    body.update(overrides)
    return write_cfg(tmp_path, "tiny.json", body)


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_axis_vector_forms():
    assert np.allclose(axis_vector([0, 0, 1]), [0, 0, 1])
    assert np.allclose(axis_vector({"theta_tilde": 0.0}), [0, 0, 1])
    assert np.allclose(axis_vector({"theta_tilde": 1.0}), [1, 0, 0], atol=1e-15)
    v = axis_vector({"plane": "yz", "theta": np.pi / 8})
    assert np.allclose(v, [0.0, np.sin(np.pi / 8), np.cos(np.pi / 8)])


def test_unknown_keys_rejected(tmp_path):
    cfg = tiny_entropy_cfg(tmp_path, extra_knob=3)
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_nested_unknown_keys_rejected(tmp_path):
    path = tiny_entropy_cfg(tmp_path)
    body = json.loads(open(path).read())
    body["channel"]["strength"] = 0.5
    cfg = write_cfg(tmp_path, "bad.json", body)
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_malformed_json_is_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_config_error_exit_code(tmp_path):
    cfg = tiny_entropy_cfg(tmp_path, extra_knob=3)
    rc = main(["entropy", "--config", cfg, "--cache-dir", str(tmp_path / "c")])
    assert rc == EXIT_CONFIG


def test_entropy_run_writes_contract_csv(tmp_path):
    cfg = tiny_entropy_cfg(tmp_path)
    out = str(tmp_path / "out.csv")
    rc = main(["entropy", "--config", cfg, "--out", out,
               "--cache-dir", str(tmp_path / "c")])
    assert rc == EXIT_OK
    rows = read_rows(out)
    assert rows
    assert list(rows[0].keys()) == CSV_COLUMNS
    srow = [r for r in rows if r["quantity"] == "S"]
    assert srow and float(srow[0]["value"]) > 0.0


def test_identical_config_and_seed_reproduce_bytes(tmp_path):
    cfg = tiny_entropy_cfg(tmp_path)
    outs = []
    for name in ("a.csv", "b.csv"):
        out = str(tmp_path / name)
        rc = main(["entropy", "--config", cfg, "--out", out,
                   "--cache-dir", str(tmp_path / "c")])
        assert rc == EXIT_OK
        text = open(out).read()
        # wall_time is the only column allowed to differ
        outs.append(re.sub(r"[^,]*\n", "X\n", text))
    assert outs[0] == outs[1]


def test_threaded_run_matches_serial(tmp_path):
    cfg = tiny_entropy_cfg(
        tmp_path,
        model={"L_list": [6, 8], "periodic": True},
        regions={"type": "prefix", "sizes": [2, 3]},
    )
    texts = []
    for name, threads in (("s.csv", "1"), ("t.csv", "3")):
        out = str(tmp_path / name)
        rc = main(["entropy", "--config", cfg, "--out", out,
                   "--cache-dir", str(tmp_path / "c"), "--threads", threads])
        assert rc == EXIT_OK
        texts.append(re.sub(r"[^,]*\n", "X\n", open(out).read()))
    assert texts[0] == texts[1]


def test_budget_refusal_exit_code(tmp_path):
    cfg = tiny_entropy_cfg(tmp_path, flop_budget=10.0)
    out = str(tmp_path / "out.csv")
    rc = main(["entropy", "--config", cfg, "--out", out,
               "--cache-dir", str(tmp_path / "c")])
    assert rc == EXIT_BUDGET
    rows = read_rows(out)
    assert rows
    # refused jobs still get a row, with an empty value field
    assert all(r["value"] == "" for r in rows if r["quantity"] == "S")


def test_fermion_runner(tmp_path):
    cfg = write_cfg(tmp_path, "fermion.json", {
        "scenario": "fermion-tiny",
        "model": {"L": 32, "periodic": True},
        "channel": {"kind": "amplitude_damping", "p_list": [0.5]},
        "renyi_n": [2, "von_neumann"],
        "regions": {"type": "whole"},
        "delta_l": 4,
        "seed": 0,
    })
    out = str(tmp_path / "f.csv")
    rc = main(["fermion", "--config", cfg, "--out", out,
               "--cache-dir", str(tmp_path / "c")])
    assert rc == EXIT_OK
    rows = read_rows(out)
    quantities = {r["quantity"] for r in rows}
    assert "S" in quantities


def test_plot_writes_svg(tmp_path):
    cfg = tiny_entropy_cfg(
        tmp_path, model={"L_list": [6, 8, 10], "periodic": True})
    out = str(tmp_path / "out.csv")
    assert main(["entropy", "--config", cfg, "--out", out,
                 "--cache-dir", str(tmp_path / "c")]) == EXIT_OK
    svg = str(tmp_path / "plot.svg")
    rc = main(["plot", "--in", out, "--out", svg, "--x", "L", "--y", "value",
               "--quantity", "S"])
    assert rc == EXIT_OK
    head = open(svg).read(512)
    assert "<svg" in head


def test_plot_missing_input_is_config_error(tmp_path):
    rc = main(["plot", "--in", str(tmp_path / "none.csv"),
               "--out", str(tmp_path / "p.svg")])
    assert rc == EXIT_CONFIG


def test_oracle_check_passes():
    assert main(["oracle-check"]) == EXIT_OK
