"""End-to-end tests of the command-line entry point.

Each command is run in-process through ``main`` with a small
configuration so the whole suite stays fast.  The tests check the
exit code, the presence of the CSV/JSON artifacts, the recorded
gates, and byte-level determinism of repeated runs.
"""

import json
import os

import numpy as np
import pytest

from eshelby.cli import main

# Small but non-trivial configs.  Refinement 4 keeps the tessellation
# error well inside the default gates while staying cheap.
HELM_CFG = {
    "refinements": [2, 4],
    "samples": 9,
}

SPHERE_CFG = {
    "refinements": [2, 4],
    "samples": 9,
    "sweep_refinement": 4,
    "sweep_samples": 9,
    "gate": 5.0,
}

CUBOID_CFG = {
    "grid_n": 64,
    "diff_lattice": 3,
}

EIM_PROBLEM = {
    "matrix": {"K": 1.0, "Cp": 10.0},
    "inhomogeneity": {"K": 10.0, "Cp": 12.0},
    "sphere": {"center": [0.5, 0.5, 1.3], "radius": 0.1},
    "slab": {"thickness": 2.0,
             "top_bc": {"type": "sine", "amplitude": 10.0, "period": 20.0},
             "bottom_bc": 0.0},
    "time": {"dt": 0.05, "steps": 12},
    "order": "uniform",
}

EIM_CFG = {
    "problem": EIM_PROBLEM,
    "orders": ["uniform"],
    "times": [0.25, 0.5],
    "line_samples": 5,
    "steady_anchor": False,
}


def _write_cfg(tmp_path, cfg):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def _run(tmp_path, command, cfg, sub="out"):
    out = tmp_path / sub
    rc = main([command, "--config", _write_cfg(tmp_path, cfg),
               "--out", str(out)])
    return rc, out


def _read_meta(out, name):
    with open(out / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_verify_helmholtz_smoke(tmp_path, capsys):
    rc, out = _run(tmp_path, "verify-helmholtz", HELM_CFG)
    assert rc == 0
    assert (out / "helmholtz.csv").is_file()
    meta = _read_meta(out, "helmholtz.json")
    assert all(meta["gates"].values())
    assert meta["max_rel_errors"]["4"] <= meta["max_rel_errors"]["2"]
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["ok"] is True
    assert summary["command"] == "verify-helmholtz"


def test_verify_sphere_smoke(tmp_path):
    rc, out = _run(tmp_path, "verify-sphere", SPHERE_CFG)
    assert rc == 0
    assert (out / "sphere_t2.csv").is_file()
    assert (out / "sphere_t5.csv").is_file()
    assert (out / "sphere_nmax_sweep.csv").is_file()
    meta = _read_meta(out, "sphere.json")
    assert all(meta["gates"].values())
    sweep = meta["nmax_sweep_max_rel_errors"]
    assert sweep["10"] <= sweep["2"]


def test_cuboid_maps_smoke(tmp_path):
    rc, out = _run(tmp_path, "cuboid-maps", CUBOID_CFG)
    assert rc == 0
    for name in ("cuboid_map_spatial.csv", "cuboid_map_time.csv",
                 "cuboid_diff.csv"):
        assert (out / name).is_file()
    meta = _read_meta(out, "cuboid.json")
    assert all(meta["gates"].values())
    assert meta["jump"]["rel_err"] <= 0.02
    assert meta["centro_symmetry_err"] <= 1e-8


def test_eim_smoke(tmp_path):
    rc, out = _run(tmp_path, "eim", EIM_CFG)
    assert rc == 0
    assert (out / "eim_centerline_t0.25.csv").is_file()
    assert (out / "eim_centerline_t0.5.csv").is_file()
    meta = _read_meta(out, "eim.json")
    assert all(meta["gates"].values())
    assert meta["far_field_ratio"] * 100.0 <= 1.0


def test_eim_problem_file(tmp_path):
    prob = tmp_path / "problem.json"
    prob.write_text(json.dumps(EIM_PROBLEM))
    cfg = dict(EIM_CFG)
    cfg.pop("problem")
    cfg["problem_file"] = str(prob)
    rc, out = _run(tmp_path, "eim", cfg, sub="out_file")
    assert rc == 0
    meta = _read_meta(out, "eim.json")
    assert meta["problem"]["sphere"]["radius"] == 0.1


def test_unknown_config_key_rejected(tmp_path):
    cfg = dict(HELM_CFG)
    cfg["no_such_option"] = 1
    with pytest.raises(SystemExit):
        main(["verify-helmholtz", "--config", _write_cfg(tmp_path, cfg),
              "--out", str(tmp_path / "out")])


def test_gate_override_can_fail_run(tmp_path):
    # An absurdly tight gate must flip the exit code to 1.
    rc, out = _run(tmp_path, "verify-helmholtz",
                   dict(HELM_CFG, gate=1e-9), sub="tight")
    assert rc == 1
    # The artifacts are still written for inspection.
    assert (out / "helmholtz.csv").is_file()
    meta = _read_meta(out, "helmholtz.json")
    assert not meta["gates"]["finest_within_gate"]


def test_cli_flag_overrides_config(tmp_path):
    out = tmp_path / "flag"
    rc = main(["verify-helmholtz", "--config",
               _write_cfg(tmp_path, HELM_CFG), "--out", str(out),
               "--gate", "1e-9"])
    assert rc == 1


def test_rerun_is_byte_identical(tmp_path):
    rc1, out1 = _run(tmp_path, "verify-helmholtz", HELM_CFG, sub="run1")
    rc2, out2 = _run(tmp_path, "verify-helmholtz", HELM_CFG, sub="run2")
    assert rc1 == rc2 == 0
    b1 = (out1 / "helmholtz.csv").read_bytes()
    b2 = (out2 / "helmholtz.csv").read_bytes()
    assert b1 == b2


def test_config_hash_tracks_config(tmp_path):
    _, out1 = _run(tmp_path, "verify-helmholtz", HELM_CFG, sub="h1")
    _, out2 = _run(tmp_path, "verify-helmholtz",
                   dict(HELM_CFG, samples=11), sub="h2")
    h1 = _read_meta(out1, "helmholtz.json")["config_sha256"]
    h2 = _read_meta(out2, "helmholtz.json")["config_sha256"]
    assert h1 != h2
