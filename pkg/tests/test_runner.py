import json
import os
from functools import partial

import numpy as np
import pytest

from src import config as env
from src.covariance import constant
from src.errors import ConfigError, ReplayError
from src.heatkernel import Torus
from src.particles import ConstantReadout
from src.runner import (CheckList, chunk_bounds, csv_bytes, load_config, map_replicas,
                        parse_config, replay, report_frame, run_experiment, validate_config,
                        within, write_report)
from src.runner.experiments import _pam_chunk
from src.spde import SplittingScheme

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")

THRESHOLDS = """
[experiment]
name = threshold-table

[kernel]
variant = constant
c = 0

[readouts]
one = constant(1)

[params]
rho = 2
domination_d = 1
domination_t = 1
"""


@pytest.fixture
def threshold_config(tmp_path):
    path = tmp_path / "threshold-table.ini"
    path.write_text(THRESHOLDS)
    return path


def test_defaults_fill_missing_sections():
    cfg = parse_config(THRESHOLDS)
    assert (cfg.d, cfg.extent, cfg.cells) == (1, 16.0, 128)
    assert (cfg.dt, cfg.ordering, cfg.horizon) == (1e-3, "symmetric", 1.0)
    assert cfg.replicas == 200 and cfg.seed == env.SEED and cfg.chunk == env.CHUNK
    assert cfg.param_tuple("rho", (4.0,)) == (2.0,)
    assert cfg.param("missing", 3.5) == 3.5
    with pytest.raises(ConfigError):
        cfg.param("missing")


def test_param_lists():
    cfg = parse_config(THRESHOLDS.replace("rho = 2", "rho = 2, 4"))
    assert cfg.param("rho") == (2.0, 4.0)
    with pytest.raises(ConfigError):
        parse_config(THRESHOLDS.replace("rho = 2", "rho = two")).param("rho")


def test_hash_ignores_layout_and_output_dir():
    reordered = "[readouts]\none = constant(1)\n\n" + THRESHOLDS.replace("[readouts]\none = constant(1)", "")
    assert parse_config(reordered).config_hash == parse_config(THRESHOLDS).config_hash
    a = parse_config(THRESHOLDS + "\n[output]\ndir = a\n")
    b = parse_config(THRESHOLDS + "\n[output]\ndir = b\n")
    assert a.config_hash == b.config_hash
    assert (a.out_dir, b.out_dir) == ("a", "b")
    assert parse_config(THRESHOLDS.replace("rho = 2", "rho = 3")).config_hash != a.config_hash


def test_seed_precedence(monkeypatch):
    assert parse_config(THRESHOLDS + "\n[mc]\nseed = 5\n").seed == 5
    monkeypatch.setenv("SBMRE_SEED", "11")
    assert parse_config(THRESHOLDS + "\n[mc]\nseed = 5\n").seed == 11
    assert parse_config(THRESHOLDS, use_env=False).seed == env.SEED
    assert parse_config(THRESHOLDS, {"mc.seed": 7}).seed == 7


@pytest.mark.parametrize("text", [
    THRESHOLDS.replace("[kernel]\nvariant = constant\nc = 0\n", ""),
    THRESHOLDS.replace("[grid]", "") + "\n[grid]\ncells = many\n",
    "not an ini file",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("old, new", [
    ("name = threshold-table", "name = everything"),
    ("one = constant(1)", "one = sombrero(1)"),
    ("c = 0", "c = -1"),
    ("[params]", "[scheme]\ndt = -0.1\n\n[params]"),
])
def test_validation_errors(old, new):
    with pytest.raises(ConfigError):
        validate_config(parse_config(THRESHOLDS.replace(old, new)))


def test_empty_readout_catalog_is_rejected():
    with pytest.raises(ConfigError, match="readouts"):
        validate_config(parse_config(THRESHOLDS.replace("one = constant(1)\n", "")))


def test_shipped_configs_validate():
    names = sorted(os.listdir(CONFIG_DIR))
    assert len(names) == 8
    for name in names:
        cfg = validate_config(load_config(os.path.join(CONFIG_DIR, name)))
        assert cfg.name == name[:-len(".ini")]


def test_missing_config_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.ini")


def test_chunk_bounds():
    assert chunk_bounds(7, 3) == [(0, 3), (3, 6), (6, 7)]
    assert chunk_bounds(2, 50) == [(0, 2)]


def test_map_replicas_does_not_depend_on_workers():
    func = partial(_pam_chunk, constant(1.0, 1), Torus(1, 4.0, 8), SplittingScheme(1e-2), 0.1,
                   ConstantReadout(1.0))
    serial = map_replicas(func, 7, seed=3, workers=1, chunk=3)
    pooled = map_replicas(func, 7, seed=3, workers=2, chunk=3)
    assert len(serial) == 7
    assert np.array_equal(serial, pooled)


def test_within():
    assert within(0.3, 0.1, 3)
    assert not within(0.31, 0.1, 3)
    assert within(0.0, 0.0, 3)


def test_check_names_are_unique():
    checks = CheckList()
    checks.add("a", 1.0, True)
    with pytest.raises(ValueError):
        checks.add("a", 2.0, False)
    assert checks.frame()["passed"].tolist() == [True]


def test_inconclusive_check_never_passes():
    checks = CheckList()
    checks.add("ladder", 0.95, True, tolerance=0.9, inconclusive=True)
    checks.add("plain", 1.0, True)
    frame = checks.frame()
    assert frame["passed"].tolist() == [False, True]
    assert frame["inconclusive"].tolist() == [True, False]


def test_threshold_table_run_and_report(threshold_config, tmp_path):
    report = run_experiment(load_config(str(threshold_config)))
    assert report.passed, report.failures
    assert {"threshold_d3", "threshold_d4", "threshold_d5", "theta_unit_ball_d3"} <= set(report.checks["name"])
    frame = report_frame(report)
    assert list(frame.columns) == ["config_hash", "section", "name", "key", "value"]
    assert set(frame["section"]) == {"checks", "thresholds", "domination"}
    assert csv_bytes(report) == csv_bytes(run_experiment(load_config(str(threshold_config))))

    paths = write_report(report, str(tmp_path / "out"))
    manifest = json.loads(open(paths["manifest"]).read())
    assert manifest["experiment"] == "threshold-table"
    assert manifest["config_hash"] == report.config_hash
    assert manifest["passed"] is True


def _recorded_run(config_path, out_dir):
    report = run_experiment(load_config(str(config_path)))
    report.source = str(config_path)
    return write_report(report, str(out_dir))["manifest"]


def test_replay_is_byte_identical(threshold_config, tmp_path):
    manifest = _recorded_run(threshold_config, tmp_path / "out")
    replayed = replay(manifest)
    row = replayed.checks.set_index("name").loc["replay_identical"]
    assert bool(row["passed"])
    assert replayed.passed


def test_replay_refuses_edited_config(threshold_config, tmp_path):
    manifest = _recorded_run(threshold_config, tmp_path / "out")
    threshold_config.write_text(THRESHOLDS.replace("rho = 2", "rho = 4"))
    with pytest.raises(ReplayError) as info:
        replay(manifest)
    assert "rho" in info.value.diff


def test_replay_keeps_recorded_chunk_size(threshold_config, tmp_path, monkeypatch):
    manifest = _recorded_run(threshold_config, tmp_path / "out")
    recorded = json.loads(open(manifest).read())
    monkeypatch.setattr(env, "CHUNK", env.CHUNK + 7)
    replayed = replay(manifest)
    assert replayed.config.chunk == parse_config(recorded["config"], use_env=False).chunk
    assert replayed.config.chunk != env.CHUNK
    assert replayed.passed


def test_replay_refuses_version_mismatch(threshold_config, tmp_path):
    path = _recorded_run(threshold_config, tmp_path / "out")
    manifest = json.loads(open(path).read())
    manifest["versions"]["numpy"] = "0.0.1"
    with open(path, "w") as handle:
        json.dump(manifest, handle)
    with pytest.raises(ReplayError, match="version"):
        replay(path)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["threshold-table", "persistence-scan"])
def test_deterministic_experiments_pass(name):
    report = run_experiment(load_config(os.path.join(CONFIG_DIR, f"{name}.ini")))
    assert report.passed, report.failures


@pytest.mark.slow
def test_experiment_bytes_do_not_depend_on_workers():
    path = os.path.join(CONFIG_DIR, "pam-oracle.ini")
    cfg = load_config(path, {"mc.replicas": 60, "mc.chunk": 16, "mc.paths": 200})
    assert csv_bytes(run_experiment(cfg, workers=1)) == csv_bytes(run_experiment(cfg, workers=3))
