import csv
import io
import math

import numpy as np
import pytest

from abrsim import experiments
from abrsim.calibration import ScalingFactors, read_calibration, write_calibration
from abrsim.config import ExperimentConfig

from conftest import SMALL


def rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config_sha256=")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


@pytest.fixture(scope="module")
def module_cfg(tmp_path_factory):
    path = tmp_path_factory.mktemp("cal") / "calibration.txt"
    write_calibration(path, ScalingFactors(1e-13, 1e-13, 4e-13), date="2000-01-01")
    return ExperimentConfig.from_mapping({**SMALL, "io.calibration_path": str(path)})


@pytest.fixture(scope="module")
def mtf_csv(module_cfg):
    return experiments.run_mtf_experiment(module_cfg)["mtf.csv"]


def test_mtf_layout(mtf_csv, module_cfg):
    assert mtf_csv.splitlines()[0] == f"# config_sha256={module_cfg.sha256}"
    table = rows(mtf_csv)
    assert list(table[0]) == ["stage", "param", "value_db", "value_rel"]
    for stage in ("CN", "IC"):
        sel = [r for r in table if r["stage"] == stage]
        assert len(sel) == 50
        assert [float(r["param"]) for r in sel] == list(np.arange(5, 255, 5))
        assert max(float(r["value_rel"]) for r in sel) == 1.0


def test_mtf_deterministic(mtf_csv, module_cfg):
    assert experiments.run_mtf_experiment(module_cfg)["mtf.csv"].encode() == mtf_csv.encode()


def test_bug_toggle_changes_ic_only(mtf_csv, module_cfg):
    bug = rows(experiments.run_mtf_experiment(module_cfg.with_overrides(nuclei__bug_mode="bug_v11"))["mtf.csv"])
    ref = rows(mtf_csv)
    for a, b in zip(ref, bug):
        assert a["stage"] == b["stage"] and a["param"] == b["param"]
        if a["stage"] == "CN":
            assert a == b
    assert any(a["value_db"] != b["value_db"] for a, b in zip(ref, bug) if a["stage"] == "IC")


def test_click_layout(module_cfg):
    text = experiments.run_click_experiment(module_cfg)["clicks.csv"]
    table = rows(text)
    assert list(table[0]) == ["wave", "epoch", "level_db", "latency_s", "amplitude_v", "latency_reported_s"]
    assert len(table) == 3 * 5 * 2
    for wave in ("W1", "W3", "W5"):
        sel = [r for r in table if r["wave"] == wave]
        assert {(int(r["epoch"]), float(r["level_db"])) for r in sel} == {
            (e, lv) for e in (1, 10) for lv in (60, 70, 80, 90, 100)}
        for r in sel:
            assert float(r["latency_reported_s"]) == pytest.approx(float(r["latency_s"]) + 3.5e-3, abs=1e-15)
            assert float(r["amplitude_v"]) >= 0


def test_efr_outputs_and_weights(module_cfg, tmp_path):
    out = experiments.run_efr_experiment(module_cfg)
    table = rows(out["efr_magnitude.csv"])
    assert {r["range"] for r in table} == {"broadband", "on", "off"}
    assert len(table) == 3 * 6
    trace = rows(out["efr_trace.csv"])
    assert len(trace) == 4000
    assert list(trace[0]) == ["time_s", "r_efr_v", "an_v", "cn_v", "ic_v"]
    t = trace[1234]
    assert float(t["r_efr_v"]) == pytest.approx(float(t["an_v"]) + float(t["cn_v"]) + float(t["ic_v"]), rel=1e-12,
                                                abs=1e-30)
    # weights come from the calibration file: doubling them adds 6.02 dB everywhere
    doubled = tmp_path / "double.txt"
    f = read_calibration(module_cfg.text("io.calibration_path"))
    write_calibration(doubled, ScalingFactors(2 * f.m1, 2 * f.m3, 2 * f.m5), date="2000-01-01")
    out2 = experiments.run_efr_experiment(module_cfg.with_overrides(io__calibration_path=str(doubled)))
    for a, b in zip(table, rows(out2["efr_magnitude.csv"])):
        assert float(b["value_db"]) - float(a["value_db"]) == pytest.approx(20 * math.log10(2), abs=1e-9)
        assert float(a["value_rel"]) == pytest.approx(float(b["value_rel"]), rel=1e-12)


def test_calibration_run_writes_provenance(tmp_path):
    cfg = ExperimentConfig.from_mapping({**SMALL, "calibration.duration_s": "6"})
    path = tmp_path / "cal.txt"
    f = experiments.run_calibration(cfg, path, date="2000-01-01")
    text = path.read_text()
    assert f"# config_sha256={cfg.sha256}" in text and "# stimulus_sha256=" in text
    assert read_calibration(path) == f
