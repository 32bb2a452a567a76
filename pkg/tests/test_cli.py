import subprocess
import sys

import numpy as np
import pytest

from abrsim.cli import main
from abrsim.frontend import load_population, write_vap1

from conftest import SMALL


def write_config(path, extra=None):
    values = {**SMALL, **(extra or {})}
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()))
    return path


def test_design_filter_output(capsys):
    assert main(["design-filter", "--fs", "20000", "--tau", "0.002", "--variant", "v12"]) == 0
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
    assert list(out) == ["variant", "fs", "tau", "b0", "b1", "b2", "a0", "a1", "a2", "m", "c", "gain_db"]
    assert float(out["c"]) == 1 / 6561
    assert float(out["m"]) == 79 / 81
    assert abs(float(out["gain_db"])) < 1e-9
    assert out["a1"] == format(-2 * 79 / 81, ".17g")


def test_design_filter_errors(capsys):
    assert main(["design-filter", "--fs", "1000", "--tau", "0.0001"]) == 4
    assert main(["design-filter", "--fs", "-1", "--tau", "0.001"]) == 2
    assert "error" in capsys.readouterr().err


def test_seed_rejected(tmp_path):
    assert main(["mtf", "--seed", "1", "--out", str(tmp_path)]) == 2
    assert not any(tmp_path.iterdir())


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("analysis.unknown = 1\n")
    assert main(["clicks", "--config", str(cfg), "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("fmt, name", [("vap1", "stimulus.vap"), ("csv", "stimulus.csv")])
def test_stim(tmp_path, fmt, name):
    cfg = write_config(tmp_path / "c.cfg", {"stimulus.duration": "0.1"})
    assert main(["stim", "--config", str(cfg), "--out", str(tmp_path), "--format", fmt]) == 0
    path = tmp_path / name
    if fmt == "csv":
        lines = path.read_text().splitlines()
        assert lines[0] == "# fs=100000.0"
        assert len([ln for ln in lines if not ln.startswith("#")]) == 10000
    else:
        x = load_population(path).data
        assert x.shape == (1, 10000)
        assert np.count_nonzero(x) == 2 * 8


def test_simulate_and_data_errors(tmp_path):
    cfg = write_config(tmp_path / "c.cfg", {"stimulus.duration": "0.05"})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    pops = {n: load_population(tmp_path / f"{n}.vap") for n in ("an", "cn", "ic")}
    assert all(p.data.shape == (41, 1000) for p in pops.values())

    # file-fed front-end: a truncated file is a data error
    an_path = tmp_path / "an.vap"
    raw = an_path.read_bytes()
    bad = tmp_path / "bad.vap"
    bad.write_bytes(raw[:-16])
    cfg2 = write_config(tmp_path / "c2.cfg", {"frontend.source": "file", "frontend.an_path": str(bad)})
    assert main(["simulate", "--config", str(cfg2), "--out", str(tmp_path / "o")]) == 3


def test_file_source_round_trip(tmp_path):
    cfg = write_config(tmp_path / "c.cfg", {"stimulus.duration": "0.05"})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    cfg2 = write_config(tmp_path / "c2.cfg", {"frontend.source": "file",
                                               "frontend.an_path": str(tmp_path / "a" / "an.vap"),
                                               "frontend.reference": "none"})
    assert main(["simulate", "--config", str(cfg2), "--out", str(tmp_path / "b")]) == 0
    for name in ("an", "cn", "ic"):
        assert (tmp_path / "a" / f"{name}.vap").read_bytes() == (tmp_path / "b" / f"{name}.vap").read_bytes()


def test_degenerate_calibration_exit_code(tmp_path):
    an = tmp_path / "flat.vap"
    write_vap1(np.full((41, 120000), 943.0), 20000, an)
    cfg = write_config(tmp_path / "c.cfg", {"frontend.source": "file", "frontend.an_path": str(an)})
    assert main(["calibrate", "--config", str(cfg), "--out", str(tmp_path)]) == 4


def test_experiment_subcommands_write_files(tmp_path, calibration_file):
    cfg = write_config(tmp_path / "c.cfg", {"io.calibration_path": str(calibration_file)})
    assert main(["mtf", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert main(["efr", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert {p.name for p in (tmp_path / "o").iterdir()} == {"mtf.csv", "efr_magnitude.csv", "efr_trace.csv"}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "abrsim.cli", "design-filter", "--fs", "20000", "--tau", "5e-4",
                           "--variant", "v11"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "gain_db=0.847" in proc.stdout
