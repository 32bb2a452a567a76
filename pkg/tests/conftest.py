import pytest

from abrsim.calibration import REFERENCE_V12, write_calibration
from abrsim.config import ExperimentConfig

# 41-channel map spanning the same CF range; keeps experiment tests fast
SMALL = {
    "frontend.n_channels": "41",
    "analysis.range_broadband": "1-41",
    "analysis.range_on": "10-12",
    "analysis.range_off": "3-5",
    "analysis.mtf_channel": "12",
}


@pytest.fixture
def calibration_file(tmp_path):
    path = tmp_path / "calibration.txt"
    write_calibration(path, REFERENCE_V12, date="2000-01-01T00:00:00+00:00")
    return path


@pytest.fixture
def small_config(calibration_file):
    return ExperimentConfig.from_mapping({**SMALL, "io.calibration_path": str(calibration_file)})


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
