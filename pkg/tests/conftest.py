import time

import pytest

from pa_spectra import pipeline
from pa_spectra.config import parse_config

_START = time.perf_counter()
SUITE_BUDGET_S = 300.0


@pytest.fixture(scope="session")
def na_cfg():
    """Default Na setup: both trap frequencies, xi_s = 0.042 at 100 kHz."""
    return parse_config("trap.omega_khz = 100, 10\npair.xi_s = 0.042\n")


@pytest.fixture(scope="session")
def na_model(na_cfg):
    return pipeline.calibrated_model(na_cfg)


@pytest.fixture(scope="session")
def na_levels(na_cfg, na_model):
    """Calibrated levels v = 33..39."""
    return pipeline.vib_levels(na_cfg, na_model)


@pytest.fixture(scope="session")
def trap100(na_cfg):
    return pipeline.trap_states(na_cfg, 100.0)


@pytest.fixture(scope="session")
def trap10(na_cfg):
    return pipeline.trap_states(na_cfg, 10.0)


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _START
    verdict = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(f"suite runtime {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s): {verdict}")


def pytest_configure(config):
    # the acceptance suite reports the whole-session runtime against the budget
    config.pa_suite_start = _START


def pytest_collection_modifyitems(items):
    """Run the acceptance checks last so criterion 9 sees the full runtime."""
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")
