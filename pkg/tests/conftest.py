import numpy as np
import pytest

from sidu_xai import PlantedQuadrantAdapter, build_reference_cnn


@pytest.fixture(scope="session")
def cnn():
    return build_reference_cnn(seed=42)


@pytest.fixture
def planted():
    return PlantedQuadrantAdapter()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bright_quadrant_image(rng, side=32, channels=3):
    img = rng.uniform(0.0, 0.05, size=(side, side, channels))
    half = side // 2
    img[:half, :half, :] = rng.uniform(0.7, 1.0, size=(half, half, channels))
    return img


# Tests tagged with a release-gate label (see test_acceptance.checklist) are
# echoed as a one-line-per-guarantee checklist after the run.
_gate_results = []


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    label = getattr(getattr(item, "function", None), "_gate_label", None)
    if label and report.when == "call":
        _gate_results.append((label, report.passed))
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _gate_results:
        return
    terminalreporter.section("release gate")
    for label, ok in _gate_results:
        terminalreporter.write_line(("[PASS] " if ok else "[FAIL] ") + label)
