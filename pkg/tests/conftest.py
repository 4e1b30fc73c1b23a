from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

_acceptance = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_dir():
    return DATA / "toy"


@pytest.fixture
def tiny_trade():
    return DATA / "tiny_trade.csv"


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"{verdict:4}  {name}")
