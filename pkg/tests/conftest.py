from __future__ import annotations

from pathlib import Path

import pytest

from alice.dataflow import build_dataflow_graph
from alice.hdl import build_instance_tree, parse_files

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = FIXTURES / "configs"

_criteria: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or report.failed:
        _criteria.setdefault(marker.args[0], []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in _criteria.items():
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")


@pytest.fixture(scope="session")
def gcd_design():
    return parse_files([FIXTURES / "toy_gcd.v"], top="gcd_top")


@pytest.fixture(scope="session")
def gcd_tree(gcd_design):
    return build_instance_tree(gcd_design)


@pytest.fixture(scope="session")
def gcd_graph(gcd_design, gcd_tree):
    return build_dataflow_graph(gcd_design, gcd_tree)


@pytest.fixture(scope="session")
def iir_design():
    return parse_files([FIXTURES / "iir_biquad.v"], top="iir_top")
