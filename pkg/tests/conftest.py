import json
from collections import defaultdict

import pytest

from rankfarm.catalog import load_hierarchy, load_offerings
from rankfarm.fixtures import HIERARCHY, OFFERINGS, PRINTED_VECTORS, REQUIREMENTS
from rankfarm.requirements import load_requirements

IDS = ["RF1", "RF2", "RF3", "RF4", "RF5"]

_acceptance = defaultdict(list)
_titles = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "_criterion", None)
    if crit is not None:
        _acceptance[crit].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        rep._criterion = marker.kwargs["criterion"]
        _titles[marker.kwargs["criterion"]] = marker.kwargs["title"]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_acceptance):
        ok = all(o == "passed" for o in _acceptance[crit])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {crit}: {_titles[crit]}")


@pytest.fixture(scope="session")
def hierarchy():
    return load_hierarchy(HIERARCHY)


@pytest.fixture(scope="session")
def catalog(hierarchy):
    return load_offerings(OFFERINGS, hierarchy)


@pytest.fixture(scope="session")
def requirements(hierarchy):
    return load_requirements(REQUIREMENTS, hierarchy)


@pytest.fixture(scope="session")
def printed_vectors():
    return json.loads(PRINTED_VECTORS.read_text())["vectors"]


@pytest.fixture
def offerings_data():
    return json.loads(OFFERINGS.read_text())


@pytest.fixture
def hierarchy_data():
    return json.loads(HIERARCHY.read_text())
