import numpy as np
import pytest

from corrviz import examples


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def demo():
    return examples.three_point_demo()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


def pytest_collection_modifyitems(config, items):
    config._criterion_items = {
        item.nodeid: item.get_closest_marker("criterion").args
        for item in items
        if item.get_closest_marker("criterion")
    }


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    args = item.config._criterion_items.get(item.nodeid)
    if args is None:
        return
    failed = report.failed
    if report.when == "call" or failed:
        results = item.config._criteria
        results[args] = results.get(args, True) and not failed


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(config._criteria.items()):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
