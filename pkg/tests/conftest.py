"""Shared fixtures and the acceptance summary.

Tests marked ``@pytest.mark.criterion("...")`` are reported once more at the
end of the run as one ``PASS``/``FAIL`` line per criterion.
"""

from __future__ import annotations

import warnings

import pytest

from parisian import binomial, custom, geometric, negbinomial, poisson

_RESULTS: dict[str, list[str]] = {}
_ORDER: list[str] = []
_NOTES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")
    config.addinivalue_line("markers", "slow: long-running check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    name = mark.args[0]
    if name not in _RESULTS:
        _RESULTS[name] = []
        _ORDER.append(name)
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _RESULTS[name].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if _NOTES:
        terminalreporter.section("reproduction notes")
        for line in _NOTES:
            terminalreporter.write_line(line)
    if not _ORDER:
        return
    terminalreporter.section("acceptance criteria")
    for name in _ORDER:
        outcomes = _RESULTS[name]
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.fixture
def report():
    """Append a line to the end-of-run reproduction notes."""
    return _NOTES.append


@pytest.fixture(scope="session")
def b33():
    return binomial(3, 0.3)


@pytest.fixture(scope="session")
def light_family():
    """Light-tailed laws with mean < 1 used across property tests."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [binomial(3, 0.3), geometric(0.3), poisson(0.6), negbinomial(2, 0.8, "a"),
                custom([0.5, 0.3, 0.0, 0.2])]
