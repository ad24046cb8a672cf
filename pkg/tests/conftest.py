from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def pkg_root():
    return ROOT


# one PASS/FAIL line per acceptance criterion, printed after the run
_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    # fixtures may do the heavy lifting, so setup time counts toward the criterion
    if rep.when == "setup":
        item._setup_secs = rep.duration
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        secs = rep.duration + (getattr(item, "_setup_secs", 0.0) if rep.when == "call" else 0.0)
        _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", secs)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, verdict, secs = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}  ({secs:.1f} s)")
