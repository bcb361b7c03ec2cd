import json
from pathlib import Path

import pytest
from hypothesis import settings

# fixed, cheap runs: no example database, no per-example deadline; acceptance
# properties set their own case counts
settings.register_profile("suite", max_examples=50, deadline=None, database=None)
settings.load_profile("suite")

from cpt.catalog import load_builtin

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def builtin():
    return load_builtin()


@pytest.fixture
def write_catalog(tmp_path):
    def write(doc, name="catalog.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
        return path

    return write


# -- acceptance summary: one PASS/FAIL line per criterion -------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.skipped:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        number, title = mark.args
        entry = _CRITERIA.setdefault(number, {"title": title, "checks": []})
        entry["checks"].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        checks = entry["checks"]
        ok = sum(passed for _, passed in checks)
        status = "PASS" if ok == len(checks) else "FAIL"
        tr.write_line(f"[{status}] criterion {number}: {entry['title']} ({ok}/{len(checks)} checks)")
        for name, passed in checks:
            if not passed:
                tr.write_line(f"        failed check: {name}")
