from __future__ import annotations

import re

from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[k] = (m.group(2), "PASS" if report.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        name, status = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d} {name:<32} {status}")
