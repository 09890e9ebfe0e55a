import glob
import os
import sysconfig

import pytest


@pytest.fixture(scope="session")
def code_text() -> bytes:
    """A large real byte corpus available on any machine: the stdlib sources."""
    files = sorted(glob.glob(os.path.join(sysconfig.get_paths()["stdlib"], "*.py")))
    return b"".join(open(f, "rb").read() for f in files)


_OUTCOMES: dict[int, list[tuple[str, str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        if report.skipped:
            detail = str(report.longrepr[-1]).removeprefix("Skipped: ")
        elif report.failed:
            detail = (detail + "; " if detail else "") + report.longreprtext.strip().splitlines()[-1][:160]
        _OUTCOMES.setdefault(marker.args[0], []).append((item.name, report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        parts = _OUTCOMES[number]
        states = {p[1] for p in parts}
        status = "FAIL" if "failed" in states else "SKIP" if states == {"skipped"} else "PARTIAL" if "skipped" in states else "PASS"
        notes = " | ".join(f"{name}: {outcome} ({detail})" if detail else f"{name}: {outcome}" for name, outcome, detail in parts)
        terminalreporter.write_line(f"criterion {number}: {status}  {notes}")
