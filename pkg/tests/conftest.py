import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

ROOT = HERE.parent
CORPUS = ROOT / "corpus"

_acceptance: dict = {}


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_acceptance.items(), key=lambda kv: CRITERIA.get(kv[0].split("::")[-1], (99,))[0]):
        name = nodeid.split("::")[-1]
        num, title = CRITERIA.get(name, (0, name))
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:>2} [{status}] {title}")
