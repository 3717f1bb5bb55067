from __future__ import annotations

from pathlib import Path

import pytest

from affectspace.perception import default_lexicon
from affectspace.scenario import load_scenario, load_session_config

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SUBJECTS = ("ava", "ben", "cho", "dia")


@pytest.fixture(scope="session")
def suite_config():
    return load_session_config(SCENARIO_DIR / "config.json")


@pytest.fixture(scope="session")
def suite_scripts():
    return {name: load_scenario(SCENARIO_DIR / f"{name}.scenario.json") for name in SUBJECTS}


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    """One pass/fail line per acceptance criterion at the end of the run."""
    entries: list[tuple[str, str]] = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                entries.append((status.upper(), nodeid.split("::")[-1]))
    if entries:
        terminalreporter.write_sep("=", "acceptance criteria")
        for status, name in entries:
            terminalreporter.write_line(f"{status}: {name}")
