from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from workflow_memory import InMemoryStore
from workflow_memory.crew import chemist_mock_llm, load_chemist_crew
from workflow_memory.session import SessionGateway


@pytest.fixture
def store():
    return InMemoryStore()


@pytest.fixture
def chemist_crew():
    return load_chemist_crew()


@pytest.fixture
def gateway(store, chemist_crew):
    return SessionGateway(
        store=store,
        crews={"chemist": chemist_crew},
        llm=chemist_mock_llm(),
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in report.nodeid and getattr(report, "when", "call") == "call":
                name = report.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"[acceptance] {name}: {verdict}")
