from __future__ import annotations

from pathlib import Path

import pytest

from egp import CausalGraph, parse

CORPUS_DIR = Path(__file__).resolve().parents[1] / "src" / "egp" / "corpus"

# one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def corpus_graph():
    def load(entry_id: str) -> CausalGraph:
        return parse((CORPUS_DIR / f"{entry_id}.dag").read_text(encoding="utf-8"))

    return load


@pytest.fixture
def corpus_source():
    def load(entry_id: str) -> str:
        return (CORPUS_DIR / f"{entry_id}.dag").read_text(encoding="utf-8")

    return load
