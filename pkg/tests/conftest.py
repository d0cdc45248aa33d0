from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
GOLDEN = TESTS / "golden"
STUB = TESTS / "stub_solver.py"


def stub_template() -> str:
    return f"{sys.executable} -S {STUB} {{file}}"


@pytest.fixture
def example1_text() -> str:
    return (FIXTURES / "example1.pbv").read_text()


@pytest.fixture
def stub_answers(tmp_path, monkeypatch):
    """Write a scripted answer table and point the stub solver at it."""

    def write(table: dict) -> Path:
        path = tmp_path / "answers.json"
        path.write_text(json.dumps(table))
        monkeypatch.setenv("STUB_ANSWERS", str(path))
        return path

    return write


ACCEPTANCE_LINES: list = []


def record(number: int, name: str, passed: bool, detail: str = "") -> None:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'} {name}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
