"""Shared test plumbing: acceptance-criterion verdict collection.

The acceptance tests wrap each criterion body in the ``criterion``
context manager; the collected "[acceptance] <name> PASS|FAIL" lines are
replayed in a terminal-summary section so they are visible even when
pytest captures per-test stdout.
"""

from __future__ import annotations

import pytest

_LINES: list[str] = []


class _Criterion:
    def __init__(self, name: str) -> None:
        self.name = name

    def __enter__(self) -> "_Criterion":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        line = f"[acceptance] {self.name} {'PASS' if exc_type is None else 'FAIL'}"
        _LINES.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    """Factory for one-per-criterion PASS/FAIL reporting."""
    return _Criterion


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
