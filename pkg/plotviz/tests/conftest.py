import shutil
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

_LINES: list[str] = []


class _Criterion:
    """Records one pass/fail line per acceptance criterion, even when the
    wrapped block raises."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        line = f"[acceptance] {self.name} {'PASS' if exc_type is None else 'FAIL'}"
        _LINES.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


@pytest.fixture
def golden() -> Path:
    return GOLDEN


@pytest.fixture
def copy_run(tmp_path):
    """Copy a golden run directory somewhere writable for corruption tests."""

    def _copy(name: str) -> Path:
        dst = tmp_path / name
        shutil.copytree(GOLDEN / name, dst)
        return dst

    return _copy


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria (plotviz)")
        for line in _LINES:
            terminalreporter.write_line(line)
