import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gehman.system import GehmanSystem  # noqa: E402

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def two2():
    return GehmanSystem.full_shift(2, 2)


@pytest.fixture(scope="session")
def two3():
    return GehmanSystem.full_shift(2, 3)


@pytest.fixture(scope="session")
def two4():
    return GehmanSystem.full_shift(2, 4)


@pytest.fixture
def acceptance():
    """Record one criterion's outcome for the end-of-run table."""
    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE[name] = (ok, detail)
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
