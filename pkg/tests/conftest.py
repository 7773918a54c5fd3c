import pytest

from renyi_ib.canonical import table1a

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def t1a():
    return table1a()


@pytest.fixture
def acceptance_report():
    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}  {detail}")
