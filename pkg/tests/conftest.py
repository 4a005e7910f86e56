import pytest

from harmchains import REFERENCE_MODEL, ChainCouplings

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def reference():
    return REFERENCE_MODEL


@pytest.fixture(scope="session")
def decoupled():
    return ChainCouplings((2.0, 0.5), (0.0,))


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, title, passed, detail=""):
        _ACCEPTANCE.append((number, title, passed, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")
