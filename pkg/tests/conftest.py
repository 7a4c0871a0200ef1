import pytest

_ACCEPTANCE_LINES = []
_CERTIFIED = []


@pytest.fixture
def record_criterion():
    """Print and keep one pass/fail line per acceptance criterion."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


@pytest.fixture
def certified():
    """Refinement deltas of every violation reported by the acceptance runs."""
    return _CERTIFIED


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
