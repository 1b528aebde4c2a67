"""Shared fixtures: the acceptance-criterion recorder and its summary hook."""
import pytest

_ACCEPTANCE_LINES: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion.

    Usage: acceptance(criterion_number, passed, detail). The line is
    printed in the terminal summary so the outcome of every criterion is
    visible in one block even when pytest captures test output.
    """
    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE_LINES[number] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_LINES):
        passed, detail = _ACCEPTANCE_LINES[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:2d}: {verdict} — {detail}")
