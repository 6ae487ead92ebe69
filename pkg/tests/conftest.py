import pytest

ACCEPTANCE_LINES: dict = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> None:
    """Store the one-line verdict of an acceptance criterion (sub-parts are ANDed)."""
    prev = ACCEPTANCE_LINES.get(number)
    if prev is not None:
        passed = passed and prev[1]
        detail = prev[2] + "; " + detail if detail else prev[2]
    ACCEPTANCE_LINES[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        title, ok, detail = ACCEPTANCE_LINES[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
