import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``report(n, ok, detail)`` records one acceptance line and prints it."""
    def report(n: int, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
        ACCEPTANCE[n] = line
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
