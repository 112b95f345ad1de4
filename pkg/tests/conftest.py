import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def criterion(request, capsys):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion and print it."""
    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        _VERDICTS.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
