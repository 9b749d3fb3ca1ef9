import pytest

_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, passed: bool):
        _ACCEPTANCE[number] = (title, bool(passed))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {title}")
