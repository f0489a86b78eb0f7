import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance verdict; the summary prints one line per criterion."""

    def record(key: str, ok: bool, detail: str):
        _ACCEPTANCE[key] = (bool(ok), detail)
        print(f"{key}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[1])):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
