import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """report(number, ok, detail) records one acceptance criterion outcome."""
    store = request.config.stash.setdefault(_RESULTS, {})

    def report(number: int, ok: bool, detail: str):
        store[number] = (bool(ok), detail)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        if n not in store:
            continue
        ok, detail = store[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}")
