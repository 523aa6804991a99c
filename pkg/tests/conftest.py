import pytest

from pmcheck.lvalues import clear_memo, reset_bernoulli_table


@pytest.fixture
def cache_env(tmp_path, monkeypatch):
    """An isolated cache directory; the Bernoulli table is restored afterwards."""
    monkeypatch.setenv("PMCHECK_CACHE_DIR", str(tmp_path / "cache"))
    yield tmp_path / "cache"
    reset_bernoulli_table()
    clear_memo()


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
