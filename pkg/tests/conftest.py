from __future__ import annotations

import pytest

_OUTCOMES: dict = {}


@pytest.fixture
def record_outcome():
    def record(outcome):
        _OUTCOMES[outcome.number] = outcome
        return outcome
    return record


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        terminalreporter.write_line(_OUTCOMES[k].line())
