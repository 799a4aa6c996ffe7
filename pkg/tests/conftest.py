import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_acceptance():
    def record(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))

    return record


@pytest.fixture(autouse=True)
def _no_atmosphere_override(monkeypatch):
    monkeypatch.delenv("CRYOLINK_ATMOS_PATH", raising=False)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
