from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from dropkit.fixtures import fixture_dataset, fixture_tables  # noqa: E402

settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile("ci")

# (criterion number, passed, seconds, limit, note) filled in by test_acceptance
ACCEPTANCE: list[tuple[int, bool, float, float | None, str]] = []


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, seconds: float, limit: float | None, note: str) -> None:
        ACCEPTANCE.append((number, passed, seconds, limit, note))

    return record


@pytest.fixture(scope="session")
def fixture_data():
    return fixture_dataset()


@pytest.fixture(scope="session")
def fixture_data_words():
    return fixture_dataset(word_numbers=True)


@pytest.fixture(scope="session")
def tables():
    return fixture_tables()


@pytest.fixture(scope="session")
def by_qid(fixture_data):
    return {qa.question_id: (passage, qa) for passage, qas in fixture_data for qa in qas}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, passed, seconds, limit, note in sorted(ACCEPTANCE):
        budget = f" (limit {limit:g} s)" if limit is not None else ""
        status = "PASS" if passed else "FAIL"
        tr.write_line(f"criterion {number}: {status}  {seconds:.2f} s{budget}  {note}")
