from __future__ import annotations

from pathlib import Path

import pytest

from fumine.datasets import random_database, running_example
from fumine.model import reference_membership
from fumine.structures import build_fmatrix_set

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def mf():
    return reference_membership()


@pytest.fixture(scope="session")
def db():
    return running_example()


@pytest.fixture(scope="session")
def fms(db, mf):
    return build_fmatrix_set(db, mf)


@pytest.fixture(scope="session")
def qs(db):
    """Sequences by sid, for terse indexing: qs[1] is the first one."""
    return {s.sid: s for s in db.sequences}


@pytest.fixture(scope="session")
def small_corpus():
    """A dozen small random databases for the cheaper property tests."""
    return [random_database(seed, max_sequences=8, max_length=7) for seed in range(12)]


def pytest_terminal_summary(terminalreporter):
    from _util import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance")
        for line in VERDICTS:
            terminalreporter.write_line(line)
