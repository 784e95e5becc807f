from pathlib import Path

import pytest
from hypothesis import settings

from rpys_lab import parse_wos_export, parse_scopus_csv

DATA_DIR = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def wos_bytes() -> bytes:
    return (DATA_DIR / "wos_3records.txt").read_bytes()


@pytest.fixture(scope="session")
def scopus_bytes() -> bytes:
    return (DATA_DIR / "scopus_3records.csv").read_bytes()


@pytest.fixture(scope="session")
def ui_fixture_bytes() -> bytes:
    return (DATA_DIR / "ui_fixture.wos.txt").read_bytes()


@pytest.fixture(scope="session")
def wos_corpus(wos_bytes):
    return parse_wos_export(wos_bytes)


@pytest.fixture(scope="session")
def scopus_corpus(scopus_bytes):
    return parse_scopus_csv(scopus_bytes)


@pytest.fixture(scope="session")
def ui_corpus(ui_fixture_bytes):
    return parse_wos_export(ui_fixture_bytes)
