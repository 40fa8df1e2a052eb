import pytest

from bicover import fixtures as fx
from bicover.classify import enumerate_rows
from bicover.geom import P1xP1, P2, Fn

BASES = [P2, P1xP1, Fn(2), Fn(3), Fn(4)]


@pytest.fixture(scope="session")
def all_fixtures():
    return fx.load_all()


@pytest.fixture(scope="session")
def rows_by_base():
    return {b.name: enumerate_rows(b, 10) for b in BASES}


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
