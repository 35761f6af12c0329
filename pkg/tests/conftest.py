import pytest

from gravphase.model import RB87, UNIT_MASS, PhysicsContext


@pytest.fixture
def nat():
    return PhysicsContext.natural()


@pytest.fixture
def si():
    return PhysicsContext.si()


@pytest.fixture
def unit():
    return UNIT_MASS


@pytest.fixture
def rb87():
    return RB87


@pytest.fixture(scope="session")
def bisection_zeros():
    from oracles import airy_zeros_bisection

    return airy_zeros_bisection(50)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} AC{number:02d} {name}: {detail}")
