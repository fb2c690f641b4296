import pytest

from pso_litmus import axioms
from pso_litmus.lang import builtin


@pytest.fixture(scope="session")
def default_universe():
    return axioms.build_universe()


@pytest.fixture(scope="session")
def default_reports(default_universe):
    return {r.axiom: r for r in axioms.check_all(default_universe)}


@pytest.fixture(params=["mp", "mp-fence", "sb", "empty"])
def shipped(request):
    return builtin(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for i in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[i][1])
