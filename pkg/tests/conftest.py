import pytest

from fwdsmile.heston_core import HestonParams

# default parameters of the numerical study
BASE = HestonParams(kappa=1.0, theta=0.07, xi=0.52, rho=-0.8, v=0.07)
# parameters of the ATM and lmgf-slope figures
FIG = HestonParams(kappa=1.0, theta=0.07, xi=0.4, rho=-0.6, v=0.07)
# 4 kappa theta == xi^2, where the smile expansion has four terms
EQUAL = HestonParams(kappa=1.0, theta=0.07, xi=0.28**0.5, rho=-0.8, v=0.07)


@pytest.fixture
def base():
    return BASE


@pytest.fixture
def fig():
    return FIG


@pytest.fixture
def equal():
    return EQUAL


def pytest_terminal_summary(terminalreporter):
    import sys
    acc = sys.modules.get("test_acceptance")
    if acc and acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acc.RESULTS):
            terminalreporter.write_line(line)
