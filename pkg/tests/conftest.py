import numpy as np
import pytest

from twobath.model import InitialState, SystemParams


def coupled(T1=1.0, T2=0.25, regime="high-t", **kw):
    values = dict(m=2.0, omega0=1.0, kappa=-1.0, gamma1=0.01, gamma2=0.01, T1=T1, T2=T2, regime=regime)
    values.update(kw)
    return SystemParams(**values)


@pytest.fixture
def base_params():
    return coupled()


@pytest.fixture
def base_init():
    return InitialState(s=1.0, d=6.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
