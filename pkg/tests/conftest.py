import math

import pytest

from thzris.config import default_paper_config


@pytest.fixture(scope="session")
def cfg():
    return default_paper_config()


@pytest.fixture(scope="session")
def low_cfg(cfg):
    # RIS below the blockage tops
    return cfg.with_changes(h_r=1.2)


@pytest.fixture(scope="session")
def boundary_cfg(cfg):
    # RIS exactly at blockage height: LOW-RIS label, but no AP-RIS thinning
    return cfg.with_changes(h_r=cfg.h_b)


def close(a, b, rel=1e-12, abs_=0.0):
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


# acceptance criteria register one pass/fail line each; the lines are
# repeated in the terminal summary so they show even when output is captured
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
