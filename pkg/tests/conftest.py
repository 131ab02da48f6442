from functools import lru_cache

import pytest

from weyleth.experiments import lmg_run
from weyleth.lmg import load_params


@lru_cache(maxsize=None)
def cached_run(omega: int, a: float = 1.0):
    """Diagonalized LMG model shared by every test in the session."""
    return lmg_run(load_params().with_(omega=omega, a=a))


@pytest.fixture(scope="session")
def lmg():
    return cached_run


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        terminalreporter.write_line(verdicts[n])
