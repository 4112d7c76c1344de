import numpy as np
import pytest
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qgame.games import game_from_grid

ACCEPTANCE_MODULE = "test_acceptance.py"
_acceptance_results = {}


def random_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def random_state_vector(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def random_game(rng, n, m, integer=False):
    if integer:
        pay = rng.integers(-5, 6, size=(n, m, 2)).astype(float)
    else:
        pay = rng.normal(size=(n, m, 2))
    return game_from_grid(None, pay.tolist())


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pd_game():
    return game_from_grid(["C", "D"], [[(3, 3), (0, 5)], [(5, 0), (1, 1)]])


@pytest.fixture
def ewl_game():
    labels = ["C", "D", "Q"]
    return game_from_grid(labels, [
        [(3, 3), (0, 5), (1, 1)],
        [(5, 0), (1, 1), (0, 5)],
        [(1, 1), (5, 0), (3, 3)],
    ])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if not report.nodeid.split("::")[0].endswith(ACCEPTANCE_MODULE):
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance_results.items()):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")
