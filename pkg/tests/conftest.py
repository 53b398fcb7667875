import math
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from hamcone import DiscreteOperator, Grid, example_system

sys.path.insert(0, os.path.dirname(__file__))

# Derandomized so a rerun reproduces the same cases; 100 examples minimum.
settings.register_profile(
    "repro",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")

CONFIG = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs", "example.ini")


@pytest.fixture(scope="session")
def grid():
    return Grid(0.0, 1.0, 257)


@pytest.fixture(scope="session")
def exf_system():
    return example_system()


@pytest.fixture(scope="session")
def const_system():
    return example_system(f1="1", f2="1")


@pytest.fixture(scope="session")
def const_operator(const_system, grid):
    return DiscreteOperator(const_system, grid)


@pytest.fixture(scope="session")
def exf_operator(exf_system, grid):
    return DiscreteOperator(exf_system, grid)


@pytest.fixture(scope="session")
def config_path():
    return CONFIG


def exact_u1(t):
    return 1.5 - t * t / 2


def exact_u2(t):
    return 0.625 - t * t / 2


HALF_PI = math.pi / 2


def random_monotone_system(rng):
    """Example kernels with f_i = a + b*u1 + c*u2 + d*u_i^2, all coefficients >= 0.

    Such f are non-decreasing on the nonnegative orthant.  Returns the system
    and a constant upper solution found from the slack condition.
    """
    from hamcone.constants import ConstantsReport
    from hamcone.hypotheses import find_beta

    gammas = ConstantsReport.from_values((1.5, 0.625), (1.0, 19 / 56))
    while True:
        coef = rng.uniform(0.0, 1.0, size=(2, 4)).round(3)
        f1 = f"{coef[0, 0]} + {coef[0, 1]}*u1 + {coef[0, 2]}*u2 + {coef[0, 3]}*u1^2"
        f2 = f"{coef[1, 0]} + {coef[1, 1]}*u1 + {coef[1, 2]}*u2 + {coef[1, 3]}*u2^2"
        lam = tuple(rng.uniform(0.02, 0.3, size=2).round(3))
        system = example_system(lam=lam, f1=f1, f2=f2)
        cand = find_beta(system, system.cone, gammas, 4.0, 4.0, density=32)
        if cand is not None:
            return system, cand.beta


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        number, title = name.split("_")[2], " ".join(name.split("_")[3:])
        verdict = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({title}): {verdict}")
