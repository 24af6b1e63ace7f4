import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sqzdecomp.fields import Polynomial, gf
from sqzdecomp.matrices import Matrix

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_Q = (3, 5, 7, 9)


def fields(qs=SMALL_Q):
    return st.sampled_from(qs).map(gf)


@st.composite
def matrices(draw, qs=SMALL_Q, n_min=1, n_max=5):
    F = draw(fields(qs))
    n = draw(st.integers(n_min, n_max))
    vals = draw(st.lists(st.integers(0, F.q - 1), min_size=n * n, max_size=n * n))
    return Matrix(F, [vals[i * n : (i + 1) * n] for i in range(n)])


@st.composite
def monic_polys(draw, qs=SMALL_Q, d_min=1, d_max=6):
    F = draw(fields(qs))
    d = draw(st.integers(d_min, d_max))
    cs = draw(st.lists(st.integers(0, F.q - 1), min_size=d, max_size=d))
    return Polynomial(F, cs + [1])


def random_matrix(F, n, rng):
    return Matrix(F, [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)])


def random_invertible(F, n, rng):
    from sqzdecomp.matrices import is_invertible

    while True:
        P = random_matrix(F, n, rng)
        if is_invertible(P):
            return P


@pytest.fixture
def rng():
    return random.Random(20240611)


_acceptance: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1].split("[")[0]
        _acceptance.setdefault(name, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, title in CRITERIA.items():
        outcomes = _acceptance.get(name)
        if outcomes is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {title}")
