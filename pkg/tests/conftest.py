from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from toda_bootstrap.kinematics import is_generic
from toda_bootstrap.lattice import Charge, CoeffB, WeylElement

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def rationals(low=-2, high=2, max_den=12):
    return st.fractions(min_value=low, max_value=high, max_denominator=max_den)


@st.composite
def coeffs(draw, low=-2, high=2):
    return CoeffB(draw(rationals(low, high)), draw(rationals(low, high)), draw(rationals(low, high)))


@st.composite
def charges(draw, n=None, low=-2, high=2):
    n = draw(st.integers(2, 5)) if n is None else n
    return Charge(n, tuple(draw(coeffs(low, high)) for _ in range(n - 1)))


@st.composite
def rational_charges(draw, n=None, low=-0.6, high=0.9):
    """Purely rational omega-coordinates (generic unless a pairing vanishes)."""
    n = draw(st.integers(2, 4)) if n is None else n
    coords = tuple(CoeffB(draw(st.fractions(low, high, max_denominator=97))) for _ in range(n - 1))
    alpha = Charge(n, coords)
    if not is_generic(alpha):
        alpha = Charge(n, tuple(c + CoeffB(Fraction(1, 1000) * (k + 1)) for k, c in enumerate(coords)))
    return alpha


@st.composite
def perms(draw, n):
    return WeylElement(tuple(draw(st.permutations(range(1, n + 1)))))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES
