import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma as euler_gamma

from oracles import gamma_fn, log_gamma_b_mp, log_rel, log_upsilon_mp
from toda_bootstrap.special import (
    QuadratureConfig,
    SpecialValue,
    UpsilonEvaluator,
    evaluator,
    gamma_ratio,
    gamma_sv,
)

B0 = 0.731


def test_gamma_ratio_examples():
    assert gamma_ratio(0.5).value() == pytest.approx(1.0, rel=1e-15)
    assert (gamma_ratio(0.3) * gamma_ratio(0.7)).value() == pytest.approx(1.0, rel=1e-14)
    assert gamma_ratio(1.4).value() == pytest.approx(-0.16 * gamma_ratio(0.4).value(), rel=1e-13)


@given(st.floats(-4.7, 4.7).filter(lambda x: abs(x - round(x)) > 1e-3))
def test_gamma_ratio_matches_scipy(x):
    assert gamma_ratio(x).value() == pytest.approx(gamma_fn(x), rel=1e-11)


def test_gamma_zero_and_pole_orders():
    assert gamma_ratio(0.0).order == -1
    assert gamma_ratio(-2.0).order == -1
    assert gamma_ratio(1.0).order == 1
    assert gamma_ratio(3.0).order == 1
    assert gamma_sv(-3.0).order == -1
    assert gamma_sv(2.5).order == 0


@pytest.mark.parametrize("b", [0.3, 0.731, 1.0, 1.7])
@pytest.mark.parametrize("frac", [1e-4, 0.15, 0.37, 0.5, 0.81, 0.99])
def test_upsilon_strip_against_integral(b, frac):
    x = frac * (b + 1 / b)
    ev = evaluator(b)
    assert ev.log_upsilon_strip(x) == pytest.approx(log_upsilon_mp(x, b), abs=1e-10)


@pytest.mark.parametrize("b", [0.3, 0.731, 1.7])
@pytest.mark.parametrize("frac", [0.05, 0.3, 0.5, 0.77, 0.95])
def test_gamma_b_strip_against_integral(b, frac):
    x = frac * (b + 1 / b)
    assert evaluator(b).log_gamma_b_strip(x) == pytest.approx(log_gamma_b_mp(x, b), abs=1e-10)


def test_upsilon_reference_examples():
    ev, evi = evaluator(B0), evaluator(1 / B0)
    q = B0 + 1 / B0
    assert log_rel(ev.upsilon(0.4).log_abs, ev.upsilon(q - 0.4).log_abs) <= 1e-9
    assert log_rel(ev.upsilon(0.9).log_abs, evi.upsilon(0.9).log_abs) <= 1e-9


def test_upsilon_b_shift_example():
    """Upsilon_b(2b) = gamma(b^2) b^{1-2b^2} Upsilon_b(b); both points lie in the strip here."""
    b = B0
    lhs = log_upsilon_mp(2 * b, b)
    rhs = math.log(gamma_fn(b * b)) + (1 - 2 * b * b) * math.log(b) + log_upsilon_mp(b, b)
    assert lhs == pytest.approx(rhs, abs=1e-10)
    ev = evaluator(b)
    assert log_rel(ev.upsilon(2 * b).log_abs, lhs) <= 1e-9


GRID = np.linspace(-3.3, 4.9, 50)


@pytest.mark.parametrize("b", [0.731, 1.23])
def test_upsilon_identities_on_grid(b):
    ev, evi = evaluator(b), evaluator(1 / b)
    q = b + 1 / b
    for x in GRID:
        u = ev.upsilon(x)
        if u.order:
            continue
        assert log_rel(u.log_abs, ev.upsilon(q - x).log_abs) <= 1e-9
        assert u.sign == ev.upsilon(q - x).sign
        assert log_rel(u.log_abs, evi.upsilon(x).log_abs) <= 1e-9
        # Upsilon(x + b) = gamma(b x) b^{1 - 2 b x} Upsilon(x), and b -> 1/b
        g = gamma_fn(b * x)
        if np.isfinite(g) and g != 0:
            up = ev.upsilon(x + b)
            assert up.sign * u.sign == (1 if g > 0 else -1)
            assert log_rel(up.log_abs, math.log(abs(g)) + (1 - 2 * b * x) * math.log(b) + u.log_abs) <= 1e-9
        g = gamma_fn(x / b)
        if np.isfinite(g) and g != 0:
            up = ev.upsilon(x + 1 / b)
            assert up.sign * u.sign == (1 if g > 0 else -1)
            assert log_rel(up.log_abs, math.log(abs(g)) + (2 * x / b - 1) * math.log(b) + u.log_abs) <= 1e-9


@pytest.mark.parametrize("b", [0.731, 1.23])
def test_gamma_b_identities_on_grid(b):
    ev, evi = evaluator(b), evaluator(1 / b)
    q = b + 1 / b
    for x in np.linspace(0.05, 3.1, 50):
        g = ev.gamma_b(x)
        if g.order:
            continue
        assert log_rel(g.log_abs, evi.gamma_b(x).log_abs) <= 1e-9
        shifted = ev.gamma_b(x + b)
        expected = 0.5 * math.log(2 * math.pi) + (b * x - 0.5) * math.log(b) - math.log(abs(euler_gamma(b * x)))
        assert log_rel(shifted.log_abs - g.log_abs, expected) <= 1e-9
        shifted = ev.gamma_b(x + 1 / b)
        expected = 0.5 * math.log(2 * math.pi) + (0.5 - x / b) * math.log(b) - math.log(abs(euler_gamma(x / b)))
        assert log_rel(shifted.log_abs - g.log_abs, expected) <= 1e-9
        if 0 < x < q:
            prod = g * ev.gamma_b(q - x) * ev.upsilon(x)
            assert prod.order == 0 and prod.sign == 1
            assert abs(prod.log_abs) <= 1e-9


def test_gamma_b_reference_examples():
    ev, evi = evaluator(B0), evaluator(1 / B0)
    x = 0.5
    ratio = ev.gamma_b(x + B0) / ev.gamma_b(x)
    expected = math.sqrt(2 * math.pi) * B0 ** (B0 * x - 0.5) / math.gamma(B0 * x)
    assert ratio.value() == pytest.approx(expected, rel=1e-9)
    x = 0.6
    prod = ev.gamma_b(x) * ev.gamma_b(B0 + 1 / B0 - x) * ev.upsilon(x)
    assert prod.value() == pytest.approx(1.0, rel=1e-9)
    assert ev.gamma_b(0.8).value() == pytest.approx(evi.gamma_b(0.8).value(), rel=1e-9)


@pytest.mark.parametrize("b", [0.3, 0.731, 1.7])
def test_quadrature_doubling_is_stable(b):
    base = UpsilonEvaluator(b)
    fine = UpsilonEvaluator(b, QuadratureConfig().doubled())
    q = b + 1 / b
    for x in np.linspace(1e-3, q - 1e-3, 25):
        assert abs(base.log_upsilon_strip(x) - fine.log_upsilon_strip(x)) <= 1e-10
        assert abs(base.log_gamma_b_strip(x) - fine.log_gamma_b_strip(x)) <= 1e-10


@pytest.mark.parametrize("m,k", [(0, 0), (1, 0), (0, 1), (2, 1)])
def test_upsilon_zeros_have_order(m, k):
    ev = evaluator(B0)
    q = B0 + 1 / B0
    assert ev.upsilon(-m * B0 - k / B0).order == 1
    assert ev.upsilon(q + m * B0 + k / B0).order == 1
    assert ev.upsilon(-m * B0 - k / B0).value() == 0.0


def test_gamma_b_poles_have_order():
    ev = evaluator(B0)
    assert ev.gamma_b(0.0).order == -1
    assert ev.gamma_b(-B0).order == -1
    assert ev.gamma_b(-B0 - 1 / B0).order == -1


def test_special_value_algebra():
    a = SpecialValue.from_float(-2.0)
    c = SpecialValue(0.0, 1, 1)
    assert (a * a).value() == pytest.approx(4.0)
    assert (a / a).value() == pytest.approx(1.0)
    assert (c / c).order == 0
    assert (a * c).value() == 0.0
    assert (SpecialValue.one() / c).value() == math.inf
    with pytest.raises(ArithmeticError):
        c.require_finite()
    with pytest.raises(ValueError):
        SpecialValue.from_float(0.0)


def test_evaluator_rejects_bad_coupling():
    with pytest.raises(ValueError):
        UpsilonEvaluator(0.0)
