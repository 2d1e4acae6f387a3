"""Three-point structure constants with one Wyllard semi-degenerate field, and shift-equation checks."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .blocks import shift_exponents, two_mu
from .kinematics import TodaParams, _vec, classify_charge
from .lattice import INV_B, B, Charge, CoeffB, h_projections, h_vec
from .nonscalar import FieldLabel, neutrality
from .special import SpecialValue, UpsilonEvaluator, gamma_ratio


@dataclass(frozen=True)
class Phased:
    """|value| * exp(i pi eighths / 4); the magnitude keeps the zero/pole order."""

    magnitude: SpecialValue
    eighths: int = 0

    def __post_init__(self):
        m = self.magnitude
        k = self.eighths + (4 if m.sign < 0 else 0)
        object.__setattr__(self, "magnitude", SpecialValue(m.log_abs, 1, m.order))
        object.__setattr__(self, "eighths", k % 8)

    @classmethod
    def of(cls, v) -> "Phased":
        return v if isinstance(v, Phased) else cls(v)

    def __mul__(self, other) -> "Phased":
        other = Phased.of(other)
        return Phased(self.magnitude * other.magnitude, self.eighths + other.eighths)

    def __truediv__(self, other) -> "Phased":
        other = Phased.of(other)
        return Phased(self.magnitude / other.magnitude, self.eighths - other.eighths)

    @property
    def is_real(self) -> bool:
        return self.eighths in (0, 4)

    def sqrt(self) -> "Phased":
        """Principal branch."""
        m = self.magnitude
        if m.order % 2:
            raise ArithmeticError(f"odd zero/pole order {m.order} under a square root")
        k = self.eighths if self.eighths <= 4 else self.eighths - 8
        if k % 2:
            raise ArithmeticError("square root of an odd eighth-turn phase")
        return Phased(SpecialValue(0.5 * m.log_abs, 1, m.order // 2), k // 2)

    def real(self) -> SpecialValue:
        if not self.is_real:
            raise ValueError("value is not real")
        m = self.magnitude
        return SpecialValue(m.log_abs, -1 if self.eighths == 4 else 1, m.order)

    def __complex__(self) -> complex:
        m = self.magnitude
        if m.order > 0:
            return 0j
        if m.order < 0:
            return complex(math.inf, 0)
        return cmath.rect(math.exp(m.log_abs), math.pi * self.eighths / 4)


@dataclass(frozen=True)
class ThreePointResult:
    """A structure constant with its Upsilon factors kept for audit."""

    phased: Phased
    components: tuple[tuple[str, float, SpecialValue], ...] = ()

    @property
    def value(self) -> SpecialValue:
        """Signed value when real, otherwise the magnitude (see ``phase_eighths``)."""
        return self.phased.real() if self.phased.is_real else self.phased.magnitude

    @property
    def phase_eighths(self) -> int:
        return self.phased.eighths

    @property
    def negative_under_root(self) -> bool:
        """A negative radicand left the constant off the real axis."""
        return not self.phased.is_real

    @property
    def is_finite(self) -> bool:
        return self.phased.magnitude.is_finite

    def __float__(self) -> float:
        return self.phased.real().value()

    def __complex__(self) -> complex:
        return complex(self.phased)


@dataclass(frozen=True)
class ShiftCheck:
    """Mismatch of the alpha_2-independent ratio between two alpha_2 choices."""

    residual: float
    phases_agree: bool

    def __float__(self) -> float:
        return self.residual


def _kappa_value(kappa, b: float) -> float:
    return kappa.value(b) if isinstance(kappa, CoeffB) else float(kappa)


def _check_pair(alpha1, alpha2):
    if not (isinstance(alpha1, Charge) and isinstance(alpha2, Charge)):
        return
    tags = [classify_charge(a) for a in (alpha1, alpha2)]
    if any(t.kind == "fully-degenerate" for t in tags):
        raise ValueError("fully degenerate charge in a semi-degenerate three-point function")
    zero = Charge.zero(alpha1.n)
    if alpha1 == zero or alpha2 == zero:
        return
    if any(t.kind == "semi-degenerate" for t in tags):
        raise ValueError("semi-degenerate first or second charge is only allowed next to the identity")


def _reduced_C(p1: np.ndarray, p2: np.ndarray, tm: float, params: TodaParams,
               ev: UpsilonEvaluator) -> tuple[Phased, list]:
    """The Upsilon ratio without M(kappa); p1, p2 are h-projections of alpha_i - Q."""
    b, n = params.b, params.n
    parts = []
    num = SpecialValue.one()
    for a in p1:
        for c in p2:
            x = b + a + c + tm
            u = ev.upsilon(x)
            parts.append(("numerator", x, u))
            num = num * u
    # one root per charge, so that phi(alpha) phi(alpha*) = P(alpha) and C(alpha, alpha*, 0) = 1
    den = Phased(SpecialValue.one())
    for p in (p1, p2):
        rad = SpecialValue.one()
        for i in range(n):
            for j in range(i + 1, n):
                d = p[i] - p[j]
                for x in (b + d, b - d):
                    u = ev.upsilon(x)
                    parts.append(("denominator", x, u))
                    rad = rad * u
        den = den * Phased(rad).sqrt()
    return Phased(num) / den, parts


def normalization_M(kappa: float, params: TodaParams, ev: UpsilonEvaluator) -> Phased:
    """Magnitude from the closed form; the phase is fixed by C(kappa w_1, 0, kappa w_{n-1}) = 1."""
    n, b, q = params.n, params.b, params.q_scalar
    ub = ev.upsilon(b)
    inner = ub * ev.upsilon(b + n * q) / (ev.upsilon(b + kappa) * ev.upsilon(b - kappa + n * q))
    m = Phased(inner).sqrt() / ub**n
    x1 = np.zeros(n - 1)
    x1[0] = kappa
    p1 = h_projections(x1 - params.q_vector)
    p2 = h_projections(-params.q_vector)
    ref, _ = _reduced_C(p1, p2, two_mu(kappa, n - 1, params), params, ev)
    return Phased(m.magnitude, -ref.eighths)


def scalar_C(alpha1, alpha2, kappa, direction: int, params: TodaParams, ev: UpsilonEvaluator,
             values: Mapping[str, float] | None = None) -> ThreePointResult:
    """C(alpha1, alpha2, kappa omega_direction) for scalar alpha1, alpha2."""
    if abs(ev.b - params.b) > 1e-15:
        raise ValueError("evaluator built for a different coupling")
    _check_pair(alpha1, alpha2)
    k = _kappa_value(kappa, params.b)
    p1 = h_projections(_vec(alpha1, params, values) - params.q_vector)
    p2 = h_projections(_vec(alpha2, params, values) - params.q_vector)
    reduced, parts = _reduced_C(p1, p2, two_mu(k, direction, params), params, ev)
    return ThreePointResult(normalization_M(k, params, ev) * reduced, tuple(parts))


# shift equations ---------------------------------------------------------------


def _exponents(x, mu: float, params: TodaParams, family: str) -> np.ndarray:
    b = params.b
    if family == "b":
        return shift_exponents(x, params, b) + b * mu
    if family == "-1/b":
        return shift_exponents(x, params, -1 / b) - mu / b
    raise ValueError(f"unknown shift family {family!r}; expected 'b' or '-1/b'")


def _step(n: int, k: int, family: str) -> Charge:
    return h_vec(n, k) * (B if family == "b" else -INV_B)


def _gamma_ratio_product(left: np.ndarray, i: int, j: int, right: np.ndarray) -> SpecialValue:
    out = SpecialValue.one()
    for r in right:
        out = out * gamma_ratio(left[i] + r) / gamma_ratio(left[j] + r)
    return out


def _compare(r1: Phased, r2: Phased, signed: bool) -> ShiftCheck:
    q = r1 / r2
    agree = q.eighths == 0
    if q.magnitude.order != 0:
        return ShiftCheck(math.inf, agree)
    if signed:
        return ShiftCheck(abs(complex(q) - 1), agree)
    return ShiftCheck(abs(math.exp(q.magnitude.log_abs) - 1), agree)


def scalar_shift_ratio(alpha1: Charge, alpha2, kappa, direction: int, i: int, j: int,
                       params: TodaParams, ev: UpsilonEvaluator, family: str = "b",
                       values=None) -> Phased:
    """[C(alpha1 + s_i, alpha2)/C(alpha1 + s_j, alpha2)] / prod_k gamma(A_i+B_k)/gamma(A_j+B_k).

    Depends on alpha1 only when the shift equation holds.
    """
    n = params.n
    mu = 0.5 * two_mu(_kappa_value(kappa, params.b), direction, params)
    ci = scalar_C(alpha1 + _step(n, i, family), alpha2, kappa, direction, params, ev, values)
    cj = scalar_C(alpha1 + _step(n, j, family), alpha2, kappa, direction, params, ev, values)
    a = _exponents(_vec(alpha1, params, values), mu, params, family)
    c = _exponents(_vec(alpha2, params, values), mu, params, family)
    return ci.phased / cj.phased / _gamma_ratio_product(a, i - 1, j - 1, c)


def shift_residual_scalar(alpha1: Charge, alpha2, alpha2_other, kappa, direction: int, i: int, j: int,
                          params: TodaParams, ev: UpsilonEvaluator, family: str = "b",
                          values=None) -> ShiftCheck:
    r1 = scalar_shift_ratio(alpha1, alpha2, kappa, direction, i, j, params, ev, family, values)
    r2 = scalar_shift_ratio(alpha1, alpha2_other, kappa, direction, i, j, params, ev, family, values)
    return _compare(r1, r2, signed=True)


# non-scalar constants -------------------------------------------------------------


def _semideg_data(f3: FieldLabel, b: float) -> tuple[int, float, float]:
    if not f3.is_semidegenerate:
        raise ValueError("third field must be semi-degenerate")
    j = f3.degeneracy.direction
    return j, f3.alpha.coords[j - 1].value(b), f3.alphabar.coords[j - 1].value(b)


def nonscalar_C(f1: FieldLabel, f2: FieldLabel, f3: FieldLabel, params: TodaParams,
                ev: UpsilonEvaluator, values=None, check_neutral: bool = True) -> ThreePointResult:
    """sqrt(C(alpha1, alpha2, kappa) C(alphabar1, alphabar2, kappabar)) when f1 or f2 is scalar."""
    if f1.alpha != f1.alphabar and f2.alpha != f2.alphabar:
        raise ValueError("closed form needs one of the two generic fields to be scalar")
    if check_neutral and neutrality(f1, f2, f3) != (True, True):
        raise ValueError("Z_n charge neutrality violated")
    j, kappa, kappabar = _semideg_data(f3, params.b)
    c = scalar_C(f1.alpha, f2.alpha, kappa, j, params, ev, values)
    cbar = scalar_C(f1.alphabar, f2.alphabar, kappabar, j, params, ev, values)
    return ThreePointResult((c.phased * cbar.phased).sqrt(), c.components + cbar.components)


def shifted_field(f: FieldLabel, k: int, family: str) -> FieldLabel:
    """Shift by b h_k on both sides, or by -h_{sigma(k)}/b and -h_k/b."""
    if family == "b":
        return FieldLabel(f.alpha + _step(f.n, k, "b"), f.alphabar + _step(f.n, k, "b"), f.sigma)
    return FieldLabel(f.alpha + _step(f.n, f.sigma(k), "-1/b"), f.alphabar + _step(f.n, k, "-1/b"), f.sigma)


def nonscalar_shift_ratio(f1: FieldLabel, f2: FieldLabel, f3: FieldLabel, i: int, j: int,
                          params: TodaParams, ev: UpsilonEvaluator, family: str = "b",
                          values=None) -> Phased:
    """Left side of the geometric-mean shift equation divided by its gamma-function side."""
    j3, kappa, kappabar = _semideg_data(f3, params.b)
    mu = 0.5 * two_mu(kappa, j3, params)
    mubar = 0.5 * two_mu(kappabar, j3, params)
    ci = nonscalar_C(shifted_field(f1, i, family), f2, f3, params, ev, values)
    cj = nonscalar_C(shifted_field(f1, j, family), f2, f3, params, ev, values)
    a = _exponents(_vec(f1.alpha, params, values), mu, params, family)
    abar = _exponents(_vec(f1.alphabar, params, values), mubar, params, family)
    c = _exponents(_vec(f2.alpha, params, values), mu, params, family)
    cbar = _exponents(_vec(f2.alphabar, params, values), mubar, params, family)
    hi, hj = (i, j) if family == "b" else (f1.sigma(i), f1.sigma(j))
    prod = _gamma_ratio_product(a, hi - 1, hj - 1, c) * _gamma_ratio_product(abar, i - 1, j - 1, cbar)
    return ci.phased / cj.phased / Phased(prod).sqrt()


def shift_residual_nonscalar(f1: FieldLabel, f2: FieldLabel, f2_other: FieldLabel, f3: FieldLabel,
                             family: str, i: int, j: int, params: TodaParams, ev: UpsilonEvaluator,
                             values=None) -> ShiftCheck:
    """Magnitudes compared; the phase is reported apart since the equation holds up to sign."""
    r1 = nonscalar_shift_ratio(f1, f2, f3, i, j, params, ev, family, values)
    r2 = nonscalar_shift_ratio(f1, f2_other, f3, i, j, params, ev, family, values)
    return _compare(r1, r2, signed=False)
