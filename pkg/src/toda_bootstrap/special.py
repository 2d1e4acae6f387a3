"""gamma(x) = Gamma(x)/Gamma(1-x), the Upsilon function and the double Gamma function.

Everything multiplicative is carried as a ``SpecialValue``: log-magnitude,
sign and an integer order of zero (positive) or pole (negative).  When the
order is nonzero, ``log_abs`` and ``sign`` describe the leading coefficient
of the expansion in a small shift eps of the argument, so ratios of values
with matching orders stay finite and meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import exp1, gammaln

LOG_2PI = math.log(2 * math.pi)
INT_TOL = 1e-11


@dataclass(frozen=True)
class SpecialValue:
    log_abs: float
    sign: int = 1
    order: int = 0

    @classmethod
    def from_float(cls, x: float) -> "SpecialValue":
        if x == 0:
            raise ValueError("use an explicit order to represent a zero")
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    @classmethod
    def one(cls) -> "SpecialValue":
        return cls(0.0, 1, 0)

    def __mul__(self, other) -> "SpecialValue":
        if not isinstance(other, SpecialValue):
            other = SpecialValue.from_float(other)
        return SpecialValue(self.log_abs + other.log_abs, self.sign * other.sign, self.order + other.order)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SpecialValue":
        if not isinstance(other, SpecialValue):
            other = SpecialValue.from_float(other)
        return SpecialValue(self.log_abs - other.log_abs, self.sign * other.sign, self.order - other.order)

    def __rtruediv__(self, other) -> "SpecialValue":
        return SpecialValue.from_float(other) / self

    def __pow__(self, p) -> "SpecialValue":
        order = self.order * p
        if order != int(order):
            raise ValueError("fractional power of a zero or pole")
        if self.sign < 0 and p != int(p):
            raise ValueError("fractional power of a negative value")
        sign = self.sign ** int(p) if p == int(p) else 1
        return SpecialValue(self.log_abs * p, sign, int(order))

    def inverse(self) -> "SpecialValue":
        return SpecialValue(-self.log_abs, self.sign, -self.order)

    @property
    def is_finite(self) -> bool:
        return self.order == 0

    def value(self) -> float:
        if self.order > 0:
            return 0.0
        if self.order < 0:
            return math.copysign(math.inf, self.sign)
        return self.sign * math.exp(self.log_abs)

    def require_finite(self) -> "SpecialValue":
        if self.order != 0:
            kind = "zero" if self.order > 0 else "pole"
            raise ArithmeticError(f"{kind} of order {abs(self.order)} where a finite value was required")
        return self


def _nonpositive_int(x: float) -> int | None:
    k = round(x)
    if k <= 0 and abs(x - k) <= INT_TOL * max(1.0, abs(x)):
        return -k
    return None


def gamma_sv(x: float, slope: float = 1.0) -> SpecialValue:
    """Euler Gamma; at x = -k the leading coefficient of Gamma(x + slope*eps)."""
    k = _nonpositive_int(x)
    if k is not None:
        log_c = -math.lgamma(k + 1) - math.log(abs(slope))
        sign = (-1) ** k * (1 if slope > 0 else -1)
        return SpecialValue(log_c, sign, -1)
    sign = 1
    if x < 0 and math.floor(x) % 2 == 1:
        sign = -1
    return SpecialValue(float(gammaln(x)), sign, 0)


def gamma_ratio(x: float, slope: float = 1.0) -> SpecialValue:
    """gamma(x) = Gamma(x)/Gamma(1-x): zeros at x = 1, 2, ..., poles at x = 0, -1, ..."""
    return gamma_sv(x, slope) / gamma_sv(1.0 - x, -slope)


# small-t Taylor expansions ---------------------------------------------------

SERIES_ORDER = 12


def _series_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(len(num))
    for k in range(len(num)):
        out[k] = (num[k] - np.dot(out[:k], den[k:0:-1])) / den[0]
    return out


def _exp_series(c: float, order: int) -> np.ndarray:
    """Coefficients of exp(c t)."""
    return np.array([c**k / math.factorial(k) for k in range(order)])


def _one_minus_exp_over_t(c: float, order: int) -> np.ndarray:
    """Coefficients of (1 - exp(-c t))/t."""
    return np.array([(-1) ** k * c ** (k + 1) / math.factorial(k + 1) for k in range(order)])


def _upsilon_series(a: float, b: float) -> np.ndarray:
    """Taylor coefficients of [a^2 e^{-t} - sinh^2(at/2)/(sinh(bt/2) sinh(t/2b))]/t."""
    K = SERIES_ORDER + 2
    q, p = b + 1 / b, b - 1 / b
    num = np.zeros(K)
    den = np.zeros(K)
    for k in range(1, K // 2 + 1):
        f = 2 * math.factorial(2 * k)
        num[2 * k - 2] = a ** (2 * k) / f
        den[2 * k - 2] = ((q / 2) ** (2 * k) - (p / 2) ** (2 * k)) / f
    ratio = _series_div(num, den)
    f = a * a * _exp_series(-1.0, K) - ratio
    return f[1 : SERIES_ORDER + 1]


def _gamma_b_series(x: float, b: float) -> np.ndarray:
    """Taylor coefficients of the log double-Gamma integrand near t = 0."""
    K = SERIES_ORDER + 3
    q = b + 1 / b
    a = q / 2 - x
    num = np.array([((-x) ** (k + 1) - (-q / 2) ** (k + 1)) / math.factorial(k + 1) for k in range(K)])
    den = np.convolve(_one_minus_exp_over_t(b, K), _one_minus_exp_over_t(1 / b, K))[:K]
    s = _series_div(num, den)
    bracket = s[1:] - 0.5 * a * a * _exp_series(-1.0, K - 1)
    return bracket[1 : SERIES_ORDER + 1]


def _horner(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 64  # Gauss-Legendre nodes on [0, split]
    tail_nodes: int = 64  # Gauss-Legendre nodes in u = e^{-t} on (0, e^{-split}]
    split: float = 1.0
    series_cutoff: float = 1e-3
    subtract_below: float = 4.0  # exponentials decaying slower than this are integrated exactly
    margin: float = 1e-6

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(
            2 * self.nodes, 2 * self.tail_nodes, self.split, self.series_cutoff, self.subtract_below, self.margin
        )


@lru_cache(maxsize=32)
def _gl(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(nodes)


def _exponential_terms(rates: list[tuple[float, float]], b: float, cutoff: float):
    """Expand sum_r c_r e^{-r t} / ((1 - e^{-bt})(1 - e^{-t/b})) into exponentials below cutoff."""
    out = []
    for coef, r in rates:
        j = 0
        while r + j * b < cutoff:
            k = 0
            while r + j * b + k / b < cutoff:
                out.append((coef, r + j * b + k / b))
                k += 1
            j += 1
    return out


class UpsilonEvaluator:
    """Evaluates Upsilon_b and Gamma_b by quadrature in the strip 0 < x < b + 1/b."""

    def __init__(self, b: float, config: QuadratureConfig | None = None):
        if not b > 0:
            raise ValueError("b must be positive")
        self.b = float(b)
        self.q = self.b + 1 / self.b
        self.config = config or QuadratureConfig()
        cfg = self.config
        x, w = _gl(cfg.nodes)
        self._t_head = 0.5 * cfg.split * (x + 1)
        self._w_head = 0.5 * cfg.split * w
        self._small = self._t_head < cfg.series_cutoff
        # the double-Gamma integrand cancels like 1/t^2, so its series is used
        # further out, well inside the radius 2 pi min(b, 1/b)
        gb_cut = max(cfg.series_cutoff, min(0.2, 0.3 * min(self.b, 1 / self.b)))
        self._small_gb = self._t_head < gb_cut
        umax = math.exp(-cfg.split)
        x, w = _gl(cfg.tail_nodes)
        u = 0.5 * umax * (x + 1)
        self._t_tail = -np.log(u)
        # dt/t = du / (u t)
        self._w_tail = 0.5 * umax * w / (u * self._t_tail)
        self._cache: dict[tuple[str, float], float] = {}

    # strip values ------------------------------------------------------------

    def in_strip(self, x: float) -> bool:
        m = self.config.margin
        return m <= x <= self.q - m

    def _denominator(self, t: np.ndarray) -> np.ndarray:
        # (1 - e^{-bt})(1 - e^{-t/b})
        return np.expm1(-self.b * t) * np.expm1(-t / self.b)

    def log_upsilon_strip(self, x: float) -> float:
        key = ("ups", x)
        if key not in self._cache:
            self._cache[key] = self._log_upsilon_quad(x)
        return self._cache[key]

    def _log_upsilon_quad(self, x: float) -> float:
        if not 0 < x < self.q:
            raise ValueError(f"x = {x} outside the fundamental strip")
        cfg, b = self.config, self.b
        a = self.q / 2 - x
        aa = abs(a)
        m = self.q / 2 - aa

        # [0, split]
        t = self._t_head
        ratio = np.sinh(a * t / 2) ** 2 / (np.sinh(b * t / 2) * np.sinh(t / (2 * b)))
        integrand = (a * a * np.exp(-t) - ratio) / t
        if self._small.any():
            integrand[self._small] = _horner(_upsilon_series(a, b), t[self._small])
        head = float(np.dot(self._w_head, integrand))

        # [split, inf): the ratio equals e^{-mt}(1 - e^{-|a|t})^2 / ((1-e^{-bt})(1-e^{-t/b}))
        terms = _exponential_terms([(1.0, m), (-2.0, m + aa), (1.0, m + 2 * aa)], b, cfg.subtract_below)
        s = cfg.split
        exact = a * a * exp1(s) - sum(c * exp1(r * s) for c, r in terms)
        t = self._t_tail
        full = np.exp(-m * t) * np.expm1(-aa * t) ** 2 / self._denominator(t)
        partial = np.zeros_like(t)
        for c, r in terms:
            partial += c * np.exp(-r * t)
        tail = -float(np.dot(self._w_tail, full - partial))
        return float(head + exact + tail)

    def log_gamma_b_strip(self, x: float) -> float:
        key = ("gb", x)
        if key not in self._cache:
            self._cache[key] = self._log_gamma_b_quad(x)
        return self._cache[key]

    def _log_gamma_b_quad(self, x: float) -> float:
        if not x > 0:
            raise ValueError(f"x = {x} outside the convergence region")
        cfg, b, q = self.config, self.b, self.q
        a = q / 2 - x

        t = self._t_head
        g = (np.exp(-x * t) - np.exp(-q * t / 2)) / self._denominator(t)
        integrand = (g - 0.5 * a * a * np.exp(-t) - a / t) / t
        if self._small_gb.any():
            integrand[self._small_gb] = _horner(_gamma_b_series(x, b), t[self._small_gb])
        head = float(np.dot(self._w_head, integrand))

        terms = _exponential_terms([(1.0, x), (-1.0, q / 2)], b, cfg.subtract_below)
        s = cfg.split
        exact = sum(c * exp1(r * s) for c, r in terms) - 0.5 * a * a * exp1(s) - a / s
        t = self._t_tail
        partial = np.zeros_like(t)
        for c, r in terms:
            partial += c * np.exp(-r * t)
        tail = float(np.dot(self._w_tail, g_full(x, q, b, t) - partial))
        return float(head + exact + tail)

    # analytic continuation -------------------------------------------------

    def _path(self, x: float):
        """Greedy sequence of shifts (+-b or +-1/b) that brings x into the strip."""
        c = self.q / 2
        steps = []
        while not self.in_strip(x):
            s = 1.0 if x < c else -1.0
            xb, xi = x + s * self.b, x + s / self.b
            if abs(xb - c) <= abs(xi - c):
                steps.append((x, s, self.b))
                x = xb
            else:
                steps.append((x, s, 1 / self.b))
                x = xi
        return steps, x

    def upsilon(self, x: float) -> SpecialValue:
        steps, x0 = self._path(x)
        val = SpecialValue(self.log_upsilon_strip(x0))
        for x_from, s, step in reversed(steps):
            # U(y + step) = factor(y) U(y) with factor(y) = gamma(y*step') * b^{...}
            y = x_from if s > 0 else x_from - step
            val = val / self._ups_factor(y, step) if s > 0 else val * self._ups_factor(y, step)
        return val

    def _ups_factor(self, y: float, step: float) -> SpecialValue:
        b = self.b
        if step == b:
            return gamma_ratio(b * y, b) * SpecialValue((1 - 2 * b * y) * math.log(b))
        return gamma_ratio(y / b, 1 / b) * SpecialValue((-1 + 2 * y / b) * math.log(b))

    def gamma_b(self, x: float) -> SpecialValue:
        steps, x0 = self._path(x)
        val = SpecialValue(self.log_gamma_b_strip(x0))
        for x_from, s, step in reversed(steps):
            y = x_from if s > 0 else x_from - step
            val = val / self._gb_factor(y, step) if s > 0 else val * self._gb_factor(y, step)
        return val

    def _gb_factor(self, y: float, step: float) -> SpecialValue:
        # Gamma_b(y + b) = sqrt(2 pi) b^{b y - 1/2} / Gamma(b y) Gamma_b(y), and b -> 1/b
        b = self.b
        if step == b:
            return SpecialValue(0.5 * LOG_2PI + (b * y - 0.5) * math.log(b)) / gamma_sv(b * y, b)
        return SpecialValue(0.5 * LOG_2PI + (-y / b + 0.5) * math.log(b)) / gamma_sv(y / b, 1 / b)

    def log_upsilon(self, x: float) -> float:
        return self.upsilon(x).require_finite().log_abs


def g_full(x: float, q: float, b: float, t: np.ndarray) -> np.ndarray:
    return (np.exp(-x * t) - np.exp(-q * t / 2)) / (np.expm1(-b * t) * np.expm1(-t / b))


_EVALUATORS: dict[tuple[float, QuadratureConfig], UpsilonEvaluator] = {}


def evaluator(b: float, config: QuadratureConfig | None = None) -> UpsilonEvaluator:
    """Shared evaluator per (b, config); construction is the only mutating step."""
    key = (float(b), config or QuadratureConfig())
    ev = _EVALUATORS.get(key)
    if ev is None:
        ev = _EVALUATORS[key] = UpsilonEvaluator(b, key[1])
    return ev


def upsilon(x: float, ev: UpsilonEvaluator) -> SpecialValue:
    return ev.upsilon(x)


def gamma_b(x: float, ev: UpsilonEvaluator) -> SpecialValue:
    return ev.gamma_b(x)
