"""W_n kinematics: central charge, conformal weights, degeneracy and fusion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Mapping

import numpy as np

from .lattice import (
    B,
    INV_B,
    Charge,
    CoeffB,
    WeylElement,
    background_charge,
    exact_dot,
    gram,
    h_projections,
    h_vec,
    omega,
    star_act,
)

# fully degenerate charges: b*omega_1, b*omega_{n-1}, -omega_1/b, -omega_{n-1}/b
DEGENERATE_LABELS = ("bw1", "bwn", "-w1/b", "-wn/b")


@dataclass(frozen=True)
class TodaParams:
    n: int
    b: float
    near_rational: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rank n must be at least 2")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError(f"coupling b must be positive, got {self.b}")
        b2 = self.b * self.b
        flag = any(abs(b2 - round(b2 * q) / q) < 1e-6 for q in range(1, 13))
        object.__setattr__(self, "near_rational", flag)

    @property
    def q_scalar(self) -> float:
        return 1.0 / self.b - self.b

    @property
    def q_vector(self) -> np.ndarray:
        return np.full(self.n - 1, self.q_scalar)

    @property
    def c(self) -> float:
        return central_charge(self)


@dataclass(frozen=True)
class WeightData:
    delta: float
    w3: float | None = None


@dataclass(frozen=True)
class DegeneracyTag:
    kind: str  # "generic", "semi-degenerate", "fully-degenerate"
    direction: int | None = None
    kappa: CoeffB | None = None
    label: str | None = None


def central_charge(params: TodaParams) -> float:
    n, q = params.n, params.q_scalar
    return (n - 1) * (1 - n * (n + 1) * q * q)


def _vec(alpha, params: TodaParams, values: Mapping[str, float] | None = None) -> np.ndarray:
    if isinstance(alpha, Charge):
        if alpha.n != params.n:
            raise ValueError(f"rank mismatch: charge n={alpha.n}, params n={params.n}")
        return alpha.numeric(params.b, values)
    x = np.asarray(alpha, dtype=float)
    if x.shape != (params.n - 1,):
        raise ValueError("rank mismatch")
    return x


def delta(alpha, params: TodaParams, values=None) -> float:
    x = _vec(alpha, params, values)
    return 0.5 * x @ gram(params.n) @ (x - 2 * params.q_vector)


def w3_charge(alpha, params: TodaParams, values=None) -> float | complex:
    if params.n != 3:
        raise ValueError("the spin-3 charge is only implemented for n = 3")
    c = central_charge(params)
    if abs(22 + 5 * c) < 1e-14:
        raise ZeroDivisionError("central charge at the pole c = -22/5")
    x = _vec(alpha, params, values) - params.q_vector
    p = h_projections(x)
    pref = 48 / (22 + 5 * c)
    # below c = -22/5 the normalization is imaginary
    root = math.sqrt(pref) if pref > 0 else 1j * math.sqrt(-pref)
    return root * p[0] * p[1] * p[2]


def w3_squared(alpha, params: TodaParams, values=None) -> float:
    """w**2, real even where w itself is imaginary."""
    if params.n != 3:
        raise ValueError("the spin-3 charge is only implemented for n = 3")
    c = central_charge(params)
    x = _vec(alpha, params, values) - params.q_vector
    p = h_projections(x)
    return 48 / (22 + 5 * c) * (p[0] * p[1] * p[2]) ** 2


def weight_data(alpha, params: TodaParams, values=None) -> WeightData:
    w = w3_charge(alpha, params, values) if params.n == 3 else None
    return WeightData(delta(alpha, params, values), w)


def check_semidegenerate_identity(alpha, params: TodaParams, values=None) -> float:
    """|9 w^2 - 2 D^2 (32 D + 2 - c) / (22 + 5 c)|; vanishes on Wyllard lines."""
    d = delta(alpha, params, values)
    c = central_charge(params)
    w2 = w3_squared(alpha, params, values)
    return abs(9 * w2 - 2 * d * d * (32 * d + 2 - c) / (22 + 5 * c))


def semideg_w_constraint(d1: float, w1: float, d2: float, w2: float, d_alpha: float) -> float:
    if d1 == 0 or d2 == 0:
        raise ZeroDivisionError("both semi-degenerate weights must be nonzero")
    return (
        (3 * w2 / (2 * d2)) * (d2 + d_alpha - d1)
        - (3 * w1 / (2 * d1)) * (d1 + d_alpha - d2)
        + 2 * (w1 - w2)
    )


def _root_pairings(alpha: Charge):
    """Exact (alpha - Q).(h_i - h_j) for i < j, split into discrete and continuous parts."""
    n = alpha.n
    shifted = alpha - background_charge(n)
    base = shifted.discrete()
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            e = h_vec(n, i) - h_vec(n, j)
            val = exact_dot(base, e)
            dirs = [exact_dot(Charge(n, d), e) for _, d in shifted.cont]
            yield i, j, val, any(d.terms for d in dirs)


def _in_scaled_integers(val) -> bool:
    d = val.as_dict()
    if set(d) <= {-1} and d.get(-1, Fraction(0)).denominator == 1:
        return True
    if set(d) <= {1} and d.get(1, Fraction(0)).denominator == 1:
        return True
    return False


def is_generic(alpha: Charge, params: TodaParams | None = None) -> bool:
    """Exact test that no (alpha - Q).(h_i - h_j) lies in Z/b or bZ.

    Pairings depending on continuous parameters are generic away from a
    discrete set of parameter values; see ``generic_exceptions``.
    """
    return not any(
        not depends and _in_scaled_integers(val)
        for _, _, val, depends in _root_pairings(alpha)
    )


def generic_exceptions(alpha: Charge) -> list[tuple[int, int]]:
    """Pairs (i, j) whose pairing varies with continuous parameters.

    Genericity fails on the discrete parameter set where such a pairing
    hits Z/b or bZ.
    """
    return [(i, j) for i, j, _, depends in _root_pairings(alpha) if depends]


def degenerate_charge(label: str, n: int) -> Charge:
    if label == "bw1":
        return omega(n, 1, B)
    if label == "bwn":
        return omega(n, n - 1, B)
    if label == "-w1/b":
        return omega(n, 1, -INV_B)
    if label == "-wn/b":
        return omega(n, n - 1, -INV_B)
    raise ValueError(f"unknown degenerate label {label!r}; expected one of {DEGENERATE_LABELS}")


def degenerate_shifts(label: str, n: int) -> list[Charge]:
    sign, scale = {
        "bw1": (1, B),
        "bwn": (-1, B),
        "-w1/b": (-1, INV_B),
        "-wn/b": (1, INV_B),
    }[label]
    return [h_vec(n, j) * (scale * sign) for j in range(1, n + 1)]


def fuse_fully_degenerate(label: str, alpha: Charge, params: TodaParams | None = None) -> list[Charge]:
    if label not in DEGENERATE_LABELS:
        raise ValueError(f"unknown degenerate label {label!r}")
    if not is_generic(alpha):
        raise ValueError("fusion with a non-generic charge may have multiplicities")
    return [alpha + s for s in degenerate_shifts(label, alpha.n)]


def fuse_deg_semideg(direction: int, kappa, params: TodaParams) -> list[Charge]:
    n = params.n
    if direction not in (1, n - 1):
        raise ValueError(f"semi-degenerate direction must be 1 or {n - 1}")
    base = omega(n, direction, CoeffB.coerce(kappa))
    last = 2 if direction == 1 else n
    return [base + h_vec(n, 1) * B, base + h_vec(n, last) * B]


def _star_orbit(alpha: Charge):
    n = alpha.n
    for p in permutations(range(1, n + 1)):
        yield star_act(WeylElement(p), alpha)


def classify_charge(alpha: Charge) -> DegeneracyTag:
    n = alpha.n
    for label in DEGENERATE_LABELS:
        target = degenerate_charge(label, n)
        if any(img == target for img in _star_orbit(alpha)):
            return DegeneracyTag("fully-degenerate", label=label)
    if n >= 3:
        for img in _star_orbit(alpha):
            for j in (1, n - 1):
                others = [k for k in range(n - 1) if k != j - 1]
                vecs = [img.coords] + [d for _, d in img.cont]
                if all(v[k].is_zero() for v in vecs for k in others) and not img.has_cont:
                    return DegeneracyTag("semi-degenerate", direction=j, kappa=img.coords[j - 1])
    return DegeneracyTag("generic")
