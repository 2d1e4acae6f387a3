"""Seeded random configurations used by the verification commands."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .kinematics import is_generic
from .lattice import Charge, CoeffB


def random_rational(rng: np.random.Generator, low: float, high: float, denominator: int = 997) -> Fraction:
    return Fraction(int(rng.integers(round(low * denominator), round(high * denominator))), denominator)


def random_generic_charge(n: int, rng: np.random.Generator, low: float = -0.6, high: float = 0.9) -> Charge:
    """Rational omega-coordinates; the pairings then avoid Z/b and bZ unless they vanish."""
    while True:
        alpha = Charge(n, tuple(CoeffB(random_rational(rng, low, high)) for _ in range(n - 1)))
        if is_generic(alpha) and alpha != Charge.zero(n):
            return alpha


def random_kappa(rng: np.random.Generator, low: float = 0.1, high: float = 0.8) -> Fraction:
    return random_rational(rng, low, high)
