"""Gluing of left and right blocks into a single-valued four-point function, and its checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .blocks import RADIUS, BlockSystem, ExponentData, connection_matrix, exponents_from_vectors
from .kinematics import TodaParams, _vec
from .lattice import B, Charge, background_charge, h_vec
from .nonscalar import FieldLabel, neutrality
from .special import SpecialValue, UpsilonEvaluator, gamma_ratio
from .structure import Phased, scalar_C

DEFAULT_Z = tuple(-0.1 - 0.08 * k for k in range(10))


class NeutralityError(ValueError):
    """The gluing coefficients depend on the column used to solve for them."""

    def __init__(self, spread: float):
        super().__init__(f"X depends on the solving column (relative spread {spread:.3e})")
        self.spread = spread


@dataclass(frozen=True)
class CrossingReport:
    X: np.ndarray
    Y: np.ndarray
    offdiag_residual: float
    consistency_residual: float
    crossing_mismatch: float
    x_spread: float
    sample_points: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "X": [float(x) for x in self.X],
            "Y": [float(y) for y in self.Y],
            "offdiag_residual": self.offdiag_residual,
            "consistency_residual": self.consistency_residual,
            "crossing_mismatch": self.crossing_mismatch,
            "x_spread": self.x_spread,
            "sample_points": list(self.sample_points),
        }


def bootstrap_exponents(f1: FieldLabel, f2: FieldLabel, f3: FieldLabel, params: TodaParams,
                        values=None) -> ExponentData:
    """Exponents of <f2* | Phi_{b w_1}(z) f3(1) | f1> on both chiral halves."""
    if not f3.is_semidegenerate:
        raise ValueError("the field at z = 1 must be semi-degenerate")
    j = f3.degeneracy.direction
    b = params.b
    kappa = f3.alpha.coords[j - 1].value(b)
    kappabar = f3.alphabar.coords[j - 1].value(b)
    hol = exponents_from_vectors(_vec(f1.alpha, params, values), _vec(f2.alpha, params, values), kappa, j, params)
    anti = exponents_from_vectors(
        _vec(f1.alphabar, params, values), _vec(f2.alphabar, params, values), kappabar, j, params
    )
    return replace(hol, Abar=anti.A, Bbar=anti.B, mubar=anti.mu, kappabar=anti.kappa)


def _bar(exp: ExponentData) -> tuple[np.ndarray, np.ndarray]:
    if exp.Abar is None:
        return np.asarray(exp.A), np.asarray(exp.B)
    return np.asarray(exp.Abar), np.asarray(exp.Bbar)


def _matrices(exp: ExponentData):
    A, Bv = np.asarray(exp.A), np.asarray(exp.B)
    Abar, Bbar = _bar(exp)
    return connection_matrix(A, Bv), connection_matrix(Bv, A), connection_matrix(Abar, Bbar)


def x_columns(exp: ExponentData) -> np.ndarray:
    """Row l holds X_j = (M^-1)_{lj} / Mbar_{jl}, normalized to X_1 = 1."""
    _, Minv, Mbar = _matrices(exp)
    cols = Minv / Mbar.T
    return cols / cols[:, :1]


def x_spread(exp: ExponentData) -> float:
    cols = x_columns(exp)
    scale = np.max(np.abs(cols[0]))
    return float(np.max(np.abs(cols - cols[0])) / scale)


def solve_X(exp: ExponentData, tol: float = 1e-8) -> np.ndarray:
    spread = x_spread(exp)
    if not spread <= tol:
        raise NeutralityError(spread)
    return x_columns(exp)[0]


def glue_Y(exp: ExponentData, X: np.ndarray) -> tuple[np.ndarray, float]:
    """Diagonal of M^T X Mbar and its largest off-diagonal entry relative to the diagonal."""
    M, _, Mbar = _matrices(exp)
    full = M.T @ np.diag(X) @ Mbar
    diag = np.diag(full).copy()
    off = full - np.diag(diag)
    return diag, float(np.max(np.abs(off)) / np.max(np.abs(diag)))


def scalar_x_ratio(A: Sequence[float], Bv: Sequence[float], i: int, j: int) -> float:
    """Closed form of X_i/X_j for scalar gluing (0-based indices)."""
    n = len(A)
    v = Phased(SpecialValue.one())
    for k in range(n):
        if k != i:
            v = v * gamma_ratio(A[k] - A[i])
        if k != j:
            v = v / gamma_ratio(A[k] - A[j])
        v = v * gamma_ratio(A[i] + Bv[k]) / gamma_ratio(A[j] + Bv[k])
    return complex(v).real


def consistency_check(exp: ExponentData, i: int, j: int, l: int, m: int) -> float:
    """|LHS - RHS| of the sine-ratio condition for X to be column independent (0-based)."""
    A, Bv = np.asarray(exp.A), np.asarray(exp.B)
    Abar, Bbar = _bar(exp)
    s = lambda x: math.sin(math.pi * x)

    def side(k):
        return s(Abar[i] + Bbar[k]) * s(A[j] + Bv[k]) / (s(A[i] + Bv[k]) * s(Abar[j] + Bbar[k]))

    return abs(side(l) - side(m))


def max_consistency(exp: ExponentData) -> float:
    n = exp.n
    return max(
        (consistency_check(exp, i, j, l, m) for i in range(n) for j in range(n)
         for l in range(n) for m in range(n) if i != j and l != m),
        default=0.0,
    )


def _blocks_everywhere(sys: BlockSystem, z_small: Sequence[float], z_large: Sequence[float],
                       start_f: float = -0.5, start_g: float = -2.0):
    """(f at small z, g at small z by transport, f at large z by transport, g at large z)."""
    n = sys.n
    f_small = np.array([[sys.f(i, z) for i in range(n)] for z in z_small])
    g_large = np.array([[sys.g(k, z) for k in range(n)] for z in z_large])
    g_small = np.empty_like(f_small)
    f_large = np.empty_like(g_large)
    for k in range(n):
        y0 = sys.g_solution(k, start_g).derivatives(start_g, n - 1)
        g_small[:, k] = sys.integrate(y0, start_g, z_small)[:, 0]
        y0 = sys.f_solution(k, start_f).derivatives(start_f, n - 1)
        f_large[:, k] = sys.integrate(y0, start_f, z_large)[:, 0]
    return f_small, g_small, f_large, g_large


def crossing_residual(f1: FieldLabel, f2: FieldLabel, f3: FieldLabel, params: TodaParams,
                      z_list: Sequence[float] = DEFAULT_Z, values=None,
                      check_neutral: bool = True) -> CrossingReport:
    """Compare sum_i X_i |F_i|^2 with sum_k Y_k |G_k|^2 on the negative axis (zbar = z).

    Each z in ``z_list`` (F-domain) is paired with its mirror 1/z (G-domain); the
    blocks outside their series domain come from ODE transport, not from M.
    """
    z_small = [float(z) for z in z_list]
    if any(not (-RADIUS <= z < 0) for z in z_small):
        raise ValueError("sample points must satisfy -0.9 <= z < 0")
    if check_neutral and neutrality(f1, f2, f3) != (True, True):
        raise ValueError("Z_n charge neutrality violated")
    exp = bootstrap_exponents(f1, f2, f3, params, values)
    X = solve_X(exp)
    Y, offdiag = glue_Y(exp, X)
    hol = BlockSystem(exp, check_generic=True)
    anti = BlockSystem(exp.antiholomorphic(), check_generic=True)
    z_large = [1 / z for z in z_small]
    fs, gs, fl, gl = _blocks_everywhere(hol, z_small, z_large)
    fbs, gbs, fbl, gbl = _blocks_everywhere(anti, z_small, z_large)
    worst = 0.0
    for z_set, f, fb, g, gb in ((z_small, fs, fbs, gs, gbs), (z_large, fl, fbl, gl, gbl)):
        for idx, z in enumerate(z_set):
            pref = hol.prefactor(z) * anti.prefactor(z)
            left = pref * np.sum(X * f[idx] * fb[idx])
            right = pref * np.sum(Y * g[idx] * gb[idx])
            worst = max(worst, abs(left - right) / max(abs(left), abs(right)))
    return CrossingReport(
        X=X, Y=Y, offdiag_residual=offdiag, consistency_residual=max_consistency(exp),
        crossing_mismatch=worst, x_spread=x_spread(exp), sample_points=tuple(z_small),
    )


def x_ratio_from_structure(alpha1: Charge, alpha2: Charge, kappa, direction: int, i: int, j: int,
                           params: TodaParams, ev: UpsilonEvaluator, values=None) -> complex:
    """X_i/X_j assembled from three-point constants (1-based indices).

    The constant with the degenerate field uses b omega_1 as the Wyllard insertion.
    """
    n = params.n
    q2 = background_charge(n) * 2

    def factor(k):
        inter = alpha1 + h_vec(n, k) * B
        c_deg = scalar_C(alpha1, q2 - inter, params.b, 1, params, ev, values)
        c_main = scalar_C(inter, alpha2, kappa, direction, params, ev, values)
        return c_deg.phased * c_main.phased

    return complex(factor(i) / factor(j))
