"""Hypergeometric conformal blocks of the degenerate four-point function.

The reduced correlator f(z) solves the order-n Fuchsian equation

    z (D + B_1) ... (D + B_n) f = (D - A_1) ... (D - A_n) f,    D = z d/dz,

with regular singular points 0, 1 and infinity.  Blocks are only evaluated on
the negative real axis, where every power (-z)**e is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .kinematics import TodaParams, delta, is_generic
from .lattice import B, Charge, h_projections, omega
from .special import SpecialValue, gamma_sv

RADIUS = 0.9
SERIES_RTOL = 1e-14
MAX_TERMS = 100_000


# generalized hypergeometric series -----------------------------------------


def _check_lower(lower: Sequence[float]):
    for c in lower:
        k = round(c)
        if k <= 0 and abs(c - k) < 1e-12:
            raise ZeroDivisionError(f"lower parameter {c} is a non-positive integer")


def pfq_terms(upper: Sequence[float], lower: Sequence[float], z: float, radius: float = RADIUS,
              weight_power: int = 0) -> np.ndarray:
    """Terms T_m of sum_m prod(a)_m / prod(c)_m z^m / m!, truncated adaptively.

    Summation stops once three consecutive terms, weighted by (m + 1)**weight_power,
    fall below 1e-14 of the running sum. A positive weight keeps the series for
    the derivatives D^j (j <= weight_power) converged as well.
    """
    if len(upper) != len(lower) + 1:
        raise ValueError("expected p = q + 1 parameters")
    if abs(z) > radius:
        raise ValueError(f"|z| = {abs(z)} exceeds the series radius guard {radius}")
    _check_lower(lower)
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    terms = [1.0]
    total = 1.0
    t = 1.0
    small = 0
    m = 0
    while True:
        t *= z * np.prod(upper + m) / (np.prod(lower + m) * (m + 1))
        m += 1
        terms.append(t)
        total += t
        if t == 0.0:
            break
        small = small + 1 if abs(t) * (m + 1) ** weight_power < SERIES_RTOL * abs(total) else 0
        if small >= 3:
            break
        if m > MAX_TERMS:
            raise ArithmeticError("hypergeometric series did not converge")
    return np.asarray(terms)


def pfq_series(upper: Sequence[float], lower: Sequence[float], z: float, radius: float = RADIUS) -> float:
    return float(math.fsum(pfq_terms(upper, lower, z, radius)))


# exponent data -------------------------------------------------------------


@dataclass(frozen=True)
class ExponentData:
    A: tuple[float, ...]
    B: tuple[float, ...]
    mu: float
    j: int
    kappa: float
    b: float
    delta_deg: float  # conformal weight of the b*omega_1 field
    Abar: tuple[float, ...] | None = None
    Bbar: tuple[float, ...] | None = None
    mubar: float | None = None
    kappabar: float | None = None

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def bmu(self) -> float:
        return self.b * self.mu

    def riemann_scheme(self) -> dict[str, list[Fraction]]:
        """Exponents at 0, 1 and infinity, exact in the binary values of A and B."""
        A = [Fraction(a) for a in self.A]
        Bs = [Fraction(x) for x in self.B]
        n = self.n
        at_one = [Fraction(k) for k in range(n - 1)] + [n - 1 - sum(A) - sum(Bs)]
        return {"0": A, "1": at_one, "inf": Bs}

    def exponent_sum(self) -> Fraction:
        return sum((sum(v, Fraction(0)) for v in self.riemann_scheme().values()), Fraction(0))

    def antiholomorphic(self) -> "ExponentData":
        if self.Abar is None:
            return self
        return replace(
            self, A=self.Abar, B=self.Bbar, mu=self.mubar, kappa=self.kappabar,
            Abar=self.A, Bbar=self.B, mubar=self.mu, kappabar=self.kappa,
        )


def two_mu(kappa: float, j: int, params: TodaParams) -> float:
    n = params.n
    if j == n - 1:
        return kappa / n
    if j == 1:
        return params.q_scalar - kappa / n
    raise ValueError(f"direction must be 1 or {n - 1}")


def shift_exponents(x: np.ndarray, params: TodaParams, step: float) -> np.ndarray:
    """Delta(alpha + step*h_i) - Delta(alpha) for every i, in closed form."""
    n = params.n
    p = h_projections(np.asarray(x, dtype=float) - params.q_vector)
    return step * p + 0.5 * step * step * (1 - 1 / n)


def exponents_from_charges(
    alpha1: Charge,
    alpha2: Charge,
    kappa: float,
    j: int,
    params: TodaParams,
    values=None,
    check_generic: bool = True,
) -> ExponentData:
    """Exponents for <alpha2* | Phi_{b omega_1}(z) Phi_{kappa omega_j}(1) | alpha1>."""
    if check_generic:
        for a in (alpha1, alpha2):
            if not is_generic(a):
                raise ValueError(f"charge {a} is not generic")
    b = params.b
    mu = 0.5 * two_mu(kappa, j, params)
    x1 = alpha1.numeric(b, values)
    x2 = alpha2.numeric(b, values)
    A = shift_exponents(x1, params, b) + b * mu
    Bv = shift_exponents(x2, params, b) + b * mu
    d = delta(omega(params.n, 1, B), params)
    return ExponentData(tuple(A), tuple(Bv), mu, j, float(kappa), b, d)


def exponents_from_vectors(x1, x2, kappa: float, j: int, params: TodaParams) -> ExponentData:
    """Same as exponents_from_charges for numeric omega-coordinates."""
    b = params.b
    mu = 0.5 * two_mu(kappa, j, params)
    A = shift_exponents(x1, params, b) + b * mu
    Bv = shift_exponents(x2, params, b) + b * mu
    d = delta(omega(params.n, 1, B), params)
    return ExponentData(tuple(A), tuple(Bv), mu, j, float(kappa), b, d)


# ODE -----------------------------------------------------------------------


def _poly_from_roots(roots: Sequence[float]) -> np.ndarray:
    """Coefficients, lowest degree first, of prod (x - r)."""
    c = np.array([1.0])
    for r in roots:
        c = np.convolve(c, [-r, 1.0])
    return c


def ode_polynomials(A: Sequence[float], Bv: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """(p, q) with prod(D - A_k) = sum p_m D^m and prod(D + B_k) = sum q_m D^m."""
    return _poly_from_roots(A), _poly_from_roots([-x for x in Bv])


def indicial_at_one(A: Sequence[float], Bv: Sequence[float]) -> np.ndarray:
    """Indicial polynomial of the ODE at z = 1 (lowest degree first).

    Expanding D^m = sum_k S(m, k) z^k d^k/dz^k (Stirling numbers of the
    second kind) gives the coefficient c_k(z) of the k-th derivative; with
    w = z - 1 the leading behaviour of w^rho fixes the indicial equation
    -[rho]_n + c_{n-1}(1) [rho]_{n-1} = 0, [rho]_k the falling factorial.
    """
    n = len(A)
    p, q = ode_polynomials(A, Bv)
    c_nm1 = sum((p[m] - q[m]) * _stirling2(m, n - 1) for m in range(n + 1))
    falling = np.array([1.0])
    for k in range(n - 1):
        falling = np.convolve(falling, [-k, 1.0])
    factor = np.array([c_nm1 + (n - 1), -1.0])
    return np.convolve(falling, factor)


def _stirling2(m: int, k: int) -> int:
    if m == k:
        return 1
    if k == 0 or k > m:
        return 0
    return k * _stirling2(m - 1, k) + _stirling2(m - 1, k - 1)


@dataclass(frozen=True)
class Solution:
    """f = sum_m d[m] (-z)**e[m] on the negative real axis."""

    d: np.ndarray
    e: np.ndarray

    def derivatives(self, z: float, order: int) -> np.ndarray:
        """(f, Df, ..., D^order f) at z < 0."""
        powers = self.d * np.exp(self.e * math.log(-z))
        return np.array([float(math.fsum(powers * self.e**k)) for k in range(order + 1)])


def _residual(A, Bv, sol: Solution, z: float) -> float:
    p, q = ode_polynomials(A, Bv)
    base = sol.d * np.exp(sol.e * math.log(-z))
    # z (-z)^e = -(-z)^{e+1}
    terms = base * (np.polyval(p[::-1], sol.e) + (-z) * np.polyval(q[::-1], sol.e))
    scale = np.sum(np.abs(base * np.polyval(p[::-1], sol.e))) + np.sum(np.abs(base * (-z) * np.polyval(q[::-1], sol.e)))
    return abs(math.fsum(terms)) / scale


class BlockSystem:
    """Blocks around z = 0 (F) and z = infinity (G) with their connection matrix."""

    def __init__(self, exponents: ExponentData, check_generic: bool = True):
        self.exponents = exponents
        A = np.asarray(exponents.A, dtype=float)
        Bv = np.asarray(exponents.B, dtype=float)
        if check_generic:
            for name, v in (("A", A), ("B", Bv)):
                d = v[:, None] - v[None, :]
                off = d[~np.eye(len(v), dtype=bool)]
                if np.any(np.abs(off - np.round(off)) < 1e-10):
                    raise ValueError(f"two {name} exponents differ by an integer")
        self.A = A
        self.B = Bv
        self.n = len(A)
        self.M = connection_matrix(A, Bv)
        self.Minv = connection_matrix(Bv, A)
        self._pq = ode_polynomials(A, Bv)

    # series data
    def _f_params(self, i: int):
        A, Bv = self.A, self.B
        upper = Bv + A[i]
        lower = np.delete(1 - A + A[i], i)
        return upper, lower

    def _g_params(self, i: int):
        A, Bv = self.A, self.B
        upper = A + Bv[i]
        lower = np.delete(1 - Bv + Bv[i], i)
        return upper, lower

    def f_solution(self, i: int, z: float) -> Solution:
        if not (z < 0 and abs(z) <= RADIUS):
            raise ValueError("F-blocks need -0.9 <= z < 0")
        t = pfq_terms(*self._f_params(i), z, weight_power=self.n)
        m = np.arange(len(t))
        # z^m = (-1)^m (-z)^m
        return Solution(t / (-z) ** m, self.A[i] + m)

    def g_solution(self, i: int, z: float) -> Solution:
        if not (z < 0 and abs(1 / z) <= RADIUS):
            raise ValueError("G-blocks need z <= -1/0.9")
        t = pfq_terms(*self._g_params(i), 1 / z, weight_power=self.n)
        m = np.arange(len(t))
        return Solution(t * (-z) ** m, -self.B[i] - m)

    def f(self, i: int, z: float) -> float:
        upper, lower = self._f_params(i)
        return (-z) ** self.A[i] * pfq_series(upper, lower, z)

    def g(self, i: int, z: float) -> float:
        upper, lower = self._g_params(i)
        return (-z) ** (-self.B[i]) * pfq_series(upper, lower, 1 / z)

    def prefactor(self, z: float) -> float:
        ex = self.exponents
        return (1 - z) ** (2 * ex.bmu) * (-z) ** (-ex.bmu - ex.delta_deg)

    def F(self, i: int, z: float) -> float:
        return self.prefactor(z) * self.f(i, z)

    def G(self, i: int, z: float) -> float:
        return self.prefactor(z) * self.g(i, z)

    def ode_residual(self, z: float, i: int | None = None, ode: tuple | None = None) -> float:
        A, Bv = ode if ode is not None else (self.A, self.B)
        idx = range(self.n) if i is None else [i]
        if abs(z) < 1:
            sols = [self.f_solution(k, z) for k in idx]
        else:
            sols = [self.g_solution(k, z) for k in idx]
        return max(_residual(A, Bv, s, z) for s in sols)

    def _rhs(self, x: float, y: np.ndarray) -> np.ndarray:
        z = -math.exp(x)
        p, q = self._pq
        top = -np.dot(p[:-1] - z * q[:-1], y) / (1 - z)
        return np.append(y[1:], top)

    def integrate(self, y0: np.ndarray, z_from: float, z_targets: Sequence[float]) -> np.ndarray:
        """Carry the state (f, Df, ..., D^{n-1} f) from z_from to each target on the negative axis.

        Works in x = log(-z) so that D = d/dx; returns one state per target.
        """
        if z_from >= 0 or any(z >= 0 for z in z_targets):
            raise ValueError("transport runs along the negative real axis")
        x0 = math.log(-z_from)
        xs = [math.log(-z) for z in z_targets]
        end = max(xs, key=lambda x: abs(x - x0))
        sol = solve_ivp(
            self._rhs,
            (x0, end),
            np.asarray(y0, dtype=float),
            method="DOP853",
            rtol=1e-12,
            atol=1e-14 * np.max(np.abs(y0)),
            max_step=1e-2,
            dense_output=True,
        )
        if not sol.success:
            raise ArithmeticError(f"ODE transport failed: {sol.message}")
        if any((x - x0) * (end - x0) < 0 for x in xs):
            raise ValueError("all transport targets must lie on one side of the start point")
        return np.array([sol.sol(x) if x != x0 else np.asarray(y0, dtype=float) for x in xs])

    def transport(self, i: int, z_from: float, z_to: float) -> np.ndarray:
        """D^k f_i carried from z_from to z_to."""
        y0 = self.f_solution(i, z_from).derivatives(z_from, self.n - 1)
        return self.integrate(y0, z_from, [z_to])[0]

    def verify_connection(self, z_from: float = -0.5, z_to: float = -2.0, M: np.ndarray | None = None) -> float:
        if not -0.9 < z_from < -0.1 or not -10 < z_to < -1.1:
            raise ValueError("transport endpoints outside the verified domain")
        M = self.M if M is None else M
        g = np.array([self.g(j, z_to) for j in range(self.n)])
        worst = 0.0
        for i in range(self.n):
            moved = self.transport(i, z_from, z_to)[0]
            direct = M[i] @ g
            scale = max(abs(moved), np.max(np.abs(M[i] * g)))
            worst = max(worst, abs(moved - direct) / scale)
        return worst


def connection_matrix(A: Sequence[float], Bv: Sequence[float]) -> np.ndarray:
    """M_ij = prod_{k!=i} G(1+A_i-A_k)/G(1-B_j-A_k) * prod_{l!=j} G(B_l-B_j)/G(B_l+A_i)."""
    A = np.asarray(A, dtype=float)
    Bv = np.asarray(Bv, dtype=float)
    n = len(A)
    M = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            v = SpecialValue.one()
            for k in range(n):
                if k != i:
                    v = v * gamma_sv(1 + A[i] - A[k]) / gamma_sv(1 - Bv[j] - A[k])
            for l in range(n):
                if l != j:
                    v = v * gamma_sv(Bv[l] - Bv[j]) / gamma_sv(Bv[l] + A[i])
            if v.order < 0:
                raise ArithmeticError("connection coefficient hits a Gamma pole")
            M[i, j] = v.value()
    return M


def block_F(i: int, z: float, sys: BlockSystem) -> float:
    return sys.F(i, z)


def block_G(i: int, z: float, sys: BlockSystem) -> float:
    return sys.G(i, z)


def ode_residual(sys: BlockSystem, z: float) -> float:
    return sys.ode_residual(z)


def verify_connection(sys: BlockSystem, z_from: float, z_to: float) -> float:
    return sys.verify_connection(z_from, z_to)
