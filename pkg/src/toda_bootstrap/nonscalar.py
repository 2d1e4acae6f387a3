"""Non-scalar primary fields: permutation labels, charge constraints, Z_n charges and fusion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .kinematics import DEGENERATE_LABELS, DegeneracyTag, TodaParams, classify_charge, is_generic
from .lattice import (
    B,
    INV_B,
    ZERO,
    Charge,
    CoeffB,
    LatticeSpec,
    WeylElement,
    background_charge,
    exact_dot,
    h_vec,
    lattice_member,
    omega,
    star_act,
    weyl_act,
)

_WEIGHT_OVER_B = LatticeSpec("weight", "1/b")
_WEIGHT_TIMES_B = LatticeSpec("weight", "b")


@dataclass(frozen=True)
class FieldLabel:
    """Primary field with holomorphic charge alpha, antiholomorphic charge alphabar and twist sigma."""

    alpha: Charge
    alphabar: Charge
    sigma: WeylElement
    degeneracy: DegeneracyTag = field(default=DegeneracyTag("generic"))

    def __post_init__(self):
        if self.alpha.n != self.alphabar.n or self.sigma.n != self.alpha.n:
            raise ValueError("rank mismatch inside field label")

    @property
    def n(self) -> int:
        return self.alpha.n

    @property
    def is_scalar(self) -> bool:
        return self.alpha == self.alphabar and self.sigma == WeylElement.identity(self.n)

    @property
    def is_semidegenerate(self) -> bool:
        return self.degeneracy.kind == "semi-degenerate"

    def dual(self) -> "FieldLabel":
        q2 = background_charge(self.n) * 2
        tag = self.degeneracy
        if self.is_semidegenerate:
            # 2Q - kappa omega_j is conjugate to kappa omega_{n-j}
            return semidegenerate_field(self.n, self.n - tag.direction, tag.kappa, _kappabar(self), self.sigma)
        return FieldLabel(q2 - self.alpha, q2 - self.alphabar, self.sigma, tag)


@dataclass(frozen=True)
class MonodromyCharge:
    """Monodromy exponents modulo 1; etahat is None when it is not rational."""

    eta: Fraction
    etahat: Fraction | None


def scalar_field(alpha: Charge) -> FieldLabel:
    return FieldLabel(alpha, alpha, WeylElement.identity(alpha.n), classify_charge(alpha))


def semidegenerate_field(n: int, direction: int, kappa, kappabar=None,
                         sigma: WeylElement | None = None) -> FieldLabel:
    """Wyllard field (kappa omega_j, kappabar omega_j); kappa - kappabar must lie in Z/b.

    A twist sigma is optional; at n = 2 every charge is on the omega_1 line and
    the half-integer fields of the sl_2 classification are semi-degenerate too.
    """
    if direction not in (1, n - 1):
        raise ValueError(f"semi-degenerate direction must be 1 or {n - 1}")
    kappa = CoeffB.coerce(kappa)
    kappabar = kappa if kappabar is None else CoeffB.coerce(kappabar)
    sigma = WeylElement.identity(n) if sigma is None else sigma
    tag = DegeneracyTag("semi-degenerate", direction=direction, kappa=kappa)
    return FieldLabel(omega(n, direction, kappa), omega(n, direction, kappabar), sigma, tag)


def _kappabar(f: FieldLabel) -> CoeffB:
    return f.alphabar.coords[f.degeneracy.direction - 1]


def semideg_nonscalar_check(kappa, kappabar) -> bool:
    d = CoeffB.coerce(kappa) - CoeffB.coerce(kappabar)
    return d.u == 0 and d.v == 0 and d.w.denominator == 1


def verify_constraints(f: FieldLabel) -> bool:
    if f.is_semidegenerate:
        j = f.degeneracy.direction
        on_line = all(
            c.is_zero() for v in (f.alpha, f.alphabar) for k, c in enumerate(v.coords) if k != j - 1
        )
        if f.alpha.has_cont or f.alphabar.has_cont or not on_line:
            return False
        if not semideg_nonscalar_check(f.alpha.coords[j - 1], _kappabar(f)):
            return False
        if f.sigma == WeylElement.identity(f.n):
            return True
        return lattice_member(f.alpha - star_act(f.sigma, f.alphabar), _WEIGHT_TIMES_B)
    first = f.alpha - f.alphabar
    second = f.alpha - star_act(f.sigma, f.alphabar)
    if first.has_cont or second.has_cont:
        return False
    return lattice_member(first, _WEIGHT_OVER_B) and lattice_member(second, _WEIGHT_TIMES_B)


def _power_coeff(v: Charge, power: int) -> Fraction:
    """h_1.v when it equals c * b**power exactly."""
    d = exact_dot(h_vec(v.n, 1), v).as_dict()
    if set(d) - {power}:
        raise ValueError("monodromy exponent is not rational")
    return d.get(power, Fraction(0))


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def monodromy_charges(f: FieldLabel, params: TodaParams | None = None) -> MonodromyCharge:
    if not verify_constraints(f):
        raise ValueError("field label violates the charge constraints")
    diff = f.alpha - f.alphabar
    eta = _mod1(_power_coeff(diff, -1))
    second = f.alpha - star_act(f.sigma, f.alphabar)
    try:
        etahat = _mod1(-_power_coeff(second, 1))
    except ValueError:
        etahat = None
    return MonodromyCharge(eta, etahat)


def neutrality(f1: FieldLabel, f2: FieldLabel, f3: FieldLabel) -> tuple[bool, bool]:
    charges = [monodromy_charges(f) for f in (f1, f2, f3)]
    eta_ok = sum((c.eta for c in charges), Fraction(0)).denominator == 1
    if any(c.etahat is None for c in charges):
        return eta_ok, False
    hat_ok = sum((c.etahat for c in charges), Fraction(0)).denominator == 1
    return eta_ok, hat_ok


# constructors ----------------------------------------------------------------


def _half_integer(x) -> Fraction:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise ValueError(f"{x} is not a half-integer")
    return x


def make_field_sl2(r, s, params: TodaParams | None = None, semidegenerate: bool = False) -> FieldLabel:
    """Half-integer Kac indices (r, s); dimensions (Delta_{r,s}, Delta_{-r,s}).

    With ``semidegenerate`` the same charges are tagged as the omega_1-line
    field sitting at z = 1 in the four-point function.
    """
    r, s = _half_integer(r), _half_integer(s)
    kappa = CoeffB(0, -(1 - s), 1 - r)
    kappabar = CoeffB(0, -(1 - s), 1 + r)
    sigma = WeylElement.transposition(2, 1, 2)
    if semidegenerate:
        return semidegenerate_field(2, 1, kappa, kappabar, sigma)
    return FieldLabel(omega(2, 1, kappa), omega(2, 1, kappabar), sigma)


def kac_charge3(n1, m1, n2, m2) -> Charge:
    """[(1 - n1)/b - (1 - m1) b] omega_1 + [(1 - n2)/b - (1 - m2) b] omega_2."""
    n1, m1, n2, m2 = map(Fraction, (n1, m1, n2, m2))
    return Charge(3, (CoeffB(0, m1 - 1, 1 - n1), CoeffB(0, m2 - 1, 1 - n2)))


def _third_lattice(a, c) -> tuple[Fraction, Fraction]:
    a, c = Fraction(a), Fraction(c)
    if (3 * a).denominator != 1 or (3 * c).denominator != 1 or (a - c).denominator != 1:
        raise ValueError("indices must lie in Z/3 with an integer difference")
    return a, c


def make_field_sl3(kind: str, indices: Sequence = (), beta: CoeffB | str | None = None,
                   params: TodaParams | None = None) -> FieldLabel:
    """sl_3 fields by conjugacy class.

    identity: ``beta`` is the charge itself (a Charge, or a parameter name).
    cyclic: indices (n1, n2, m1, m2), sigma = (123).
    transposition: integer indices (r, s) and a real ``beta`` along h_3, sigma = (12).
    """
    n = 3
    q = background_charge(n)
    if kind == "identity":
        if isinstance(beta, Charge):
            alpha = beta
        elif isinstance(beta, str):
            alpha = Charge(n, (ZERO, ZERO), ((beta + "_1", (1, 0)), (beta + "_2", (0, 1))))
        else:
            raise ValueError("identity class needs a charge or a parameter name")
        return FieldLabel(alpha, alpha, WeylElement.identity(n))
    if kind == "cyclic":
        n1, n2, m1, m2 = indices
        n1, n2 = _third_lattice(n1, n2)
        m1, m2 = _third_lattice(m1, m2)
        sigma = WeylElement.from_cycles(n, [(1, 2, 3)])
        nu = Charge(n, (n1, n2))
        m = Charge(n, (m1, m2))
        alphabar = q + m * B - nu * INV_B
        alpha = q + m * B - weyl_act(sigma, nu) * INV_B
        return FieldLabel(alpha, alphabar, sigma)
    if kind == "transposition":
        r, s = map(Fraction, indices)
        # the h_3 parts of alpha and alphabar agree, so e_1/2 steps would leave R*
        if r.denominator != 1 or s.denominator != 1:
            raise ValueError("transposition indices must be integers for n = 3")
        if beta is None:
            beta = ZERO
        h3 = h_vec(n, 3)
        if isinstance(beta, str):
            base = q + Charge(n, (ZERO, ZERO), ((beta, h3.coords),))
        else:
            base = q + h3 * CoeffB.coerce(beta)
        e1 = h_vec(n, 1) - h_vec(n, 2)
        alpha = base + e1 * CoeffB(0, s / 2, -r / 2)
        alphabar = base + e1 * CoeffB(0, s / 2, r / 2)
        return FieldLabel(alpha, alphabar, WeylElement.transposition(n, 1, 2))
    raise ValueError(f"unknown conjugacy class {kind!r}")


def _pairwise_integral(xs: Sequence[Fraction]) -> bool:
    return all((x - xs[0]).denominator == 1 for x in xs)


def make_field_sln(sigma: WeylElement, r: Sequence, s: Sequence,
                   base: Mapping[int, CoeffB | str] | None = None,
                   params: TodaParams | None = None) -> FieldLabel:
    """Field with sigma-twist built cycle by cycle in h-coordinates.

    With a_k, abar_k the h-coordinates of alpha - Q and alphabar - Q:
    a_k - abar_k = r_k / b and a_{sigma(k)} - abar_k = b s_{sigma(k)}.
    ``r`` and ``s`` sum to zero on every cycle and have integer differences.
    ``base`` gives abar at each cycle leader (smallest element): a CoeffB,
    or a parameter name for a continuous mode.
    """
    n = sigma.n
    r = [Fraction(x) for x in r]
    s = [Fraction(x) for x in s]
    if len(r) != n or len(s) != n:
        raise ValueError(f"expected {n} entries in r and s")
    if not (_pairwise_integral(r) and _pairwise_integral(s)):
        raise ValueError("r and s entries must differ by integers")
    base = dict(base or {})
    abar: list[CoeffB] = [ZERO] * n
    cont_dirs: dict[str, list[CoeffB]] = {}
    for cyc in sigma.cycles():
        if sum(r[k - 1] for k in cyc) != 0 or sum(s[k - 1] for k in cyc) != 0:
            raise ValueError(f"r and s must sum to zero on the cycle {cyc}")
        lead = min(cyc)
        start = base.get(lead, ZERO)
        if isinstance(start, str):
            cont_dirs[start] = [CoeffB(1) if k in cyc else ZERO for k in range(1, n + 1)]
            start = ZERO
        k = lead
        val = CoeffB.coerce(start)
        for _ in cyc:
            abar[k - 1] = val
            nxt = sigma(k)
            val = val + CoeffB(0, s[nxt - 1], -r[nxt - 1])
            k = nxt
    a = [abar[k] + CoeffB(0, 0, r[k]) for k in range(n)]
    q = background_charge(n)

    def from_h(coeffs):
        out = Charge.zero(n)
        for k, c in enumerate(coeffs, start=1):
            if not c.is_zero():
                out = out + h_vec(n, k) * c
        return out

    cont = tuple((name, from_h(vec).coords) for name, vec in cont_dirs.items())
    alpha = q + from_h(a) + Charge(n, (ZERO,) * (n - 1), cont)
    alphabar = q + from_h(abar) + Charge(n, (ZERO,) * (n - 1), cont)
    return FieldLabel(alpha, alphabar, sigma)


# fusion ------------------------------------------------------------------------


def fuse_nonscalar_degenerate(f: FieldLabel, label: str, params: TodaParams | None = None) -> list[FieldLabel]:
    if label not in DEGENERATE_LABELS:
        raise ValueError(f"unknown degenerate label {label!r}")
    if f.is_semidegenerate or not (is_generic(f.alpha) and is_generic(f.alphabar)):
        raise ValueError("fusion rules hold only for generic fields")
    n, sigma = f.n, f.sigma
    out = []
    for j in range(1, n + 1):
        if label == "bw1":
            da, dab = h_vec(n, j) * B, h_vec(n, j) * B
        elif label == "bwn":
            da, dab = h_vec(n, j) * (-B), h_vec(n, j) * (-B)
        elif label == "-w1/b":
            da, dab = h_vec(n, sigma(j)) * (-INV_B), h_vec(n, j) * (-INV_B)
        else:
            da, dab = h_vec(n, sigma(j)) * INV_B, h_vec(n, j) * INV_B
        out.append(FieldLabel(f.alpha + da, f.alphabar + dab, sigma))
    return out


def conjugate_label(label: str) -> str:
    return {"bw1": "bwn", "bwn": "bw1", "-w1/b": "-wn/b", "-wn/b": "-w1/b"}[label]


def conjugated(f: FieldLabel, mu: WeylElement) -> FieldLabel:
    """(mu*alpha, mu*alphabar, mu sigma mu^-1)."""
    return FieldLabel(
        star_act(mu, f.alpha),
        star_act(mu, f.alphabar),
        mu.compose(f.sigma).compose(mu.inverse()),
        f.degeneracy,
    )

