"""Exact sl_n weight-lattice arithmetic.

Charges are stored in the fundamental-weight basis with coefficients of the
form u + v*b + w/b (u, v, w rational).  Because b**2 is assumed irrational,
two such numbers are equal exactly when their components agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

Rational = Fraction | int


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class CoeffB:
    """The real number u + v*b + w/b."""

    u: Fraction = Fraction(0)
    v: Fraction = Fraction(0)
    w: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "u", _frac(self.u))
        object.__setattr__(self, "v", _frac(self.v))
        object.__setattr__(self, "w", _frac(self.w))

    @classmethod
    def coerce(cls, x) -> "CoeffB":
        if isinstance(x, CoeffB):
            return x
        return cls(_frac(x))

    def __add__(self, other) -> "CoeffB":
        o = CoeffB.coerce(other)
        return CoeffB(self.u + o.u, self.v + o.v, self.w + o.w)

    __radd__ = __add__

    def __neg__(self) -> "CoeffB":
        return CoeffB(-self.u, -self.v, -self.w)

    def __sub__(self, other) -> "CoeffB":
        return self + (-CoeffB.coerce(other))

    def __rsub__(self, other) -> "CoeffB":
        return CoeffB.coerce(other) - self

    def __mul__(self, other) -> "CoeffB":
        if not isinstance(other, CoeffB):
            r = _frac(other)
            return CoeffB(self.u * r, self.v * r, self.w * r)
        a, c = self, other
        if a.v * c.v != 0 or a.w * c.w != 0:
            raise ValueError("product leaves the span of {1, b, 1/b}")
        return CoeffB(
            a.u * c.u + a.v * c.w + a.w * c.v,
            a.u * c.v + a.v * c.u,
            a.u * c.w + a.w * c.u,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CoeffB":
        return self * (1 / _frac(other))

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0 and self.w == 0

    def is_rational(self) -> bool:
        return self.v == 0 and self.w == 0

    def value(self, b: float) -> float:
        return float(self.u) + float(self.v) * b + float(self.w) / b

    def __str__(self) -> str:
        parts = []
        if self.u:
            parts.append(str(self.u))
        if self.v:
            parts.append(f"{self.v}*b")
        if self.w:
            parts.append(f"{self.w}/b")
        return " + ".join(parts) if parts else "0"


ZERO = CoeffB()
ONE = CoeffB(1)
B = CoeffB(0, 1, 0)
INV_B = CoeffB(0, 0, 1)


@dataclass(frozen=True)
class LaurentB:
    """A Laurent polynomial in b with rational coefficients (exact pairings)."""

    terms: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[int, Fraction]) -> "LaurentB":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v != 0)))

    @classmethod
    def from_coeff(cls, c: CoeffB) -> "LaurentB":
        return cls.from_dict({0: c.u, 1: c.v, -1: c.w})

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.terms)

    def __add__(self, other: "LaurentB") -> "LaurentB":
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, Fraction(0)) + v
        return LaurentB.from_dict(d)

    def __mul__(self, other) -> "LaurentB":
        if not isinstance(other, LaurentB):
            other = LaurentB.from_coeff(CoeffB.coerce(other))
        d: dict[int, Fraction] = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                d[k1 + k2] = d.get(k1 + k2, Fraction(0)) + v1 * v2
        return LaurentB.from_dict(d)

    __rmul__ = __mul__

    def coeff(self, power: int) -> Fraction:
        return self.as_dict().get(power, Fraction(0))

    def is_rational(self) -> bool:
        return all(k == 0 for k, _ in self.terms)

    def value(self, b: float) -> float:
        return sum(float(v) * b**k for k, v in self.terms)


@lru_cache(maxsize=None)
def gram(n: int) -> np.ndarray:
    """Gram matrix of fundamental weights, omega_i . omega_j = min(i,j) - ij/n."""
    g = np.empty((n - 1, n - 1))
    for i in range(1, n):
        for j in range(1, n):
            g[i - 1, j - 1] = min(i, j) - i * j / n
    g.setflags(write=False)
    return g


def gram_exact(n: int, i: int, j: int) -> Fraction:
    return Fraction(min(i, j)) - Fraction(i * j, n)


@dataclass(frozen=True)
class Charge:
    """sl_n vector sum_i coords[i] * omega_{i+1}, plus named continuous directions."""

    n: int
    coords: tuple[CoeffB, ...]
    cont: tuple[tuple[str, tuple[CoeffB, ...]], ...] = field(default=())

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rank n must be at least 2")
        coords = tuple(CoeffB.coerce(c) for c in self.coords)
        if len(coords) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)
        cont = []
        for name, vec in sorted(self.cont, key=lambda t: t[0]):
            vec = tuple(CoeffB.coerce(c) for c in vec)
            if len(vec) != self.n - 1:
                raise ValueError(f"direction for {name!r} has wrong length")
            if any(not c.is_zero() for c in vec):
                cont.append((name, vec))
        object.__setattr__(self, "cont", tuple(cont))

    @classmethod
    def zero(cls, n: int) -> "Charge":
        return cls(n, (ZERO,) * (n - 1))

    @classmethod
    def from_omega(cls, n: int, coeffs: Sequence, cont=()) -> "Charge":
        return cls(n, tuple(CoeffB.coerce(c) for c in coeffs), tuple(cont))

    def _check(self, other: "Charge"):
        if self.n != other.n:
            raise ValueError(f"rank mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "Charge") -> "Charge":
        self._check(other)
        coords = tuple(a + c for a, c in zip(self.coords, other.coords))
        cont = dict(self.cont)
        for name, vec in other.cont:
            if name in cont:
                cont[name] = tuple(a + c for a, c in zip(cont[name], vec))
            else:
                cont[name] = vec
        return Charge(self.n, coords, tuple(cont.items()))

    def __neg__(self) -> "Charge":
        return Charge(
            self.n,
            tuple(-c for c in self.coords),
            tuple((k, tuple(-c for c in v)) for k, v in self.cont),
        )

    def __sub__(self, other: "Charge") -> "Charge":
        return self + (-other)

    def __mul__(self, s) -> "Charge":
        return Charge(
            self.n,
            tuple(c * s for c in self.coords),
            tuple((k, tuple(c * s for c in v)) for k, v in self.cont),
        )

    __rmul__ = __mul__

    def __truediv__(self, s) -> "Charge":
        return self * (1 / _frac(s))

    @property
    def has_cont(self) -> bool:
        return bool(self.cont)

    def discrete(self) -> "Charge":
        return Charge(self.n, self.coords)

    def numeric(self, b: float, params: Mapping[str, float] | None = None) -> np.ndarray:
        """Float omega-coordinates at coupling b with continuous parameters bound."""
        x = np.array([c.value(b) for c in self.coords], dtype=float)
        for name, vec in self.cont:
            if params is None or name not in params:
                raise KeyError(f"continuous parameter {name!r} is unbound")
            x = x + params[name] * np.array([c.value(b) for c in vec])
        return x

    def h_coeffs(self) -> tuple[CoeffB, ...]:
        """Coefficients c_k with v = sum_k c_k h_k and c_n = 0."""
        c = [ZERO] * self.n
        acc = ZERO
        for i in range(self.n - 1, 0, -1):
            acc = acc + self.coords[i - 1]
            c[i - 1] = acc
        return tuple(c)

    def __str__(self) -> str:
        s = ", ".join(str(c) for c in self.coords)
        if self.cont:
            s += "; " + ", ".join(k for k, _ in self.cont)
        return f"Charge[n={self.n}]({s})"


def _from_h(n: int, c: Sequence[CoeffB]) -> tuple[CoeffB, ...]:
    return tuple(c[i] - c[i + 1] for i in range(n - 1))


def weight_dot(x: np.ndarray, y: np.ndarray, n: int | None = None) -> float:
    """Pairing of two numeric omega-coordinate vectors."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("rank mismatch")
    if n is None:
        n = x.shape[-1] + 1
    elif x.shape[-1] != n - 1:
        raise ValueError("rank mismatch")
    return x @ gram(n) @ y


def exact_dot(a: Charge, c: Charge) -> LaurentB:
    """Exact pairing of two charges without continuous parts."""
    a._check(c)
    if a.has_cont or c.has_cont:
        raise ValueError("exact pairing needs charges without continuous parameters")
    total = LaurentB()
    for i, x in enumerate(a.coords, start=1):
        if x.is_zero():
            continue
        lx = LaurentB.from_coeff(x)
        for j, y in enumerate(c.coords, start=1):
            if y.is_zero():
                continue
            total = total + lx * LaurentB.from_coeff(y) * gram_exact(a.n, i, j)
    return total


def h_projections(x: np.ndarray) -> np.ndarray:
    """Numeric values v.h_k, k = 1..n, for omega-coordinates x."""
    x = np.asarray(x)
    n = x.shape[-1] + 1
    c = np.zeros(x.shape[:-1] + (n,), dtype=x.dtype)
    c[..., : n - 1] = np.cumsum(x[..., ::-1], axis=-1)[..., ::-1]
    return c - c.mean(axis=-1, keepdims=True)


def omega(n: int, i: int, coeff=ONE) -> Charge:
    if i == 0 or i == n:
        return Charge.zero(n)
    if not 1 <= i <= n - 1:
        raise ValueError(f"omega index {i} out of range for n={n}")
    coords = [ZERO] * (n - 1)
    coords[i - 1] = CoeffB.coerce(coeff)
    return Charge(n, tuple(coords))


def h_vec(n: int, k: int) -> Charge:
    if not 1 <= k <= n:
        raise ValueError(f"h index {k} out of range for n={n}")
    return omega(n, k) - omega(n, k - 1)


def root(n: int, i: int) -> Charge:
    return h_vec(n, i) - h_vec(n, i + 1)


def rho(n: int) -> Charge:
    return Charge(n, (ONE,) * (n - 1))


def background_charge(n: int) -> Charge:
    """Q = (1/b - b) rho."""
    return Charge(n, (CoeffB(0, -1, 1),) * (n - 1))


def standard_vectors(n: int) -> dict:
    if n < 2:
        raise ValueError("n must be at least 2")
    return {
        "e": [root(n, i) for i in range(1, n)],
        "omega": [omega(n, i) for i in range(1, n)],
        "h": [h_vec(n, k) for k in range(1, n + 1)],
        "rho": rho(n),
    }


@dataclass(frozen=True)
class WeylElement:
    """Permutation of {1..n}; perm[i-1] = sigma(i)."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(1, len(perm) + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{len(perm)}")
        object.__setattr__(self, "perm", perm)

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def longest(cls, n: int) -> "WeylElement":
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "WeylElement":
        p = list(range(1, n + 1))
        p[i - 1], p[j - 1] = p[j - 1], p[i - 1]
        return cls(tuple(p))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "WeylElement":
        p = list(range(1, n + 1))
        for cyc in cycles:
            if any(not 1 <= a <= n for a in cyc) or len(set(cyc)) != len(cyc):
                raise ValueError(f"cycle {tuple(cyc)} is not a cycle on 1..{n}")
            for a, c in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                p[a - 1] = c
        return cls(tuple(p))

    def __call__(self, i: int) -> int:
        return self.perm[i - 1]

    def compose(self, other: "WeylElement") -> "WeylElement":
        """(self o other)(i) = self(other(i))."""
        return WeylElement(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> "WeylElement":
        inv = [0] * self.n
        for i, p in enumerate(self.perm, start=1):
            inv[p - 1] = i
        return WeylElement(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = []
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))


def _permute_h(sigma: WeylElement, n: int, coords: Sequence[CoeffB]) -> tuple[CoeffB, ...]:
    c = Charge(n, tuple(coords)).h_coeffs()
    out = [ZERO] * n
    for k in range(1, n + 1):
        out[sigma(k) - 1] = c[k - 1]
    return _from_h(n, out)


def weyl_act(sigma: WeylElement, v: Charge) -> Charge:
    if sigma.n != v.n:
        raise ValueError("rank mismatch")
    coords = _permute_h(sigma, v.n, v.coords)
    cont = tuple((k, _permute_h(sigma, v.n, d)) for k, d in v.cont)
    return Charge(v.n, coords, cont)


def star_act(sigma: WeylElement, alpha: Charge) -> Charge:
    """sigma * alpha = Q + sigma(alpha - Q)."""
    q = background_charge(alpha.n)
    return q + weyl_act(sigma, alpha - q)


def dual(alpha: Charge) -> Charge:
    return -weyl_act(WeylElement.longest(alpha.n), alpha)


@dataclass(frozen=True)
class LatticeSpec:
    kind: str  # "root" or "weight"
    scale: str  # "1", "b" or "1/b"

    def __post_init__(self):
        if self.kind not in ("root", "weight"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.scale not in ("1", "b", "1/b"):
            raise ValueError(f"unknown lattice scale {self.scale!r}")


def lattice_member(v: Charge, spec: LatticeSpec) -> bool:
    if v.has_cont:
        raise ValueError("lattice membership is undefined with continuous parameters")
    comp = {"1": "u", "b": "v", "1/b": "w"}[spec.scale]
    others = [k for k in ("u", "v", "w") if k != comp]
    xs = []
    for c in v.coords:
        if any(getattr(c, k) != 0 for k in others):
            return False
        x = getattr(c, comp)
        if x.denominator != 1:
            return False
        xs.append(int(x))
    if spec.kind == "weight":
        return True
    # the weight lattice modulo the root lattice is Z_n, with omega_i -> i
    return sum(i * x for i, x in enumerate(xs, start=1)) % v.n == 0
