"""Exact arithmetic in cyclotomic fields Q(zeta_m).

An element is stored as integer coordinates over the power basis
1, z, ..., z^(phi(m)-1) of Q(z), z = exp(2 pi i / m), with one common
denominator.  Elements of different conductors are compared and combined in
Q(zeta_lcm).
"""

from __future__ import annotations

import cmath
import functools
import math
from fractions import Fraction
from typing import Iterable


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        out[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return out


def totient(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


@functools.lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Reduced coordinates of z^k for 0 <= k < m."""
    phi = cyclotomic_poly(m)
    d = len(phi) - 1
    rows = []
    cur = [1] + [0] * (d - 1)
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by z and reduce with the monic Phi_m
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi)]
    return tuple(rows)


def _reduce(coeffs: list[int], m: int) -> list[int]:
    phi = cyclotomic_poly(m)
    d = len(phi) - 1
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[i]
        if c:
            s = i - d
            for j in range(d + 1):
                coeffs[s + j] -= c * phi[j]
    coeffs = coeffs[:d] + [0] * max(0, d - len(coeffs))
    return coeffs


class Cyc:
    """An element of Q(zeta_m)."""

    __slots__ = ("m", "num", "den")

    def __init__(self, m: int, num: Iterable[int], den: int = 1):
        num = list(num)
        g = den
        for c in num:
            g = math.gcd(g, c)
        if den < 0:
            g = -abs(g)
        g = g or 1
        self.m = m
        self.num = tuple(c // g for c in num)
        self.den = den // g

    # constructors
    @classmethod
    def rational(cls, x, m: int = 1) -> "Cyc":
        x = Fraction(x)
        d = totient(m)
        return cls(m, [x.numerator] + [0] * (d - 1), x.denominator)

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "Cyc":
        return cls(m, _power_table(m)[k % m])

    @staticmethod
    def coerce(x) -> "Cyc":
        if isinstance(x, Cyc):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyc.rational(x)
        raise TypeError(f"cannot coerce {x!r}")

    def lift(self, L: int) -> "Cyc":
        """The same number written in Q(zeta_L), m | L."""
        if L == self.m:
            return self
        if L % self.m:
            raise ValueError("conductor does not divide")
        step = L // self.m
        table = _power_table(L)
        out = [0] * totient(L)
        for k, c in enumerate(self.num):
            if c:
                row = table[(k * step) % L]
                for j, r in enumerate(row):
                    if r:
                        out[j] += c * r
        return Cyc(L, out, self.den)

    def _common(self, other) -> tuple["Cyc", "Cyc"]:
        other = Cyc.coerce(other)
        if other.m == self.m:
            return self, other
        L = self.m * other.m // math.gcd(self.m, other.m)
        return self.lift(L), other.lift(L)

    # arithmetic
    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyc(a.m, [x * fa + y * fb for x, y in zip(a.num, b.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.m, [-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-Cyc.coerce(other))

    def __rsub__(self, other):
        return Cyc.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return Cyc(self.m, [c * f.numerator for c in self.num], self.den * f.denominator)
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        prod = [0] * (len(a.num) + len(b.num) - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        prod[i + j] += x * y
        return Cyc(a.m, _reduce(prod, a.m), a.den * b.den)

    __rmul__ = __mul__

    def galois(self, j: int) -> "Cyc":
        """Image under zeta_m -> zeta_m^j (gcd(j, m) = 1)."""
        if math.gcd(j, self.m) != 1:
            raise ValueError("not a Galois automorphism")
        table = _power_table(self.m)
        out = [0] * len(self.num)
        for k, c in enumerate(self.num):
            if c:
                for i, r in enumerate(table[(k * j) % self.m]):
                    out[i] += c * r
        return Cyc(self.m, out, self.den)

    def conj(self) -> "Cyc":
        return self.galois(-1 % self.m) if self.m > 2 else self

    def norm(self) -> Fraction:
        out = Cyc.rational(1)
        for j in range(1, self.m + 1):
            if math.gcd(j, self.m) == 1:
                out = out * self.galois(j % self.m or self.m)
        return out.as_fraction()

    def inverse(self) -> "Cyc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0")
        out = Cyc.rational(1)
        for j in range(2, self.m + 1):
            if math.gcd(j, self.m) == 1:
                out = out * self.galois(j % self.m)
        n = (out * self).as_fraction()
        return out * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * Cyc.coerce(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = Cyc.rational(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # comparisons and conversions
    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0] if self.num else 0, self.den)

    def __eq__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        # equality is exact; the hash only needs to agree on equal values
        z = self.to_complex()
        return hash((round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0))

    def to_complex(self) -> complex:
        w = cmath.exp(2j * cmath.pi / self.m)
        return sum(c * w**k for k, c in enumerate(self.num)) / self.den

    def __repr__(self):
        if self.is_rational():
            return str(self.as_fraction())
        terms = []
        for k, c in enumerate(self.num):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.m}^{k}")
        body = " + ".join(terms)
        return f"({body})/{self.den}" if self.den != 1 else f"({body})"


ZERO = Cyc.rational(0)
ONE = Cyc.rational(1)
