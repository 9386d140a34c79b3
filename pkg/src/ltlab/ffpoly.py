"""Exact arithmetic in finite fields and truncated polynomial rings.

A field F_{p^m} is described by a FieldDesc.  Elements are encoded as integers
c_0 + c_1 p + ... + c_{m-1} p^{m-1}, the coefficient vector of the element in
the power basis of the chosen modulus.  The lexicographically smallest monic
irreducible modulus is always used, so encodings are reproducible.

Multiplication goes through discrete log tables which are built once per
field with numpy, which also gives vectorised arithmetic on arrays of codes.

RingDesc/PolyElem implement sparse multivariate polynomials over such a field
with per-variable truncation caps and monic rewrite rules, reduced to a normal
form under the graded lexicographic order.
"""

from __future__ import annotations

import functools
import heapq
import itertools
import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

Rational = Fraction

DEFAULT_FIELD_CAP = 2**20


# ---------------------------------------------------------------- integers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ------------------------------------------------- polynomials over F_p (lists)
# Coefficient lists are low degree first and carry no trailing zeros.


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def pmod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        s = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[s + i] = (a[s + i] - c * bi) % p
        _trim(a)
    return a


def pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def ppowmod(a: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = pmod(a, mod, p)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, p), mod, p)
        base = pmod(pmul(base, base, p), mod, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    for r in prime_factors(n):
        h = ppowmod(x, p ** (n // r), f, p)
        if len(pgcd(f, psub(h, x, p), p)) > 1:
            return False
    return not psub(ppowmod(x, p**n, f, p), x, p)


def _irreducible_ddf(f: Sequence[int], p: int) -> bool:
    """Irreducibility by distinct-degree factorisation with numpy arithmetic.

    gcd(f, x^(p^i) - x) = 1 for i <= n/2 means f has no factor of degree
    <= n/2; reducible candidates usually fail at small i.
    """
    n = len(f) - 1
    f_arr = np.array(f, dtype=np.int64)
    # reduction matrix: rows are x^(n+j) mod f for j < n - 1
    R = np.zeros((max(n - 1, 1), n), dtype=np.int64)
    cur = (-f_arr[:n]) % p
    for j in range(n - 1):
        R[j] = cur
        top = cur[-1]
        cur = np.concatenate([[0], cur[:-1]])
        cur = (cur - top * f_arr[:n]) % p

    def mulmod(a, b):
        c = np.convolve(a, b) % p
        return (c[:n] + c[n:] @ R[: len(c) - n]) % p if len(c) > n else np.pad(c, (0, n - len(c)))

    def powp(a):
        out = np.zeros(n, dtype=np.int64)
        out[0] = 1
        base, e = a, p
        while e:
            if e & 1:
                out = mulmod(out, base)
            base = mulmod(base, base)
            e >>= 1
        return out

    x = np.zeros(n, dtype=np.int64)
    x[1 % n] = 1
    h = x.copy()
    for _ in range(n // 2):
        h = powp(h)
        d = (h - x) % p
        if len(pgcd(list(f), [int(c) for c in d], p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    test = is_irreducible if m < 8 else _irreducible_ddf
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        # most significant coefficient first in the lexicographic order
        f = low + [1]
        if low[0] and test(f, p):
            return tuple(f)
        if m == 1 and test(f, p):
            return tuple(f)
    raise ValueError("no irreducible polynomial found")


def _lex_order_codes(p: int, m: int):
    """Codes of c_0..c_{m-1} in lexicographic order of (c_{m-1}, ..., c_0)."""
    return range(p**m)


# --------------------------------------------------------------------- fields


class FieldDesc:
    """The finite field F_{p^m}; elements are integer codes 0 <= c < p^m."""

    def __init__(self, p: int, m: int, modulus: tuple[int, ...], generator: int):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self.generator = generator
        self._pw = np.array([p**i for i in range(m)], dtype=np.int64)

    def __repr__(self) -> str:
        return f"FieldDesc(p={self.p}, m={self.m}, modulus={self.modulus})"

    def __reduce__(self):
        return (make_field, (self.p, self.m, max(self.q, DEFAULT_FIELD_CAP)))

    # code <-> coefficient vectors
    def to_vec(self, c: int) -> list[int]:
        return [(c // self.p**i) % self.p for i in range(self.m)]

    def from_vec(self, v: Sequence[int]) -> int:
        return sum((x % self.p) * self.p**i for i, x in enumerate(v))

    def digits(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // self._pw) % self.p

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (np.asarray(digits, dtype=np.int64) % self.p) @ self._pw

    # tables
    @functools.cached_property
    def exp(self) -> np.ndarray:
        return _exp_table(self)

    @functools.cached_property
    def log(self) -> np.ndarray:
        lg = np.full(self.q, -1, dtype=np.int64)
        lg[self.exp] = np.arange(self.q - 1, dtype=np.int64)
        return lg

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.m):
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.m):
            out += (-(a % p) % p) * w
            a //= p
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scal(self, n: int, a: int) -> int:
        """The integer multiple n*a."""
        n %= self.p
        if self.m == 1:
            return n * a % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.m):
            out += (n * (a % p) % p) * w
            a //= p
            w *= p
        return out

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.m == 1:
            return a * b % self.p
        lg = self.log
        return int(self.exp[(lg[a] + lg[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.m == 1:
            return pow(a, -1, self.p)
        return int(self.exp[(-self.log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if e == 0 else 0
        if self.m == 1:
            return pow(a, e % (self.p - 1), self.p)
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    def frob(self, a: int, r: int = 1) -> int:
        return self.pow(a, self.p ** (r % self.m) if self.m > 1 else 1)

    def from_int(self, n: int) -> int:
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def gen_power(self, i: int) -> int:
        if self.m == 1:
            return pow(self.generator, i % (self.q - 1), self.p)
        return int(self.exp[i % (self.q - 1)])

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.dlog(a) % 2 == 0

    def dlog(self, a: int) -> int:
        if self.m == 1:
            return int(self.log[a])
        return int(self.log[a])

    def trace(self, a: int, sub_degree: int = 1) -> int:
        """Trace to the subfield of degree sub_degree over F_p."""
        if self.m % sub_degree:
            raise ValueError("not a subfield")
        out, x = 0, a
        for _ in range(self.m // sub_degree):
            out = self.add(out, x)
            x = self.pow(x, self.p**sub_degree)
        return out

    def norm(self, a: int, sub_degree: int = 1) -> int:
        e = (self.q - 1) // (self.p**sub_degree - 1)
        return self.pow(a, e)

    # vectorised arithmetic on code arrays
    def vadd(self, a, b) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self.encode(self.digits(a) + self.digits(b))

    def vneg(self, a) -> np.ndarray:
        if self.m == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self.encode(-self.digits(a))

    def vsub(self, a, b) -> np.ndarray:
        if self.m == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.encode(self.digits(a) - self.digits(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        lg = self.log
        out[nz] = self.exp[(lg[a[nz]] + lg[b[nz]]) % (self.q - 1)]
        return out

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        nz = a != 0
        out[nz] = self.exp[(self.log[a[nz]] * (e % (self.q - 1))) % (self.q - 1)]
        if e == 0:
            out[...] = 1
        return out


def _mulmat(field: FieldDesc, a: int) -> np.ndarray:
    """Matrix over F_p of x -> a*x in the power basis (acts on row vectors)."""
    p, m, f = field.p, field.m, list(field.modulus)
    av = _trim(field.to_vec(a))
    rows = []
    for j in range(m):
        basis = [0] * j + [1]
        prod = pmod(pmul(av, basis, p), f, p)
        rows.append(prod + [0] * (m - len(prod)))
    return np.array(rows, dtype=np.int64)


def _exp_table(field: FieldDesc) -> np.ndarray:
    q, p = field.q, field.p
    n = q - 1
    if field.m == 1:
        out = np.empty(n, dtype=np.int64)
        x = 1
        for i in range(n):
            out[i] = x
            x = x * field.generator % p
        return out
    block = max(1, int(n**0.5))
    g = _mulmat(field, field.generator)
    first = np.zeros((block, field.m), dtype=np.int64)
    v = np.zeros(field.m, dtype=np.int64)
    v[0] = 1
    for i in range(block):
        first[i] = v
        v = (v @ g) % p
    gb_code = field.from_vec(list(v))
    gb = _mulmat(field, gb_code)
    out = np.empty(((n + block - 1) // block) * block, dtype=np.int64)
    cur = first
    for j in range(0, len(out), block):
        out[j : j + block] = cur @ field._pw
        cur = (cur @ gb) % p
    return out[:n]


def _elem_order_is_full(field: FieldDesc, code: int) -> bool:
    p, f, n = field.p, list(field.modulus), field.q - 1
    a = _trim(field.to_vec(code))
    if not a:
        return False
    for r in prime_factors(n):
        if ppowmod(a, n // r, f, p) == [1]:
            return False
    return True


@functools.lru_cache(maxsize=None)
def _make_field(p: int, m: int) -> FieldDesc:
    if m == 1:
        gen = next(g for g in range(1, p) if all(pow(g, (p - 1) // r, p) != 1 for r in prime_factors(p - 1))) if p > 2 else 1
        return FieldDesc(p, 1, (0, 1), gen)
    modulus = smallest_irreducible(p, m)
    probe = FieldDesc(p, m, modulus, 0)
    gen = next(c for c in range(p, p**m) if _elem_order_is_full(probe, c))
    return FieldDesc(p, m, modulus, gen)


def make_field(p: int, m: int = 1, cap: int = DEFAULT_FIELD_CAP) -> FieldDesc:
    """F_{p^m} with the lexicographically smallest monic irreducible modulus."""
    if not isinstance(p, int) or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if m < 1:
        raise ValueError("extension degree must be positive")
    if p**m > cap:
        raise ValueError(f"field size {p}^{m} exceeds the cap {cap}")
    return _make_field(p, m)


class FFElem:
    """An element of a FieldDesc with operator overloading."""

    __slots__ = ("field", "code")

    def __init__(self, field: FieldDesc, code: int):
        self.field = field
        self.code = code % field.q if field.m == 1 else code

    @classmethod
    def from_coeffs(cls, field: FieldDesc, coeffs: Sequence[int]) -> "FFElem":
        return cls(field, field.from_vec(coeffs))

    @property
    def coeffs(self) -> list[int]:
        return self.field.to_vec(self.code)

    def _c(self, other) -> int:
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other.code
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        return FFElem(self.field, self.field.add(self.code, self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FFElem(self.field, self.field.sub(self.code, self._c(other)))

    def __rsub__(self, other):
        return FFElem(self.field, self.field.sub(self._c(other), self.code))

    def __neg__(self):
        return FFElem(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        return FFElem(self.field, self.field.mul(self.code, self._c(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FFElem(self.field, self.field.div(self.code, self._c(other)))

    def __pow__(self, e: int):
        return FFElem(self.field, self.field.pow(self.code, e))

    def __eq__(self, other):
        if isinstance(other, (FFElem, int)):
            return self.code == self._c(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"FFElem({self.coeffs})"


def frobenius(x: FFElem, r: int = 1) -> FFElem:
    """x^{p^r}, the r-th power of the absolute Frobenius."""
    return FFElem(x.field, x.field.pow(x.code, x.field.p ** (r % x.field.m)))


# ------------------------------------------------------------ polynomial rings

Monomial = tuple


def _grlex_key(mono: Monomial) -> tuple:
    return (sum(mono), mono)


class RingDesc:
    """Truncated polynomial ring over a finite field with monic rewrite rules.

    caps[i] is the largest exponent kept for variable i (None = unbounded);
    monomials beyond a cap are truncated to zero.  Each rule replaces its
    leading monomial by a polynomial of strictly smaller graded-lex order.
    """

    def __init__(self, field: FieldDesc, variables: Sequence[str], caps: Sequence[int | None],
                 rules: Sequence[tuple[Monomial, dict]] = ()):
        self.field = field
        self.variables = tuple(variables)
        self.caps = tuple(caps)
        self.rules = tuple(rules)
        self.index = {v: i for i, v in enumerate(self.variables)}
        self._rule_by_var: dict[int, list] = {}
        for lead, repl in self.rules:
            for i, e in enumerate(lead):
                if e:
                    self._rule_by_var.setdefault(i, []).append((lead, repl))

    def __repr__(self) -> str:
        return f"RingDesc(vars={self.variables}, caps={self.caps}, rules={len(self.rules)})"

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def zero(self) -> "PolyElem":
        return PolyElem(self, {})

    def one(self) -> "PolyElem":
        return self.const(1)

    def const(self, c) -> "PolyElem":
        code = _coeff_code(self.field, c)
        return PolyElem(self, {(0,) * self.nvars: code} if code else {})

    def var(self, name: str) -> "PolyElem":
        if name not in self.index:
            raise KeyError(f"unknown variable {name}")
        mono = [0] * self.nvars
        mono[self.index[name]] = 1
        return normal_form(PolyElem(self, {tuple(mono): 1}))

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "PolyElem":
        mono = [0] * self.nvars
        for k, e in exps.items():
            mono[self.index[k]] = e
        return normal_form(PolyElem(self, {tuple(mono): _coeff_code(self.field, coeff)}))

    def from_terms(self, terms: Mapping[Monomial, int]) -> "PolyElem":
        return normal_form(PolyElem(self, dict(terms)))

    def truncated(self, mono: Monomial) -> bool:
        return any(c is not None and e > c for e, c in zip(mono, self.caps))

    def _reducer(self, mono: Monomial):
        for i, e in enumerate(mono):
            if e:
                for lead, repl in self._rule_by_var.get(i, ()):
                    if all(a >= b for a, b in zip(mono, lead)):
                        return lead, repl
        return None


def _coeff_code(field: FieldDesc, c) -> int:
    if isinstance(c, FFElem):
        return c.code
    if isinstance(c, int):
        return c % field.p
    raise TypeError(f"bad coefficient {c!r}")


def make_ring(field: FieldDesc, variables: Sequence[str], caps: Sequence[int | None] | None = None,
              rules: Iterable = ()) -> RingDesc:
    """Build a ring.

    rules items are (lead, replacement) or (coeff, lead, replacement), where
    lead is a dict name->exponent or exponent tuple and replacement is a
    PolyElem over a ring with the same variables or a dict monomial->coeff.
    """
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    caps = tuple(caps) if caps is not None else (None,) * len(variables)
    if len(caps) != len(variables):
        raise ValueError("one cap per variable")
    if any(c is not None and c < 1 for c in caps):
        raise ValueError("degree caps must be positive")
    index = {v: i for i, v in enumerate(variables)}
    built = []
    for rule in rules:
        if len(rule) == 3:
            coeff, lead, repl = rule
        else:
            coeff, (lead, repl) = 1, rule
        if _coeff_code(field, coeff) != 1:
            raise ValueError("rewrite rules must be monic in the leading monomial")
        if isinstance(lead, Mapping):
            mono = [0] * len(variables)
            for k, e in lead.items():
                mono[index[k]] = e
            lead = tuple(mono)
        lead = tuple(lead)
        if not any(lead):
            raise ValueError("a rule cannot rewrite the constant monomial")
        if isinstance(repl, PolyElem):
            if repl.ring.variables != variables:
                raise ValueError("replacement lives in a ring with other variables")
            terms = dict(repl.terms)
        else:
            terms = {tuple(k): _coeff_code(field, v) for k, v in dict(repl).items()}
        terms = {k: v for k, v in terms.items() if v}
        for mono in terms:
            if _grlex_key(mono) >= _grlex_key(lead):
                raise ValueError(f"rule {lead} -> {mono} does not decrease the graded-lex order")
        built.append((lead, terms))
    leads = [b[0] for b in built]
    if len(set(leads)) != len(leads):
        raise ValueError("two rules share a leading monomial")
    return RingDesc(field, variables, caps, built)


class PolyElem:
    """Sparse polynomial: dict monomial (exponent tuple) -> nonzero field code."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingDesc, terms: dict):
        self.ring = ring
        self.terms = terms

    # construction helpers
    def _new(self, terms: dict) -> "PolyElem":
        return PolyElem(self.ring, terms)

    def _coerce(self, other) -> "PolyElem":
        if isinstance(other, PolyElem):
            if other.ring is not self.ring:
                raise ValueError("polynomials from different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        f = self.ring.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = f.add(out.get(m, 0), c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return self._new({m: f.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "PolyElem":
        f = self.ring.field
        code = _coeff_code(f, c)
        if not code:
            return self.ring.zero()
        return self._new({m: f.mul(v, code) for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FFElem)):
            return self.scale(other)
        other = self._coerce(other)
        f = self.ring.field
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if self.ring.truncated(m):
                    continue
                v = f.add(out.get(m, 0), f.mul(c1, c2))
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return normal_form(self._new(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius_power(self, r: int = 1) -> "PolyElem":
        """self^(p^r), computed termwise (the Frobenius is additive)."""
        f = self.ring.field
        pr = f.p**r
        out = self.ring.zero()
        for m, c in self.terms.items():
            mono = tuple(e * pr for e in m)
            if self.ring.truncated(mono):
                continue
            out = out + normal_form(self._new({mono: f.pow(c, pr)}))
        return out

    def __eq__(self, other):
        if isinstance(other, (int, FFElem)):
            other = self.ring.const(other)
        if not isinstance(other, PolyElem):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(m) for m in self.terms)
        i = self.ring.index[var]
        return max(m[i] for m in self.terms)

    def coefficient(self, exps: Mapping[str, int]) -> int:
        mono = [0] * self.ring.nvars
        for k, e in exps.items():
            mono[self.ring.index[k]] = e
        return self.terms.get(tuple(mono), 0)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def to_json(self) -> str:
        return json.dumps({"variables": list(self.ring.variables),
                           "terms": [[list(m), c] for m, c in self.sorted_terms()]},
                          separators=(",", ":"))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(self.ring.variables, m) if e)
            coeff = str(c) if self.ring.field.m == 1 else f"[{c}]"
            parts.append(coeff if not mono else (mono if c == 1 else f"{coeff}*{mono}"))
        return " + ".join(parts)


def poly_from_json(ring: RingDesc, text: str) -> PolyElem:
    data = json.loads(text)
    if tuple(data["variables"]) != ring.variables:
        raise ValueError("variable mismatch")
    return normal_form(PolyElem(ring, {tuple(m): c for m, c in data["terms"]}))


def normal_form(f: PolyElem) -> PolyElem:
    """Reduce by the rewrite rules and truncation, largest monomials first."""
    ring = f.ring
    field = ring.field
    if not ring.rules:
        return PolyElem(ring, {m: c for m, c in f.terms.items() if c and not ring.truncated(m)})
    pending: dict = {}
    heap: list = []

    def push(m, c):
        if not c or ring.truncated(m):
            return
        if m in pending:
            v = field.add(pending[m], c)
            pending[m] = v
        else:
            pending[m] = c
            key = _grlex_key(m)
            heapq.heappush(heap, ((-key[0], tuple(-e for e in key[1])), m))

    for m, c in f.terms.items():
        push(m, c)
    out: dict = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = pending.pop(m)
        if not c:
            continue
        red = ring._reducer(m)
        if red is None:
            out[m] = c
            continue
        lead, repl = red
        rest = tuple(a - b for a, b in zip(m, lead))
        for rm, rc in repl.items():
            push(tuple(a + b for a, b in zip(rest, rm)), field.mul(c, rc))
    return PolyElem(ring, out)


def substitute(f: PolyElem, assignment: Mapping[str, PolyElem], target: RingDesc | None = None) -> PolyElem:
    """Ring homomorphism sending the named variables to the given polynomials.

    Variables absent from the assignment map to themselves (or to the
    same-named variable of the target ring).
    """
    ring = f.ring
    target = target or ring
    for name in assignment:
        if name not in ring.index:
            raise KeyError(f"assignment to unknown variable {name}")
    images = []
    for name in ring.variables:
        img = assignment.get(name)
        if img is None:
            img = target.var(name)
        elif img.ring is not target:
            raise ValueError("assignment targets must live in the target ring")
        images.append(img)
    powers: list[dict[int, PolyElem]] = [{0: target.one(), 1: img} for img in images]

    def power(i: int, e: int) -> PolyElem:
        cache = powers[i]
        if e not in cache:
            half = power(i, e // 2)
            sq = half * half
            cache[e] = sq * images[i] if e % 2 else sq
        return cache[e]

    out = target.zero()
    for mono, c in f.terms.items():
        term = target.const(FFElem(target.field, c)) if target.field is ring.field else target.const(c)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
                if not term:
                    break
        out = out + term
    return normal_form(out)


# ------------------------------------------------ matrices over F_q((pi))


def _series_trim(a: Sequence[int]) -> tuple[int, ...]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


class PiMatrix:
    """A 2x2 matrix pi^(-shift) * [[e00, e01], [e10, e11]] over F_q((pi)).

    Each entry e is a finite pi-expansion (e_0, e_1, ...) of field codes.  The
    representation is normalized unless asked otherwise: shift >= 0 and,
    when shift > 0, some entry is not divisible by pi.
    """

    __slots__ = ("field", "entries", "shift")

    def __init__(self, field: FieldDesc, rows, shift: int = 0, normalize: bool = True):
        ents = []
        for i in range(2):
            for j in range(2):
                e = rows[i][j]
                if isinstance(e, (int, np.integer)):
                    e = (int(e),)
                ents.append(list(e))
        # fold a negative shift into the entries
        if shift < 0:
            ents = [[0] * (-shift) + e for e in ents]
            shift = 0
        while normalize and shift > 0 and all(not e or e[0] == 0 for e in ents):
            ents = [e[1:] for e in ents]
            shift -= 1
        self.field = field
        self.entries = tuple(_series_trim(e) for e in ents)
        self.shift = shift

    @classmethod
    def identity(cls, field: FieldDesc) -> "PiMatrix":
        return cls(field, [[1, 0], [0, 1]])

    @classmethod
    def zero(cls, field: FieldDesc) -> "PiMatrix":
        return cls(field, [[0, 0], [0, 0]])

    def entry(self, i: int, j: int) -> tuple[int, ...]:
        """pi-expansion of the (i, j) entry of pi^shift * self."""
        return self.entries[2 * i + j]

    def rows(self):
        return [[self.entry(0, 0), self.entry(0, 1)], [self.entry(1, 0), self.entry(1, 1)]]

    def _sadd(self, a, b):
        n = max(len(a), len(b))
        f = self.field
        return [f.add(a[k] if k < len(a) else 0, b[k] if k < len(b) else 0) for k in range(n)]

    def _smul(self, a, b):
        f = self.field
        out = [0] * max(0, len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = f.add(out[i + j], f.mul(x, y))
        return out

    def _aligned(self, other: "PiMatrix"):
        s = max(self.shift, other.shift)
        a = [[0] * (s - self.shift) + list(e) for e in self.entries]
        b = [[0] * (s - other.shift) + list(e) for e in other.entries]
        return a, b, s

    def __add__(self, other: "PiMatrix") -> "PiMatrix":
        a, b, s = self._aligned(other)
        e = [self._sadd(x, y) for x, y in zip(a, b)]
        return PiMatrix(self.field, [[e[0], e[1]], [e[2], e[3]]], s)

    def __neg__(self) -> "PiMatrix":
        f = self.field
        e = [[f.neg(c) for c in x] for x in self.entries]
        return PiMatrix(self.field, [[e[0], e[1]], [e[2], e[3]]], self.shift)

    def __sub__(self, other: "PiMatrix") -> "PiMatrix":
        return self + (-other)

    def __mul__(self, other) -> "PiMatrix":
        if isinstance(other, (int, np.integer)):
            other = PiMatrix(self.field, [[int(other), 0], [0, int(other)]])
        A, B = self.entries, other.entries
        e = []
        for i in range(2):
            for j in range(2):
                e.append(self._sadd(self._smul(A[2 * i], B[j]), self._smul(A[2 * i + 1], B[2 + j])))
        return PiMatrix(self.field, [[e[0], e[1]], [e[2], e[3]]], self.shift + other.shift)

    def scale_pi(self, k: int) -> "PiMatrix":
        """pi^k * self."""
        return PiMatrix(self.field, self.rows(), self.shift - k)

    def trace(self) -> tuple[tuple[int, ...], int]:
        """(expansion, shift) with trace = pi^(-shift) * expansion."""
        t = _series_trim(self._sadd(self.entries[0], self.entries[3]))
        s = self.shift
        while s > 0 and t and t[0] == 0:
            t, s = t[1:], s - 1
        if not t:
            s = 0
        return t, s

    def det(self) -> tuple[tuple[int, ...], int]:
        A = self.entries
        ad = self._smul(A[0], A[3])
        bc = self._smul(A[1], A[2])
        d = _series_trim(self._sadd(ad, [self.field.neg(c) for c in bc]))
        s = 2 * self.shift
        while s > 0 and d and d[0] == 0:
            d, s = d[1:], s - 1
        if not d:
            s = 0
        return d, s

    def valuation(self) -> int | float:
        vals = [next((k for k, c in enumerate(e) if c), None) for e in self.entries]
        vals = [v for v in vals if v is not None]
        if not vals:
            return float("inf")
        return min(vals) - self.shift

    def is_integral(self) -> bool:
        return self.shift == 0

    def truncate(self, prec: int) -> "PiMatrix":
        """Reduce an integral matrix modulo pi^prec."""
        if self.shift:
            raise ValueError("only integral matrices can be reduced")
        e = [x[:prec] for x in self.entries]
        return PiMatrix(self.field, [[e[0], e[1]], [e[2], e[3]]])

    def residue(self) -> tuple[int, int, int, int]:
        """Entries of an integral matrix modulo pi."""
        if self.shift:
            raise ValueError("not integral")
        return tuple(e[0] if e else 0 for e in self.entries)

    def __eq__(self, other):
        if not isinstance(other, PiMatrix):
            return NotImplemented
        return self.shift == other.shift and self.entries == other.entries

    def __hash__(self):
        return hash((self.entries, self.shift))

    def __repr__(self):
        return f"PiMatrix({list(self.entries)}, shift={self.shift})"


# ------------------------------------------------ subfields and embeddings


@functools.lru_cache(maxsize=None)
def _embedding(p: int, m_small: int, m_big: int, cap: int) -> np.ndarray:
    small = make_field(p, m_small, cap)
    big = make_field(p, m_big, cap)
    if m_big % m_small:
        raise ValueError(f"F_{p}^{m_small} is not a subfield of F_{p}^{m_big}")
    if m_small == 1:
        return np.arange(p, dtype=np.int64)
    # image of the small generator: the root of its modulus with the smallest code,
    # searched among elements of the subfield (x^(p^m_small) = x)
    sub = np.arange(big.q, dtype=np.int64)
    sub = sub[big.vpow(sub, small.q) == sub]
    f = small.modulus
    val = np.zeros(len(sub), dtype=np.int64)
    for c in reversed(f):
        val = big.vadd(big.vmul(val, sub), c)
    r = int(sub[val == 0].min())
    images = np.zeros(small.q, dtype=np.int64)
    powers = [1]
    for _ in range(m_small - 1):
        powers.append(big.mul(powers[-1], r))
    for code in range(small.q):
        acc = 0
        for i, c in enumerate(small.to_vec(code)):
            if c:
                acc = big.add(acc, big.scal(c, powers[i]))
        images[code] = acc
    return images


def embedding(small: FieldDesc, big: FieldDesc) -> np.ndarray:
    """Array mapping codes of a subfield to codes of the big field."""
    if small.p != big.p:
        raise ValueError("different characteristics")
    return _embedding(small.p, small.m, big.m, max(big.q, DEFAULT_FIELD_CAP))


# ------------------------------------------ univariate polynomials over F_q
# Lists of codes, lowest degree first, no trailing zeros.


def up_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def up_add(F: FieldDesc, a, b):
    n = max(len(a), len(b))
    return up_trim([F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])


def up_sub(F: FieldDesc, a, b):
    return up_add(F, a, [F.neg(c) for c in b])


def up_mul(F: FieldDesc, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return up_trim(out)


def up_divmod(F: FieldDesc, a, b):
    a = up_trim(a)
    b = up_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = F.inv(b[-1])
    quo = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        c = F.mul(a[-1], inv)
        s = len(a) - len(b)
        quo[s] = c
        for i, bi in enumerate(b):
            a[s + i] = F.sub(a[s + i], F.mul(c, bi))
        a = up_trim(a)
    return up_trim(quo), a


def up_monic(F: FieldDesc, a):
    if not a:
        return a
    inv = F.inv(a[-1])
    return [F.mul(c, inv) for c in a]


def up_gcd(F: FieldDesc, a, b):
    a, b = up_trim(a), up_trim(b)
    while b:
        a, b = b, up_divmod(F, a, b)[1]
    return up_monic(F, a)


def up_deriv(F: FieldDesc, a):
    return up_trim([F.scal(i, c) for i, c in enumerate(a)][1:])


def up_pth_root(F: FieldDesc, a):
    """g with g^p = a, for a polynomial in t^p."""
    if any(c for i, c in enumerate(a) if i % F.p):
        raise ValueError("not a p-th power")
    # c^(1/p) = c^(p^(m-1)) in F_{p^m}
    e = F.p ** (F.m - 1)
    return up_trim([F.pow(a[i], e) for i in range(0, len(a), F.p)])


def up_radical(F: FieldDesc, a):
    """Monic product of the distinct irreducible factors of a (over F-bar)."""
    a = up_monic(F, up_trim(a))
    if len(a) <= 1:
        return [1] if a else []
    d = up_deriv(F, a)
    if not d:
        return up_radical(F, up_pth_root(F, a))
    u = up_gcd(F, a, d)
    w = up_divmod(F, a, u)[0]
    if len(u) <= 1:
        return up_monic(F, w)
    ru = up_radical(F, u)
    # lcm of the squarefree w and rad(u)
    g = up_gcd(F, w, ru)
    return up_monic(F, up_mul(F, up_divmod(F, w, g)[0], ru))


def distinct_root_count(F: FieldDesc, a) -> int:
    """Number of distinct roots in the algebraic closure."""
    a = up_trim(a)
    if not a:
        raise ValueError("the zero polynomial has infinitely many roots")
    return len(up_radical(F, a)) - 1


def up_eval(F: FieldDesc, a, x: int) -> int:
    out = 0
    for c in reversed(a):
        out = F.add(F.mul(out, x), c)
    return out


# ----------------------------------------------------- linear algebra mod p


def rref_mod_p(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        others = np.nonzero(A[:, c])[0]
        for j in others:
            if j != r:
                A[j] = (A[j] - A[j, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M: np.ndarray, p: int) -> int:
    return len(rref_mod_p(M, p)[1])


def nullspace_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0} over F_p."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, pivots = rref_mod_p(M, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-R[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def solve_mod_p(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of M x = b over F_p, or None."""
    M = np.asarray(M, dtype=np.int64)
    aug = np.concatenate([M, np.asarray(b, dtype=np.int64).reshape(-1, 1)], axis=1)
    R, pivots = rref_mod_p(aug, p)
    cols = M.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, cols]
    return x


# ------------------------------------------------------ large extensions


class BigField:
    """F_{p^D} as F_p[t]/(m) on coefficient row vectors, for batched arithmetic.

    Used when the field is too large for log tables.  Elements are int64
    arrays whose last axis has length D.
    """

    def __init__(self, p: int, D: int):
        self.p, self.D = p, D
        self.modulus = smallest_irreducible(p, D)
        m = np.array(self.modulus, dtype=np.int64)
        R = np.zeros((2 * D - 1, D), dtype=np.int64)
        cur = np.zeros(D, dtype=np.int64)
        cur[0] = 1
        for e in range(2 * D - 1):
            R[e] = cur
            top = cur[-1]
            cur = np.concatenate([[0], cur[:-1]])
            cur = (cur - top * m[:D]) % p
        self._R = R
        self._frob: dict[int, np.ndarray] = {}

    @property
    def size(self) -> int:
        return self.p**self.D

    def zero(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.D,), dtype=np.int64)

    def one(self, shape=()) -> np.ndarray:
        out = self.zero(shape)
        out[..., 0] = 1
        return out

    def const(self, c: int) -> np.ndarray:
        out = self.zero()
        out[0] = c % self.p
        return out

    def add(self, a, b) -> np.ndarray:
        return (a + b) % self.p

    def sub(self, a, b) -> np.ndarray:
        return (a - b) % self.p

    def mul(self, a, b) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        D = self.D
        prod = np.zeros(a.shape[:-1] + (2 * D - 1,), dtype=np.int64)
        for i in range(D):
            col = a[..., i:i + 1]
            if col.any():
                prod[..., i:i + D] += col * b
        return (prod % self.p) @ self._R % self.p

    def frob_matrix(self, r: int = 1) -> np.ndarray:
        """Phi with x^(p^r) = x @ Phi."""
        r %= self.D
        if r not in self._frob:
            if r == 0:
                self._frob[0] = np.eye(self.D, dtype=np.int64)
            elif r == 1:
                # row i is (t^i)^p = (t^p)^i
                tp = self.pow_plain(self._t(), self.p)
                rows = [self.one()]
                for _ in range(self.D - 1):
                    rows.append(self.mul(rows[-1], tp))
                self._frob[1] = np.array(rows, dtype=np.int64)
            else:
                self._frob[r] = self.frob_matrix(r - 1) @ self.frob_matrix(1) % self.p
        return self._frob[r]

    def _t(self) -> np.ndarray:
        t = self.zero()
        t[1 % self.D] = 1
        return t

    def pow_plain(self, a, e: int) -> np.ndarray:
        out = self.one(np.shape(a)[:-1])
        base = np.asarray(a, dtype=np.int64)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def pow(self, a, e: int) -> np.ndarray:
        """a^e through the base-p digits of e: a^e = prod (a^(p^i))^(d_i)."""
        if e < 0:
            raise ValueError("negative exponent")
        out = self.one(np.shape(a)[:-1])
        i = 0
        a = np.asarray(a, dtype=np.int64)
        while e:
            d = e % self.p
            if d:
                ai = a @ self.frob_matrix(i) % self.p if i else a
                out = self.mul(out, self.pow_plain(ai, d))
            e //= self.p
            i += 1
        return out

    def mult_matrix(self, c) -> np.ndarray:
        """M with x * c = x @ M."""
        basis = np.eye(self.D, dtype=np.int64)
        return self.mul(basis, np.asarray(c, dtype=np.int64))

    def subfield(self, d: int) -> np.ndarray:
        """All elements of F_{p^d} inside this field, as rows."""
        if self.D % d:
            raise ValueError("not a subfield")
        M = (self.frob_matrix(d) - np.eye(self.D, dtype=np.int64)) % self.p
        N = nullspace_mod_p(M.T, self.p)  # rows x with x @ (Phi - 1) = 0
        coeffs = np.array(list(itertools.product(range(self.p), repeat=len(N))), dtype=np.int64)
        return coeffs @ N % self.p

    def embed(self, F: FieldDesc) -> np.ndarray:
        """Images of the codes of F (a subfield) as rows; the root of F.modulus is the first found."""
        sub = self.subfield(F.m)
        if F.m == 1:
            out = np.zeros((F.q, self.D), dtype=np.int64)
            out[:, 0] = np.arange(F.q)
            return out
        val = self.zero((len(sub),))
        for c in reversed(F.modulus):
            val = self.mul(val, sub)
            val[..., 0] = (val[..., 0] + c) % self.p
        roots = sub[~val.any(axis=1)]
        r = roots[0]
        powers = [self.one(), r]
        for _ in range(F.m - 2):
            powers.append(self.mul(powers[-1], r))
        P = np.array(powers[: F.m], dtype=np.int64)
        digits = np.array([F.to_vec(c) for c in range(F.q)], dtype=np.int64)
        return digits @ P % self.p
