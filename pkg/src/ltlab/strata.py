"""Quadratic extensions, chain orders, simple strata and the linking quotients.

F = F_q((pi)).  The quadratic extensions are E_0 = F_{q^2}((pi)) and the two
ramified ones with pi_E^2 = pi or pi_E^2 = eps*pi, eps the smallest non-square
code of F_q.  E embeds in M_2(F) by sending a residue z of k_E to its
multiplication matrix on the basis (1, g) of k_E over k, and pi_E to
[[0, 1], [pi, 0]] (resp. [[0, 1], [eps*pi, 0]]).  The ramified chain order is
the Iwahori order [[O, O], [P, O]], which both uniformizers normalise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .cyclotomic import Cyc
from .ffpoly import FFElem, FieldDesc, PiMatrix, make_field
from .groups import ClassFunction, FiniteGroup

KINDS = ("unramified", "ramified-pi", "ramified-epspi")


def _split_q(q: int) -> tuple[int, int]:
    for p in range(3, q + 1, 2):
        if q % p == 0:
            m = 0
            r = q
            while r % p == 0:
                r //= p
                m += 1
            if r != 1:
                break
            return p, m
    raise ValueError(f"q={q} must be an odd prime power")


def base_field(q: int) -> FieldDesc:
    p, m = _split_q(q)
    return make_field(p, m)


def residue_ext(q: int) -> FieldDesc:
    p, m = _split_q(q)
    return make_field(p, 2 * m)


def smallest_nonsquare(F: FieldDesc) -> int:
    return next(a for a in range(1, F.q) if not F.is_square(a))


# ------------------------------------------------------------ extensions


@dataclass(frozen=True)
class QuadExt:
    q: int
    kind: str
    eps: int

    @property
    def k(self) -> FieldDesc:
        return base_field(self.q)

    @property
    def kE(self) -> FieldDesc:
        return residue_ext(self.q) if self.kind == "unramified" else base_field(self.q)

    @property
    def ramified(self) -> bool:
        return self.kind != "unramified"

    @property
    def residue_size(self) -> int:
        return self.kE.q

    @property
    def relation(self) -> str:
        return {"unramified": "pi_E = pi", "ramified-pi": "pi_E^2 = pi",
                "ramified-epspi": f"pi_E^2 = {self.eps}*pi"}[self.kind]

    @property
    def uniformizer_square(self) -> int:
        """The unit c with pi_E^2 = c*pi (ramified kinds)."""
        return 1 if self.kind == "ramified-pi" else self.eps

    def embed_residue(self, z: int) -> PiMatrix:
        """Image of a residue z in k_E under the fixed embedding."""
        k = self.k
        if not self.ramified:
            kE = self.kE
            g = _ext_basis_gen(kE, k)
            # columns are z*1 and z*g in the basis (1, g)
            c0 = _coords(kE, k, z, g)
            c1 = _coords(kE, k, kE.mul(z, g), g)
            return PiMatrix(k, [[c0[0], c1[0]], [c0[1], c1[1]]])
        return PiMatrix(k, [[z, 0], [0, z]])

    def pi_E_matrix(self) -> PiMatrix:
        if not self.ramified:
            return PiMatrix(self.k, [[(0, 1), 0], [0, (0, 1)]])
        return PiMatrix(self.k, [[0, 1], [(0, self.uniformizer_square), 0]])

    def pi_E_inverse(self) -> PiMatrix:
        if not self.ramified:
            return PiMatrix(self.k, [[1, 0], [0, 1]], 1)
        c_inv = self.k.inv(self.uniformizer_square)
        return PiMatrix(self.k, [[0, c_inv], [(0, 1), 0]], 1)

    def element(self, z: int, v: int) -> PiMatrix:
        """j(pi_E^v * z) for a residue z and an integer v."""
        base = self.pi_E_matrix() if v >= 0 else self.pi_E_inverse()
        out = self.embed_residue(z)
        for _ in range(abs(v)):
            out = base * out
        return out

    def trace_residue(self, z: int) -> int:
        """Tr_{k_E/k}(z) as a code of k (the trace of the embedded matrix)."""
        t, _ = self.embed_residue(z).trace()
        return t[0] if t else 0

    def __str__(self) -> str:
        return f"E[{self.kind}, q={self.q}]"


def _ext_basis_gen(kE: FieldDesc, k: FieldDesc) -> int:
    """A generator of k_E over k: the smallest code outside k."""
    sub = set(_subfield(kE, k.q))
    return next(z for z in range(kE.q) if z not in sub)


def _subfield(kE: FieldDesc, size: int) -> list[int]:
    return [z for z in range(kE.q) if kE.pow(z, size) == z]


def subfield_codes(kE: FieldDesc, k: FieldDesc) -> dict[int, int]:
    """Codes of k inside k_E mapped to their codes in k."""
    sub = sorted(_subfield(kE, k.q))
    if k.m == 1 and kE.p == k.p:
        return {z: z for z in sub}
    # match by the generator's minimal polynomial
    raise NotImplementedError("non-prime base fields are not embedded")


def _coords(kE: FieldDesc, k: FieldDesc, z: int, g: int) -> tuple[int, int]:
    """(x0, x1) in k with z = x0 + x1*g."""
    sub = subfield_codes(kE, k)
    for x1e, x1 in sub.items():
        rest = kE.sub(z, kE.mul(x1e, g))
        if rest in sub:
            return sub[rest], x1
    raise ValueError("not in the span")


def quadratic_exts(q: int) -> list[QuadExt]:
    if q % 2 == 0:
        raise ValueError("q must be odd")
    k = base_field(q)
    eps = smallest_nonsquare(k)
    return [QuadExt(q, kind, eps) for kind in KINDS]


def quad_ext(q: int, kind: str) -> QuadExt:
    for E in quadratic_exts(q):
        if E.kind == kind:
            return E
    raise ValueError(f"unknown kind {kind}")


# ------------------------------------------------------------ chain orders


def _entry_val(e: tuple[int, ...], shift: int) -> float:
    for i, c in enumerate(e):
        if c:
            return i - shift
    return float("inf")


@dataclass(frozen=True)
class ChainOrder:
    q: int
    kind: str  # "unramified" (M_2(O_F)) or "ramified" (Iwahori)

    @property
    def period(self) -> int:
        return 1 if self.kind == "unramified" else 2

    def min_vals(self, n: int) -> tuple[int, int, int, int]:
        """Entry valuation bounds defining P^n, entries in row-major order."""
        if self.kind == "unramified":
            return (n, n, n, n)
        c = lambda t: -((-t) // 2)  # ceiling of t/2
        return (c(n), c(n - 1), c(n + 1), c(n))

    def contains(self, x: PiMatrix, n: int) -> bool:
        """Whether x lies in the n-th power of the radical (n may be negative)."""
        bounds = self.min_vals(n)
        return all(_entry_val(e, x.shift) >= b for e, b in zip(x.entries, bounds))

    def layer(self, n: int) -> list[PiMatrix]:
        """Representatives of P^n / P^(n+1)."""
        k = base_field(self.q)
        lo, hi = self.min_vals(n), self.min_vals(n + 1)
        free = [i for i in range(4) if lo[i] < hi[i]]
        base = min(lo)
        shift = max(0, -base)
        out = []
        for vals in itertools.product(range(k.q), repeat=len(free)):
            ents = [(0,)] * 4
            for i, v in zip(free, vals):
                ents[i] = (0,) * (lo[i] + shift) + (v,)
            out.append(PiMatrix(k, [[ents[0], ents[1]], [ents[2], ents[3]]], shift))
        return out


def chain_order_of(E: QuadExt) -> ChainOrder:
    return ChainOrder(E.q, "ramified" if E.ramified else "unramified")


# ----------------------------------------------------------------- strata


@dataclass(frozen=True)
class Stratum:
    order: ChainOrder
    n: int
    E: QuadExt
    residue: int  # code in k_E; alpha = pi_E^(-n) * residue

    @property
    def alpha_matrix(self) -> PiMatrix:
        return self.E.element(self.residue, -self.n)

    @property
    def simple(self) -> bool:
        if self.residue == 0:
            return False
        if not self.E.ramified:
            return _residue_generates(self.E, self.residue)
        return self.n % 2 == 1

    @property
    def flags(self) -> dict[str, bool]:
        s = self.simple
        return {"simple": s, "ramified-simple": s and self.E.ramified,
                "unramified-simple": s and not self.E.ramified}

    def equivalent(self, other: "Stratum") -> bool:
        if self.order != other.order or self.n != other.n:
            return False
        return self.order.contains(self.alpha_matrix - other.alpha_matrix, 1 - self.n)

    def label(self) -> str:
        return f"({self.order.kind}, n={self.n}, {self.E.kind}, residue={self.residue})"


def _residue_generates(E: QuadExt, z: int) -> bool:
    # the characteristic polynomial of the residue of pi^n alpha must be
    # irreducible over k, which for a quadratic means it has no root in k
    M = E.embed_residue(z)
    a, b, c, d = M.residue()
    k = E.k
    tr, det = k.add(a, d), k.sub(k.mul(a, d), k.mul(b, c))
    return all(k.add(k.sub(k.mul(x, x), k.mul(tr, x)), det) != 0 for x in range(k.q))


def enumerate_simple(q: int, kind: str, n: int) -> list[Stratum]:
    """Canonical representatives of the simple strata classes.

    kind is the kind of the quadratic extension; the chain order follows.
    """
    E = quad_ext(q, kind)
    if E.ramified and n % 2 == 0:
        raise ValueError("ramified strata need odd n")
    if n < 1:
        raise ValueError("n must be positive")
    order = chain_order_of(E)
    cands = [Stratum(order, n, E, z) for z in range(E.kE.q)]
    simple = [S for S in cands if S.simple]
    reps: list[Stratum] = []
    for S in simple:
        if not any(S.equivalent(R) for R in reps):
            reps.append(S)
    return reps


def all_simple(q: int, n: int = 1) -> list[Stratum]:
    out = []
    for kind in KINDS:
        if kind != "unramified" and n % 2 == 0:
            continue
        out += enumerate_simple(q, kind, n)
    return out


# ------------------------------------------------------------ characters


def psi0_exponent(k: FieldDesc, a: int) -> int:
    """Exponent e with psi0(a) = zeta_p^e, psi0 = absolute trace."""
    return k.trace(a) % k.p if k.m > 1 else a % k.p


class LayerCharacter:
    """psi_alpha on U^n / U^(n+1): 1 + x -> psi(tr(alpha x))."""

    def __init__(self, S: Stratum):
        self.S = S
        self.k = base_field(S.E.q)

    def exponent(self, g: PiMatrix) -> int:
        x = g - PiMatrix.identity(self.k)
        t, shift = (self.S.alpha_matrix * x).trace()
        if shift:
            raise ValueError("element is not in U^n")
        return psi0_exponent(self.k, t[0] if t else 0)

    def value(self, g: PiMatrix) -> Cyc:
        return Cyc.zeta(self.k.p, self.exponent(g))

    def on_layer(self) -> dict[PiMatrix, int]:
        one = PiMatrix.identity(self.k)
        return {x: self.exponent(one + x) for x in self.S.order.layer(self.S.n)}


def psi_alpha(S: Stratum) -> LayerCharacter:
    return LayerCharacter(S)


def layer_psi_exponent(S: Stratum, c: int) -> int:
    """psi_alpha on the element 1 + pi_E^n c of j(U_E^n), c in k_E."""
    # alpha pi_E^n c = residue * c, then take the trace of E/F
    E = S.E
    prod = E.kE.mul(S.residue, c)
    return psi0_exponent(E.k, E.trace_residue(prod))


# ------------------------------------------------------- linking quotients


class LinkingQuotient(FiniteGroup):
    """The finite group RS1 (unramified) or RS2 (ramified) as 3x3 matrices.

    Unramified elements are (a, b, c) for [[a, b, c], [0, a^q, b^q], [0, 0, a]],
    ramified ones (a, c) for [[a, 0, c], [0, a, 0], [0, 0, a]].
    """

    def __init__(self, E: QuadExt):
        self.E = E
        q = E.q
        if not E.ramified:
            K = E.kE
            self.field = K

            def mul(x, y):
                a, b, c = x
                a2, b2, c2 = y
                return (K.mul(a, a2),
                        K.add(K.mul(a, b2), K.mul(b, K.pow(a2, q))),
                        K.add(K.add(K.mul(a, c2), K.mul(b, K.pow(b2, q))), K.mul(c, a2)))

            elements = [(a, b, c) for a in range(1, K.q) for b in range(K.q) for c in range(K.q)]
            super().__init__(elements, mul, f"RS1(q={q})")
        else:
            K = E.k
            self.field = K

            def mul(x, y):
                return (K.mul(x[0], y[0]), K.add(K.mul(x[0], y[1]), K.mul(x[1], y[0])))

            elements = [(a, c) for a in range(1, K.q) for c in range(K.q)]
            super().__init__(elements, mul, f"RS2(q={q})")

    def matrix(self, g) -> list[list[int]]:
        K, q = self.field, self.E.q
        if not self.E.ramified:
            a, b, c = g
            return [[a, b, c], [0, K.pow(a, q), K.pow(b, q)], [0, 0, a]]
        a, c = g
        return [[a, 0, c], [0, a, 0], [0, 0, a]]

    def center(self) -> list:
        gens = self.generators
        return [z for z in self.elements if all(self.mul(z, g) == self.mul(g, z) for g in gens)]

    def scalar_subgroup(self) -> list:
        """Elements acting as scalars in PGL_3 (hence trivially on the curve)."""
        K, q = self.field, self.E.q
        if not self.E.ramified:
            return [(a, 0, 0) for a in range(1, K.q) if K.pow(a, q) == a]
        return [(a, 0) for a in range(1, K.q)]

    def primed_subgroup(self) -> list:
        """The b = 0 part, i.e. the image of the primed linking order."""
        if not self.E.ramified:
            return [g for g in self.elements if g[1] == 0]
        return list(self.elements)

    def c_layer(self) -> list:
        if not self.E.ramified:
            return [(1, 0, c) for c in range(self.field.q)]
        return [(1, c) for c in range(self.field.q)]

    def commutator_subgroup(self) -> set:
        gens = self.generators
        comms = {self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))) for a in self.elements[:64] for b in gens}
        return self._closure(list(comms))


def linking_quotient(E: QuadExt) -> LinkingQuotient:
    return LinkingQuotient(E)


def rho_S(S: Stratum, G: LinkingQuotient | None = None) -> ClassFunction:
    """The constituent of H^1 attached to a simple stratum.

    Ramified: the character (a, c) -> psi_alpha(c / a).  Unramified: the
    q-dimensional irreducible of RS1 whose restriction to the c-layer is
    q copies of psi_alpha, trivial on the scalars of F_q^x and whose
    determinant on the torus {(a, 0, 0)} is the quadratic character of a.
    """
    if not S.simple:
        raise ValueError("stratum is not simple")
    G = G or linking_quotient(S.E)
    p = S.E.k.p
    if S.E.ramified:
        K = G.field

        def val(g):
            a, c = g
            return Cyc.zeta(p, layer_psi_exponent(S, K.div(c, a)))

        return ClassFunction.from_function(G, val, f"rho[{S.residue}]")
    from .reptheory import character_table, det_on_cyclic

    q = S.E.q
    K = G.field
    table = character_table(G)
    target = {c: Cyc.zeta(p, layer_psi_exponent(S, c)) for c in range(K.q)}
    scalars = G.scalar_subgroup()
    gen = K.generator
    torus_gen = (gen, 0, 0)
    found = []
    for chi in table.irreducibles:
        if chi.dim() != q:
            continue
        if any(chi((1, 0, c)) != target[c] * q for c in range(K.q)):
            continue
        if any(chi(s) != chi.degree for s in scalars):
            continue
        # the generator of k_E^x is a nonsquare
        if det_on_cyclic(chi, torus_gen) != Cyc.rational(-1):
            continue
        found.append(chi)
    if len(found) != 1:
        raise RuntimeError(f"expected a unique rho_S, found {len(found)}")
    chi = found[0]
    return ClassFunction(G, chi.values, f"rho[{S.residue}]")


# ------------------------------------------------------ tangent character


def tangent_character(E: QuadExt, unit_residue: int, valuation: int = 0) -> FFElem:
    """chi(pi_E^v u) for a unit u with residue unit_residue in k_E^x."""
    if unit_residue == 0:
        raise ValueError("residue of a unit is nonzero")
    kE = E.kE
    if not E.ramified:
        return FFElem(kE, kE.pow(unit_residue, E.q - 1))
    return FFElem(kE, kE.neg(1) if valuation % 2 else 1)


# ------------------------------------------------------------ quaternions


class QuaternionData:
    """O_B / pi_B^m with O_B = O_E + O_E Pi, Pi^2 = pi, Pi x = sigma(x) Pi.

    Elements are pairs (x, y) of pi-expansions over k_E (E unramified).
    """

    def __init__(self, q: int, m: int):
        if m < 1 or m > 3:
            raise ValueError("truncation m must be 1, 2 or 3")
        self.q, self.m = q, m
        self.kE = residue_ext(q)
        self.k = base_field(q)
        self.nx = (m + 1) // 2
        self.ny = m // 2

    def _s(self, a, n):
        return tuple((list(a) + [0] * n)[:n])

    def elem(self, x, y=()) -> tuple:
        return (self._s(x, self.nx), self._s(y, self.ny))

    def _smul(self, a, b, n):
        K = self.kE
        out = [0] * n
        for i, u in enumerate(a):
            for j, v in enumerate(b):
                if i + j < n and u and v:
                    out[i + j] = K.add(out[i + j], K.mul(u, v))
        return out

    def _sadd(self, a, b, n):
        K = self.kE
        return tuple(K.add(u, v) for u, v in zip(self._s(a, n), self._s(b, n)))

    def _sigma(self, a):
        return tuple(self.kE.pow(c, self.q) for c in a)

    def mul(self, u, v) -> tuple:
        (x, y), (x2, y2) = u, v
        # (x + y Pi)(x2 + y2 Pi) = x x2 + pi y sigma(y2) + (x y2 + y sigma(x2)) Pi
        yy = self._smul(y, self._sigma(y2), self.nx)
        first = self._sadd(self._smul(x, x2, self.nx), [0] + list(yy), self.nx)
        second = self._sadd(self._smul(x, y2, self.ny), self._smul(y, self._sigma(x2), self.ny), self.ny)
        return (first, second)

    def trd(self, u) -> tuple:
        """Reduced trace x + sigma(x), valued in O_F / pi^nx."""
        x, _ = u
        return tuple(self.kE.add(a, b) for a, b in zip(x, self._sigma(x)))

    def nrd(self, u) -> tuple:
        """Reduced norm x sigma(x) - pi y sigma(y), valued in O_F / pi^nx."""
        x, y = u
        a = self._smul(x, self._sigma(x), self.nx)
        b = [0] + self._smul(y, self._sigma(y), self.nx)
        return tuple(self.kE.sub(u1, v1) for u1, v1 in zip(a, b[: self.nx]))

    def Pi(self) -> tuple:
        return self.elem((0,), (1,))

    def elements(self) -> Iterator[tuple]:
        n = self.kE.q
        for xs in itertools.product(range(n), repeat=self.nx):
            for ys in itertools.product(range(n), repeat=self.ny):
                yield (tuple(xs), tuple(ys))


def norm_valuation_of_Pi(q: int) -> int:
    """v_F(N(Pi)); computed at truncation 3 where pi survives."""
    Q = QuaternionData(q, 3)
    n = Q.nrd(Q.Pi())
    return next(i for i, c in enumerate(n) if c)


# ---------------------------------------------------------- CM embeddings


def _mat_mul_mod(A, B, k: FieldDesc, m: int):
    return (PiMatrix(k, A) * PiMatrix(k, B)).truncate(m)


def _gl2_mod(k: FieldDesc, m: int) -> list[PiMatrix]:
    digits = list(itertools.product(range(k.q), repeat=m))
    out = []
    for a, b, c, d in itertools.product(digits, repeat=4):
        det0 = k.sub(k.mul(a[0], d[0]), k.mul(b[0], c[0]))
        if det0:
            out.append(PiMatrix(k, [[a, b], [c, d]]))
    return out


def _inv_mod(g: PiMatrix, k: FieldDesc, m: int) -> PiMatrix:
    # adjugate times the inverse of det in O/pi^m
    d, _ = g.det()
    d = list(d) + [0] * m
    inv = [k.inv(d[0])]
    for i in range(1, m):
        s = 0
        for j in range(1, i + 1):
            s = k.add(s, k.mul(d[j], inv[i - j]))
        inv.append(k.neg(k.mul(s, inv[0])))
    a, b, c, dd = g.entries
    neg = lambda e: tuple(k.neg(x) for x in e)
    adj = PiMatrix(k, [[dd, neg(b)], [neg(c), a]])
    return (adj * PiMatrix(k, [[tuple(inv), 0], [0, tuple(inv)]])).truncate(m)


@dataclass
class OrbitReport:
    E: QuadExt
    m: int
    num_embeddings: int
    orbits: list[dict]
    group_order: int

    def to_json(self) -> dict:
        return {"E": self.E.kind, "q": self.E.q, "m": self.m, "embeddings": self.num_embeddings,
                "group_order": self.group_order,
                "orbits": [{"size": o["size"], "stabilizer": o["stabilizer"],
                            "representative": [list(e) for e in o["representative"].entries]}
                           for o in self.orbits]}


def cm_embeddings(E: QuadExt, m: int = 1, budget: int = 10**5) -> OrbitReport:
    """Ring embeddings O_E / pi^m -> M_2(O_F / pi^m), up to GL_2 conjugation."""
    k = E.k
    q = E.q
    if q ** (4 * m) > budget:
        raise ValueError(f"enumeration of {q}^{4 * m} candidates exceeds the budget {budget}")
    digits = list(itertools.product(range(k.q), repeat=m))
    if not E.ramified:
        g = _ext_basis_gen(E.kE, k)
        # minimal polynomial X^2 - t X + d of the generator over k
        t = E.trace_residue(g)
        d = E.embed_residue(g).det()[0][0]
    found = []
    for a, b, c, dd in itertools.product(digits, repeat=4):
        A = PiMatrix(k, [[a, b], [c, dd]])
        A2 = _mat_mul_mod(A.rows(), A.rows(), k, m)
        if not E.ramified:
            lhs = (A2 - A * PiMatrix(k, [[t, 0], [0, t]]) + PiMatrix(k, [[d, 0], [0, d]])).truncate(m)
            ok = lhs == PiMatrix.zero(k)
        else:
            target = PiMatrix(k, [[(0, E.uniformizer_square), 0], [0, (0, E.uniformizer_square)]]).truncate(m)
            ok = A2 == target and A.residue() != (0, 0, 0, 0)
        if ok:
            found.append(A)
    group = _gl2_mod(k, m)
    inverses = [_inv_mod(h, k, m) for h in group]
    remaining = set(found)
    orbits = []
    for A in found:
        if A not in remaining:
            continue
        orbit = set()
        stab = 0
        for h, hi in zip(group, inverses):
            B = (h * A * hi).truncate(m)
            orbit.add(B)
            if B == A:
                stab += 1
        remaining -= orbit
        orbits.append({"representative": A, "size": len(orbit), "stabilizer": stab})
    return OrbitReport(E, m, len(found), orbits, len(group))
