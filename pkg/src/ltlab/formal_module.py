"""Formal O_F-modules of height at most 2 in equal characteristic.

O_F = F_q[[pi]] is modelled by polynomials in a variable ``pi`` with a
truncation cap.  The universal deformation has [pi](X) = pi X + u X^q + X^{q^2};
the height-one Lubin-Tate module has [pi](X) = pi X - X^q.  Both have the
additive formal group law and [a](X) = aX for a in F_q.

Level rings adjoin a Drinfeld-basis-like family X_i^(m) subject only to the
monic torsion rules [pi](X_i^(1)) = 0 and [pi](X_i^(m+1)) = X_i^(m).  On such a
ring the scalar action of a = sum a_j pi^j is the F_q-linear map
X^(m) -> sum_j a_j X^(m-j), which is what matrix_action uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .ffpoly import (
    FieldDesc,
    PiMatrix,
    PolyElem,
    RingDesc,
    make_field,
    make_ring,
    normal_form,
    substitute,
)

INF = math.inf
DEFAULT_PRECISION = 3
DEFAULT_U_CAP = 8
# number of X-monomials in a level ring (q^2)^(2n); keeps rings desk sized
LEVEL_BUDGET = 10**6


def _field_q(q: int) -> FieldDesc:
    p = next(d for d in range(3, q + 1) if q % d == 0)
    m = round(math.log(q, p))
    if p**m != q:
        raise ValueError(f"q={q} is not a prime power")
    return make_field(p, m)


@dataclass(frozen=True)
class FormalModule:
    q: int
    ring: RingDesc
    pi_series: PolyElem
    height: int
    u_valuation: Fraction | float | None = None
    xvar: str = "X"

    def linear_coeffs(self) -> list[PolyElem]:
        return linear_coeffs(self.pi_series, self.xvar, self.q)


@dataclass(frozen=True)
class NewtonSegment:
    slope: Fraction
    multiplicity: int


def default_ring(q: int, precision: int = DEFAULT_PRECISION, u_cap: int = DEFAULT_U_CAP,
                 field: FieldDesc | None = None) -> RingDesc:
    """F_q[pi, u, X] with pi^precision = 0 and u^(u_cap+1) = 0."""
    return make_ring(field or _field_q(q), ["pi", "u", "X"], [precision - 1, u_cap, None])


def _require(ring: RingDesc, names: Sequence[str]) -> None:
    missing = [v for v in names if v not in ring.index]
    if missing:
        raise ValueError(f"ring lacks variables {missing}")


def universal_module(q: int, ring: RingDesc | None = None) -> FormalModule:
    ring = ring or default_ring(q)
    _require(ring, ["pi", "u", "X"])
    X, pi, u = ring.var("X"), ring.var("pi"), ring.var("u")
    return FormalModule(q, ring, pi * X + u * X**q + X ** (q * q), 2)


def lt_module(q: int, ring: RingDesc | None = None) -> FormalModule:
    ring = ring or default_ring(q)
    _require(ring, ["pi", "X"])
    X, pi = ring.var("X"), ring.var("pi")
    return FormalModule(q, ring, pi * X - X**q, 1, None)


def specialize(mod: FormalModule, assignment: Mapping[str, PolyElem], u_valuation=None) -> FormalModule:
    series = substitute(mod.pi_series, assignment)
    return FormalModule(mod.q, mod.ring, series, mod.height, u_valuation, mod.xvar)


def linear_coeffs(series: PolyElem, xvar: str, q: int) -> list[PolyElem]:
    """Coefficients c_i of an F_q-linear series sum c_i X^(q^i)."""
    ring = series.ring
    xi = ring.index[xvar]
    by_power: dict[int, dict] = {}
    for mono, c in series.terms.items():
        e = mono[xi]
        i = round(math.log(e, q)) if e > 0 else -1
        if e <= 0 or q**i != e:
            raise ValueError(f"series is not F_q-linear (exponent {e})")
        m = list(mono)
        m[xi] = 0
        by_power.setdefault(i, {})[tuple(m)] = c
    top = max(by_power) if by_power else -1
    return [PolyElem(ring, by_power.get(i, {})) for i in range(top + 1)]


def _compose_linear(g: Sequence[PolyElem], f: Sequence[PolyElem], q: int) -> list[PolyElem]:
    """Coefficients of g(f(X)) for F_q-linear g, f."""
    ring = f[0].ring if f else g[0].ring
    e = round(math.log(q, ring.field.p))
    out = [ring.zero() for _ in range(len(f) + len(g) - 1)]
    for j, gj in enumerate(g):
        if not gj:
            continue
        for i, ci in enumerate(f):
            if ci:
                out[i + j] = out[i + j] + gj * ci.frobenius_power(e * j)
    return out


def _from_linear(coeffs: Sequence[PolyElem], xvar: str, q: int) -> PolyElem:
    ring = coeffs[0].ring
    X = ring.var(xvar)
    out = ring.zero()
    for i, c in enumerate(coeffs):
        if c:
            out = out + c * X ** (q**i)
    return out


def scalar_series(a, mod: FormalModule) -> PolyElem:
    """[a](X) for a = sum a_j pi^j given as an int or a sequence of F_q codes."""
    if isinstance(a, int):
        a = (a,)
    ring = mod.ring
    pi_lin = mod.linear_coeffs()
    cur = [ring.one()]  # [pi]^0 = X
    total = [ring.zero()]
    for j, aj in enumerate(a):
        if j:
            cur = _compose_linear(pi_lin, cur, mod.q)
        if aj:
            if len(total) < len(cur):
                total += [ring.zero()] * (len(cur) - len(total))
            for i, c in enumerate(cur):
                total[i] = total[i] + c.scale(aj)
    return _from_linear(total, mod.xvar, mod.q)


def compose(f: PolyElem, g: PolyElem, xvar: str = "X") -> PolyElem:
    """f(g(X))."""
    return substitute(f, {xvar: g})


# ------------------------------------------------------------ Newton polygons


def _weights(ring: RingDesc, v_u) -> dict[str, Fraction | float]:
    w: dict[str, Fraction | float] = {}
    for name in ring.variables:
        if name == "pi":
            w[name] = Fraction(1)
        elif name == "pi_E":
            w[name] = Fraction(1, 2)
        elif name == "u":
            w[name] = INF if v_u is None or v_u == INF else Fraction(v_u)
        else:
            w[name] = Fraction(0)
    return w


def _valuation(c: PolyElem, weights: Mapping[str, Fraction | float]):
    best = INF
    for mono in c.terms:
        v = Fraction(0)
        for name, e in zip(c.ring.variables, mono):
            if e:
                if weights[name] == INF:
                    v = INF
                    break
                v += weights[name] * e
        best = min(best, v)
    return best


def lower_hull(points: Sequence[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    pts = sorted(points)
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def torsion_coeffs(mod: FormalModule, n: int) -> list[PolyElem]:
    """Linear coefficients of [pi^n], computed without truncation."""
    ring = mod.ring
    free = make_ring(ring.field, ring.variables, None)
    pi_lin = [PolyElem(free, dict(c.terms)) for c in mod.linear_coeffs()]
    cur = [free.one()]
    for _ in range(n):
        cur = _compose_linear(pi_lin, cur, mod.q)
    return cur


def newton_slopes(mod: FormalModule, n: int = 1, v_u=None) -> list[NewtonSegment]:
    """Segments of the Newton polygon of [pi^n](X), left to right.

    slope is the valuation of the corresponding roots (pi normalised to 1).
    """
    if n < 1:
        raise ValueError("level must be positive")
    cap = mod.ring.caps[mod.ring.index["pi"]] if "pi" in mod.ring.index else None
    if cap is not None and n > cap + 1:
        raise ValueError(f"level {n} exceeds the pi-precision {cap + 1} of the ring")
    if mod.q ** (mod.height * n) > LEVEL_BUDGET:
        raise ValueError("torsion degree exceeds the budget")
    if v_u is None:
        v_u = mod.u_valuation
    w = _weights(mod.ring, v_u)
    coeffs = torsion_coeffs(mod, n)
    pts = []
    for i, c in enumerate(coeffs):
        v = _valuation(c, w)
        if v != INF:
            pts.append((mod.q**i, v))
    if not pts or pts[0][0] != 1:
        raise ValueError("[pi^n] has no linear term; torsion is not finite flat")
    hull = lower_hull(pts)
    return [NewtonSegment(Fraction(y1 - y2) / (x2 - x1), x2 - x1)
            for (x1, y1), (x2, y2) in zip(hull, hull[1:])]


def has_canonical_subgroup(q: int, v_u) -> bool:
    if v_u is None or v_u == INF:
        return False
    return Fraction(v_u) < Fraction(q, q + 1)


# ------------------------------------------------------------------ CM models


def cm_module(E, ring: RingDesc | None = None) -> tuple[FormalModule, Fraction | float]:
    """The CM point attached to a quadratic extension E.

    Unramified: the model over k_E with u = 0.  Ramified: [pi] is the
    composite of the Lubin-Tate series [pi_E](X) = pi_E X + X^q with itself,
    divided by the unit pi / pi_E^2; the X^q coefficient is the induced u.
    """
    q = E.q
    if E.kind == "unramified":
        kE = _field_q(q * q)
        ring = ring or make_ring(kE, ["pi", "u", "X"], [DEFAULT_PRECISION - 1, DEFAULT_U_CAP, None])
        mod = universal_module(q, ring)
        mod = specialize(mod, {"u": ring.zero()}, INF)
        return mod, INF
    F = _field_q(q)
    ring = ring or make_ring(F, ["pi_E", "X"], [2 * DEFAULT_PRECISION, None])
    _require(ring, ["pi_E", "X"])
    X, pE = ring.var("X"), ring.var("pi_E")
    lt_E = pE * X + X**q
    series = compose(lt_E, lt_E)
    unit = 1 if E.kind == "ramified-pi" else F.inv(E.eps)
    series = series.scale(unit)
    mod = FormalModule(q, ring, series, 2, None)
    u = mod.linear_coeffs()[1]
    v_u = _valuation(u, _weights(ring, None))
    return FormalModule(q, ring, series, 2, v_u), v_u


# ------------------------------------------------------------ determinant form


def det_form(x: PolyElem, y: PolyElem, q: int) -> PolyElem:
    """mu(x, y) = x y^q - x^q y."""
    return x * y**q - x**q * y


def lt_scalar(b, x: PolyElem, q: int) -> PolyElem:
    """[b]_LT(x) for b = sum b_j pi^j, with [pi]_LT(x) = pi x - x^q."""
    if isinstance(b, int):
        b = (b,)
    ring = x.ring
    pi = ring.var("pi")
    out = ring.zero()
    cur = x
    for j, bj in enumerate(b):
        if j:
            cur = pi * cur - cur**q
        if bj:
            out = out + cur.scale(bj)
    return out


# ---------------------------------------------------------------- level rings


def gen_name(i: int, m: int) -> str:
    return f"X{i}_{m}"


@dataclass(frozen=True)
class LevelRing:
    n: int
    q: int
    ring: RingDesc
    precision: int = DEFAULT_PRECISION

    def gen(self, i: int, m: int = 1) -> PolyElem:
        if not (i in (1, 2) and 1 <= m <= self.n):
            raise ValueError(f"no generator X_{i}^({m}) at level {self.n}")
        return self.ring.var(gen_name(i, m))

    def delta(self) -> PolyElem:
        return det_form(self.gen(1, 1), self.gen(2, 1), self.q)

    def pi_series(self, x: PolyElem) -> PolyElem:
        r = self.ring
        return r.var("pi") * x + r.var("u") * x**self.q + x ** (self.q * self.q)

    def generator_level(self, name: str) -> int | None:
        if name.startswith("X") and "_" in name:
            return int(name.split("_")[1])
        return None


def level_ring(n: int, q: int = 3, precision: int = DEFAULT_PRECISION, u_cap: int = DEFAULT_U_CAP,
               field: FieldDesc | None = None) -> LevelRing:
    if n < 1:
        raise ValueError("level must be positive")
    if (q * q) ** (2 * n) > LEVEL_BUDGET:
        raise ValueError(f"level {n} exceeds the budget for q={q}")
    F = field or _field_q(q)
    names = ["pi", "u"] + [gen_name(i, m) for m in range(1, n + 1) for i in (1, 2)]
    nv = len(names)
    idx = {v: k for k, v in enumerate(names)}
    minus1 = F.neg(1)
    rules = []
    for m in range(1, n + 1):
        for i in (1, 2):
            k = idx[gen_name(i, m)]

            def mono(**kw):
                e = [0] * nv
                for name, v in kw.items():
                    e[idx[name]] = v
                return tuple(e)

            lead = [0] * nv
            lead[k] = q * q
            repl = {}
            pk = [0] * nv
            pk[0], pk[k] = 1, 1
            repl[tuple(pk)] = minus1
            uk = [0] * nv
            uk[1], uk[k] = 1, q
            repl[tuple(uk)] = minus1
            if m > 1:
                lower = [0] * nv
                lower[idx[gen_name(i, m - 1)]] = 1
                repl[tuple(lower)] = 1
            rules.append((tuple(lead), repl))
    ring = make_ring(F, names, [precision - 1, u_cap] + [None] * (2 * n), rules)
    return LevelRing(n, q, ring, precision)


def embed(f: PolyElem, target: LevelRing) -> PolyElem:
    """Map an element of a lower level ring into a higher one (same names)."""
    src = f.ring
    if not set(src.variables) <= set(target.ring.variables):
        raise ValueError("target ring lacks some variables")
    idx = [target.ring.index[v] for v in src.variables]
    out = {}
    for mono, c in f.terms.items():
        m = [0] * target.ring.nvars
        for k, e in zip(idx, mono):
            m[k] = e
        out[tuple(m)] = c
    return target.ring.from_terms(out)


# ------------------------------------------------------------ matrix actions


def as_pimatrix(M, field: FieldDesc) -> PiMatrix:
    if isinstance(M, PiMatrix):
        return M
    return PiMatrix(field, M)


def _scalar_on(a: Sequence[int], i: int, k: int, L: LevelRing) -> PolyElem:
    # [a](X_i^(k)) = sum_j a_j X_i^(k-j), using the rule [pi](X^(k)) = X^(k-1)
    out = L.ring.zero()
    for j, aj in enumerate(a):
        if aj and k - j >= 1:
            out = out + L.gen(i, k - j).scale(aj)
    return out


def matrix_action(M, L: LevelRing, n: int | None = None) -> dict[str, PolyElem]:
    """The substitution X_i^(k) -> M(X_i^(k)) for all levels k <= n.

    For non-integral M = pi^(-m) M0 the images live at level k + m, so n
    defaults to L.n - m; asking for more raises with the required depth.
    """
    M = as_pimatrix(M, L.ring.field)
    m = M.shift
    if n is None:
        n = L.n - m
    if n < 1 or n + m > L.n:
        raise ValueError(f"matrix with denominator pi^{m} needs level {max(n, 1) + m}, ring has {L.n}")
    a, b, c, d = M.entries
    out = {}
    for k in range(1, n + 1):
        out[gen_name(1, k)] = _scalar_on(a, 1, k + m, L) + _scalar_on(c, 2, k + m, L)
        out[gen_name(2, k)] = _scalar_on(b, 1, k + m, L) + _scalar_on(d, 2, k + m, L)
    return out


def act(M, f: PolyElem, L: LevelRing) -> PolyElem:
    """M(f) for f involving only generators the action can reach."""
    M = as_pimatrix(M, L.ring.field)
    n = L.n - M.shift
    top = max([L.generator_level(v) or 0 for v, e in _used_vars(f) if e], default=0)
    if top == 0:
        return f
    if top > n:
        raise ValueError(f"acting on level {top} needs level {top + M.shift}, ring has {L.n}")
    return substitute(f, matrix_action(M, L, n))


def _used_vars(f: PolyElem):
    ring = f.ring
    seen = [0] * ring.nvars
    for mono in f.terms:
        for k, e in enumerate(mono):
            seen[k] = max(seen[k], e)
    return list(zip(ring.variables, seen))


def delta_equivariance_check(g, L: LevelRing) -> PolyElem:
    """g(Delta) - [det g]_LT(Delta), reduced; zero when the relation holds."""
    g = as_pimatrix(g, L.ring.field)
    if not g.is_integral():
        raise ValueError("g must be integral")
    det, _ = g.det()
    if not det or det[0] == 0:
        raise ValueError("g is not invertible over O_F")
    D = L.delta()
    return normal_form(act(g, D, L) - lt_scalar(det, D, L.q))


def trace_identity_check(M, L: LevelRing) -> PolyElem:
    """mu(M(X1), X2) + mu(X1, M(X2)) - [tr M]_LT(Delta), reduced."""
    M = as_pimatrix(M, L.ring.field)
    if not M.is_integral():
        raise ValueError("M must be integral")
    sub = matrix_action(M, L, 1)
    X1, X2 = L.gen(1), L.gen(2)
    lhs = det_form(sub[gen_name(1, 1)], X2, L.q) + det_form(X1, sub[gen_name(2, 1)], L.q)
    tr, _ = M.trace()
    return normal_form(lhs - lt_scalar(tr, L.delta(), L.q))


# ------------------------------------------------------------------- W_alpha


class IntegralityObstruction(ValueError):
    """Raised when a term of W_alpha is not a polynomial in the level ring."""

    def __init__(self, message: str, residue: PolyElem):
        super().__init__(message)
        self.residue = residue


def _divide_by(f: PolyElem, name: str) -> PolyElem:
    ring = f.ring
    k = ring.index[name]
    bad = {m: c for m, c in f.terms.items() if m[k] == 0}
    if bad:
        raise IntegralityObstruction(f"not divisible by {name}", PolyElem(ring, bad))
    return PolyElem(ring, {m[:k] + (m[k] - 1,) + m[k + 1:]: c for m, c in f.terms.items()})


def required_level(S) -> int:
    return 1 + S.alpha_matrix.shift


def w_alpha(S, L: LevelRing, variant: str = "corrected") -> PolyElem:
    """The coordinate W_alpha splitting psi_alpha on U^n.

    In the ramified n = 1 case an extra term (X2/X1) mu(X1, alpha(X1)) is
    added; variant="literal" uses (X2/X1) mu(X2, alpha(X2)) instead and raises
    IntegralityObstruction when that quotient is not a polynomial, and
    variant="plain" omits the extra term.
    """
    if not S.simple:
        raise ValueError("stratum is not simple")
    alpha = S.alpha_matrix
    need = required_level(S)
    if L.n < need:
        raise ValueError(f"W_alpha needs level {need}, ring has {L.n}")
    sub = matrix_action(alpha, L, 1)
    aX1, aX2 = sub[gen_name(1, 1)], sub[gen_name(2, 1)]
    X1, X2 = L.gen(1), L.gen(2)
    q = L.q
    W = det_form(aX1, X2, q) + det_form(X1, aX2, q)
    if variant not in ("corrected", "literal", "plain"):
        raise ValueError(f"unknown variant {variant}")
    if S.E.kind != "unramified" and S.n == 1 and variant != "plain":
        if variant == "corrected":
            num = X2 * det_form(X1, aX1, q)
        elif variant == "literal":
            num = X2 * det_form(X2, aX2, q)
        W = W + _divide_by(num, gen_name(1, 1))
    return normal_form(W)


def psi_series(g, S, L: LevelRing) -> PolyElem:
    """psi_alpha(g) realised as [tr((g-1) alpha)]_LT(Delta)."""
    g = as_pimatrix(g, L.ring.field)
    x = g - PiMatrix.identity(L.ring.field)
    tr, shift = (x * S.alpha_matrix).trace()
    if shift:
        raise ValueError("g does not lie in U^n for this stratum")
    return lt_scalar(tr, L.delta(), L.q)


def splitting_defect(g, S, L: LevelRing, variant: str = "corrected") -> PolyElem:
    """g(W_alpha) - W_alpha - psi_alpha(g), reduced."""
    g = as_pimatrix(g, L.ring.field)
    if not g.is_integral():
        raise ValueError("g must be integral")
    W = w_alpha(S, L, variant)
    gW = substitute(W, matrix_action(g, L, L.n))
    return normal_form(gW - W - psi_series(g, S, L))


def primitive_torsion_count(q: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return q**n - q ** (n - 1)
