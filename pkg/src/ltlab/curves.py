"""Special-fibre curves over F_q: models, point counts, zeta fits and group actions.

A model is a plane equation F(x, y) = 0 over the prime field F_q together
with the places at infinity of its smooth projective model, all of which are
F_q-rational for the kinds implemented here.  Point counts use the
Artin-Schreier shape p(y) = f(x): for each x the fibre has either |ker p| or
0 points, decided by an annihilator of the image of the F_p-linear map p.

Actions are affine maps P -> A P + v on (x, y) with coefficients in
F_{q^r}, plus a permutation of the points at infinity and of the geometric
components.  The formulas are taken as written, so some specs compose as
right actions (act(g*h, P) = act(h, act(g, P))) and others as left actions;
ActionSpec.side records which.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import ffpoly as ff
from .ffpoly import FieldDesc, make_field
from .groups import FiniteGroup

KINDS = ("P1", "DL", "Hermitian", "BigAS", "Hyper", "GenericAS")
DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 18
_ENUM_CAP = 1 << 23


class SingularModel(ValueError):
    def __init__(self, msg: str, locus: list[str]):
        super().__init__(f"{msg}; singular locus: {', '.join(locus)}")
        self.locus = locus


@dataclass(frozen=True)
class InfinityPoint:
    label: str
    chart: str  # local equation of the smooth model near the point


@dataclass(frozen=True)
class CurveModel:
    kind: str
    q: int
    terms: tuple[tuple[int, int, int], ...]  # (coeff, ex, ey): F = sum coeff x^ex y^ey
    additive: tuple[tuple[int, int], ...]  # p(y) as (exponent, coeff), exponents powers of p
    f_terms: tuple[tuple[int, int], ...]  # f(x) as (exponent, coeff); negative allowed for DL
    infinity: tuple[InfinityPoint, ...]
    label: str
    alt_label: str = ""

    @property
    def field(self) -> FieldDesc:
        return make_field(self.q)

    def __str__(self) -> str:
        return f"{self.kind}(q={self.q}): {self.label}"

    def evaluate(self, K: FieldDesc, xs, ys) -> np.ndarray:
        """F(x, y) for code arrays over an extension K of F_q."""
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        out = np.zeros(np.broadcast(xs, ys).shape, dtype=np.int64)
        for c, ex, ey in self.terms:
            t = K.vmul(K.vpow(xs, ex), K.vpow(ys, ey))
            out = K.vadd(out, K.vmul(c, t))
        return out

    def on_curve(self, K: FieldDesc, P) -> bool:
        return int(self.evaluate(K, P[0], P[1])) == 0


# ------------------------------------------------------------------ models


def _neg(q: int, c: int) -> int:
    return (-c) % q


def _poly_str(terms, var: str) -> str:
    parts = []
    for e, c in sorted(terms, key=lambda t: -t[0]):
        mono = var if e == 1 else (f"{var}^{e}" if e else "1")
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts) if parts else "0"


def _as_terms(q: int, additive, f_terms):
    terms = [(c, 0, e) for e, c in additive]
    terms += [(_neg(q, c), e, 0) for e, c in f_terms]
    return tuple(terms)


def make_curve(kind: str, q: int, f: Sequence[tuple[int, int]] | None = None,
               p_poly: Sequence[tuple[int, int]] | None = None) -> CurveModel:
    """Build and check a model.  f and p_poly are (exponent, coeff) lists for GenericAS."""
    if q % 2 == 0 or not ff.is_prime(q):
        raise ValueError(f"q={q}: curves are implemented over odd prime fields")
    m1 = q - 1
    if kind == "P1":
        additive, fx = ((1, 1),), ()
        inf = (InfinityPoint("oo", "x = 1/t, t = 0"),)
        label = "y = 0"
    elif kind == "DL":
        curve = CurveModel(kind, q, ((1, 1, q), (m1, q, 1), (m1, 0, 0)), ((q, 1), (1, m1)), ((-(q + 1), 1),),
                           _dl_infinity(q), f"x*y^{q} - x^{q}*y = 1",
                           f"(Y1*Y2^{q} - Y1^{q}*Y2)^{q - 1} = 1, component mu = 1")
        _check_smooth(curve)
        return curve
    elif kind == "Hermitian":
        additive, fx = ((q, 1), (1, 1)), ((q + 1, 1),)
        inf = (InfinityPoint("[0:1:0]", f"z + z^{q} = x^{q + 1} in the chart y = 1, smooth"),)
        label = f"y^{q} + y = x^{q + 1}"
    elif kind == "Hyper":
        additive, fx = ((q, 1), (1, m1)), ((2, 1),)
        inf = (InfinityPoint("oo", "one totally ramified place over x = oo (deg f = 2 prime to p)"),)
        label = f"y^{q} - y = x^2"
    elif kind == "BigAS":
        Q = q * q
        additive, fx = ((Q, 1), (1, m1)), ((Q + q, 1), (q + 1, m1))
        inf = tuple(InfinityPoint(f"oo_{a}", f"place over x = oo on the component y^{q} + y - x^{q + 1} = {a}")
                    for a in range(q))
        label = f"Y^{Q} - Y = X^{Q + q} - X^{q + 1}"
        curve = CurveModel(kind, q, _as_terms(q, additive, fx), additive, fx, inf, label,
                           f"y^{q} + y = x^{q + 1} (each of the {q} components)")
        _check_smooth(curve)
        return curve
    elif kind == "GenericAS":
        if not f or not p_poly:
            raise ValueError("GenericAS needs f and p_poly")
        additive = tuple((int(e), int(c) % q) for e, c in p_poly if c % q)
        fx = tuple((int(e), int(c) % q) for e, c in f if c % q)
        for e, _ in additive:
            if e < 1 or not _is_power(e, q):
                raise ValueError(f"p(y) must be additive: exponent {e} is not a power of {q}")
        deg_f = max((e for e, _ in fx), default=0)
        label = f"{_poly_str(additive, 'y')} = {_poly_str(fx, 'x')}"
        curve = CurveModel(kind, q, _as_terms(q, additive, fx), additive, fx,
                           (InfinityPoint("oo", "one totally ramified place over x = oo"),), label)
        _check_smooth(curve)
        if deg_f == 0 or deg_f % q == 0:
            raise SingularModel(f"{label}: deg f = {deg_f} is divisible by p",
                                _plane_singularities_at_infinity(curve))
        return curve
    else:
        raise ValueError(f"unknown curve kind {kind!r}; expected one of {KINDS}")
    curve = CurveModel(kind, q, _as_terms(q, additive, fx), additive, fx, inf, label)
    _check_smooth(curve)
    return curve


def _is_power(e: int, q: int) -> bool:
    while e % q == 0:
        e //= q
    return e == 1


def _dl_infinity(q: int) -> tuple[InfinityPoint, ...]:
    pts = [InfinityPoint(f"[1:{t}:0]", f"x*y^{q} - x^{q}*y = z^{q + 1} near [1:{t}:0], smooth") for t in range(q)]
    pts.append(InfinityPoint("[0:1:0]", f"x*y^{q} - x^{q}*y = z^{q + 1} near [0:1:0], smooth"))
    return tuple(pts)


def _partials(terms):
    dx = [(c * ex, ex - 1, ey) for c, ex, ey in terms if ex and c * ex]
    dy = [(c * ey, ex, ey - 1) for c, ex, ey in terms if ey and c * ey]
    return dx, dy


def _check_smooth(C: CurveModel) -> None:
    """Jacobian criterion for the affine model."""
    q = C.q
    dx, dy = _partials(C.terms)
    dx = [(c % q, a, b) for c, a, b in dx if c % q]
    dy = [(c % q, a, b) for c, a, b in dy if c % q]
    if any(len(d) == 1 and d[0][1:] == (0, 0) for d in (dx, dy)):
        return  # a partial is a nonzero constant
    if len(dx) <= 1 and len(dy) <= 1:
        # monomial partials: their zero sets are unions of coordinate axes
        zx = {v for v, e in zip("xy", dx[0][1:]) if e} if dx else {"x", "y", "*"}
        zy = {v for v, e in zip("xy", dy[0][1:]) if e} if dy else {"x", "y", "*"}
        F = C.field
        locus = []
        for u in zx:
            for w in zy:
                zero = {u, w} - {"*"}
                if zero == {"x", "y"}:
                    if int(C.evaluate(F, 0, 0)) == 0:
                        locus.append("(0, 0)")
                elif zero:
                    var = zero.pop()
                    rest = [(c, ex, ey) for c, ex, ey in C.terms if (ex if var == "x" else ey) == 0]
                    if any((ey if var == "x" else ex) for _, ex, ey in rest):
                        locus.append(f"points with {var} = 0")
                else:
                    locus.append("whole curve")
        if locus:
            raise SingularModel(C.label, sorted(set(locus)))
        return
    raise NotImplementedError("Jacobian check only for monomial or constant partials")


def _plane_singularities_at_infinity(C: CurveModel) -> list[str]:
    # singular points of the plane closure on z = 0 are common roots of
    # F_D, dF_D/dx, dF_D/dy and F_{D-1}, with D the total degree
    F = C.field
    D = max(ex + ey for _, ex, ey in C.terms)

    def form(terms, d):
        return [(c % C.q, ex, ey) for c, ex, ey in terms if ex + ey == d and c % C.q]

    top, sub = form(C.terms, D), form(C.terms, D - 1)
    dx, dy = _partials(top)
    polys = [top, [t for t in dx if t[0] % C.q], [t for t in dy if t[0] % C.q], sub]

    def at_x1(terms):  # dehomogenise at x = 1: polynomial in t = y / x
        deg = max((ey for _, _, ey in terms), default=0)
        out = [0] * (deg + 1)
        for c, _, ey in terms:
            out[ey] = F.add(out[ey], c % C.q)
        return ff.up_trim(out)

    g = []
    for poly in polys:
        g = ff.up_gcd(F, g, at_x1(poly)) if g else at_x1(poly)
    locus = []
    if len(g) > 1:
        roots = [t for t in range(F.q) if ff.up_eval(F, g, t) == 0]
        locus += [f"[1:{t}:0]" for t in roots] or [f"[1:t:0] with t a root of {g}"]
    return locus or ["points at infinity of the plane closure"]


# ---------------------------------------------------------- point counting


def _additive_matrix(K: FieldDesc, additive) -> np.ndarray:
    n = K.m
    rows = []
    for i in range(n):
        e = K.p**i
        v = 0
        for ex, c in additive:
            v = K.add(v, K.mul(c, K.pow(e, ex)))
        rows.append(K.to_vec(v))
    return np.array(rows, dtype=np.int64)


def _f_values(K: FieldDesc, f_terms, xs: np.ndarray) -> np.ndarray:
    out = np.zeros(len(xs), dtype=np.int64)
    for e, c in f_terms:
        out = K.vadd(out, K.vmul(c, K.vpow(xs, e)))
    return out


def _as_count(K: FieldDesc, additive, f_terms, units_only: bool = False) -> int:
    """#{(x, y) in K^2 : p(y) = f(x)} (x restricted to K^x if units_only)."""
    M = _additive_matrix(K, additive)
    rank = ff.rank_mod_p(M, K.p)
    fibre = K.p ** (K.m - rank)
    start = 1 if units_only else 0
    if rank == K.m:
        return (K.q - start) * fibre
    ann = ff.nullspace_mod_p(M, K.p)  # functionals vanishing on the image
    hits = 0
    for lo in range(start, K.q, _CHUNK):
        xs = np.arange(lo, min(lo + _CHUNK, K.q), dtype=np.int64)
        vals = _f_values(K, f_terms, xs)
        ok = ~((K.digits(vals) @ ann.T) % K.p).any(axis=1)
        hits += int(ok.sum())
    return hits * fibre


def extension_field(q: int, k: int) -> FieldDesc:
    return make_field(q, k, cap=max(ff.DEFAULT_FIELD_CAP, q**k))


def count_points(C: CurveModel, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of points of the smooth projective model over F_{q^k}."""
    if k < 1:
        raise ValueError("k must be positive")
    work = C.q**k
    if work > budget:
        raise ValueError(f"enumeration of {work} x-values exceeds the budget {budget}")
    K = extension_field(C.q, k)
    if C.kind == "DL":
        # y = x z turns x y^q - x^q y = 1 into z^q - z = x^-(q+1), x != 0
        affine = _as_count(K, C.additive, C.f_terms, units_only=True)
    else:
        affine = _as_count(K, C.additive, C.f_terms)
    return affine + len(C.infinity)


def count_points_bruteforce(C: CurveModel, k: int, budget: int = 10**7) -> int:
    """Oracle: test every pair (x, y) in F_{q^k}^2."""
    K = extension_field(C.q, k)
    if K.q**2 > budget:
        raise ValueError(f"{K.q}^2 pairs exceed the budget {budget}")
    xs = np.arange(K.q, dtype=np.int64)
    total = 0
    for y in range(K.q):
        total += int((C.evaluate(K, xs, y) == 0).sum())
    return total + len(C.infinity)


def affine_points(C: CurveModel, K: FieldDesc, budget: int = 10**7) -> list[tuple[int, int]]:
    if K.q**2 > budget:
        raise ValueError(f"{K.q}^2 pairs exceed the budget {budget}")
    xs = np.arange(K.q, dtype=np.int64)
    pts = []
    for y in range(K.q):
        for x in np.nonzero(C.evaluate(K, xs, y) == 0)[0]:
            pts.append((int(x), y))
    return pts


def count_table(curves: Sequence[CurveModel], ks: Sequence[int]) -> list[dict]:
    return [{"q": C.q, "kind": C.kind, "k": k, "N_k": count_points(C, k)} for C in curves for k in ks]


def count_table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["q", "kind", "k", "N_k"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------- zeta fits


@dataclass
class ZetaResult:
    L: list[int]  # numerator of Z(T), constant term first
    genus: int  # total genus over all geometric components
    components: int
    isotypic: int = 1  # L is the isotypic factor raised to this power

    def to_json(self) -> dict:
        return {"L": self.L, "genus": self.genus, "components": self.components, "isotypic": self.isotypic}


def _newton_from_power_sums(S: list[Fraction], g: int, q: int) -> list[Fraction] | None:
    # a_k from power sums S_1..S_g of the reciprocal roots; the rest by symmetry
    a = [Fraction(1)]
    for k in range(1, g + 1):
        s = sum(S[i - 1] * a[k - i] for i in range(1, k + 1))
        a.append(-s / k)
    for k in range(g + 1, 2 * g + 1):
        a.append(a[2 * g - k] * Fraction(q) ** (k - g))
    return a


def _power_sums_from_L(a: list[Fraction], K: int) -> list[Fraction]:
    n = len(a) - 1
    S = []
    for k in range(1, K + 1):
        s = -k * (a[k] if k <= n else 0)
        s -= sum(a[i] * S[k - i - 1] for i in range(1, min(k, n + 1)))
        S.append(s)
    return S


def _qp_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _qp_divmod(a, b):
    a = [Fraction(x) for x in a]
    quo = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        s = len(a) - len(b)
        quo[s] = c
        for i, x in enumerate(b):
            a[s + i] -= c * x
        a = _qp_trim(a)
    return _qp_trim(quo), a


def squarefree_part(L: Sequence[int]) -> list[Fraction]:
    """L / gcd(L, L') over Q: the product of the distinct linear factors."""
    a = _qp_trim([Fraction(x) for x in L])
    d = _qp_trim([i * x for i, x in enumerate(a)][1:])
    u, w = a, d
    while w:
        u, w = w, _qp_divmod(u, w)[1]
    return _qp_divmod(a, u)[0]


def _weil_ok(L: list[int], q: int) -> bool:
    if len(L) == 1:
        return True
    # roots of the squarefree part are simple, so the float check is well conditioned
    rad = [float(x) for x in squarefree_part(L)]
    roots = np.roots(list(reversed(rad)))  # roots of L are 1/alpha
    return bool(np.all(np.abs(np.abs(roots) * math.sqrt(q) - 1) < 1e-6))


def zeta_genus(counts: Sequence[int], q: int, isotypic: int = 1, components: int | None = None) -> ZetaResult:
    """Fit Z(T) = L(T) / ((1 - T)(1 - qT))^c to N_1..N_K.

    The smallest genus whose L-polynomial, fixed by N_1..N_g and the
    functional equation, reproduces all K counts with reciprocal roots of
    absolute value sqrt(q) is returned.  With isotypic = m the counts are those
    of m geometric components sharing one zeta function.
    """
    K = len(counts)
    if K == 0:
        raise ValueError("no counts")
    if isotypic > 1:
        if any(n % isotypic for n in counts):
            raise ValueError("counts are not divisible by the isotypic multiplicity")
        counts = [n // isotypic for n in counts]
    if components is not None:
        if components % isotypic:
            raise ValueError("component count is not divisible by the isotypic multiplicity")
        candidates = [components // isotypic]
    else:
        # the growth rate N_K / q^K bounds c; small K cannot pin it down alone
        top = math.ceil(Fraction(counts[-1], q**K)) + 1
        candidates = list(range(1, top + 1))
    for g in range(0, K + 1):
        for c in candidates:
            L = _fit(counts, q, c, g)
            if L is not None:
                return ZetaResult(L, g * isotypic, c * isotypic, isotypic)
    raise ValueError(f"inconsistent counts: no L-polynomial of genus <= {K} fits")


def _fit(counts: Sequence[int], q: int, c: int, g: int) -> list[int] | None:
    S = [Fraction(c * (q**k + 1) - n) for k, n in enumerate(counts, 1)]
    a = _newton_from_power_sums(S, g, q) if g else [Fraction(1)]
    if any(x.denominator != 1 for x in a) or _power_sums_from_L(a, len(S)) != S:
        return None
    L = [int(x) for x in a]
    if not _weil_ok(L, q):
        return None
    if any((n - c * (q**k + 1)) ** 2 > 4 * g * g * q**k for k, n in enumerate(counts, 1)):
        return None
    return L


def poly_power(L: Sequence[int], m: int) -> list[int]:
    out = [1]
    for _ in range(m):
        out = [sum(out[i] * L[k - i] for i in range(len(out)) if 0 <= k - i < len(L))
               for k in range(len(out) + len(L) - 1)]
    return out


def base_change(L: Sequence[int], r: int) -> list[int]:
    """L-polynomial over F_{q^r} from the one over F_q (roots alpha -> alpha^r)."""
    n = len(L) - 1
    a = [Fraction(x) for x in L]
    S = _power_sums_from_L(a, n * r)
    Sr = [S[r * k - 1] for k in range(1, n + 1)]
    b = [Fraction(1)]
    for k in range(1, n + 1):
        b.append(-sum(Sr[i - 1] * b[k - i] for i in range(1, k + 1)) / k)
    return [int(x) for x in b]


# ----------------------------------------------------------------- actions


@dataclass
class ActionSpec:
    name: str
    curve: CurveModel
    group: FiniteGroup
    base_degree: int  # coefficients live in F_{q^r}
    affine: Callable  # g -> (A, v): (x, y) -> A (x, y) + v, codes of F_{q^r}
    infinity: Callable  # g -> permutation of range(len(curve.infinity))
    components: Callable  # g -> permutation of the geometric components
    num_components: int = 1
    side: str = "right"
    notes: dict = field(default_factory=dict)

    @property
    def base_field(self) -> FieldDesc:
        return make_field(self.curve.q, self.base_degree)


def _embed_into(spec: ActionSpec, K: FieldDesc) -> np.ndarray:
    B = spec.base_field
    if K.m % B.m:
        raise ValueError(f"{spec.name} is defined over F_{B.q}; points must lie over an extension of it")
    return ff.embedding(B, K)


def apply_affine(K: FieldDesc, A, v, emb, x: int, y: int) -> tuple[int, int]:
    e = lambda c: int(emb[c])
    nx = K.add(K.add(K.mul(e(A[0][0]), x), K.mul(e(A[0][1]), y)), e(v[0]))
    ny = K.add(K.add(K.mul(e(A[1][0]), x), K.mul(e(A[1][1]), y)), e(v[1]))
    return nx, ny


def act(C: CurveModel, spec: ActionSpec, g, P, K: FieldDesc | None = None):
    """Image of P under g.  P = (x, y) codes over K, or ("oo", i)."""
    if spec.curve != C:
        raise ValueError("action belongs to another curve")
    if isinstance(P, tuple) and P and P[0] == "oo":
        return ("oo", spec.infinity(g)[P[1]])
    K = K or spec.base_field
    if not C.on_curve(K, P):
        raise ValueError(f"{P} is not on {C.label}")
    A, v = spec.affine(g)
    return apply_affine(K, A, v, _embed_into(spec, K), *P)


def check_action(spec: ActionSpec, elements: Sequence | None = None) -> None:
    """Equation preservation on every point over F_{q^2} (and F_{q^r})."""
    C = spec.curve
    K = make_field(C.q, max(2, spec.base_degree))
    emb = _embed_into(spec, K)
    pts = affine_points(C, K)
    xs = np.array([p[0] for p in pts], dtype=np.int64)
    ys = np.array([p[1] for p in pts], dtype=np.int64)
    for g in elements if elements is not None else spec.group.generators:
        A, v = spec.affine(g)
        e = lambda c: emb[c]
        nx = K.vadd(K.vadd(K.vmul(e(A[0][0]), xs), K.vmul(e(A[0][1]), ys)), e(v[0]))
        ny = K.vadd(K.vadd(K.vmul(e(A[1][0]), xs), K.vmul(e(A[1][1]), ys)), e(v[1]))
        if (C.evaluate(K, nx, ny) != 0).any():
            raise ValueError(f"{spec.name}: element {g} does not preserve {C.label}")


def _identity_perm(n):
    return lambda g: list(range(n))


def p1_action(q: int) -> ActionSpec:
    """The affine group x -> a x + b on P^1."""
    C = make_curve("P1", q)
    els = [(a, b) for a in range(1, q) for b in range(q)]
    # right action: first (a, b), then (a', b')
    G = FiniteGroup(els, lambda s, t: ((s[0] * t[0]) % q, (s[1] * t[0] + t[1]) % q), "Aff1")
    spec = ActionSpec("P1/Aff1", C, G, 1, lambda g: (((g[0], 0), (0, 1)), (g[1], 0)),
                      _identity_perm(1), _identity_perm(1))
    check_action(spec)
    return spec


def dl_group(q: int) -> FiniteGroup:
    """{(g, alpha) in GL_2(F_q) x F_{q^2}^x : det g = N(alpha)}."""
    K2 = make_field(q, 2)
    els = []
    for a, b, c, d in itertools.product(range(q), repeat=4):
        det = (a * d - b * c) % q
        if det:
            for al in range(1, K2.q):
                if K2.pow(al, q + 1) == det:
                    els.append(((a, b, c, d), al))

    def mul(s, t):
        (a, b, c, d), x = s
        (e, f, g, h), y = t
        return (((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q),
                K2.mul(x, y))

    return FiniteGroup(els, mul, "G1")


def dl_action(q: int) -> ActionSpec:
    """(Y1, Y2) -> alpha^-1 (a Y1 + c Y2, b Y1 + d Y2) on x y^q - x^q y = 1."""
    C = make_curve("DL", q)
    K2 = make_field(q, 2)
    G = dl_group(q)
    inf_pts = [(1, t) for t in range(q)] + [(0, 1)]

    def affine(g):
        (a, b, c, d), al = g
        s = K2.inv(al)
        return ((K2.mul(s, a), K2.mul(s, c)), (K2.mul(s, b), K2.mul(s, d))), (0, 0)

    def infinity(g):
        (a, b, c, d), _ = g
        out = []
        for x, y in inf_pts:
            nx, ny = (a * x + c * y) % q, (b * x + d * y) % q
            out.append(inf_pts.index((1, ny * pow(nx, -1, q) % q)) if nx else q)
        return out

    spec = ActionSpec("DL/G1", C, G, 2, affine, infinity, _identity_perm(1))
    check_action(spec)
    return spec


def bigas_action(q: int) -> ActionSpec:
    """RS1 = {(a, b, c)} acting by Y -> (aY + bX + c)/a, X -> (a^q X + b^q)/a."""
    from .strata import linking_quotient, quad_ext

    C = make_curve("BigAS", q)
    G = linking_quotient(quad_ext(q, "unramified"))
    K2 = G.field

    def affine(g):
        a, b, c = g
        ia = K2.inv(a)
        return ((K2.pow(a, q - 1), 0), (K2.mul(b, ia), 1)), (K2.mul(K2.pow(b, q), ia), K2.mul(c, ia))

    comp = _component_map(C, affine, K2)
    spec = ActionSpec("BigAS/RS1", C, G, 2, affine, comp, comp, num_components=q, side="left")
    check_action(spec)
    return spec


def bigas_component(C: CurveModel, K: FieldDesc, P) -> int:
    """The component y^q + y - x^(q+1) = a (a in F_q) containing P."""
    x, y = P
    a = K.sub(K.add(K.pow(y, C.q), y), K.pow(x, C.q + 1))
    if a >= C.q:
        raise ValueError("point not on the model")
    return a


def _component_map(C: CurveModel, affine, K: FieldDesc):
    reps = {}
    for P in affine_points(C, K):
        reps.setdefault(bigas_component(C, K, P), P)
    if len(reps) != C.q:
        raise RuntimeError("not every component has a point over the coefficient field")
    emb = np.arange(K.q)

    def perm(g):
        A, v = affine(g)
        return [bigas_component(C, K, apply_affine(K, A, v, emb, *reps[a])) for a in range(C.q)]

    return perm


def hyper_action(q: int, with_sign: bool = True) -> ActionSpec:
    """RS2 = {(a, c)} by y -> y + c/a, optionally times the order-2 element of the uniformizer."""
    from .strata import linking_quotient, quad_ext

    C = make_curve("Hyper", q)
    R = linking_quotient(quad_ext(q, "ramified-pi"))
    k = R.field
    sign = _resolve_hyper_sign(C)
    if with_sign:
        els = [(x, s) for x in R.elements for s in (0, 1)]
        G = FiniteGroup(els, lambda u, v: (R.mul(u[0], v[0]), u[1] ^ v[1]), "RS2xC2")
    else:
        G = R

    def affine(g):
        (a, c), s = g if with_sign else (g, 0)
        sx, sy = sign if s else (1, 1)
        return ((sx % q, 0), (0, sy % q)), (0, k.div(c, a))

    spec = ActionSpec("Hyper/" + ("RS2xC2" if with_sign else "RS2"), C, G, 1, affine, _identity_perm(1),
                      _identity_perm(1),
                      notes={"uniformizer_acts_as": f"(x, y) -> ({'-' if sign[0] < 0 else ''}x, "
                                                    f"{'-' if sign[1] < 0 else ''}y)"})
    check_action(spec)
    return spec


def _resolve_hyper_sign(C: CurveModel) -> tuple[int, int]:
    # the candidate read off the action list negates y; keep the first
    # candidate that preserves the model
    K = make_field(C.q, 2)
    pts = affine_points(C, K)
    for sx, sy in ((1, -1), (-1, 1)):
        if all(C.on_curve(K, (K.scal(sx % C.q, x), K.scal(sy % C.q, y))) for x, y in pts):
            return sx, sy
    raise RuntimeError("no sign convention preserves the model")


# ------------------------------------------------------------ fixed points


def _p_order(spec: ActionSpec, g) -> int:
    n = spec.group.element_order(g)
    if n % spec.curve.q == 0:
        raise ValueError(f"element of order {n} is wild; use twisted counts")
    return n


def _fixed_line(B: FieldDesc, A, v):
    """Solutions of (A - 1) P = -v over B: None, a point, or (P0, w0)."""
    m = [[B.sub(A[0][0], 1), A[0][1]], [A[1][0], B.sub(A[1][1], 1)]]
    rhs = [B.neg(v[0]), B.neg(v[1])]
    det = B.sub(B.mul(m[0][0], m[1][1]), B.mul(m[0][1], m[1][0]))
    if det:
        x = B.div(B.sub(B.mul(rhs[0], m[1][1]), B.mul(m[0][1], rhs[1])), det)
        y = B.div(B.sub(B.mul(m[0][0], rhs[1]), B.mul(rhs[0], m[1][0])), det)
        return "point", (x, y)
    rows = [(r, b) for r, b in zip(m, rhs) if r[0] or r[1]]
    if not rows:
        if rhs[0] or rhs[1]:
            return "empty", None
        return "plane", None
    (r0, r1), b = rows[0]
    for (s0, s1), c in rows[1:]:
        # the rows are proportional; check the right-hand sides agree
        lam = B.div(s0, r0) if r0 else B.div(s1, r1)
        if B.mul(lam, b) != c:
            return "empty", None
    if r1:
        P0 = (0, B.div(b, r1))
    else:
        P0 = (B.div(b, r0), 0)
    w0 = (r1, B.neg(r0))
    return "line", (P0, w0)


def _restrict_to_line(C: CurveModel, B: FieldDesc, P0, w0) -> list[int]:
    h: list[int] = []
    lx, ly = [P0[0], w0[0]], [P0[1], w0[1]]
    for c, ex, ey in C.terms:
        t = [c]
        for _ in range(ex):
            t = ff.up_mul(B, t, ff.up_trim(lx))
        for _ in range(ey):
            t = ff.up_mul(B, t, ff.up_trim(ly))
        h = ff.up_add(B, h, t)
    return h


def fixed_points(C: CurveModel, spec: ActionSpec, g, method: str = "algebraic", rounds: int = 2) -> int:
    """Fixed points of a tame element on the smooth projective model over F-bar."""
    _p_order(spec, g)  # rejects wild elements
    A, v = spec.affine(g)
    B = spec.base_field
    inf = sum(1 for i, j in enumerate(spec.infinity(g)) if i == j)
    kind, data = _fixed_line(B, A, v)
    if kind == "plane":
        raise ValueError("the identity has an infinite fixed locus")
    if kind == "empty":
        return inf
    if kind == "point":
        return inf + (1 if C.on_curve(B, data) else 0)
    h = _restrict_to_line(C, B, *data)
    if not h:
        raise ValueError("a line of fixed points lies on the curve")
    if method == "algebraic":
        return inf + ff.distinct_root_count(B, h)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    # roots of exact degree d over F_Q by Moebius inversion of the counts in
    # F_{Q^d}; stop after `rounds` consecutive degrees contribute nothing
    counts: dict[int, int] = {}
    total, quiet, d = 0, 0, 0
    while quiet < rounds:
        d += 1
        if B.q**d > _ENUM_CAP:
            raise ValueError("enumeration did not stabilise within the field cap")
        K = make_field(C.q, B.m * d, cap=_ENUM_CAP)
        emb = ff.embedding(B, K)
        ts = np.arange(K.q, dtype=np.int64)
        val = np.zeros(K.q, dtype=np.int64)
        for c in reversed(h):
            val = K.vadd(K.vmul(val, ts), int(emb[c]))
        counts[d] = int((val == 0).sum())
        exact = sum(_mobius(d // e) * counts[e] for e in counts if d % e == 0)
        total += exact
        quiet = quiet + 1 if exact == 0 else 0
    return inf + total


def _mobius(n: int) -> int:
    out = 1
    for r in ff.prime_factors(n):
        if n % (r * r) == 0:
            return 0
        out = -out
    return out


def acts_trivially(spec: ActionSpec, g) -> bool:
    A, v = spec.affine(g)
    n_inf, n_comp = len(spec.curve.infinity), spec.num_components
    return (tuple(map(tuple, A)) == ((1, 0), (0, 1)) and tuple(v) == (0, 0)
            and spec.infinity(g) == list(range(n_inf)) and spec.components(g) == list(range(n_comp)))


def curve_zeta(C: CurveModel, slack: int = 2, budget: int = DEFAULT_BUDGET) -> ZetaResult:
    """Zeta fit from as many counts as needed for `slack` checks past the fitted genus."""
    N: list[int] = []
    k = 0
    while True:
        k += 1
        if C.q**k > budget:
            raise ValueError("counting budget exhausted before the zeta fit stabilised")
        N.append(count_points(C, k, budget))
        try:
            z = zeta_genus(N, C.q)
        except ValueError:
            continue
        if len(N) >= z.genus + slack:
            return z
