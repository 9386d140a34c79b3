"""Character tables, Gauss sums and the H^1 character of a curve with a group action.

Character tables are computed by Dixon's method: the class sums act on the
centre of the group algebra, their common eigenvectors over F_P (P prime,
P = 1 mod the exponent) are the central characters, and the values are
lifted to Q(zeta_e) through eigenvalue multiplicities on cyclic subgroups.

The H^1 character comes either from the tame Lefschetz formula or from
Frobenius-twisted point counts T_k(g) = #{P : F^k(g P) = P}.  The latter
are counted with Lang's theorem: the solutions of P = A F^k(P) + v in
L = F_{Q^(k n)} form an affine F_p-space, enumerated directly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import ffpoly as ff
from .curves import (ActionSpec, CurveModel, acts_trivially, base_change, bigas_action, curve_zeta, dl_action,
                     fixed_points, hyper_action, squarefree_part)
from .cyclotomic import Cyc, ZERO, _power_table, totient
from .ffpoly import BigField, FieldDesc, make_field
from .groups import ClassFunction, FiniteGroup

TABLE_BUDGET = 10**4
TWIST_BUDGET = 2 * 10**6


# ------------------------------------------------------- character tables


@dataclass
class CharacterTable:
    group: FiniteGroup
    irreducibles: list[ClassFunction]
    prime: int

    @property
    def dims(self) -> list[int]:
        return [chi.dim() for chi in self.irreducibles]

    def decompose(self, chi: ClassFunction) -> list[int]:
        return [chi.multiplicity(x) for x in self.irreducibles]

    def __len__(self) -> int:
        return len(self.irreducibles)


def _class_matrices(G: FiniteGroup) -> np.ndarray:
    """M[j][l][k] = #{(x, y) in K_j x K_l : x y = g_k}."""
    r = G.num_classes
    M = np.zeros((r, r, r), dtype=np.int64)
    cls = [G.class_of(y) for y in G.elements]
    inv = [G.inv(y) for y in G.elements]
    for k, gk in enumerate(G.class_reps):
        for y, yi, l in zip(G.elements, inv, cls):
            M[G.class_of(G.mul(gk, yi)), l, k] += 1
    return M


def _charpoly_mod(A: np.ndarray, P: int) -> list[int]:
    """Faddeev-LeVerrier: coefficients c_0..c_n of det(x - A), P > n."""
    n = len(A)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = np.zeros_like(A)
    I = np.eye(n, dtype=np.int64)
    for k in range(1, n + 1):
        Mk = (A @ Mk + coeffs[n - k + 1] * I) % P
        coeffs[n - k] = (-int(np.trace(A @ Mk % P)) * pow(k, -1, P)) % P
    return coeffs


def _roots_mod(coeffs: list[int], P: int) -> list[int]:
    xs = np.arange(P, dtype=np.int64)
    val = np.zeros(P, dtype=np.int64)
    for c in reversed(coeffs):
        val = (val * xs + c) % P
    return [int(x) for x in np.nonzero(val == 0)[0]]


def _rref_rows(V: np.ndarray, P: int) -> tuple[np.ndarray, list[int]]:
    R, piv = ff.rref_mod_p(V, P)
    return R[: len(piv)], piv


def _split(M: np.ndarray, P: int) -> list[np.ndarray] | None:
    r = M.shape[1]
    spaces = [np.eye(r, dtype=np.int64)]
    for j in range(1, r):
        if all(len(W) == 1 for W in spaces):
            break
        Mj = M[j] % P
        nxt = []
        for W in spaces:
            if len(W) == 1:
                nxt.append(W)
                continue
            W, piv = _rref_rows(W, P)
            img = Mj @ W.T % P  # columns are images of the basis vectors
            R = img[piv, :]
            parts = []
            for lam in _roots_mod(_charpoly_mod(R, P), P):
                N = ff.nullspace_mod_p((R - lam * np.eye(len(R), dtype=np.int64)) % P, P)
                parts.append(N @ W % P)
            if sum(len(x) for x in parts) != len(W):
                return None  # eigenvalues collided mod P or the space did not split
            nxt.extend(parts)
        spaces = nxt
    if any(len(W) != 1 for W in spaces):
        return None
    return [W[0] for W in spaces]


def _candidate_primes(e: int, lower: int):
    P = (lower // e + 1) * e + 1
    while True:
        if ff.is_prime(P):
            yield P
        P += e


def character_table(G: FiniteGroup, budget: int = TABLE_BUDGET) -> CharacterTable:
    """All irreducible characters of G, with exact orthogonality checked."""
    cached = getattr(G, "_char_table", None)
    if cached is not None:
        return cached
    if G.order > budget:
        raise ValueError(f"|G| = {G.order} exceeds the character table budget {budget}")
    r = G.num_classes
    sizes = G.class_sizes
    inv_cls = G.inverse_classes()
    e = G.exponent()
    M = _class_matrices(G)
    powers = [G.power_map(t) for t in range(e)]
    for P, _ in zip(_candidate_primes(e, 2 * G.order), range(20)):
        vecs = _split(M, P)
        if vecs is None:
            continue
        chars = []
        for v in vecs:
            if v[0] == 0:
                break
            w = v * pow(int(v[0]), -1, P) % P
            s = sum(int(w[j]) * int(w[inv_cls[j]]) * pow(sizes[j], -1, P) for j in range(r)) % P
            d2 = G.order * pow(s, -1, P) % P
            d = math.isqrt(d2)
            if d * d != d2:
                break
            chars.append([int(w[j]) * d * pow(sizes[j], -1, P) % P for j in range(r)])
        else:
            table = _lift(G, chars, P, e, powers)
            _check_orthogonality(G, table)
            out = CharacterTable(G, table, P)
            G._char_table = out
            return out
    raise RuntimeError("Dixon's method failed for 20 primes")


def _lift(G: FiniteGroup, chars: list[list[int]], P: int, e: int, powers) -> list[ClassFunction]:
    # eigenvalue multiplicities of g: m_l = (1/e) sum_t chi(g^t) z^(-l t)
    z = _prim_root(P, e)
    zp = [pow(z, -i % e, P) for i in range(e)]
    table = _power_table(e)
    e_inv = pow(e, -1, P)
    out = []
    for n, ch in enumerate(chars):
        d = ch[0]
        vals = []
        for j in range(G.num_classes):
            coords = [0] * totient(e)
            for ell in range(e):
                m = sum(ch[powers[t][j]] * zp[(ell * t) % e] for t in range(e)) * e_inv % P
                if m > d:
                    raise RuntimeError("multiplicity out of range while lifting")
                if m:
                    for i, c in enumerate(table[ell]):
                        coords[i] += m * c
            vals.append(Cyc(e, coords))
        out.append(ClassFunction(G, vals, f"chi{n}"))
    out.sort(key=lambda chi: (chi.dim(), [tuple(v.num) for v in chi.values]))
    for n, chi in enumerate(out):
        chi.name = f"chi{n}"
    return out


def _prim_root(P: int, e: int) -> int:
    fs = ff.prime_factors(P - 1)
    g = next(g for g in range(2, P) if all(pow(g, (P - 1) // f, P) != 1 for f in fs))
    return pow(g, (P - 1) // e, P)


def _check_orthogonality(G: FiniteGroup, table: list[ClassFunction]) -> None:
    if sum(chi.dim() ** 2 for chi in table) != G.order or len(table) != G.num_classes:
        raise RuntimeError("character table is incomplete")
    # all inner products at once on integer coordinates in Q(zeta_e)
    e = table[0].values[0].m
    phi = totient(e)
    X = np.array([[list(v.lift(e).num) for v in chi.values] for chi in table], dtype=object)
    Y = np.array([[list(v.conj().lift(e).num) for v in chi.values] for chi in table], dtype=object)
    ptab = _power_table(e)
    mult = np.zeros((phi, phi, phi), dtype=object)
    for a in range(phi):
        for b in range(phi):
            mult[a, b] = ptab[(a + b) % e]
    sizes = np.array(G.class_sizes, dtype=object)
    S = np.einsum("ajx,bjy,j->abxy", X, Y, sizes)
    prods = np.einsum("abxy,xyc->abc", S, mult)
    target = np.zeros_like(prods)
    for a in range(len(table)):
        target[a, a, 0] = G.order
    if not (prods == target).all():
        raise RuntimeError("character table fails row orthogonality")


def det_on_cyclic(chi: ClassFunction, g) -> Cyc:
    """det of the representation with character chi at g."""
    G = chi.group
    n = G.element_order(g)
    vals = [chi(G.power(g, t)) for t in range(n)]
    total = 0
    for ell in range(n):
        m = ZERO
        for t in range(n):
            m = m + vals[t] * Cyc.zeta(n, -ell * t)
        mult = (m * Fraction(1, n)).as_fraction()
        if mult.denominator != 1 or mult < 0:
            raise ValueError("not the character of a representation")
        total += ell * int(mult)
    return Cyc.zeta(n, total)


# ------------------------------------------------------------ Gauss sums


@dataclass(frozen=True)
class MultChar:
    """x -> zeta_(Q-1)^(j log x) on F_Q^x, extended by 0 at 0."""

    field: FieldDesc
    j: int = 0

    def __call__(self, x: int) -> Cyc:
        if x == 0:
            return ZERO
        return Cyc.zeta(self.field.q - 1, self.j * self.field.dlog(x))

    @property
    def trivial(self) -> bool:
        return self.j % (self.field.q - 1) == 0

    @classmethod
    def quadratic(cls, F: FieldDesc) -> "MultChar":
        return cls(F, (F.q - 1) // 2)


@dataclass(frozen=True)
class AddChar:
    """x -> zeta_p^(Tr(b x))."""

    field: FieldDesc
    b: int = 1

    def __call__(self, x: int) -> Cyc:
        F = self.field
        return Cyc.zeta(F.p, F.trace(F.mul(self.b, x)))

    @property
    def trivial(self) -> bool:
        return self.b == 0


def gauss_sum(chi: MultChar, psi: AddChar) -> Cyc:
    if chi.field.q != psi.field.q:
        raise ValueError("characters of different fields")
    total = ZERO
    for x in range(1, chi.field.q):
        total = total + chi(x) * psi(x)
    return total


# ------------------------------------------------------- twisted counts


@functools.lru_cache(maxsize=None)
def _big(p: int, D: int) -> BigField:
    return BigField(p, D)


@functools.lru_cache(maxsize=None)
def _embedding_rows(p: int, D: int, r: int) -> np.ndarray:
    return _big(p, D).embed(make_field(p, r))


def _fixed_space(spec: ActionSpec, g, k: int):
    """(L, w, basis): the solutions of P = A F^k(P) + v in L^2 are w + span(basis)."""
    C = spec.curve
    p, r = C.q, spec.base_degree
    n = spec.group.element_order(g)
    D = r * k * n
    L = _big(p, D)
    emb = _embedding_rows(p, D, r)
    A, v = spec.affine(g)
    Phi = L.frob_matrix(r * k)
    blocks = [[Phi @ L.mult_matrix(emb[A[j][i]]) % p for j in range(2)] for i in range(2)]
    # [x | y] @ T = [x Phi A00 + y Phi A01 | x Phi A10 + y Phi A11]
    T = np.block(blocks) % p
    I = np.eye(2 * D, dtype=np.int64)
    M = (I - T) % p
    b = np.concatenate([emb[v[0]], emb[v[1]]])
    w = ff.solve_mod_p(M.T, b, p)
    if w is None:
        raise RuntimeError("Lang's theorem violated: no fixed point of the twisted map")
    basis = ff.nullspace_mod_p(M.T, p)
    if len(basis) != 2 * r * k:
        raise RuntimeError(f"fixed space has F_p-dimension {len(basis)}, expected {2 * r * k}")
    return L, w, basis


def _digits(e: int, p: int) -> list[int]:
    """e as a multiset of powers p^j: x^e = prod x^(p^j)."""
    out, j = [], 0
    while e:
        out += [j] * (e % p)
        e //= p
        j += 1
    return out


def _curve_tensor(C: CurveModel, L: BigField, w: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, int]:
    """The equation on w + c @ basis as a tensor in hat c = (1, c).

    Each factor x^(p^j) is affine in c, so a monomial with base-p digit sum s
    is multilinear of degree s in hat c; all terms are padded to the top degree.
    """
    p, D = L.p, L.D
    pts = np.vstack([w, basis])  # row 0 is the offset
    smax = max(1, max(len(_digits(ex, p)) + len(_digits(ey, p)) for _, ex, ey in C.terms))
    n1 = len(pts)
    total = np.zeros((n1,) * smax + (D,), dtype=np.int64)
    unit = np.zeros((n1, D), dtype=np.int64)
    unit[0] = L.one()
    for c, ex, ey in C.terms:
        factors = [pts[:, :D] @ L.frob_matrix(j) % p for j in _digits(ex, p)]
        factors += [pts[:, D:] @ L.frob_matrix(j) % p for j in _digits(ey, p)]
        factors += [unit] * (smax - len(factors))
        T = factors[0]
        for f in factors[1:]:
            T = L.mul(T[..., None, :], f.reshape((1,) * (T.ndim - 1) + f.shape))
        total = (total + c * T) % p
    return total.reshape(-1, D), smax


def _zero_count(T: np.ndarray, s: int, dim: int, p: int, chunk: int = 1 << 15) -> int:
    """#{c in F_p^dim : sum_I hat c^I T_I = 0}."""
    hits = 0
    total = p**dim
    if (p - 1) ** (s + 1) * len(T) >= 1 << 52:
        raise ValueError("tensor too large for exact evaluation")
    Tf = T.astype(np.float64)
    # random F_p-combinations of the coordinates screen out most nonzeros cheaply
    R = np.random.default_rng(0).integers(0, p, size=(T.shape[1], 8))
    Hf = (T @ R % p).astype(np.float64)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        c = (idx[:, None] // (p ** np.arange(dim, dtype=np.int64))) % p
        hat = np.hstack([np.ones((len(c), 1), dtype=np.int64), c]).astype(np.float64)
        feat = hat
        for _ in range(s - 1):
            feat = (feat[:, :, None] * hat[:, None, :]).reshape(len(c), -1)
        head = np.rint(feat @ Hf).astype(np.int64) % p
        alive = ~head.any(axis=1)
        if alive.any():
            full = np.rint(feat[alive] @ Tf).astype(np.int64) % p
            hits += int((~full.any(axis=1)).sum())
    return hits


def twisted_count(C: CurveModel, spec: ActionSpec, g, k: int, budget: int = TWIST_BUDGET) -> int:
    """#{P on the projective model : F^k(g P) = P}, F the q^r-Frobenius.

    The points at infinity of every model are rational over F_q, so F fixes them.
    """
    if spec.curve != C:
        raise ValueError("action belongs to another curve")
    if k < 1:
        raise ValueError("k must be positive")
    npts = spec.base_field.q ** (2 * k)
    if npts > budget:
        raise ValueError(f"{npts} candidate points exceed the twisted-count budget {budget}")
    L, w, basis = _fixed_space(spec, g, k)
    T, s = _curve_tensor(C, L, w, basis)
    hits = _zero_count(T, s, len(basis), L.p)
    inf = sum(1 for i, j in enumerate(spec.infinity(g)) if i == j)
    return hits + inf


def twisted_counts(C: CurveModel, spec: ActionSpec, g, ks: Sequence[int] | int,
                   budget: int = TWIST_BUDGET) -> list[int]:
    ks = range(1, ks + 1) if isinstance(ks, int) else ks
    return [twisted_count(C, spec, g, k, budget) for k in ks]


# ---------------------------------------------------------- H^1 character


@dataclass
class FrobeniusData:
    Q: int  # the Frobenius is x -> x^Q
    genus: int
    minpoly: list[Fraction]  # monic minimal polynomial of F on H^1, constant term first


def frobenius_data(spec: ActionSpec) -> FrobeniusData:
    cached = spec.notes.get("_frobenius")
    if cached is not None:
        return cached
    C = spec.curve
    z = curve_zeta(C)
    r = spec.base_degree
    LQ = base_change(z.L, r)
    # det(x - F) is the reversal of L(T)
    char = list(reversed(LQ))
    mp = squarefree_part(char) if len(char) > 1 else [Fraction(1)]
    lead = mp[-1]
    mp = [c / lead for c in mp]
    out = FrobeniusData(C.q**r, z.genus, mp)
    spec.notes["_frobenius"] = out
    return out


def fixed_components(spec: ActionSpec, g) -> int:
    return sum(1 for i, j in enumerate(spec.components(g)) if i == j)


def tame_trace(spec: ActionSpec, g) -> int:
    """Tr(g | H^1) = Tr(g | H^0) + Tr(g | H^2) - #Fix(g), g of order prime to p."""
    c = fixed_components(spec, g)
    if acts_trivially(spec, g):
        return 2 * frobenius_data(spec).genus
    return 2 * c - fixed_points(spec.curve, spec, g)


def twisted_traces(spec: ActionSpec, g, ks: Sequence[int], budget: int = TWIST_BUDGET) -> list[int]:
    """t_k = Tr(g F^k | H^1) from the twisted counts."""
    Q = frobenius_data(spec).Q
    c = fixed_components(spec, g)
    return [(1 + Q**k) * c - T for k, T in zip(ks, twisted_counts(spec.curve, spec, g, ks, budget))]


def twisted_trace(spec: ActionSpec, g, budget: int = TWIST_BUDGET) -> Fraction:
    """Tr(g | H^1) by running the Frobenius recurrence back to k = 0."""
    fd = frobenius_data(spec)
    d = len(fd.minpoly) - 1
    if d == 0:
        return Fraction(0)
    t = twisted_traces(spec, g, range(1, d + 1), budget)
    c = fd.minpoly
    return -sum(c[i] * t[i - 1] for i in range(1, d + 1)) / c[0]


def h1_character(C: CurveModel, spec: ActionSpec, method: str = "twisted",
                 budget: int = TWIST_BUDGET) -> ClassFunction:
    """Character of the group on H^1 of the projective model.

    tame-lefschetz uses fixed points on p'-classes and twisted counts on wild
    classes; twisted uses twisted counts everywhere and cross-checks the
    p'-classes against the tame formula.
    """
    if spec.curve != C:
        raise ValueError("action belongs to another curve")
    if method not in ("tame-lefschetz", "twisted"):
        raise ValueError(f"unknown method {method!r}")
    G = spec.group
    p = C.q
    values = []
    for g in G.class_reps:
        tame = G.element_order(g) % p != 0
        if method == "tame-lefschetz" and tame:
            values.append(Fraction(tame_trace(spec, g)))
            continue
        v = twisted_trace(spec, g, budget)
        if tame and v != tame_trace(spec, g):
            raise RuntimeError(f"tame and twisted traces disagree at {g}: {tame_trace(spec, g)} vs {v}")
        values.append(v)
    if any(v.denominator != 1 for v in values):
        raise RuntimeError("non-integral trace on H^1")
    return ClassFunction(G, [int(v) for v in values], f"H1({C.kind})")


# --------------------------------------------------------- module matching


@dataclass
class ModuleHypothesis:
    constituents: list[tuple[ClassFunction, Cyc]]  # (character, Frobenius scalar)
    names: list[str] = field(default_factory=list)

    def dim(self) -> int:
        return sum(chi.dim() for chi, _ in self.constituents)

    def trace(self, g, k: int) -> Cyc:
        total = ZERO
        for chi, lam in self.constituents:
            total = total + chi(g) * lam**k
        return total


@dataclass
class TwistedTable:
    spec: ActionSpec
    Q: int
    genus: int
    counts: dict  # (class index, k) -> T_k
    fixed_components: list[int]

    @property
    def horizon(self) -> int:
        return max((k for _, k in self.counts), default=0)


def twisted_table(spec: ActionSpec, K: int, budget: int = TWIST_BUDGET) -> TwistedTable:
    """T_k(g) for every class representative and k <= K (k limited by the budget)."""
    fd = frobenius_data(spec)
    G = spec.group
    counts = {}
    for j, g in enumerate(G.class_reps):
        for k in range(1, K + 1):
            counts[(j, k)] = twisted_count(spec.curve, spec, g, k, budget)
    return TwistedTable(spec, fd.Q, fd.genus, counts, [fixed_components(spec, g) for g in G.class_reps])


def max_horizon(spec: ActionSpec, budget: int = TWIST_BUDGET) -> int:
    Q = spec.base_field.q
    k = 0
    while Q ** (2 * (k + 1)) <= budget:
        k += 1
    return k


@dataclass
class MatchReport:
    ok: bool
    K: int
    checked: int
    mismatch: tuple | None = None
    diagnostic: str = ""
    # the counts for all k are implied: K reaches the degree of the Frobenius
    # minimal polynomial and every hypothesised scalar is one of its roots
    determined: bool = False

    def __bool__(self) -> bool:
        return self.ok


def module_match(actual: TwistedTable, hyp: ModuleHypothesis, K: int | None = None) -> MatchReport:
    """Compare predicted sum_i (-1)^i Tr(g F^k | H^i) with the twisted counts."""
    K = actual.horizon if K is None else K
    if K > actual.horizon:
        raise ValueError(f"table only reaches k = {actual.horizon}")
    if hyp.dim() != 2 * actual.genus:
        return MatchReport(False, K, 0, None, f"dimension {hyp.dim()} != 2g = {2 * actual.genus}")
    G = actual.spec.group
    checked = 0
    for k in range(1, K + 1):
        for j, g in enumerate(G.class_reps):
            c = actual.fixed_components[j]
            pred = (1 + actual.Q**k) * c - hyp.trace(g, k)
            if pred != actual.counts[(j, k)]:
                return MatchReport(False, K, checked, (j, k), f"class {j}, k={k}: predicted {pred}, "
                                                               f"counted {actual.counts[(j, k)]}")
            checked += 1
    mp = frobenius_data(actual.spec).minpoly
    roots_ok = all(_is_root(mp, lam) for _, lam in hyp.constituents)
    return MatchReport(True, K, checked, determined=roots_ok and K >= len(mp) - 1)


def _is_root(poly: list[Fraction], lam: Cyc) -> bool:
    total = ZERO
    for c in reversed(poly):
        total = total * lam + Cyc.rational(c)
    return total.is_zero()


def _layer_frequency(rho: ClassFunction, layer: Sequence, F: FieldDesc, embed=lambda c: c) -> int:
    """b with rho(layer[c]) = dim * zeta_p^Tr(b c) for c in F."""
    p = F.p
    d = rho.dim()
    for b in range(F.q):
        if all(rho(layer[c]) == Cyc.zeta(p, F.trace(F.mul(b, embed(c)))) * d for c in range(F.q)):
            return b
    raise ValueError("restriction to the layer is not isotypic")


def gauss_scalar(F: FieldDesc, b: int) -> Cyc:
    """-g(eta, psi_b) for the quadratic character eta of F."""
    return -gauss_sum(MultChar.quadratic(F), AddChar(F, b))


def stratum_hypothesis(q: int, kind: str) -> tuple[ActionSpec, ModuleHypothesis]:
    """Sum of rho_S over the simple classes, each with Frobenius acting by a Gauss sum.

    The scalar on the constituent whose layer character is psi_b is
    -g(eta, psi_b), eta quadratic on the field of definition of the action.
    """
    from .strata import enumerate_simple, rho_S

    if kind == "unramified":
        spec = bigas_action(q)
        G = spec.group
        layer = {c: (1, 0, c) for c in range(G.field.q)}
    elif kind in ("ramified", "ramified-pi"):
        spec = hyper_action(q, with_sign=False)
        G = spec.group
        layer = {c: (1, c) for c in range(G.field.q)}
        kind = "ramified-pi"
    else:
        raise ValueError(f"unknown kind {kind!r}")
    F = spec.base_field
    cons, names = [], []
    for S in enumerate_simple(q, kind, 1):
        rho = rho_S(S, G)
        b = _layer_frequency(rho, layer, F)
        lam = gauss_scalar(F, b) if kind == "ramified-pi" else _norm_gauss_scalar(F, q, b)
        cons.append((rho, lam))
        names.append(rho.name)
    return spec, ModuleHypothesis(cons, names)


def _norm_gauss_scalar(F: FieldDesc, q: int, b: int) -> Cyc:
    """Common value of -g(chi, psi_(b^q - b)) over chi != 1 with chi^(q+1) = 1.

    The x-side of the unramified curve is a function of u = x^(q+1), and
    psi_b(u^q - u) = psi_(b^q - b)(u) after moving the Frobenius across the trace.
    """
    beta = F.sub(F.pow(b, q), b)
    step = (F.q - 1) // (q + 1)
    if beta == 0:
        raise ValueError(f"frequency {b} lies in the base field")
    vals: list[Cyc] = []
    for j in range(1, q + 1):
        v = -gauss_sum(MultChar(F, j * step), AddChar(F, beta))
        if v not in vals:
            vals.append(v)
    if len(vals) != 1:
        raise ValueError(f"no common Gauss sum for the frequency {b}")
    return vals[0]


# -------------------------------------------------- finite-level JL check


def theta(F2: FieldDesc, j: int):
    return lambda x: Cyc.zeta(F2.q - 1, j * F2.dlog(x))


def cuspidal_character(q: int, j: int):
    """Character of the cuspidal representation pi_theta of GL_2(F_q), theta = theta_j."""
    F2 = make_field(q, 2)
    th = theta(F2, j)

    def chi(m):
        a, b, c, d = m
        tr, det = (a + d) % q, (a * d - b * c) % q
        if b == 0 and c == 0 and a == d:
            return th(a) * (q - 1)
        disc = (tr * tr - 4 * det) % q
        if disc == 0:
            return -th(tr * pow(2, -1, q) % q)
        if pow(disc, (q - 1) // 2, q) == 1:
            return ZERO
        lam = next(x for x in range(F2.q) if F2.add(F2.sub(F2.mul(x, x), F2.mul(tr, x)), det) == 0)
        return -(th(lam) + th(F2.pow(lam, q)))

    return chi


def _report(name: str, group: FiniteGroup, constituents: list, ok: bool, **extra) -> dict:
    out = {"curve": name, "group": group.name, "order": group.order, "ok": ok,
           "constituents": constituents}
    out.update(extra)
    return out


def frobenius_scalar(spec: ActionSpec, chi: ClassFunction, t1: ClassFunction | None = None) -> Cyc:
    """Scalar of F on the chi-isotypic part of H^1, chi of multiplicity one.

    F commutes with the group, so Tr(g F | H^1) = sum_chi lambda_chi chi(g)
    and lambda_chi = <t_1, chi>.
    """
    t1 = t1 or first_twisted_traces(spec)
    return t1.inner(chi)


def first_twisted_traces(spec: ActionSpec) -> ClassFunction:
    G = spec.group
    return ClassFunction(G, [twisted_traces(spec, g, [1])[0] for g in G.class_reps], "Tr(gF)")


def _scalar_str(lam: Cyc) -> str:
    return str(lam.as_fraction()) if lam.is_rational() else str(lam)


def depth_zero_check(q: int) -> dict:
    spec = dl_action(q)
    G = spec.group
    H = h1_character(spec.curve, spec)
    t1 = first_twisted_traces(spec)
    F2 = make_field(q, 2)
    table = character_table(G)
    mults = table.decompose(H)
    regular = [j for j in range(F2.q - 1) if (j * q - j) % (F2.q - 1)]
    candidates: list[tuple[ClassFunction, list[int]]] = []
    for j in regular:
        pi = cuspidal_character(q, j)
        th = theta(F2, j)
        cf = ClassFunction.from_function(G, lambda g: pi(g[0]) * th(g[1]).inverse())
        hit = next((v for c, v in candidates if c == cf), None)
        if hit is None:
            candidates.append((cf, [j]))
        else:
            hit.append(j)
    constituents, ok = [], True
    for chi, m in zip(table.irreducibles, mults):
        if not m:
            continue
        js = next((v for cf, v in candidates if cf == chi), None)
        name = f"pi_theta x theta^-1, theta in {sorted(js)}" if js else f"unexpected {chi.name}"
        ok &= js is not None and m == 1
        lam = _scalar_str(frobenius_scalar(spec, chi, t1)) if m == 1 else None
        constituents.append({"name": name, "dim": chi.dim(), "multiplicity": m, "frobenius_scalar": lam})
    ok &= len(constituents) == len(candidates) and sum(c["dim"] for c in constituents) == H.dim()
    return _report(spec.curve.label, G, constituents, ok, h1_dim=H.dim(), pairs=len(candidates),
                   thetas=len(regular))


def positive_depth_check(q: int, kind: str) -> dict:
    """Decompose H^1 into rho_S; any part of H^1 outside them is reported as excess."""
    spec, hyp = stratum_hypothesis(q, kind)
    G = spec.group
    H = h1_character(spec.curve, spec)
    t1 = first_twisted_traces(spec)
    constituents, ok = [], True
    total = ClassFunction.zero(G)
    for (rho, predicted), name in zip(hyp.constituents, hyp.names):
        m = H.multiplicity(rho)
        ok &= m == 1
        total = total + rho * m
        entry = {"name": name, "dim": rho.dim(), "multiplicity": m,
                 "frobenius_scalar": None, "gauss_sum_prediction": _scalar_str(predicted)}
        if m == 1:
            lam = frobenius_scalar(spec, rho, t1)
            m_common = math.lcm(lam.m, predicted.m)
            entry["frobenius_scalar"] = _scalar_str(lam.lift(m_common))
            entry["gauss_sum_prediction"] = _scalar_str(predicted.lift(m_common))
            ok &= lam == predicted
        constituents.append(entry)
    excess = (H - total).dim()
    ok &= excess == 0
    return _report(spec.curve.label, G, constituents, ok, h1_dim=H.dim(), classes=len(hyp.constituents),
                   excess_dim=excess)


def jl_finite_check(q: int) -> dict:
    if q not in (3, 5):
        raise ValueError("q must be 3 or 5")
    out = {"q": q, "depth_zero": depth_zero_check(q)}
    for kind, key in (("unramified", "unramified"), ("ramified", "ramified")):
        try:
            out[key] = positive_depth_check(q, kind)
        except ValueError as err:
            out[key] = {"ok": None, "skipped": str(err)}
    out["ok"] = all(v["ok"] is not False for k, v in out.items() if isinstance(v, dict))
    return out
