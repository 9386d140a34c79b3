"""Labelled graphs for the stable reduction of the tower, and their quotients.

Depth-zero vertices are lattice classes in the Bruhat-Tits tree of GL_2 over
O = F_q[[pi]], barycentrically subdivided: the unramified vertex at distance d
from the root is a point P of P^1(O/pi^d), and the ramified vertex (d, P) is
the edge from (d-1, P mod pi^(d-1)) to (d, P).  Wild vertices hang off a
depth-zero anchor and are described by a CM embedding in the anchor's frame:
the image of a generator of the residue field (unramified) or of pi_E
(ramified), reduced to the precision that the level determines.

Quotients by congruence subgroups K_n = 1 + pi^n M_2(O) are orbit graphs
computed with union-find under explicit generators of K_n mod pi^M.
"""

from __future__ import annotations

import copy
import functools
import itertools
import json
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .ffpoly import is_prime, make_field
from .strata import QuadExt, cm_embeddings, quad_ext

KINDS = ("unramified-depth0", "ramified-depth0", "wild")
E_TAGS = {"unramified": "E0", "ramified-pi": "E1", "ramified-epspi": "E2"}
COLORS = {"unramified-depth0": "blue", "ramified-depth0": "black", "E0": "green", "E1": "red", "E2": "red",
          "igusa": "gray"}
MAX_RADIUS = 6


def curve_genus(kind: str, q: int) -> int:
    """Genus of the vertex curves (summed over components for BigAS)."""
    table = {"P1": 0, "DL": q * (q - 1) // 2, "Hyper": (q - 1) // 2, "BigAS": q * q * (q - 1) // 2}
    if kind not in table:
        raise ValueError(f"no genus for curve {kind!r}")
    return table[kind]


@dataclass
class Vertex:
    id: str
    depth: int
    kind: str
    curve: str
    genus: int | None
    stabilizer: str = ""
    E: str | None = None
    end: str | None = None
    descriptor: list | None = None


@dataclass
class DualGraph:
    q: int
    vertices: dict[str, Vertex] = field(default_factory=dict)
    edges: list[tuple[str, str]] = field(default_factory=list)
    directed: list[bool] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add_vertex(self, v: Vertex) -> Vertex:
        if v.id in self.vertices:
            raise ValueError(f"duplicate vertex {v.id}")
        self.vertices[v.id] = v
        return v

    def add_edge(self, a: str, b: str, directed: bool = False) -> None:
        if a not in self.vertices or b not in self.vertices:
            raise KeyError(f"edge {a}-{b} has an unknown endpoint")
        self.edges.append((a, b))
        self.directed.append(directed)

    def remove_vertex(self, vid: str) -> None:
        keep = [i for i, e in enumerate(self.edges) if vid not in e]
        self.edges = [self.edges[i] for i in keep]
        self.directed = [self.directed[i] for i in keep]
        del self.vertices[vid]

    def copy(self) -> "DualGraph":
        return copy.deepcopy(self)

    def neighbors(self, vid: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == vid:
                out.append(b)
            if b == vid:
                out.append(a)
        return out

    def degree(self, vid: str) -> int:
        return len(self.neighbors(vid))

    def has_loop(self, vid: str) -> bool:
        return (vid, vid) in self.edges

    def components(self) -> list[set[str]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        groups = defaultdict(set)
        for v in self.vertices:
            groups[find(v)].add(v)
        return sorted(groups.values(), key=lambda s: min(s))

    def betti1(self) -> int:
        return len(self.edges) - len(self.vertices) + len(self.components())

    def is_tree(self) -> bool:
        return len(self.components()) == 1 and self.betti1() == 0

    def ends(self) -> list[str]:
        return sorted(v.end for v in self.vertices.values() if v.end)


# ------------------------------------------------------------ O / pi^M


def _mul(a, b, q):
    M = len(a)
    out = [0] * M
    for i, x in enumerate(a):
        if x:
            for j in range(M - i):
                out[i + j] = (out[i + j] + x * b[j]) % q
    return tuple(out)


def _add(a, b, q):
    return tuple((x + y) % q for x, y in zip(a, b))


def _neg(a, q):
    return tuple(-x % q for x in a)


def _inv(a, q):
    M = len(a)
    if a[0] == 0:
        raise ZeroDivisionError("not a unit")
    inv = [pow(a[0], -1, q)]
    for i in range(1, M):
        s = sum(a[j] * inv[i - j] for j in range(1, i + 1)) % q
        inv.append(-s * inv[0] % q)
    return tuple(inv)


def _const(c, M, q):
    return tuple([c % q] + [0] * (M - 1))


def _pi_pow(j, M):
    return tuple(1 if i == j else 0 for i in range(M))


def _trunc(a, t):
    return tuple(x if i < t else 0 for i, x in enumerate(a))


def _val(a):
    return next((i for i, x in enumerate(a) if x), len(a))


def _mmul(A, B, q):
    a, b, c, d = A
    e, f, g, h = B
    return (_add(_mul(a, e, q), _mul(b, g, q), q), _add(_mul(a, f, q), _mul(b, h, q), q),
            _add(_mul(c, e, q), _mul(d, g, q), q), _add(_mul(c, f, q), _mul(d, h, q), q))


def _minv(A, q):
    a, b, c, d = A
    det = _add(_mul(a, d, q), _neg(_mul(b, c, q), q), q)
    di = _inv(det, q)
    return (_mul(d, di, q), _neg(_mul(b, di, q), q), _neg(_mul(c, di, q), q), _mul(a, di, q))


def _apply(A, P, q):
    a, b, c, d = A
    x, y = P
    return (_add(_mul(a, x, q), _mul(b, y, q), q), _add(_mul(c, x, q), _mul(d, y, q), q))


def _resize(a, M):
    return tuple(a[:M]) + (0,) * max(0, M - len(a))


def _normalize_point(P, d, q):
    """Canonical representative of a point of P^1(O/pi^d): (1, b) or (a, 1) with a in pi O."""
    x, y = (_trunc(_resize(t, d), d) for t in P)
    if d == 0:
        return ((), ())
    if x[0]:
        return (_const(1, d, q), _mul(y, _inv(x, q), q))
    return (_mul(x, _inv(y, q), q), _const(1, d, q))


def _points(d, q):
    if d == 0:
        return [((), ())]
    out = []
    for b in itertools.product(range(q), repeat=d):
        out.append((_const(1, d, q), tuple(b)))
    for a in itertools.product(range(q), repeat=d - 1):
        out.append(((0,) + tuple(a), _const(1, d, q)))
    return out


def _code(t) -> str:
    return "".join(str(x) for x in t)


def _point_code(P) -> str:
    x, y = P
    if not x:
        return ""
    return ("b" + _code(y)) if x[0] else ("a" + _code(x))


def _parse_point(code: str, q: int):
    if not code:
        return ((), ())
    digits = tuple(int(c) for c in code[1:])
    one = _const(1, len(digits), q)
    return (one, digits) if code[0] == "b" else (digits, one)


def generators(q: int, n: int, M: int) -> list[tuple]:
    """Generators of K_n = 1 + pi^n M_2(O) modulo pi^M (K_0 = GL_2(O))."""
    one, zero = _const(1, M, q), _const(0, M, q)
    gens = []
    if n == 0:
        g = next(g for g in range(1, q) if all(pow(g, (q - 1) // r, q) != 1 for r in _primes(q - 1)))
        gens += [(one, one, zero, one), (one, zero, one, one), (_const(g, M, q), zero, zero, one),
                 (one, zero, zero, _const(g, M, q))]
        n = 1
    for j in range(n, M):
        t = _pi_pow(j, M)
        up = _add(one, t, q)
        gens += [(up, zero, zero, one), (one, zero, zero, up), (one, t, zero, one), (one, zero, t, one)]
    return gens


def _primes(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if n % p == 0 and is_prime(p)]


def _gl2_order(q: int, M: int) -> int:
    return (q * q - 1) * (q * q - q) * q ** (4 * (M - 1))


# ------------------------------------------------------------ depth zero


def _uid(d, P):
    return "U0" if d == 0 else f"U{d}:{_point_code(P)}"


def _rid(d, P):
    return f"R{d}:{_point_code(P)}"


def depth_zero_ball(q: int, radius: int) -> DualGraph:
    """Ball of the given radius around the root in the subdivided tree."""
    if not is_prime(q) or q == 2:
        raise ValueError("q must be an odd prime")
    if not 0 <= radius <= MAX_RADIUS:
        raise ValueError(f"radius must lie in [0, {MAX_RADIUS}]")
    G = DualGraph(q, meta={"radius": radius})
    dl = curve_genus("DL", q)
    D = radius // 2  # deepest unramified layer
    for d in range(0, D + 1):
        for P in _points(d, q):
            G.add_vertex(Vertex(_uid(d, P), 0, "unramified-depth0", "DL", dl, "SL2(O) conjugate",
                                descriptor=["U", d, _point_code(P)]))
    for d in range(1, (radius + 1) // 2 + 1):
        for P in _points(d, q):
            rid = _rid(d, P)
            G.add_vertex(Vertex(rid, 0, "ramified-depth0", "P1", 0, "Iwahori", descriptor=["R", d, _point_code(P)]))
            parent = _normalize_point(P, d - 1, q)
            G.add_edge(_uid(d - 1, parent), rid, directed=True)
            if d <= D:
                G.add_edge(_uid(d, P), rid, directed=True)
    # the outermost layer carries the boundary ends of the tree
    outer = "U" if radius % 2 == 0 else "R"
    dmax = D if outer == "U" else (radius + 1) // 2
    for v in G.vertices.values():
        if v.descriptor[0] == outer and v.descriptor[1] == dmax:
            v.end = f"boundary:{v.descriptor[2]}"
    return G


def check_depth_zero(G: DualGraph) -> dict:
    """Tree, alternation of kinds, interior degrees q+1 and 2."""
    q = G.q
    zero = [v for v in G.vertices.values() if v.depth == 0]
    alternates = all(G.vertices[a].kind != G.vertices[b].kind for a, b in G.edges
                     if G.vertices[a].depth == 0 and G.vertices[b].depth == 0)
    degrees_ok = True
    for v in zero:
        if v.end:
            continue
        deg = sum(1 for u in G.neighbors(v.id) if G.vertices[u].depth == 0)
        degrees_ok &= deg == (q + 1 if v.kind == "unramified-depth0" else 2)
    return {"tree": G.is_tree(), "alternates": alternates, "degrees": degrees_ok}


# ----------------------------------------------------------------- wild


def _e_tag(E: QuadExt) -> str:
    return E_TAGS[E.kind]


def _precisions(E: QuadExt, m: int) -> tuple[int, int, int, int]:
    """Entry precisions (X11, X12, X21, X22) of the level-m descriptor in the anchor frame."""
    if not E.ramified:
        return (m, m, m, m)
    # X mod P^(m+1) for the standard Iwahori [[O, O], [pi O, O]]
    j = m + 1
    return ((j + 1) // 2, j // 2, (j + 2) // 2, (j + 1) // 2)


def _reduce_desc(X, prec):
    return tuple(_resize(x, t) for x, t in zip(X, prec))


def _standard_embedding(E: QuadExt, M: int):
    q = E.q
    if not E.ramified:
        F2 = make_field(q, 2)
        # companion matrix of the minimal polynomial of the generator of F_{q^2}
        g = F2.generator
        t = F2.add(g, F2.pow(g, q)) % q
        d = F2.mul(g, F2.pow(g, q)) % q
        return (_const(0, M, q), _const(-d, M, q), _const(1, M, q), _const(t, M, q))
    eps = E.uniformizer_square
    return (_const(0, M, q), _const(1, M, q), tuple(_mul(_const(eps, M, q), _pi_pow(1, M), q)),
            _const(0, M, q))


def _anchor_frame(P, q: int, M: int):
    """a in GL_2(O) with a.(1:0) = P for a point P of P^1(O/pi)."""
    x, y = (_resize(t, M) for t in P)
    one, zero = _const(1, M, q), _const(0, M, q)
    if x[0]:
        return (one, zero, y, one)
    return (x, one, one, zero)


def _wid(tag, anchor, m, X):
    return f"W{tag}:{anchor}:{m}:{'.'.join(_code(x) for x in X)}"


def _iwahori_generators(q: int, M: int) -> list[tuple]:
    one, zero = _const(1, M, q), _const(0, M, q)
    g = next(g for g in range(1, q) if all(pow(g, (q - 1) // r, q) != 1 for r in _primes(q - 1)))
    gens = [(_const(g, M, q), zero, zero, one), (one, zero, zero, _const(g, M, q)), (one, one, zero, one)]
    for j in range(1, M):
        t = _pi_pow(j, M)
        up = _add(one, t, q)
        gens += [(up, zero, zero, one), (one, zero, zero, up), (one, t, zero, one), (one, zero, t, one)]
    gens.append((one, zero, _pi_pow(1, M), one))
    return gens


def _embedding_orbit(E: QuadExt, m: int) -> list[tuple]:
    """Level-m descriptors at a standard anchor: conjugates of the standard embedding."""
    q = E.q
    prec = _precisions(E, m)
    M = max(prec)
    gens = generators(q, 0, M) if not E.ramified else _iwahori_generators(q, M)
    start = _reduce_desc(_standard_embedding(E, M), prec)
    seen = {start}
    frontier = [start]
    inv = [_minv(g, q) for g in gens]
    while frontier:
        nxt = []
        for X in frontier:
            Xf = tuple(_resize(x, M) for x in X)
            for g, gi in zip(gens, inv):
                Y = _reduce_desc(_mmul(_mmul(g, Xf, q), gi, q), prec)
                if Y not in seen:
                    seen.add(Y)
                    nxt.append(Y)
        frontier = nxt
    return sorted(seen)


def cm_branching(E: QuadExt, depth: int) -> list[int]:
    """Children per wild vertex at levels 1..depth, from the embedding orbits."""
    sizes = [1] + [len(_embedding_orbit(E, m)) for m in range(1, depth + 1)]
    return [sizes[i + 1] // sizes[i] for i in range(depth)]


def sprout(G: DualGraph, v: str, E: QuadExt, d: int, branching: Sequence[int] | str | None = None) -> DualGraph:
    """Attach the wild vertices (x, 1..d) with x in X^E above the depth-zero vertex v.

    branching=None draws one chain; a list gives children per vertex at each
    level; "cm" enumerates the CM embeddings (root and its ramified
    neighbours only), which also fixes the descriptors needed by quotient().
    """
    if E.q != G.q:
        raise ValueError("extension over a different residue field")
    if v not in G.vertices:
        raise KeyError(v)
    anchor = G.vertices[v]
    want = "ramified-depth0" if E.ramified else "unramified-depth0"
    if anchor.kind != want:
        raise ValueError(f"{E.kind} sprouts attach to {want} vertices, not {anchor.kind}")
    if d < 0:
        raise ValueError("depth must be non-negative")
    G = G.copy()
    tag = _e_tag(E)
    q = G.q
    if d == 0:
        return G
    if branching == "cm":
        return _sprout_cm(G, anchor, E, d)
    mult = [1] * d if branching is None else list(branching)
    if len(mult) != d or any(b < 1 for b in mult):
        raise ValueError("branching must list d positive multiplicities")
    layer = [v]
    for m in range(1, d + 1):
        nxt = []
        for parent in layer:
            for i in range(mult[m - 1]):
                wid = f"W{tag}:{v}:{m}:{parent.rsplit(':', 1)[-1] if m > 1 else ''}{i}"
                curve = _wild_curve(E, m)
                G.add_vertex(Vertex(wid, m, "wild", curve, curve_genus(curve, q), "K_{x,n}", tag))
                G.add_edge(parent, wid, directed=True)
                nxt.append(wid)
        layer = nxt
    for wid in layer:
        G.vertices[wid].end = f"canonical:{tag}:{wid}"
    G.meta.setdefault("branching", {})[f"{v}:{tag}"] = mult
    return G


def _wild_curve(E: QuadExt, m: int) -> str:
    if not E.ramified:
        return "BigAS"
    return "P1" if m % 2 else "Hyper"


def _sprout_cm(G: DualGraph, anchor: Vertex, E: QuadExt, d: int) -> DualGraph:
    q = G.q
    tag = _e_tag(E)
    kind, dist, code = anchor.descriptor
    if (kind, dist) not in (("U", 0), ("R", 1)):
        raise ValueError("CM descriptors are only available at the root and its ramified neighbours")
    levels = [_embedding_orbit(E, m) for m in range(1, d + 1)]
    # cross-check the first level against the GL_2-orbit of all embeddings mod pi
    total = cm_embeddings(E, 1).num_embeddings
    if len(levels[0]) * (1 if not E.ramified else q + 1) != total:
        raise RuntimeError("level-1 descriptors disagree with the CM embedding count")
    prev_ids = {(): anchor.id}
    for m, descs in enumerate(levels, start=1):
        cur = {}
        prec_parent = _precisions(E, m - 1) if m > 1 else None
        for X in descs:
            wid = _wid(tag, anchor.id, m, X)
            curve = _wild_curve(E, m)
            G.add_vertex(Vertex(wid, m, "wild", curve, curve_genus(curve, q), "K_{x,n}", tag,
                                descriptor=["W", tag, anchor.id, m, [list(x) for x in X]]))
            key = () if m == 1 else _reduce_desc(X, prec_parent)
            G.add_edge(prev_ids[key], wid, directed=True)
            cur[X] = wid
        prev_ids = cur
    for wid in prev_ids.values():
        G.vertices[wid].end = f"canonical:{tag}"
    G.meta.setdefault("branching", {})[f"{anchor.id}:{tag}"] = "cm"
    G.meta["branching_precision"] = max(G.meta.get("branching_precision", 0), d)
    return G


# ------------------------------------------------------------- quotient


def _descriptor_precision(G: DualGraph) -> int:
    M = 1
    for v in G.vertices.values():
        if v.descriptor is None:
            continue
        if v.descriptor[0] in ("U", "R"):
            M = max(M, v.descriptor[1])
        elif v.descriptor[0] == "W":
            E = _tag_ext(G.q, v.descriptor[1])
            M = max(M, max(_precisions(E, v.descriptor[3])) + 1)
    return M


@functools.lru_cache(maxsize=None)
def _tag_ext(q: int, tag: str) -> QuadExt:
    kind = {t: k for k, t in E_TAGS.items()}[tag]
    return quad_ext(q, kind)


def _act(G: DualGraph, k, v: Vertex, M: int) -> str:
    q = G.q
    desc = v.descriptor
    if desc[0] in ("U", "R"):
        d = desc[1]
        P = _parse_point(desc[2], q)
        if d == 0:
            return v.id
        Q = _normalize_point(_apply(tuple(_trunc(_resize(x, M), d) for x in k), tuple(_resize(t, M) for t in P), q),
                             d, q)
        return _uid(d, Q) if desc[0] == "U" else _rid(d, Q)
    _, tag, anchor_id, m, X = desc
    E = _tag_ext(q, tag)
    prec = _precisions(E, m)
    Xf = tuple(_resize(tuple(x), M) for x in X)
    if not E.ramified:
        Y = _reduce_desc(_mmul(_mmul(k, Xf, q), _minv(k, q), q), prec)
        return _wid(tag, anchor_id, m, Y)
    # ramified anchor (1, P): move to (1, kP) and conjugate in the standard frame
    P = _parse_point(G.vertices[anchor_id].descriptor[2], q)
    P1 = tuple(_resize(t, M) for t in P)
    kP = _normalize_point(_apply(k, P1, q), 1, q)
    a, a2 = _anchor_frame(P, q, M), _anchor_frame(kP, q, M)
    i = _mmul(_mmul(_minv(a2, q), k, q), a, q)
    Y = _reduce_desc(_mmul(_mmul(i, Xf, q), _minv(i, q), q), prec)
    new_anchor = _rid(1, kP)
    return _wid(tag, new_anchor, m, Y)


def quotient(G: DualGraph, n: int, labels: bool = True) -> DualGraph:
    """K_n-orbit graph of G, labelled with the quotient curves Z_v / (H_v cap K_n)."""
    q = G.q
    if any(v.descriptor is None for v in G.vertices.values()):
        raise ValueError("insufficient descriptor precision: every vertex needs a descriptor")
    M = _descriptor_precision(G)
    gens = generators(q, n, M)
    parent = {v: v for v in G.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in gens:
        for v in G.vertices.values():
            w = _act(G, k, v, M)
            if w not in G.vertices:
                raise ValueError(f"ball is not stable under K_{n}: {v.id} -> {w}")
            parent[find(w)] = find(v.id)
    orbits = defaultdict(list)
    for v in G.vertices:
        orbits[find(v)].append(v)
    rep = {r: min(members) for r, members in orbits.items()}
    # edge orbits: an edge maps to the edge between the images of its endpoints
    eparent = list(range(len(G.edges)))
    index = defaultdict(list)
    for i, (a, b) in enumerate(G.edges):
        index[frozenset((a, b))].append(i)

    def efind(x):
        while eparent[x] != x:
            eparent[x] = eparent[eparent[x]]
            x = eparent[x]
        return x

    for k in gens:
        for i, (a, b) in enumerate(G.edges):
            ka, kb = _act(G, k, G.vertices[a], M), _act(G, k, G.vertices[b], M)
            j = index[frozenset((ka, kb))][0]
            eparent[efind(j)] = efind(i)
    H = DualGraph(q, meta={"level": n, "precision": M, "orbits": {}})
    for r, members in sorted(orbits.items(), key=lambda t: rep[t[0]]):
        v = G.vertices[rep[r]]
        w = copy.deepcopy(v)
        if labels:
            curve, genus = quotient_label(v, n, q)
            w.curve, w.genus = curve, genus
        if v.end and v.end.startswith("boundary:"):
            P = _parse_point(v.end.split(":", 1)[1], q)
            w.end = "boundary:" + _point_code(_normalize_point(P, min(n, len(P[0])), q))
        H.add_vertex(w)
        H.meta["orbits"][w.id] = len(members)
    seen = set()
    for i, (a, b) in enumerate(G.edges):
        r = efind(i)
        if r in seen:
            continue
        seen.add(r)
        H.add_edge(rep[find(a)], rep[find(b)], G.directed[i])
    return H


def orbit_stabilizer_check(G: DualGraph, n: int = 0, budget: int = 10**5) -> list[tuple[str, int, int, int]]:
    """(vertex, |orbit|, |stabilizer|, |group|) by enumerating GL_2(O/pi^M) (n = 0)."""
    q = G.q
    M = _descriptor_precision(G)
    order = _gl2_order(q, M)
    if order > budget:
        raise ValueError(f"|GL_2(O/pi^{M})| = {order} exceeds the budget")
    digits = list(itertools.product(range(q), repeat=M))
    group = [k for k in itertools.product(digits, repeat=4) if (k[0][0] * k[3][0] - k[1][0] * k[2][0]) % q]
    out = []
    for v in G.vertices.values():
        images = Counter(_act(G, k, v, M) for k in group)
        out.append((v.id, len(images), images[v.id], len(group)))
    return out


@functools.lru_cache(maxsize=None)
def dl_invariant_genus(q: int, subgroup: str) -> int:
    """Genus of the DL curve modulo a subgroup of SL_2(F_q), from the H^1 character."""
    from .curves import acts_trivially, dl_action
    from .reptheory import tame_trace, twisted_trace

    spec = dl_action(q)
    G = spec.group
    if subgroup == "unipotent":
        els = [((1, 0, c, 1), 1) for c in range(q)]
    elif subgroup == "borel":
        els = [((a, 0, c, pow(a, -1, q)), 1) for a in range(1, q) for c in range(q)]
    elif subgroup == "SL2":
        els = [((a, b, c, d), 1) for a, b, c, d in itertools.product(range(q), repeat=4) if (a * d - b * c) % q == 1]
    else:
        raise ValueError(subgroup)
    cache: dict[int, Fraction] = {}
    total = Fraction(0)
    for g in els:
        j = G.class_of(g)
        if j not in cache:
            if acts_trivially(spec, g):
                cache[j] = Fraction(q * (q - 1))
            elif G.element_order(g) % q:
                cache[j] = Fraction(tame_trace(spec, g))
            else:
                cache[j] = twisted_trace(spec, g)
        total += cache[j]
    inv = total / len(els)
    if inv.denominator != 1 or inv % 2:
        raise RuntimeError(f"invariant dimension {inv} is not twice a genus")
    return int(inv) // 2


def quotient_label(v: Vertex, n: int, q: int) -> tuple[str, int]:
    """Curve and genus of Z_v / (H_v cap K_n).

    K_n acts trivially once it lies in the kernel of the stabiliser's action;
    otherwise on wild vertices it contains the whole Artin-Schreier group, and
    on depth-zero vertices its image is computed from the H^1 character.
    """
    desc = v.descriptor
    if v.curve == "P1":
        return "P1", 0
    if desc[0] == "U":
        d = desc[1]
        if n >= d + 1:
            return v.curve, v.genus
        # every such image contains a unipotent group, and u = x^q - x y^(q-1) is
        # invariant with y u = -1, so already DL/U is the y-line
        return "P1", 0
    if desc[0] == "W":
        tag, m = desc[1], desc[3]
        trivial = n >= m + 1 if tag == "E0" else 2 * n >= m + 1
        return (v.curve, v.genus) if trivial else ("P1", 0)
    raise ValueError(f"cannot label {v.id}")


# ------------------------------------------------------------ bookkeeping


def genus_total(G: DualGraph) -> int:
    """Sum of the vertex genera plus the first Betti number."""
    missing = [v.id for v in G.vertices.values() if v.genus is None]
    if missing:
        raise ValueError(f"vertices without genus labels: {missing[:5]}")
    return sum(v.genus for v in G.vertices.values()) + G.betti1()


def blow_down(G: DualGraph, keep: Sequence[str] = ()) -> DualGraph:
    """Remove rational unmarked vertices of degree <= 2 (without loops) until none remain.

    Vertices listed in keep are never removed.
    """
    G = G.copy()
    keep = set(keep)
    changed = True
    while changed:
        changed = False
        for vid in sorted(G.vertices):
            v = G.vertices[vid]
            if v.genus != 0 or v.end or vid in keep or G.has_loop(vid):
                continue
            nb = G.neighbors(vid)
            if len(nb) > 2:
                continue
            G.remove_vertex(vid)
            if len(nb) == 2:
                G.add_edge(*sorted(nb))
            changed = True
    return G


def _erase_end(G: DualGraph, tip: str) -> str | None:
    """Erase the rational vertices on the end starting at tip; return the vertex it stops at."""
    cur = tip
    last = None
    while True:
        v = G.vertices[cur]
        nb = [u for u in G.neighbors(cur) if u != cur]
        if v.genus != 0 or len(nb) > 1:
            return cur if last is not None else None
        G.remove_vertex(cur)
        last = cur
        if not nb:
            return None
        cur = nb[0]


def modular_graph(p: int, n: int, cfg: dict) -> DualGraph:
    """Stable-reduction dual graph of X(Gamma(p^n) cap Gamma_1(N)) from the tower.

    cfg must give s (supersingular points of X_1(N) over F_p) and igusa_genus.
    """
    if "s" not in cfg or "igusa_genus" not in cfg:
        raise ValueError("cfg needs explicit 's' and 'igusa_genus'")
    s, g_ig = int(cfg["s"]), int(cfg["igusa_genus"])
    if n < 1:
        raise ValueError("n must be at least 1")
    q = p
    ball = depth_zero_ball(q, min(MAX_RADIUS, 2 * n + 2))
    depth_u, depth_r = n + 1, 2 * n + 1
    ball = sprout(ball, "U0", quad_ext(q, "unramified"), depth_u, "cm")
    for P in _points(1, q):
        for kind in ("ramified-pi", "ramified-epspi"):
            ball = sprout(ball, _rid(1, P), quad_ext(q, kind), depth_r, "cm")
    Q = quotient(ball, n)
    warnings = []
    # erase canonical ends, then boundary ends
    for vid in sorted(v.id for v in Q.vertices.values() if v.end and v.end.startswith("canonical")):
        if vid in Q.vertices:
            _erase_end(Q, vid)
    v_b = {}
    for vid in sorted(v.id for v in Q.vertices.values() if v.end and v.end.startswith("boundary")):
        b = Q.vertices[vid].end.split(":", 1)[1]
        stop = _erase_end(Q, vid)
        if stop is None or Q.vertices[stop].genus == 0:
            warnings.append(f"end {b} has no unique non-rational vertex")
            continue
        v_b[b] = stop
    boundary = sorted(_point_code(P) for P in _points(n, q))
    if sorted(v_b) != boundary:
        raise ValueError(f"boundary ends {sorted(v_b)} do not match P^1(O/pi^{n})")
    if any(v.end for v in Q.vertices.values()):
        raise ValueError("unmarked or unconsumed ends remain in Gamma_n")
    out = DualGraph(q, meta={"p": p, "n": n, "s": s, "igusa_genus": g_ig, "warnings": warnings,
                             "horizon": "exact" if n == 1 else "partial"})
    if n > 1:
        # deeper anchors carry sprouts that can survive K_n; they are not enumerated
        warnings.append("wild sprouts only at the root and its ramified neighbours")
    for b in boundary:
        out.add_vertex(Vertex(f"Ig:{b}", 0, "igusa", "Igusa", g_ig, "", end=None))
    for c in range(s):
        for v in Q.vertices.values():
            w = copy.deepcopy(v)
            w.id = f"c{c}/{v.id}"
            out.add_vertex(w)
        for (a, b), dirf in zip(Q.edges, Q.directed):
            out.add_edge(f"c{c}/{a}", f"c{c}/{b}", dirf)
        for b in boundary:
            out.add_edge(f"Ig:{b}", f"c{c}/{v_b[b]}")
    if s == 0:
        out.meta["degenerate"] = True
    # the Igusa components are never exceptional, whatever their genus
    return blow_down(out, keep=[f"Ig:{b}" for b in boundary])


# --------------------------------------------------------------- export


def to_json(G: DualGraph) -> dict:
    verts = []
    for vid in sorted(G.vertices):
        d = asdict(G.vertices[vid])
        verts.append(d)
    order = sorted(range(len(G.edges)), key=lambda i: (G.edges[i], G.directed[i]))
    return {"q": G.q, "vertices": verts, "edges": [list(G.edges[i]) for i in order],
            "directed": [G.directed[i] for i in order], "meta": G.meta}


def from_json(data: dict | str | bytes) -> DualGraph:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    G = DualGraph(data["q"], meta=data.get("meta", {}))
    for v in data["vertices"]:
        G.add_vertex(Vertex(**v))
    directed = data.get("directed") or [False] * len(data["edges"])
    for (a, b), dirf in zip(data["edges"], directed):
        G.add_edge(a, b, dirf)
    return G


def export(G: DualGraph, format: str = "json") -> bytes:
    if format == "json":
        return json.dumps(to_json(G), sort_keys=True, indent=1).encode()
    if format != "dot":
        raise ValueError(f"unknown format {format!r}")
    lines = ["graph G {"]
    for vid in sorted(G.vertices):
        v = G.vertices[vid]
        color = COLORS.get(v.E if v.kind == "wild" else v.kind, "black")
        label = f"{v.curve} g={v.genus}" + (f" [{v.end}]" if v.end else "")
        lines.append(f'  "{vid}" [label="{label}", color={color}];')
    for a, b in sorted(G.edges):
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()
