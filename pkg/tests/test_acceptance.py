"""The nine acceptance criteria, each at exact equality.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import itertools
import random
from fractions import Fraction

from ltlab.curves import (bigas_action, count_points, dl_action, hyper_action, make_curve, p1_action,
                          zeta_genus)
from ltlab.ffpoly import PiMatrix, make_field
from ltlab.formal_module import (INF, cm_module, delta_equivariance_check, has_canonical_subgroup, level_ring,
                                 newton_slopes, required_level, splitting_defect, trace_identity_check,
                                 universal_module)
from ltlab.reptheory import jl_finite_check, tame_trace, twisted_trace
from ltlab.strata import KINDS, enumerate_simple, quad_ext
from ltlab.tower_graph import (DualGraph, Vertex, blow_down, check_depth_zero, depth_zero_ball, genus_total,
                               modular_graph)

F3 = make_field(3)


def genus_of(kind, q, isotypic=1):
    C = make_curve(kind, q)
    # the fit searches g upward and must reproduce every count; 10 counts reach genus 10
    K = 10 if q == 5 else 8
    z = zeta_genus([count_points(C, k) for k in range(1, K + 1)], q, isotypic=isotypic)
    return z.genus, z.components


def test_criterion_1_genus(acceptance):
    found, ok = [], True
    for q in (3, 5):
        expected = {
            "Hyper": ((q - 1) // 2, 1, 1),
            "Hermitian": (q * (q - 1) // 2, 1, 1),
            "DL": (q * (q - 1) // 2, 1, 1),
            "BigAS": (q * q * (q - 1) // 2, q, q),
        }
        for kind, (g, comps, iso) in expected.items():
            got = genus_of(kind, q, iso)
            found.append(f"{kind}({q})={got[0]}")
            ok &= got == (g, comps)
    assert acceptance(1, ok, "genera " + " ".join(found))


def test_criterion_2_canonical_subgroup(acceptance):
    ok = True
    for q in (3, 5, 7):
        U = universal_module(q)
        b = Fraction(q, q + 1)
        values = sorted({b + Fraction(i, 40) for i in range(-10, 10)})
        assert len(values) == 20 and b in values
        for v in values:
            polygon = len(newton_slopes(U, 1, v)) >= 2
            ok &= has_canonical_subgroup(q, v) == polygon == (v < b)
    assert acceptance(2, ok, "flip at v_u = q/(q+1) for q = 3, 5, 7 (20 values each)")


def test_criterion_3_cm_valuations(acceptance):
    mod, v = cm_module(quad_ext(3, "unramified"))
    ok = v == INF and mod.linear_coeffs()[1].is_zero()
    vals = [cm_module(quad_ext(3, kind))[1] for kind in ("ramified-pi", "ramified-epspi")]
    ok &= vals == [Fraction(1, 2)] * 2
    assert acceptance(3, ok, f"unramified u = 0, ramified v(u) = {', '.join(map(str, vals))}")


def test_criterion_4_splitting(acceptance):
    one = PiMatrix.identity(F3)
    checked, bad, strata = 0, 0, {}
    for kind in KINDS:
        reps = enumerate_simple(3, kind, 1)
        strata[kind] = len(reps)
        for S in reps:
            L = level_ring(required_level(S), 3, precision=3)
            for g in (one + x for x in S.order.layer(S.n)):
                if g != one:
                    checked += 1
                    bad += not splitting_defect(g, S, L).is_zero()
    ok = bad == 0 and strata["unramified"] == 6 and strata["ramified-pi"] == strata["ramified-epspi"] == 2
    assert acceptance(4, ok, f"{checked} defects over {sum(strata.values())} simple strata, {bad} nonzero")


def gl2_mod_pi2_generators():
    gens = [[[2, 0], [0, 1]], [[1, 1], [0, 1]], [[0, 1], [1, 0]]]
    for i, j in itertools.product(range(2), repeat=2):
        e = [[1, 0], [0, 1]]
        e[i][j] = (e[i][j], 1)
        gens.append(e)
    return [PiMatrix(F3, g) for g in gens]


def test_criterion_5_delta_equivariance(acceptance):
    L = level_ring(2, 3)
    gens = gl2_mod_pi2_generators()
    bad = sum(not delta_equivariance_check(g, L).is_zero() for g in gens)
    assert acceptance(5, bad == 0, f"{len(gens)} generators of GL2(O/pi^2), {bad} nonzero")


def test_criterion_6_jacquet_langlands(acceptance):
    rep = jl_finite_check(3)

    def shape(part):
        return [(c["dim"], c["multiplicity"]) for c in rep[part]["constituents"]]

    ok = bool(rep["ok"])
    ok &= shape("depth_zero") == [(2, 1)] * 3
    ok &= shape("unramified") == [(3, 1)] * 6
    ok &= shape("ramified") == [(1, 1)] * 2
    # dimensions against 2g of the DL, BigAS and Hyper curves
    ok &= [sum(d * m for d, m in shape(p)) for p in ("depth_zero", "unramified", "ramified")] == [6, 18, 2]
    assert acceptance(6, ok, "3 depth-zero pairs, 6 rho_S of dim 3, 2 ramified of dim 1")


def test_criterion_7_trace_identity(acceptance):
    L = level_ring(2, 3)
    special = [[[a, 0], [0, a]] for a in range(3)] + [[[0, 1], [0, 0]], [[0, 0], [1, 0]], [[(0, 1), 0], [0, 0]]]
    ok = all(trace_identity_check(M, L).is_zero() for M in special)
    rng = random.Random(7)
    residuals = 0
    for _ in range(20):
        ents = [tuple(rng.randrange(3) for _ in range(2)) for _ in range(4)]
        M = PiMatrix(F3, [[ents[0], ents[1]], [ents[2], ents[3]]])
        residuals += not trace_identity_check(M, L).is_zero()
    ok &= residuals == 0
    assert acceptance(7, ok, f"scalar and nilpotent defects 0; {residuals} nonzero residuals on 20 general M")


def _random_graph(rng):
    G = DualGraph(3)
    n = rng.randint(1, 9)
    for i in range(n):
        g = rng.choice([0, 0, 0, 1, 3])
        end = rng.choice([None, None, None, "canonical:E0", "boundary:b0"])
        G.add_vertex(Vertex(f"v{i}", 0, "wild", "P1" if g == 0 else "Hyper", g, end=end))
    for _ in range(rng.randint(0, 2 * n)):
        G.add_edge(f"v{rng.randrange(n)}", f"v{rng.randrange(n)}")
    return G


def test_criterion_8_graphs(acceptance):
    ok = all(all(check_depth_zero(depth_zero_ball(q, r)).values()) for q in (3, 5) for r in range(5))
    rng = random.Random(8)
    for _ in range(1000):
        G = _random_graph(rng)
        H = blow_down(G)
        ok &= genus_total(H) == genus_total(G) and H.ends() == G.ends()
    M = modular_graph(3, 1, {"s": 1, "igusa_genus": 0})
    igusa = sum(v.curve == "Igusa" for v in M.vertices.values())
    ok &= igusa == 4 and M.ends() == [] and len(M.components()) == 1
    assert acceptance(8, ok, f"trees with degree q+1, 1000 blow-downs, {igusa} Igusa vertices, no ends left")


def test_criterion_9_cross_method(acceptance):
    actions = [p1_action(3), dl_action(3), bigas_action(3), hyper_action(3), hyper_action(3, with_sign=False)]
    checked, bad = 0, 0
    for spec in actions:
        G = spec.group
        for g in G.class_reps:
            if G.element_order(g) % 3:
                checked += 1
                bad += tame_trace(spec, g) != twisted_trace(spec, g)
    assert acceptance(9, bad == 0, f"{checked} p'-classes over {len(actions)} actions, {bad} mismatches")
