import itertools
import random

import pytest

from ltlab.curves import (SingularModel, act, acts_trivially, affine_points, base_change, bigas_action,
                          bigas_component, count_points, count_points_bruteforce, count_table, count_table_csv,
                          dl_action, fixed_points, hyper_action, make_curve, p1_action, poly_power, zeta_genus)
from ltlab.ffpoly import make_field


def counts(kind, q, K):
    C = make_curve(kind, q)
    return [count_points(C, k) for k in range(1, K + 1)]


def test_model_examples():
    H = make_curve("Hyper", 3)
    assert H.label == "y^3 - y = x^2" and len(H.infinity) == 1
    D = make_curve("DL", 3)
    assert len(D.infinity) == 4
    assert len(make_curve("BigAS", 3).infinity) == 3


def test_singular_generic_model_rejected():
    with pytest.raises(SingularModel) as err:
        make_curve("GenericAS", 3, f=[(3, 1)], p_poly=[(3, 1), (1, 2)])
    assert err.value.locus == ["[1:1:0]"]
    ok = make_curve("GenericAS", 3, f=[(2, 1)], p_poly=[(3, 1), (1, 2)])
    assert count_points(ok, 2) == count_points(make_curve("Hyper", 3), 2)


def test_non_additive_p_rejected():
    with pytest.raises(ValueError):
        make_curve("GenericAS", 3, f=[(2, 1)], p_poly=[(2, 1)])


def test_even_or_composite_q_rejected():
    with pytest.raises(ValueError):
        make_curve("Hyper", 4)
    with pytest.raises(ValueError):
        make_curve("Hyper", 9)


def test_count_examples():
    D = make_curve("DL", 3)
    assert count_points(D, 1) == 4  # no affine F_3-points
    assert count_points(make_curve("Hermitian", 3), 2) == 28 == 3**3 + 1
    assert count_points(make_curve("Hyper", 3), 1) == 4


@pytest.mark.parametrize("kind", ["P1", "DL", "Hermitian", "BigAS", "Hyper"])
def test_counts_match_brute_force(kind):
    C = make_curve(kind, 3)
    for k in (1, 2, 3):
        assert count_points(C, k) == count_points_bruteforce(C, k)


def test_count_budget():
    with pytest.raises(ValueError):
        count_points(make_curve("Hyper", 3), 8, budget=1000)


def test_zeta_examples():
    z = zeta_genus(counts("Hyper", 3, 4), 3)
    assert (z.genus, z.components, z.L) == (1, 1, [1, 0, 3])
    assert zeta_genus(counts("Hermitian", 3, 5), 3).genus == 3
    z = zeta_genus(counts("BigAS", 3, 11), 3)
    assert (z.genus, z.components) == (9, 3)


def test_zeta_stable_under_extra_counts():
    N = counts("DL", 3, 8)
    assert zeta_genus(N[:5], 3).L == zeta_genus(N, 3).L


def test_zeta_rejects_inconsistent_counts():
    N = counts("Hyper", 3, 4)
    N[1] += 3
    with pytest.raises(ValueError):
        zeta_genus(N, 3)


def test_weil_bounds():
    for kind in ("DL", "Hermitian", "Hyper"):
        N = counts(kind, 3, 6)
        z = zeta_genus(N, 3)
        for k, n in enumerate(N, 1):
            assert (n - z.components * (3**k + 1)) ** 2 <= 4 * z.genus**2 * 3**k


def test_bigas_components_are_hermitian():
    N = counts("BigAS", 3, 4)
    z = zeta_genus(N, 3, isotypic=3)
    assert z.L == zeta_genus(counts("Hermitian", 3, 4), 3).L
    assert poly_power(z.L, 3) == zeta_genus(counts("BigAS", 3, 11), 3).L


def test_base_change_maximal_curve():
    L = zeta_genus(counts("Hermitian", 3, 4), 3).L
    assert base_change(L, 2) == poly_power([1, 3], 6)  # F_9-Frobenius acts as -3


def test_count_table_csv():
    rows = count_table([make_curve("Hyper", 3)], [1, 2])
    assert count_table_csv(rows).splitlines() == ["q,kind,k,N_k", "3,Hyper,1,4", "3,Hyper,2,16"]


@pytest.fixture(scope="module")
def actions():
    return [p1_action(3), hyper_action(3), dl_action(3), bigas_action(3)]


def test_identity_and_composition(actions):
    rnd = random.Random(7)
    for s in actions:
        K = make_field(3, 4)
        pts = affine_points(s.curve, K)
        G = s.group
        for P in pts[:20]:
            assert act(s.curve, s, G.identity, P, K) == P
        for _ in range(30):
            g, h, P = rnd.choice(G.elements), rnd.choice(G.elements), rnd.choice(pts)
            first, second = (g, h) if s.side == "right" else (h, g)
            assert act(s.curve, s, G.mul(g, h), P, K) == act(s.curve, s, second, act(s.curve, s, first, P, K), K)
            img = act(s.curve, s, g, P, K)
            assert s.curve.on_curve(K, img)


def test_act_rejects_points_off_the_curve(actions):
    s = actions[1]
    with pytest.raises(ValueError):
        act(s.curve, s, s.group.identity, (1, 1))


def test_uniformizer_sign_resolved():
    s = hyper_action(3)
    assert s.notes["uniformizer_acts_as"] == "(x, y) -> (-x, y)"


def test_scalars_preserve_full_dl_curve():
    # (x y^q - x^q y)^(q-1) = 1 is preserved by (x, y) -> (a x, a y), a in F_3^x
    q = 3
    K = make_field(q, 4)
    mu = lambda x, y: K.sub(K.mul(x, K.pow(y, q)), K.mul(K.pow(x, q), y))
    pts = [(x, y) for x, y in itertools.product(range(K.q), repeat=2)
           if K.pow(mu(x, y), q - 1) == 1 and mu(x, y) != 0][:500]
    assert pts
    for a in (1, 2):
        for x, y in pts:
            m = mu(K.mul(a, x), K.mul(a, y))
            assert m == K.mul(K.pow(a, q + 1), mu(x, y)) and K.pow(m, q - 1) == 1


def test_bigas_component_permutation(actions):
    s = actions[3]
    K = make_field(3, 2)
    for g in s.group.generators:
        perm = s.components(g)
        for P in affine_points(s.curve, K)[:30]:
            img = act(s.curve, s, g, P, K)
            assert bigas_component(s.curve, K, img) == perm[bigas_component(s.curve, K, P)]


def test_fixed_points_examples(actions):
    p1, hyper, dl, big = actions
    with pytest.raises(ValueError):
        fixed_points(dl.curve, dl, dl.group.identity)
    # x -> 2x on P^1 fixes 0 and infinity
    assert fixed_points(p1.curve, p1, (2, 0)) == 2
    with pytest.raises(ValueError):
        fixed_points(p1.curve, p1, (1, 1))  # order p
    G = dl.group
    order8 = [g for g in G.class_reps if G.element_order(g) == 8]
    assert order8
    for g in order8:
        assert fixed_points(dl.curve, dl, g) == fixed_points(dl.curve, dl, g, method="enumerate")


def test_fixed_point_methods_agree(actions):
    for s in actions:
        G = s.group
        for g in G.class_reps:
            if G.element_order(g) % 3 == 0 or acts_trivially(s, g):
                continue
            assert fixed_points(s.curve, s, g) == fixed_points(s.curve, s, g, method="enumerate")
