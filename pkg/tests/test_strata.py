import pytest

from ltlab.cyclotomic import Cyc
from ltlab.ffpoly import PiMatrix
from ltlab.strata import (ChainOrder, QuaternionData, all_simple, cm_embeddings, enumerate_simple,
                          linking_quotient, norm_valuation_of_Pi, psi_alpha, quad_ext, quadratic_exts,
                          rho_S, smallest_nonsquare, tangent_character)


def test_three_quadratic_extensions():
    for q in (3, 5):
        exts = quadratic_exts(q)
        assert [E.kind for E in exts] == ["unramified", "ramified-pi", "ramified-epspi"]
        assert exts[0].residue_size == q * q and exts[1].residue_size == q


def test_smallest_nonsquare():
    assert smallest_nonsquare(quad_ext(3, "unramified").k) == 2
    assert smallest_nonsquare(quad_ext(5, "unramified").k) == 2
    assert smallest_nonsquare(quad_ext(7, "unramified").k) == 3


def test_pi_E_squares_to_uniformizer():
    for kind in ("ramified-pi", "ramified-epspi"):
        E = quad_ext(3, kind)
        P = E.pi_E_matrix()
        sq = P * P
        c = E.uniformizer_square
        assert sq == PiMatrix(E.k, [[(0, c), 0], [0, (0, c)]])


def test_embedding_is_multiplicative():
    E = quad_ext(3, "unramified")
    K = E.kE
    for x in range(K.q):
        for y in range(K.q):
            assert E.embed_residue(x) * E.embed_residue(y) == E.embed_residue(K.mul(x, y))


def test_simple_strata_counts():
    assert len(enumerate_simple(3, "unramified", 1)) == 6
    assert len(enumerate_simple(3, "ramified-pi", 1)) == 2
    assert len(enumerate_simple(5, "unramified", 1)) == 20
    assert len(enumerate_simple(5, "ramified-pi", 1)) == 4
    assert len(all_simple(3, 1)) == 6 + 2 + 2


def test_ramified_even_level_rejected():
    with pytest.raises(ValueError):
        enumerate_simple(3, "ramified-pi", 2)


def test_chain_order_min_vals():
    assert ChainOrder(3, "unramified").min_vals(2) == (2, 2, 2, 2)
    assert ChainOrder(3, "ramified").min_vals(1) == (1, 0, 1, 1)
    assert ChainOrder(3, "ramified").min_vals(0) == (0, 0, 1, 0)


def test_equivalence_matches_character_equality():
    for kind in ("unramified", "ramified-pi"):
        reps = enumerate_simple(3, kind, 1)
        chars = [psi_alpha(S).on_layer() for S in reps]
        for i in range(len(reps)):
            for j in range(len(reps)):
                assert (chars[i] == chars[j]) == (i == j)


def test_linking_quotient_orders_and_axioms():
    G = linking_quotient(quad_ext(3, "unramified"))
    assert G.order == 648
    assert len(G.center()) == 18
    assert G.num_classes == 84
    H = linking_quotient(quad_ext(3, "ramified-pi"))
    assert H.order == 6 and H.is_abelian()
    for K in (G, H):
        e = K.identity
        for x in K.elements[:40]:
            assert K.mul(x, K.inv(x)) == e
            for y in K.generators:
                for z in K.generators:
                    assert K.mul(K.mul(x, y), z) == K.mul(x, K.mul(y, z))


def test_ramified_rho_is_a_character():
    for S in enumerate_simple(3, "ramified-pi", 1):
        chi = rho_S(S)
        assert chi.is_irreducible() and chi.dim() == 1
        assert chi((1, 1)) != Cyc.rational(1)


def test_tangent_character():
    E = quad_ext(3, "unramified")
    K = E.kE
    for u in range(1, K.q):
        assert tangent_character(E, u).code == K.pow(u, 2)
    R = quad_ext(3, "ramified-pi")
    assert tangent_character(R, 1, valuation=1).code == R.kE.neg(1)
    assert tangent_character(R, 2, valuation=2).code == 1
    with pytest.raises(ValueError):
        tangent_character(E, 0)


def test_quaternion_uniformizer_norm():
    assert norm_valuation_of_Pi(3) == 1
    Q = QuaternionData(3, 2)
    P = Q.Pi()
    assert Q.mul(P, P) == Q.elem((0, 1))


def test_cm_orbit_stabilizer():
    for kind, n, stab in (("unramified", 6, 8), ("ramified-pi", 8, 6)):
        rep = cm_embeddings(quad_ext(3, kind), 1)
        assert rep.num_embeddings == n
        assert len(rep.orbits) == 1
        o = rep.orbits[0]
        assert o["size"] * o["stabilizer"] == rep.group_order
        assert o["stabilizer"] == stab
