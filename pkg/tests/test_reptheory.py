import itertools

import pytest

from ltlab.curves import bigas_action, count_points, dl_action, dl_group, hyper_action, p1_action
from ltlab.cyclotomic import Cyc
from ltlab.ffpoly import make_field
from ltlab.groups import ClassFunction, FiniteGroup
from ltlab.reptheory import (AddChar, ModuleHypothesis, MultChar, character_table, det_on_cyclic,
                             frobenius_data, gauss_sum, h1_character, jl_finite_check, module_match,
                             stratum_hypothesis, tame_trace, twisted_count, twisted_table, twisted_trace)
from ltlab.strata import enumerate_simple, linking_quotient, quad_ext, rho_S


def gl2(q):
    els = [m for m in itertools.product(range(q), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % q]

    def mul(s, t):
        return ((s[0] * t[0] + s[1] * t[2]) % q, (s[0] * t[1] + s[1] * t[3]) % q,
                (s[2] * t[0] + s[3] * t[2]) % q, (s[2] * t[1] + s[3] * t[3]) % q)

    return FiniteGroup(els, mul, f"GL2({q})")


def cyclic_units(F):
    return FiniteGroup(range(1, F.q), F.mul, "units")


def test_gl2_table():
    T = character_table(gl2(3))
    assert len(T) == 8
    assert sorted(T.dims) == [1, 1, 2, 2, 2, 3, 3, 4]
    assert sum(d * d for d in T.dims) == 48


def test_cyclic_table_is_linear():
    T = character_table(cyclic_units(make_field(3, 2)))
    assert T.dims == [1] * 8


def test_table_column_orthogonality():
    G = gl2(3)
    T = character_table(G)
    for a in range(G.num_classes):
        for b in range(G.num_classes):
            s = sum((chi.values[a] * chi.values[b].conj() for chi in T.irreducibles), Cyc.rational(0))
            expected = G.order // G.class_sizes[a] if a == b else 0
            assert s == Cyc.rational(expected)


def test_table_budget():
    with pytest.raises(ValueError):
        character_table(gl2(3), budget=10)


def test_rs1_has_q_dimensional_characters_above_each_layer_character():
    G = linking_quotient(quad_ext(3, "unramified"))
    T = character_table(G)
    assert len(T) == 84
    K = G.field
    layer = [(1, 0, c) for c in range(K.q)]
    by_dim = {1: set(), 3: set()}
    for chi in T.irreducibles:
        vals = tuple(chi(x) / chi.degree for x in layer)
        if chi.dim() in by_dim and any(v != Cyc.rational(1) for v in vals):
            by_dim[chi.dim()].add(vals)
    # simple strata: frequencies outside F_3; the other two lie under linear characters
    assert len(by_dim[3]) == 9 - 3
    assert len(by_dim[1]) == 2 and not by_dim[1] & by_dim[3]


def test_unramified_rho_s():
    G = linking_quotient(quad_ext(3, "unramified"))
    rhos = [rho_S(S, G) for S in enumerate_simple(3, "unramified", 1)]
    assert [r.dim() for r in rhos] == [3] * 6
    for a, b in itertools.combinations(rhos, 2):
        assert a.inner(b) == Cyc.rational(0)
    assert all(r.is_irreducible() for r in rhos)


def test_det_on_cyclic():
    F = make_field(3, 2)
    G = cyclic_units(F)
    T = character_table(G)
    for chi in T.irreducibles:
        assert det_on_cyclic(chi, F.generator) == chi(F.generator)
    reg = sum(T.irreducibles[1:], T.irreducibles[0])
    # the regular representation of a cyclic group of order 8 has det -1 at a generator
    assert det_on_cyclic(reg, F.generator) == Cyc.rational(-1)


def test_gauss_sum_examples():
    F3 = make_field(3)
    assert gauss_sum(MultChar(F3, 0), AddChar(F3, 1)) == Cyc.rational(-1)
    assert gauss_sum(MultChar(F3, 0), AddChar(F3, 0)) == Cyc.rational(2)
    g = gauss_sum(MultChar.quadratic(F3), AddChar(F3, 1))
    assert g * g.conj() == Cyc.rational(3)


@pytest.mark.parametrize("p,r", [(3, 2), (5, 1), (5, 2)])
def test_gauss_sum_norm(p, r):
    F = make_field(p, r)
    for j in range(1, F.q - 1):
        g = gauss_sum(MultChar(F, j), AddChar(F, 1))
        assert g * g.conj() == Cyc.rational(F.q)


def test_twisted_identity_is_point_count():
    for spec in (hyper_action(3, with_sign=False), dl_action(3), bigas_action(3)):
        e = spec.group.identity
        r = spec.base_degree
        for k in (1, 2):
            assert twisted_count(spec.curve, spec, e, k) == count_points(spec.curve, r * k)


def test_twisted_translation_on_hyper():
    spec = hyper_action(3, with_sign=False)
    G = spec.group
    t = (1, 1)  # y -> y + 1
    assert G.element_order(t) == 3
    T1 = twisted_count(spec.curve, spec, t, 1)
    tr = 4 - T1
    # trace of t F on the two psi-lines: the Gauss sums -g(eta, psi_b) weighted by psi_b(1)
    F = make_field(3)
    pred = sum((-gauss_sum(MultChar.quadratic(F), AddChar(F, b)) * AddChar(F, b)(1) for b in (1, 2)),
               Cyc.rational(0))
    assert pred.is_rational() and Cyc.rational(tr) in (pred, pred.conj())


def test_twisted_conjugacy_invariance():
    spec = dl_action(3)
    G = spec.group
    for g in G.class_reps[::5]:
        for h in G.elements[::37]:
            assert twisted_count(spec.curve, spec, g, 1) == twisted_count(spec.curve, spec, G.conj(h, g), 1)


def test_twisted_budget():
    spec = dl_action(3)
    with pytest.raises(ValueError):
        twisted_count(spec.curve, spec, spec.group.identity, 4, budget=1000)


def test_h1_dimensions():
    assert h1_character(p1_action(3).curve, p1_action(3)).dim() == 0
    for spec, dim in ((dl_action(3), 6), (hyper_action(3), 2), (hyper_action(3, with_sign=False), 2)):
        assert h1_character(spec.curve, spec, method="tame-lefschetz").dim() == dim


def test_h1_methods_agree_on_tame_classes():
    for spec in (hyper_action(3), p1_action(3)):
        G = spec.group
        for g in G.class_reps:
            if G.element_order(g) % 3:
                assert tame_trace(spec, g) == twisted_trace(spec, g)


def test_frobenius_minimal_polynomials():
    assert frobenius_data(dl_action(3)).minpoly == [-9, 0, 1]
    assert frobenius_data(bigas_action(3)).minpoly == [3, 1]
    assert frobenius_data(hyper_action(3)).minpoly == [3, 0, 1]


def test_module_match_hyper():
    spec, hyp = stratum_hypothesis(3, "ramified")
    tab = twisted_table(spec, 4)
    rep = module_match(tab, hyp)
    assert rep.ok and rep.determined and rep.checked == 4 * spec.group.num_classes


def test_module_match_falsification():
    spec, hyp = stratum_hypothesis(3, "ramified")
    tab = twisted_table(spec, 4)
    wrong = ModuleHypothesis([(chi, -lam) for chi, lam in hyp.constituents])
    rep = module_match(tab, wrong)
    assert not rep.ok and rep.mismatch[1] <= 4
    short = ModuleHypothesis(hyp.constituents[:1])
    rep = module_match(tab, short)
    assert not rep.ok and "dimension" in rep.diagnostic


def test_module_match_bigas():
    spec, hyp = stratum_hypothesis(3, "unramified")
    assert hyp.dim() == 18
    tab = twisted_table(spec, 1)
    rep = module_match(tab, hyp)
    assert rep.ok and rep.determined
    wrong = ModuleHypothesis([(chi, Cyc.rational(3)) for chi, _ in hyp.constituents])
    assert not module_match(tab, wrong).ok


def test_dl_group_order():
    assert dl_group(3).order == 192


def test_jl_finite_check_q3():
    rep = jl_finite_check(3)
    assert rep["ok"]
    dz = rep["depth_zero"]["constituents"]
    assert [(c["dim"], c["multiplicity"]) for c in dz] == [(2, 1)] * 3
    un = rep["unramified"]["constituents"]
    assert [(c["dim"], c["multiplicity"]) for c in un] == [(3, 1)] * 6
    ra = rep["ramified"]["constituents"]
    assert [(c["dim"], c["multiplicity"]) for c in ra] == [(1, 1)] * 2


def test_class_function_group_identity():
    G = gl2(3)
    with pytest.raises(ValueError):
        ClassFunction.trivial(G) + ClassFunction.trivial(gl2(3))
