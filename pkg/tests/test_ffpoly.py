import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltlab.ffpoly import (
    FFElem,
    Rational,
    frobenius,
    is_irreducible,
    make_field,
    make_ring,
    normal_form,
    poly_from_json,
    substitute,
)


def brute_order(F, a):
    x, k = a, 1
    while x != 1:
        x = F.mul(x, a)
        k += 1
    return k


def test_prime_field_modulus_is_x():
    F = make_field(3, 1)
    assert F.modulus == (0, 1)
    assert F.q == 3
    assert brute_order(F, F.generator) == 2


def test_f9_generator_order_bruteforce():
    F = make_field(3, 2)
    orders = {a: brute_order(F, a) for a in range(1, 9)}
    assert orders[F.generator] == 8
    assert sum(1 for o in orders.values() if o == 8) == 4


def test_modulus_is_lexicographically_smallest():
    for p, m in [(3, 2), (3, 3), (5, 2), (3, 4), (7, 2)]:
        F = make_field(p, m)
        cands = []
        for low in itertools.product(range(p), repeat=m):
            f = list(low) + [1]
            if is_irreducible(f, p):
                cands.append(tuple(reversed(low)))
        assert tuple(reversed(F.modulus[:-1])) == min(cands)


def test_repeated_calls_agree():
    assert make_field(5, 2) is make_field(5, 2)


@pytest.mark.parametrize("p,m", [(2, 1), (4, 1), (9, 1), (3, 0)])
def test_bad_fields_rejected(p, m):
    with pytest.raises(ValueError):
        make_field(p, m)


def test_cap_enforced():
    with pytest.raises(ValueError):
        make_field(3, 13)
    assert make_field(3, 13, cap=2**21).q == 3**13


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 2), (3, 3), (3, 4), (7, 2)])
def test_field_axioms_exhaustive(p, m):
    F = make_field(p, m)
    els = list(F.elements())
    A = np.array(els)
    for a in els:
        row_mul = F.vmul(a, A)
        row_add = F.vadd(a, A)
        assert sorted(row_add.tolist()) == els
        if a:
            assert sorted(row_mul.tolist()) == els[1:] or sorted(row_mul.tolist()) == els
            assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q) == a
    # distributivity and associativity on a sample of triples
    rng = random.Random(1)
    for _ in range(300):
        a, b, c = (rng.randrange(F.q) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_frobenius_fixed_field_f25():
    F = make_field(5, 2)
    fixed = [a for a in F.elements() if frobenius(FFElem(F, a), 1) == FFElem(F, a)]
    assert len(fixed) == 5
    assert set(fixed) == {F.from_int(i) for i in range(5)}


def test_frobenius_basic():
    F3 = make_field(3, 1)
    for a in range(3):
        assert frobenius(FFElem(F3, a), 1).code == a
    F = make_field(3, 2)
    g = FFElem(F, F.generator)
    assert frobenius(g, 1) == g**3
    assert frobenius(frobenius(g, 1), 1) == frobenius(g, 2) == g


def test_frobenius_is_ring_automorphism():
    F = make_field(3, 3)
    for a in range(0, F.q, 3):
        for b in range(1, F.q, 5):
            x, y = FFElem(F, a), FFElem(F, b)
            assert frobenius(x + y, 1) == frobenius(x, 1) + frobenius(y, 1)
            assert frobenius(x * y, 2) == frobenius(x, 2) * frobenius(y, 2)
            assert frobenius(frobenius(x, 1), 2) == frobenius(x, 3)


def test_trace_matches_minimal_polynomial():
    # g is a root of its minimal polynomial X^2 + c1 X + c0, so g + g^3 = -c1
    F = make_field(3, 2)
    g = FFElem(F, F.generator)
    tr = g + frobenius(g, 1)
    nm = g * frobenius(g, 1)
    assert (g * g + (-tr) * g + nm) == 0
    assert tr.coeffs[1] == 0 and nm.coeffs[1] == 0
    assert F.trace(F.generator) == tr.code


def test_ffelem_coeffs_roundtrip():
    F = make_field(5, 3)
    for c in range(0, F.q, 7):
        e = FFElem(F, c)
        assert FFElem.from_coeffs(F, e.coeffs) == e


def test_rational_is_exact():
    r = Rational(6, -4)
    assert r.numerator == -3 and r.denominator == 2


# ----------------------------------------------------------------- rings


@pytest.fixture
def level1():
    F = make_field(3, 1)
    return make_ring(F, ["pi", "u", "X"], [4, 8, None],
                     [({"X": 9}, {(1, 0, 1): 2, (0, 1, 3): 2})])


def test_plain_truncated_ring():
    F = make_field(3, 1)
    R = make_ring(F, ["pi", "u"], [4, 6])
    pi, u = R.var("pi"), R.var("u")
    assert pi**4 == pi**4
    assert (pi**5).is_zero()
    assert (u**7).is_zero()
    assert (pi**2 * u**3).degree() == 5


def test_x9_reduces(level1):
    X = level1.var("X")
    pi, u = level1.var("pi"), level1.var("u")
    assert X**9 == -(pi * X) - u * X**3


def test_x18_two_reduction_orders(level1):
    X = level1.var("X")
    pi, u = level1.var("pi"), level1.var("u")
    one_shot = normal_form(level1.from_terms({(0, 0, 18): 1}))
    nf9 = -(pi * X) - u * X**3
    assert one_shot == nf9 * nf9 == X**18
    assert normal_form(one_shot) == one_shot


def test_pi_nilpotent_by_rule():
    F = make_field(3, 1)
    R = make_ring(F, ["pi"], [None], [({"pi": 4}, {})])
    pi = R.var("pi")
    assert not (pi**3).is_zero()
    assert (pi**4).is_zero()


def test_zero_normal_form(level1):
    assert normal_form(level1.zero()).is_zero()


def test_nonmonic_rule_rejected():
    F = make_field(3, 1)
    with pytest.raises(ValueError):
        make_ring(F, ["X"], [None], [(2, {"X": 2}, {(1,): 1})])


def test_nonterminating_rule_rejected():
    F = make_field(3, 1)
    with pytest.raises(ValueError):
        make_ring(F, ["X", "Y"], [None, None], [({"X": 1}, {(0, 2): 1})])
    with pytest.raises(ValueError):
        make_ring(F, ["X"], [0])


def test_substitute_identity_and_binomial():
    F = make_field(5, 1)
    R = make_ring(F, ["X", "Y"], [None, None])
    X, Y = R.var("X"), R.var("Y")
    assert substitute(X, {"X": X}) == X
    assert substitute(X**2, {"X": X + Y}) == X**2 + 2 * X * Y + Y**2


def test_substitute_rejects_unknown_variable():
    F = make_field(5, 1)
    R = make_ring(F, ["X"], [None])
    with pytest.raises(KeyError):
        substitute(R.var("X"), {"Z": R.var("X")})


def _random_poly(R, rng, nterms=5, maxdeg=4):
    f = R.zero()
    for _ in range(nterms):
        mono = {v: rng.randrange(maxdeg) for v in R.variables}
        f = f + R.monomial(mono, rng.randrange(R.field.q))
    return f


def test_substitution_composition():
    F = make_field(3, 2)
    R = make_ring(F, ["X", "Y"], [12, 12])
    rng = random.Random(7)
    for _ in range(20):
        f = _random_poly(R, rng)
        s1 = {"X": _random_poly(R, rng, 2, 2), "Y": _random_poly(R, rng, 2, 2)}
        s2 = {"X": _random_poly(R, rng, 2, 2), "Y": _random_poly(R, rng, 2, 2)}
        lhs = substitute(substitute(f, s1), s2)
        composite = {k: substitute(v, s2) for k, v in s1.items()}
        assert lhs == substitute(f, composite)


def test_substitute_is_multiplicative(level1):
    rng = random.Random(3)
    for _ in range(20):
        f, g = _random_poly(level1, rng), _random_poly(level1, rng)
        a = {"X": _random_poly(level1, rng, 3, 3)}
        assert substitute(f * g, a) == substitute(f, a) * substitute(g, a)


def test_normal_form_idempotent_and_linear(level1):
    rng = random.Random(11)
    R = level1
    for _ in range(1000):
        terms = {}
        for _ in range(4):
            terms[(rng.randrange(5), rng.randrange(9), rng.randrange(30))] = rng.randrange(1, 3)
        raw = R.from_terms(terms)
        assert normal_form(raw) == raw
        assert all(m[2] < 9 for m in raw.terms)
        c = rng.randrange(3)
        g = R.from_terms({(0, 0, rng.randrange(30)): 1})
        assert normal_form(raw.scale(c) + g) == raw.scale(c) + normal_form(g)


def test_json_roundtrip(level1):
    X, pi = level1.var("X"), level1.var("pi")
    f = X**11 + pi * X**2 + 1
    s = f.to_json()
    data = json.loads(s)
    assert data["variables"] == ["pi", "u", "X"]
    assert poly_from_json(level1, s) == f
    assert f.to_json() == (pi * X**2 + 1 + X**11).to_json()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_f81_distributive(a, b, c):
    F = make_field(3, 4)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
