from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kirillov.cyclo import CycloError, Cyclotomic

PRIMES = [2, 3, 5, 7]


def cyclos(p):
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return st.lists(coeff, min_size=p - 1, max_size=p - 1).map(lambda c: Cyclotomic(p, c))


@st.composite
def triples(draw):
    p = draw(st.sampled_from(PRIMES))
    return p, draw(cyclos(p)), draw(cyclos(p)), draw(cyclos(p))


def test_minus_one_squared():
    m = Cyclotomic.root_of_unity(2, 1)
    assert m == -1
    assert m * m == 1


def test_p3_product_is_one():
    z = Cyclotomic.root_of_unity(3, 1)
    z2 = Cyclotomic.root_of_unity(3, 2)
    assert (1 + z) * (1 + z2) == 1


def test_zeta_squared_reduced():
    z2 = Cyclotomic.root_of_unity(3, 2)
    assert str(z2) == "-1 - z"
    assert z2 == Cyclotomic.parse(3, "-1 - z")


def test_rational_conjugate_fixed():
    r = Cyclotomic.rational(5, Fraction(7, 3))
    assert r.conjugate() == r


def test_predicates():
    one = Cyclotomic.one(3)
    z = Cyclotomic.root_of_unity(3, 1)
    assert one.is_rational() and one.is_nonnegative_integer()
    assert not z.is_rational() and not z.is_nonnegative_integer()
    s = z + Cyclotomic.root_of_unity(3, 2)
    assert s.is_rational() and s == -1 and not s.is_nonnegative_integer()


def test_mixed_p_rejected():
    with pytest.raises(CycloError):
        Cyclotomic.one(3) + Cyclotomic.one(5)


def test_sum_of_all_roots_vanishes():
    for p in PRIMES:
        total = Cyclotomic.zero(p)
        for k in range(p):
            total = total + Cyclotomic.root_of_unity(p, k)
        assert total.is_zero()


def test_exponent_counts():
    # 2 + 3 z + z^2 in Q(zeta_3) is 1 + 2 z
    assert Cyclotomic.from_exponent_counts(3, [2, 3, 1]) == Cyclotomic(3, [1, 2])


@settings(max_examples=150, deadline=None)
@given(triples())
def test_ring_axioms(t):
    p, a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@settings(max_examples=150, deadline=None)
@given(triples())
def test_conjugation_is_a_ring_automorphism(t):
    p, a, b, _ = t
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert (a + b).conjugate() == a.conjugate() + b.conjugate()
    assert a.conjugate().conjugate() == a
    # a * conj(a) is real and its value is |a|^2 >= 0
    n = a * a.conjugate()
    assert n == n.conjugate()
    assert abs(n.approx().imag) < 1e-9 and n.approx().real > -1e-9


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PRIMES).flatmap(cyclos))
def test_print_parse_roundtrip(a):
    assert Cyclotomic.parse(a.p, str(a)) == a


def test_roots_of_unity_multiply():
    for p in PRIMES:
        for i in range(p):
            for j in range(p):
                assert Cyclotomic.root_of_unity(p, i) * Cyclotomic.root_of_unity(p, j) == \
                    Cyclotomic.root_of_unity(p, i + j)
