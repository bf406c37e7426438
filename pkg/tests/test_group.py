import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from kirillov.algebra import pattern, trunc_poly, u_n
from kirillov.group import AlgebraGroup, BudgetExceeded


def group(alg, **kw):
    return AlgebraGroup(alg, **kw)


def test_inverse_when_square_zero():
    g = group(pattern(3, [(1, 2), (1, 3)]))
    x = np.array([1, 2])
    assert np.array_equal(g.ginv(x), g.gf.neg(x))


def test_inverse_truncated_poly():
    g = group(trunc_poly(2, 3))
    assert np.array_equal(g.ginv([1, 0]), [1, 1])     # (1 + t)^-1 = 1 + t + t^2


def test_inverse_axiom_u3():
    g = group(u_n(3, 2))
    elems = g.elements()
    assert not g.gmul_rows(elems, g.ginv_rows(elems)).any()


def test_enumeration_sizes():
    assert len(group(u_n(3, 2)).elements()) == 8
    assert len(group(u_n(4, 2)).elements()) == 64
    assert len(group(trunc_poly(3, 3)).elements()) == 9


def test_enumeration_order_and_keys():
    g = group(u_n(3, 3))
    e = g.elements()
    assert np.array_equal(g.key(e), np.arange(g.order))
    assert np.array_equal(g.from_key(np.arange(g.order)), e)


def test_budget():
    g = group(u_n(4, 2), max_order=32)
    with pytest.raises(BudgetExceeded, match="64"):
        g.elements()


def test_classes_u3():
    g = group(u_n(3, 2))
    assert len(g.classes) == 5
    assert sorted(g.classes.sizes.tolist()) == [1, 1, 2, 2, 2]
    assert len(group(u_n(3, 3)).classes) == 11


def test_abelian_classes_are_singletons():
    g = group(trunc_poly(2, 4))
    assert len(g.classes) == g.order


@pytest.mark.parametrize("n,p", [(3, 2), (3, 3), (4, 2)])
def test_classes_against_matrix_oracle(n, p):
    alg = u_n(n, p)
    g = group(alg)
    brute = oracle.unitriangular(n, p)
    classes, cls_of = brute.classes()
    assert len(classes) == len(g.classes)
    # same partition: image of each engine class is exactly one brute class of equal size
    for c, (rep, size) in enumerate(zip(g.classes.reps, g.classes.sizes)):
        members = g.elements()[g.classes.class_of == c]
        images = {cls_of[oracle.unitriangular_element(alg, m, n)] for m in members}
        assert len(images) == 1 and len(classes[images.pop()]) == size


@pytest.mark.parametrize("alg", [u_n(3, 2), u_n(3, 3), u_n(4, 2), u_n(3, 4), trunc_poly(2, 4)],
                         ids=lambda a: a.name)
def test_class_equation(alg):
    g = group(alg)
    sizes = g.classes.sizes
    assert sizes.sum() == g.order
    for s in sizes.tolist():
        while s % alg.gf.p == 0:
            s //= alg.gf.p
        assert s == 1
    # representative is the least member
    for c, rep in enumerate(g.classes.reps):
        assert g.key(rep) == np.nonzero(g.classes.class_of == c)[0][0]


@pytest.mark.parametrize("alg", [u_n(3, 3), u_n(3, 4), u_n(4, 2)], ids=lambda a: a.name)
def test_conjugation_matrix_matches_group_law(alg):
    g = group(alg)
    e = g.elements()
    rng = np.random.default_rng(0)
    for x in e[rng.choice(len(e), 6)]:
        cx = g.conjugation_matrix(x)
        a = e[rng.choice(len(e), 10)]
        # x^-1 (1 + a) x = 1 + x^-1 a x, so C_x a is the conjugate minus 1
        lhs = g.gf.matmul(a, cx.T)
        assert np.array_equal(lhs, g.gconj_rows(a, x))


@st.composite
def triples(draw):
    alg = draw(st.sampled_from([u_n(3, 3), u_n(4, 2), u_n(3, 4), pattern(3, [(1, 2), (1, 3), (1, 4), (2, 3)])]))
    q, n = alg.q, alg.n
    vec = st.lists(st.integers(0, q - 1), min_size=n, max_size=n).map(np.array)
    return alg, draw(vec), draw(vec), draw(vec)


@settings(max_examples=60, deadline=None)
@given(triples())
def test_group_axioms(t):
    alg, x, y, z = t
    g = group(alg)
    assert np.array_equal(g.gmul(g.gmul(x, y), z), g.gmul(x, g.gmul(y, z)))
    assert not g.gmul(x, g.ginv(x)).any()
    # conjugation is a right action
    assert np.array_equal(g.gconj(g.gconj(x, y), z), g.gconj(x, g.gmul(y, z)))
