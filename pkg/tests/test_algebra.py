import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kirillov.algebra import (Algebra, AlgebraError, Subspace, null_space, pattern, rref,
                              trunc_poly, u_n)
from kirillov.gf import FieldSpec, field

A, B, C = np.eye(3, dtype=np.int64)     # u_3 basis E12, E23, E13


def span(alg, *vs):
    return alg.subspace(np.array(vs))


def test_u3_products():
    u3 = u_n(3, 2)
    assert np.array_equal(u3.mul(A, B), C)
    assert not u3.mul(B, A).any()
    assert np.array_equal(u3.bracket(A, B), C)


def test_u3_bracket_sign_over_f3():
    u3 = u_n(3, 3)
    assert np.array_equal(u3.bracket(B, A), 2 * C)


def test_trunc_products():
    t3 = trunc_poly(2, 3)
    t, t2 = np.eye(2, dtype=np.int64)
    assert t3.n == 2
    assert np.array_equal(t3.mul(t, t), t2)
    assert not t3.mul(t, t2).any()


def test_annihilators():
    u3 = u_n(3, 2)
    assert u3.whole().annihilator().dim == 0
    assert u3.zero_subspace().annihilator() == u3.whole()
    assert span(u3, A, C).annihilator() == span(u3, B)


def test_mult_closed_and_ideal():
    u3 = u_n(3, 2)
    assert u3.is_mult_closed(u3.whole()) and u3.is_ideal(u3.whole())
    assert u3.is_mult_closed(span(u3, A)) and not u3.is_ideal(span(u3, A))
    assert u3.is_mult_closed(span(u3, C)) and u3.is_ideal(span(u3, C))


def test_radical_powers():
    assert u_n(3, 2).radical_powers() == [u_n(3, 2).whole(), span(u_n(3, 2), C)]
    u4 = u_n(4, 2)
    e = {ij: np.eye(6, dtype=np.int64)[t] for t, ij in enumerate(u4.positions)}
    assert u4.radical_powers() == [u4.whole(), span(u4, e[1, 3], e[1, 4], e[2, 4]), span(u4, e[1, 4])]
    assert pattern(2, [(1, 2), (1, 3)]).radical_powers() == [pattern(2, [(1, 2), (1, 3)]).whole()]


def test_maximal_chain_u3():
    u3 = u_n(3, 2)
    chain = u3.maximal_ideal_chain()
    assert list(chain) == [u3.zero_subspace(), span(u3, C), span(u3, C, A), u3.whole()]


def test_maximal_chain_small_cases():
    t3 = trunc_poly(2, 3)
    assert list(t3.maximal_ideal_chain()) == [t3.zero_subspace(), span(t3, [0, 1]), t3.whole()]
    t2 = trunc_poly(2, 2)
    assert list(t2.maximal_ideal_chain()) == [t2.zero_subspace(), t2.whole()]


def test_maximal_mult_closed_subspaces():
    u3 = u_n(3, 2)
    assert u3.maximal_mult_closed_subspaces() == [span(u3, A, C), span(u3, B, C), span(u3, A + B, C)]
    assert len(u_n(3, 3).maximal_mult_closed_subspaces()) == 4
    assert trunc_poly(2, 2).maximal_mult_closed_subspaces() == [trunc_poly(2, 2).zero_subspace()]


def test_maximal_subspace_count_formula():
    for alg in (u_n(4, 2), u_n(3, 4), pattern(3, [(1, 2), (1, 3), (1, 4), (2, 3)])):
        d = alg.n - alg.radical_powers()[1].dim
        subs = alg.maximal_mult_closed_subspaces()
        assert len(subs) == (alg.q ** d - 1) // (alg.q - 1)
        for u in subs:
            assert u.dim == alg.n - 1 and alg.is_ideal(u)


def test_builtin_pattern():
    p = pattern(2, [(1, 2), (1, 3)])
    assert p.n == 2 and not p.table.any()
    with pytest.raises(AlgebraError):
        pattern(2, [(1, 2), (2, 3)])


def test_validation_rejects_bad_tables():
    spec = FieldSpec(2)
    with pytest.raises(AlgebraError, match="nilpotent"):
        Algebra(spec, np.ones((1, 1, 1)))
    t = np.zeros((2, 2, 2), dtype=np.int64)
    t[0, 0, 1] = 1
    t[0, 1, 0] = 1          # (e1 e1) e2 = e2 e2 = 0, e1 (e1 e2) = e1 e1 = e2
    with pytest.raises(AlgebraError):
        Algebra(spec, t)


def test_subalgebra_is_an_algebra():
    u4 = u_n(4, 2)
    for u in u4.maximal_mult_closed_subspaces():
        sub = u4.subalgebra(u)
        assert sub.n == u.dim
        # products agree after embedding
        for i in range(sub.n):
            for j in range(sub.n):
                lhs = u.embed(sub.mul(np.eye(sub.n, dtype=np.int64)[i], np.eye(sub.n, dtype=np.int64)[j]))
                assert np.array_equal(lhs, u4.mul(u.basis[i], u.basis[j]))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(1, 6), st.data())
def test_rank_nullity(p, rows, cols, data):
    gf = field(p)
    m = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols)))
    m = m.reshape(rows, cols)
    basis, pivots = rref(gf, m, cols)
    ns = null_space(gf, m, cols)
    assert len(pivots) + len(ns) == cols
    if len(ns):
        assert not gf.matmul(m, ns.T).any()
    # row space preserved
    assert Subspace(gf, m, cols) == Subspace(gf, basis, cols)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_subspace_lattice_laws(data):
    gf = field(3)
    n = 4

    def draw_space():
        k = data.draw(st.integers(0, 3))
        v = data.draw(st.lists(st.integers(0, 2), min_size=k * n, max_size=k * n))
        return Subspace(gf, np.array(v, dtype=np.int64).reshape(k, n), n)

    u, w = draw_space(), draw_space()
    assert (u + w).dim + u.intersect(w).dim == u.dim + w.dim
    assert u.annihilator().annihilator() == u
    assert (u + w).annihilator() == u.annihilator().intersect(w.annihilator())
    assert u.contains(u.elements()).all()
