"""Independent brute-force models of the test groups.

Groups here are built from their defining matrices or polynomials, not
from the package's structure tensors, and are used to check classes and
irreducibility of the computed characters.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from kirillov.cyclo import Cyclotomic


class BruteGroup:
    """A finite group given by hashable elements and a multiplication."""

    def __init__(self, elements, mul, identity):
        self.elements = list(elements)
        self.mul = mul
        self.identity = identity
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.inverse = {}
        for g in self.elements:
            for h in self.elements:
                if mul(g, h) == identity:
                    self.inverse[g] = h
                    break

    @property
    def order(self):
        return len(self.elements)

    def conj(self, g, x):
        return self.mul(self.mul(self.inverse[x], g), x)

    def classes(self):
        cls_of, classes = {}, []
        for g in self.elements:
            if g in cls_of:
                continue
            members = {self.conj(g, x) for x in self.elements}
            for m in members:
                cls_of[m] = len(classes)
            classes.append(sorted(members))
        return classes, cls_of

    def class_constants(self):
        """a[i][j][k] = #{(x, y) in K_i x K_j : xy = z_k}, z_k a fixed member of K_k."""
        classes, cls_of = self.classes()
        k = len(classes)
        a = np.zeros((k, k, k), dtype=np.int64)
        for t, cl in enumerate(classes):
            z = cl[0]
            for x in self.elements:
                y = self.mul(self.inverse[x], z)
                a[cls_of[x], cls_of[y], t] += 1
        return classes, cls_of, a


def unitriangular(n: int, p: int) -> BruteGroup:
    pos = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def make(vals):
        m = np.eye(n, dtype=np.int64)
        for (i, j), v in zip(pos, vals):
            m[i, j] = v
        return tuple(m.ravel().tolist())

    def mul(a, b):
        return tuple(((np.array(a).reshape(n, n) @ np.array(b).reshape(n, n)) % p).ravel().tolist())

    elems = [make(v) for v in product(range(p), repeat=len(pos))]
    return BruteGroup(elems, mul, make([0] * len(pos)))


def unitriangular_element(alg, a, n: int):
    """Matrix 1 + sum a_t E_(positions[t]) for an element of a matrix-unit algebra."""
    m = np.eye(n, dtype=np.int64)
    for (i, j), v in zip(alg.positions, a):
        m[i - 1, j - 1] = int(v)
    return tuple(m.ravel().tolist())


def truncated_units(p: int, m: int) -> BruteGroup:
    """1 + t F_p[t] / (t^m) with polynomial multiplication."""

    def mul(a, b):
        c = [0] * m
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if i + j < m:
                    c[i + j] = (c[i + j] + x * y) % p
        return tuple(c)

    elems = [(1,) + v for v in product(range(p), repeat=m - 1)]
    return BruteGroup(elems, mul, (1,) + (0,) * (m - 1))


def is_irreducible_character(values, classes, consts, p: int) -> bool:
    """Class function (values per brute class) with positive degree and norm 1 is
    irreducible iff omega(K) = |K| chi(g) / chi(1) is multiplicative on the class
    algebra: omega_i omega_j = sum_k a_ijk omega_k."""
    deg = values[0]
    if not deg.is_rational() or deg.to_rational() <= 0:
        return False
    inv = 1 / deg.to_rational()
    omega = [v.scale(len(cl) * inv) for v, cl in zip(values, classes)]
    k = len(classes)
    for i in range(k):
        for j in range(i, k):
            rhs = Cyclotomic.zero(p)
            for t in range(k):
                if consts[i, j, t]:
                    rhs = rhs + omega[t].scale(int(consts[i, j, t]))
            if omega[i] * omega[j] != rhs:
                return False
    return True
