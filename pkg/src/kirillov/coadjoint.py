"""The coadjoint action of G = 1 + J on J* and its orbits.

Functionals are coordinate vectors over the dual basis, f(a) = sum f_i a_i.
The action is (x . f)(a) = f(x^-1 a x), i.e. x . f = f @ C_x with C_x the
conjugation matrix of x; it is a left action, x . (y . f) = (xy) . f.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import Subspace, null_space, rref
from .group import AlgebraGroup

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FormMatrix:
    """Matrix of B_f(a, b) = f(ab - ba) on the basis of J."""

    entries: np.ndarray
    rank: int


@dataclass(frozen=True, eq=False)
class CoadjointOrbit:
    rep: np.ndarray        # least member in key order
    elements: np.ndarray   # all members, sorted by key
    keys: np.ndarray
    rank: int              # rank of M(rep)
    q: int

    @property
    def size(self) -> int:
        return len(self.keys)

    @property
    def degree(self) -> int:
        return self.q ** (self.rank // 2)

    def __contains__(self, key) -> bool:
        i = np.searchsorted(self.keys, key)
        return bool(i < len(self.keys) and self.keys[i] == key)


class Coadjoint:
    def __init__(self, group: AlgebraGroup):
        self.group = group
        self.algebra = group.algebra
        self.gf = group.gf
        self.n = group.n
        self.q = group.q
        # keys of functionals whose generator BFS fell short of q^rank
        self.fallbacks: list[int] = []

    key = property(lambda self: self.group.key)
    from_key = property(lambda self: self.group.from_key)

    def functionals(self) -> np.ndarray:
        """All of J*, in key order (same layout as the group elements)."""
        return self.group.elements()

    # -- the action ---------------------------------------------------------

    def coact(self, x, f) -> np.ndarray:
        return self.gf.matmul(np.asarray(f, dtype=np.int64), self.group.conjugation_matrix(x))

    def evaluate(self, f, a):
        """f(a) for a functional f and element(s) a."""
        return self.gf.matmul(np.asarray(a, dtype=np.int64), np.asarray(f, dtype=np.int64))

    @cached_property
    def generators(self) -> np.ndarray:
        """Elements 1 + alpha e_i, alpha != 0."""
        gens = []
        for i in range(self.n):
            for alpha in range(1, self.q):
                v = np.zeros(self.n, dtype=np.int64)
                v[i] = alpha
                gens.append(v)
        if not gens:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array(gens, dtype=np.int64)

    @cached_property
    def generator_matrices(self) -> np.ndarray:
        return self.group.conjugation_matrices(self.generators)

    def _all_matrices(self):
        g = self.group
        elems = g.elements()
        step = max(1, (1 << 22) // max(1, self.n * self.n))
        for s in range(0, len(elems), step):
            yield g.conjugation_matrices(elems[s:s + step])

    # -- the form B_f -------------------------------------------------------

    def form_matrix(self, f) -> FormMatrix:
        f = np.asarray(f, dtype=np.int64)
        m = self.gf.matmul(self.algebra.bracket_table, f) if self.n else np.zeros((0, 0), np.int64)
        rank = len(rref(self.gf, m, self.n)[1]) if self.n else 0
        if rank % 2 or np.any(np.diag(m)) or np.any(self.gf.add(m, m.T)):
            raise AssertionError(f"M(f) for f = {f.tolist()} is not alternating of even rank")
        m.setflags(write=False)
        return FormMatrix(m, rank)

    def radical(self, f) -> Subspace:
        """Rad(f) = {a : f([a, b]) = 0 for all b}, the null space of M(f)."""
        m = self.form_matrix(f).entries
        return Subspace(self.gf, null_space(self.gf, m, self.n), self.n)

    def centralizer_order(self, f) -> int:
        return self.q ** self.radical(f).dim

    # -- orbits -------------------------------------------------------------

    def orbit_of(self, f) -> CoadjointOrbit:
        """Orbit of f by generator BFS, certified by |orbit| = q^rank M(f)."""
        f = np.asarray(f, dtype=np.int64)
        rank = self.form_matrix(f).rank
        expected = self.q ** rank
        mats = self.generator_matrices
        seen = {self.key(f)}
        frontier = f.reshape(1, -1)
        while len(frontier) and len(mats) and len(seen) <= expected:
            images = self.gf.matmul(frontier[None, :, :], mats).reshape(-1, self.n)
            keys = self.key(images)
            keys, first = np.unique(keys, return_index=True)
            fresh = np.array([k not in seen for k in keys.tolist()], dtype=bool)
            seen.update(keys[fresh].tolist())
            frontier = images[first[fresh]]
        keys = np.array(sorted(seen), dtype=np.int64)
        if len(keys) != expected:
            log.warning("generator orbit of %s has size %d != q^rank = %d; using the full group",
                        f.tolist(), len(keys), expected)
            self.fallbacks.append(self.key(f))
            keys = np.unique(np.concatenate(
                [self.key(self.gf.matmul(f, mats_chunk)) for mats_chunk in self._all_matrices()]))
            if len(keys) != expected:
                raise AssertionError(f"orbit of {f.tolist()} has size {len(keys)}, "
                                     f"but q^rank M(f) = {expected}")
        elems = self.from_key(keys)
        for arr in (keys, elems):
            arr.setflags(write=False)
        return CoadjointOrbit(elems[0], elems, keys, rank, self.q)

    @cached_property
    def orbits(self) -> list[CoadjointOrbit]:
        return self.all_orbits()

    def all_orbits(self) -> list[CoadjointOrbit]:
        """Omega(G): every orbit, sorted by (size, representative key)."""
        self.group.check_budget()
        total = self.group.order
        owner = np.zeros(total, dtype=bool)
        found = []
        start = 0
        while True:
            free = np.nonzero(~owner[start:])[0]
            if not len(free):
                break
            k = start + int(free[0])
            orbit = self.orbit_of(self.from_key(k))
            owner[orbit.keys] = True
            found.append(orbit)
            start = k + 1
        found.sort(key=lambda o: (o.size, int(o.keys[0])))
        return found

    @cached_property
    def orbit_index(self) -> np.ndarray:
        """Orbit number (position in ``orbits``) of every functional, by key."""
        idx = np.full(self.group.order, -1, dtype=np.int64)
        for t, o in enumerate(self.orbits):
            idx[o.keys] = t
        idx.setflags(write=False)
        return idx

    def orbit_number(self, f) -> int:
        return int(self.orbit_index[self.key(f)])

    # -- class number cross-check -------------------------------------------

    def adjoint_orbit_count(self) -> int:
        """Number of orbits of a -> x^-1 a x on J, by the full linear action."""
        self.group.check_budget()
        seen = np.zeros(self.group.order, dtype=bool)
        mats = list(self._all_matrices())
        count = 0
        start = 0
        while True:
            free = np.nonzero(~seen[start:])[0]
            if not len(free):
                break
            k = start + int(free[0])
            a = self.from_key(k)
            for chunk in mats:
                seen[self.key(self.gf.matmul(chunk, a))] = True
            count += 1
            start = k + 1
        return count

    def adjoint_vs_coadjoint_count(self) -> tuple[int, int]:
        return self.adjoint_orbit_count(), len(self.orbits)
