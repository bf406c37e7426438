"""The algebra group G = 1 + J.

A group element 1 + a is represented by the coordinate vector of a, so
the identity is the zero vector.  Elements are keyed by the integer whose
base-q digits are the coordinates (first coordinate most significant);
key order is lexicographic coordinate order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import Algebra, all_vectors, as_rows

DEFAULT_MAX_ORDER = 1 << 20


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"group order {required} exceeds the budget {budget} "
                         f"(raise --max-group-order to at least {required})")
        self.required = required
        self.budget = budget


@dataclass(frozen=True, eq=False)
class ConjugacyClasses:
    reps: np.ndarray          # (k, n), lexicographically least member of each class
    class_of: np.ndarray      # class index of every element, indexed by key
    sizes: np.ndarray         # (k,)

    def __len__(self):
        return len(self.reps)


class AlgebraGroup:
    def __init__(self, algebra: Algebra, max_order: int = DEFAULT_MAX_ORDER):
        self.algebra = algebra
        self.gf = algebra.gf
        self.n = algebra.n
        self.q = algebra.q
        self.order = self.q ** self.n
        self.max_order = max_order
        self.weights = self.q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        self._conj_cache: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"AlgebraGroup(1 + {self.algebra!r}, order {self.order})"

    def check_budget(self) -> None:
        if self.order > self.max_order:
            raise BudgetExceeded(self.order, self.max_order)

    # -- keys ---------------------------------------------------------------

    def key(self, a) -> np.ndarray | int:
        a = np.asarray(a, dtype=np.int64)
        k = a @ self.weights
        return int(k) if a.ndim == 1 else k

    def from_key(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64)
        return (k[..., None] // self.weights) % self.q

    def elements(self) -> np.ndarray:
        """All q^n elements (as vectors a for 1 + a), in key order."""
        self.check_budget()
        return self._elements

    @cached_property
    def _elements(self) -> np.ndarray:
        e = all_vectors(self.q, self.n)
        e.setflags(write=False)
        return e

    def enumerate(self):
        yield from self.elements()

    # -- group law ----------------------------------------------------------

    def gmul_rows(self, x, y) -> np.ndarray:
        """(1 + a)(1 + b) = 1 + (a + b + ab), row-wise."""
        gf = self.gf
        x = as_rows(x, self.n)
        y = as_rows(y, self.n)
        x, y = np.broadcast_arrays(x, y)
        return gf.add(gf.add(x, y), self.algebra.mul_rows(x, y))

    def ginv_rows(self, x) -> np.ndarray:
        """(1 + a)^-1 = 1 - a + a^2 - ..., a finite sum since a is nilpotent."""
        gf = self.gf
        x = as_rows(x, self.n)
        minus = gf.neg(x)
        term = minus
        acc = np.zeros_like(x)
        for _ in range(self.n + 1):
            if not term.any():
                break
            acc = gf.add(acc, term)
            term = self.algebra.mul_rows(term, minus)
        return acc

    def gconj_rows(self, x, y) -> np.ndarray:
        """y^-1 x y, row-wise (broadcasting a single x or y)."""
        x = as_rows(x, self.n)
        y = as_rows(y, self.n)
        x, y = np.broadcast_arrays(x, y)
        return self.gmul_rows(self.ginv_rows(y), self.gmul_rows(x, y))

    def gmul(self, x, y) -> np.ndarray:
        return self.gmul_rows(x, y)[0]

    def ginv(self, x) -> np.ndarray:
        return self.ginv_rows(x)[0]

    def gconj(self, x, y) -> np.ndarray:
        return self.gconj_rows(x, y)[0]

    def identity(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    # -- conjugation as a linear map on J -----------------------------------

    def conjugation_matrices(self, xs) -> np.ndarray:
        """Stack of matrices C_x with C_x @ a = x^-1 a x."""
        gf, t, n = self.gf, self.algebra.table, self.n
        xs = as_rows(xs, n)
        bs = self.ginv_rows(xs)
        eye = np.broadcast_to(np.eye(n, dtype=np.int64), (len(xs), n, n))
        if n == 0:
            return np.zeros((len(xs), 0, 0), dtype=np.int64)
        # left[x][k, j] = (b e_j)_k ; right[x][k, j] = (e_j c)_k
        if gf.e == 1:
            left = np.einsum("xi,ijk->xkj", bs, t) % gf.p
            right = np.einsum("xl,jlk->xkj", xs, t) % gf.p
        else:
            left = gf.sum(gf.MUL[bs[:, :, None, None], t[None]], axis=1).transpose(0, 2, 1)
            right = gf.sum(gf.MUL[xs[:, None, :, None], t[None]], axis=2).transpose(0, 2, 1)
        c = gf.add(gf.add(eye, left), right)
        return gf.add(c, gf.matmul(left, right))

    def conjugation_matrix(self, x) -> np.ndarray:
        return self.conjugation_matrices(x)[0]

    # -- conjugacy classes --------------------------------------------------

    @cached_property
    def classes(self) -> ConjugacyClasses:
        return self.conjugacy_classes()

    def conjugacy_classes(self) -> ConjugacyClasses:
        """Orbits of G on itself by conjugation, by full enumeration."""
        elems = self.elements()
        class_of = np.full(self.order, -1, dtype=np.int64)
        reps, sizes = [], []
        start = 0
        while True:
            free = np.nonzero(class_of[start:] < 0)[0]
            if not len(free):
                break
            k = start + int(free[0])
            x = elems[k]
            members = np.unique(self.key(self.gconj_rows(x, elems)))
            if members[0] != k:
                raise AssertionError("class sweep found a smaller unvisited member")
            class_of[members] = len(reps)
            reps.append(x)
            sizes.append(len(members))
            start = k + 1
        reps_a = as_rows(np.array(reps, dtype=np.int64), self.n)
        for arr in (reps_a, class_of):
            arr.setflags(write=False)
        return ConjugacyClasses(reps_a, class_of, np.array(sizes, dtype=np.int64))

    def class_index(self, x) -> int | np.ndarray:
        return self.classes.class_of[self.key(x)]

    def centralizer_order(self, class_idx: int) -> int:
        return self.order // int(self.classes.sizes[class_idx])

    def conjugates(self, class_idx: int) -> np.ndarray:
        """y^-1 g y for every y in G (key order), g the class representative."""
        cached = self._conj_cache.get(class_idx)
        if cached is not None:
            return cached
        out = self.gconj_rows(self.classes.reps[class_idx], self.elements())
        # keep at most ~64 MB of conjugate tables
        if (len(self._conj_cache) + 1) * out.nbytes <= 1 << 26:
            out.setflags(write=False)
            self._conj_cache[class_idx] = out
        return out
