"""Nilpotent F_q-algebras given by structure constants, and subspaces of them.

An ``Algebra`` is the radical J of A = F_q 1 + J.  Its multiplication is the
tensor ``table`` with table[i, j] = coordinates of e_i e_j.  Subspaces of
J (and of the dual space J*, paired with J by the dot product) are kept
in reduced row echelon form, so two subspaces are equal exactly when
their bases are.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .gf import GF, FieldError, FieldSpec, get_field, is_prime


class AlgebraError(ValueError):
    """Structure constants that do not define a nilpotent associative algebra."""


# ---------------------------------------------------------------------------
# linear algebra over F_q


def as_rows(v, n: int) -> np.ndarray:
    """v as a stack of length-n rows; for n = 0 a 1-D input is one empty row."""
    v = np.asarray(v, dtype=np.int64)
    if n:
        return v.reshape(-1, n)
    return v.reshape(1, 0) if v.ndim <= 1 else v.reshape(len(v), 0)


def rref(gf: GF, m, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    a = np.array(m, dtype=np.int64, copy=True)
    if ncols is not None:
        a = as_rows(a, ncols)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = gf.mul(a[r], gf.INV[a[r, c]])
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if len(others):
            a[others] = gf.sub(a[others], gf.mul(a[others, c][:, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a[:r], pivots


def null_space(gf: GF, m, ncols: int) -> np.ndarray:
    """Basis (as rows) of {x : m x = 0}."""
    r, pivots = rref(gf, m, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for t, j in enumerate(free):
        out[t, j] = 1
        for i, pc in enumerate(pivots):
            out[t, pc] = gf.neg(r[i, j])
    return out


class Subspace:
    """Subspace of F_q^n held by its reduced echelon basis."""

    __slots__ = ("gf", "n", "basis", "pivots", "_key")

    def __init__(self, gf: GF, vectors, n: int):
        vectors = as_rows(vectors, n)
        basis, pivots = rref(gf, vectors, n) if len(vectors) else (vectors, [])
        basis.setflags(write=False)
        self.gf = gf
        self.n = n
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = None

    @classmethod
    def zero(cls, gf: GF, n: int) -> "Subspace":
        return cls(gf, np.zeros((0, n), dtype=np.int64), n)

    @classmethod
    def full(cls, gf: GF, n: int) -> "Subspace":
        return cls(gf, np.eye(n, dtype=np.int64), n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.n, tuple(map(tuple, self.basis.tolist())))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={self.basis.tolist()})"

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.gf, np.vstack([self.basis, other.basis]), self.n)

    def span_with(self, vectors) -> "Subspace":
        v = as_rows(vectors, self.n)
        return Subspace(self.gf, np.vstack([self.basis, v]), self.n)

    def annihilator(self) -> "Subspace":
        """{f : f . u = 0 for all u in self}, in the dual coordinates."""
        if self.dim == 0:
            return Subspace.full(self.gf, self.n)
        return Subspace(self.gf, null_space(self.gf, self.basis, self.n), self.n)

    def intersect(self, other: "Subspace") -> "Subspace":
        return (self.annihilator() + other.annihilator()).annihilator()

    def contains(self, v) -> bool | np.ndarray:
        """Membership test; accepts one vector or a stack of row vectors."""
        v = np.asarray(v, dtype=np.int64)
        single = v.ndim == 1
        v = as_rows(v, self.n)
        ann = self.annihilator().basis
        if len(ann) == 0:
            res = np.ones(len(v), dtype=bool)
        else:
            res = ~np.any(self.gf.matmul(v, ann.T), axis=1)
        return bool(res[0]) if single else res

    def contains_subspace(self, other: "Subspace") -> bool:
        return other.dim == 0 or bool(np.all(self.contains(other.basis)))

    def coords(self, v) -> np.ndarray:
        """Coordinates in ``basis`` of vectors known to lie in the subspace."""
        v = np.asarray(v, dtype=np.int64)
        return v[..., list(self.pivots)]

    def embed(self, c) -> np.ndarray:
        """Inverse of ``coords``."""
        c = np.asarray(c, dtype=np.int64)
        if self.dim == 0:
            return np.zeros(c.shape[:-1] + (self.n,), dtype=np.int64)
        return self.gf.matmul(c, self.basis)

    def elements(self) -> np.ndarray:
        """All q^dim vectors, lexicographic in basis coordinates."""
        return self.embed(all_vectors(self.gf.q, self.dim))


def all_vectors(q: int, n: int) -> np.ndarray:
    """Rows of F_q^n (as codes) in lexicographic order, first coordinate most significant."""
    keys = np.arange(q ** n, dtype=np.int64)
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (keys[:, None] // weights[None, :]) % q


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True, eq=False)
class IdealChain:
    """{0} = U_0 < U_1 < ... < U_n = J, each an ideal, dimensions 0, 1, ..., n."""

    chain: tuple[Subspace, ...]

    def __len__(self):
        return len(self.chain)

    def __getitem__(self, i) -> Subspace:
        return self.chain[i]


class Algebra:
    """Nilpotent associative F_q-algebra J with basis e_1..e_n."""

    def __init__(self, spec: FieldSpec, table, name: str | None = None, validate: bool = True):
        self.spec = spec
        self.gf: GF = get_field(spec)
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 3 or t.shape[0] != t.shape[1] or t.shape[1] != t.shape[2]:
            raise AlgebraError(f"table must have shape (n, n, n), got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= self.gf.q):
            raise AlgebraError("structure constants must be field codes in [0, q)")
        t.setflags(write=False)
        self.table = t
        self.n = t.shape[0]
        self.name = name
        self.bracket_table = self.gf.sub(t, t.transpose(1, 0, 2))
        if validate:
            self.validate()

    def __repr__(self):
        label = self.name or "algebra"
        return f"<{label}: dim {self.n} over F_{self.gf.q}>"

    @cached_property
    def _key(self):
        return (self.spec, self.n, self.table.tobytes())

    def __eq__(self, other):
        return isinstance(other, Algebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def q(self) -> int:
        return self.gf.q

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        n = self.n
        if n == 0:
            return
        idx = np.array(list(product(range(n), repeat=3)), dtype=np.int64)
        i, j, k = idx[:, 0], idx[:, 1], idx[:, 2]
        eye = np.eye(n, dtype=np.int64)
        left = self.mul_rows(self.table[i, j], eye[k])
        right = self.mul_rows(eye[i], self.table[j, k])
        bad = np.nonzero(np.any(left != right, axis=1))[0]
        if len(bad):
            a, b, c = (int(x) + 1 for x in idx[bad[0]])
            raise AlgebraError(f"not associative: (e{a} e{b}) e{c} != e{a} (e{b} e{c})")
        self.radical_powers()

    # -- multiplication -----------------------------------------------------

    def mul_rows(self, a, b) -> np.ndarray:
        """Row-wise products of two stacks of elements (shape (N, n))."""
        gf, n = self.gf, self.n
        a = as_rows(a, n)
        b = as_rows(b, n)
        if n == 0:
            return np.zeros((len(a), 0), dtype=np.int64)
        if gf.e == 1:
            flat = self.table.reshape(n * n, n)
            out = np.empty((len(a), n), dtype=np.int64)
            step = 1 << 15
            for s in range(0, len(a), step):
                outer = (a[s:s + step, :, None] * b[s:s + step, None, :]).reshape(-1, n * n)
                out[s:s + step] = (outer @ flat) % gf.p
            return out
        out = np.empty((len(a), n), dtype=np.int64)
        step = max(1, (1 << 20) // max(1, n ** 3))
        for s in range(0, len(a), step):
            outer = gf.MUL[a[s:s + step, :, None], b[s:s + step, None, :]]
            terms = gf.MUL[outer[:, :, :, None], self.table[None]]
            out[s:s + step] = gf.sum(terms, axis=(1, 2))
        return out

    def mul(self, a, b) -> np.ndarray:
        return self.mul_rows(a, b)[0]

    def bracket(self, a, b) -> np.ndarray:
        return self.gf.sub(self.mul(a, b), self.mul(b, a))

    def left_matrix(self, a) -> np.ndarray:
        """Matrix L with L @ v = a v (columns are a e_j)."""
        return self.mul_rows(np.repeat(np.asarray(a).reshape(1, -1), self.n, 0),
                             np.eye(self.n, dtype=np.int64)).T

    def right_matrix(self, a) -> np.ndarray:
        return self.mul_rows(np.eye(self.n, dtype=np.int64),
                             np.repeat(np.asarray(a).reshape(1, -1), self.n, 0)).T

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.n, dtype=np.int64)
        v[i] = 1
        return v

    # -- subspaces ----------------------------------------------------------

    def subspace(self, vectors) -> Subspace:
        return Subspace(self.gf, vectors, self.n)

    def zero_subspace(self) -> Subspace:
        return Subspace.zero(self.gf, self.n)

    def whole(self) -> Subspace:
        return Subspace.full(self.gf, self.n)

    def product_space(self, u: Subspace, w: Subspace) -> Subspace:
        """span{u w : u in U, w in W}."""
        if u.dim == 0 or w.dim == 0:
            return self.zero_subspace()
        i, j = np.meshgrid(range(u.dim), range(w.dim), indexing="ij")
        prods = self.mul_rows(u.basis[i.ravel()], w.basis[j.ravel()])
        return self.subspace(prods)

    def is_mult_closed(self, u: Subspace) -> bool:
        return u.contains_subspace(self.product_space(u, u))

    def is_ideal(self, u: Subspace) -> bool:
        j = self.whole()
        return (u.contains_subspace(self.product_space(j, u))
                and u.contains_subspace(self.product_space(u, j)))

    def radical_powers(self) -> list[Subspace]:
        """[J, J^2, ..., J^m] with J^m != 0 and J^(m+1) = 0."""
        if hasattr(self, "_radical_powers"):
            return list(self._radical_powers)
        j = self.whole()
        powers: list[Subspace] = []
        cur = j
        while cur.dim > 0:
            powers.append(cur)
            if len(powers) > self.n:
                raise AlgebraError("not nilpotent: J^k never vanishes")
            nxt = self.product_space(cur, j)
            if nxt == cur:
                raise AlgebraError(f"not nilpotent: J^{len(powers)} = J^{len(powers) + 1} != 0")
            cur = nxt
        self._radical_powers = tuple(powers)
        return list(powers)

    def maximal_ideal_chain(self) -> IdealChain:
        """Refine J > J^2 > ... > 0 one dimension at a time, bottom up.

        Inside each step J^k > J^(k+1) the next vector is the first echelon
        basis vector of J^k not yet in the current subspace.
        """
        chain = [self.zero_subspace()]
        cur = chain[0]
        for power in reversed(self.radical_powers()):
            for v in power.basis:
                if not cur.contains(v):
                    cur = cur.span_with(v)
                    chain.append(cur)
        assert cur.dim == self.n
        for u in chain:
            if not self.is_ideal(u):
                raise AlgebraError(f"chain member {u} is not an ideal")
        return IdealChain(tuple(chain))

    def maximal_mult_closed_subspaces(self) -> list[Subspace]:
        """Hyperplanes of J containing J^2, one per projective point of (J^2)^perp."""
        powers = self.radical_powers()
        j2 = powers[1] if len(powers) > 1 else self.zero_subspace()
        dual = j2.annihilator().basis
        d = len(dual)
        out = []
        for beta in all_vectors(self.q, d):
            nz = np.nonzero(beta)[0]
            if not len(nz) or beta[nz[0]] != 1:
                continue
            w = self.gf.matmul(beta, dual)
            out.append(self.subspace(w).annihilator())
        return out

    def subalgebra(self, u: Subspace, name: str | None = None) -> "Algebra":
        """The algebra U with basis u.basis (requires U multiplicatively closed)."""
        m = u.dim
        table = np.zeros((m, m, m), dtype=np.int64)
        if m:
            i, j = np.meshgrid(range(m), range(m), indexing="ij")
            prods = self.mul_rows(u.basis[i.ravel()], u.basis[j.ravel()])
            if not np.all(u.contains(prods)):
                raise AlgebraError("subspace is not multiplicatively closed")
            table = u.coords(prods).reshape(m, m, m)
        return Algebra(self.spec, table, name=name, validate=False)

    def to_dict(self) -> dict:
        products = []
        for i in range(self.n):
            for j in range(self.n):
                terms = [(k + 1, int(c)) for k, c in enumerate(self.table[i, j]) if c]
                if terms:
                    products.append({"i": i + 1, "j": j + 1, "terms": terms})
        return {"name": self.name, "field": self.spec.to_dict(), "dim": self.n,
                "products": products}


# ---------------------------------------------------------------------------
# builtin families


def spec_for_q(q: int) -> FieldSpec:
    for p in range(2, q + 1):
        if is_prime(p) and q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                break
            return FieldSpec(p, e)
    raise FieldError(f"q = {q} is not a prime power")


def _matrix_unit_algebra(spec: FieldSpec, positions: Sequence[tuple[int, int]], name: str) -> Algebra:
    pos = sorted(set(positions), key=lambda ij: (ij[1] - ij[0], ij[0]))
    index = {ij: t for t, ij in enumerate(pos)}
    n = len(pos)
    table = np.zeros((n, n, n), dtype=np.int64)
    for (i, j), a in index.items():
        for (k, l), b in index.items():
            if j == k:
                table[a, b, index[(i, l)]] = 1
    alg = Algebra(spec, table, name=name)
    alg.positions = pos
    return alg


def u_n(n: int, q: int) -> Algebra:
    """Strictly upper-triangular n x n matrices over F_q, basis E_ij by (j - i, i)."""
    if n < 2:
        raise AlgebraError("u_n needs n >= 2")
    pos = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return _matrix_unit_algebra(spec_for_q(q), pos, f"u_{n}({q})")


def trunc_poly(q: int, m: int) -> Algebra:
    """Radical t F_q[t] / (t^m), basis t, t^2, ..., t^(m-1)."""
    if m < 2:
        raise AlgebraError("trunc_poly needs m >= 2")
    n = m - 1
    table = np.zeros((n, n, n), dtype=np.int64)
    for a in range(1, m):
        for b in range(1, m):
            if a + b < m:
                table[a - 1, b - 1, a + b - 1] = 1
    return Algebra(spec_for_q(q), table, name=f"trunc_poly({q},{m})")


def pattern(q: int, positions: Iterable[tuple[int, int]]) -> Algebra:
    """Span of the matrix units E_ij, (i, j) in ``positions``, which must be closed."""
    pos = sorted(set((int(i), int(j)) for i, j in positions))
    if not pos:
        raise AlgebraError("pattern needs at least one position")
    for i, j in pos:
        if i >= j or i < 1:
            raise AlgebraError(f"position ({i},{j}) is not strictly upper triangular")
    s = set(pos)
    for (i, j) in pos:
        for (k, l) in pos:
            if j == k and (i, l) not in s:
                raise AlgebraError(
                    f"pattern not closed: E{i}{j} E{k}{l} = E{i}{l} but ({i},{l}) missing")
    label = ",".join(f"{i}-{j}" for i, j in pos)
    return _matrix_unit_algebra(spec_for_q(q), pos, f"pattern({q};{label})")


def builtin(family: str, *params) -> Algebra:
    if family in ("u", "u_n"):
        return u_n(int(params[0]), int(params[1]))
    if family in ("trunc", "trunc_poly"):
        return trunc_poly(int(params[0]), int(params[1]))
    if family == "pattern":
        return pattern(int(params[0]), params[1])
    raise AlgebraError(f"unknown builtin family {family!r}")
