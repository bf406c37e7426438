"""Orbit class functions phi_O and their restriction/induction calculus.

``Engine`` bundles one algebra group with its classes, coadjoint orbits
and orbit class functions.  Subgroups H = 1 + U get their own engine,
built from the subalgebra U and memoised on the echelon basis of U, so
the H-side data comes from exactly the same code as the G-side data.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Algebra, Subspace, all_vectors
from .coadjoint import Coadjoint, CoadjointOrbit
from .cyclo import Cyclotomic
from .group import DEFAULT_MAX_ORDER, AlgebraGroup


class InconsistencyError(AssertionError):
    """Exact computation contradicted a proved identity: an arithmetic bug."""


# ---------------------------------------------------------------------------
# class functions


@dataclass(frozen=True, eq=False)
class ClassFunction:
    group: AlgebraGroup
    values: tuple[Cyclotomic, ...]    # indexed by conjugacy class
    label: str = ""

    @property
    def p(self) -> int:
        return self.group.gf.p

    @property
    def degree(self) -> Cyclotomic:
        # class 0 is the identity: key 0 is the least element and a singleton class
        return self.values[0]

    def __call__(self, x) -> Cyclotomic:
        return self.values[int(self.group.class_index(x))]

    def __eq__(self, other):
        return (isinstance(other, ClassFunction) and other.group is self.group
                and self.values == other.values)

    __hash__ = None

    def _zip(self, other, op):
        if other.group is not self.group:
            raise ValueError("class functions live on different groups")
        return ClassFunction(self.group, tuple(op(a, b) for a, b in zip(self.values, other.values)))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __mul__(self, other):
        if isinstance(other, ClassFunction):
            return self._zip(other, lambda a, b: a * b)
        return ClassFunction(self.group, tuple(v * other for v in self.values))

    __rmul__ = __mul__

    def conjugate(self) -> "ClassFunction":
        return ClassFunction(self.group, tuple(v.conjugate() for v in self.values))

    def cells(self) -> list[str]:
        return [str(v) for v in self.values]


def frobenius(u: ClassFunction, v: ClassFunction) -> Cyclotomic:
    """<u, v> = |G|^-1 sum over classes of size * u * conj(v)."""
    if u.group is not v.group:
        raise ValueError("class functions live on different groups")
    g = u.group
    acc = Cyclotomic.zero(u.p)
    for size, a, b in zip(g.classes.sizes.tolist(), u.values, v.values):
        acc = acc + (a * b.conjugate()).scale(size)
    return acc.scale(Fraction(1, g.order))


def exact_gram(rows: Sequence[Sequence[Cyclotomic]], cols_weight: Sequence[int], p: int,
               other: Sequence[Sequence[Cyclotomic]] | None = None) -> list[list[Cyclotomic]]:
    """Sum_c w_c rows[r][c] * conj(other[s][c]) for all r, s, exactly.

    Values are lifted to integer vectors over z^0..z^(p-1) with one common
    denominator, so the bulk of the work is integer matrix products.
    """
    other = rows if other is None else other
    den = 1
    for row in (*rows, *other):
        for v in row:
            for c in v.coeffs:
                den = den * c.denominator // math.gcd(den, c.denominator)

    def lift(mat):
        a = np.zeros((len(mat), len(mat[0]) if mat else 0, p), dtype=object)
        for r, row in enumerate(mat):
            for c, v in enumerate(row):
                for k, x in enumerate(v.coeffs):
                    a[r, c, k] = int(x * den)
        return a

    a, b = lift(rows), lift(other)
    w = np.array([int(x) for x in cols_weight], dtype=object)
    big = max([abs(int(x)) for x in a.ravel()] + [abs(int(x)) for x in b.ravel()] + [1])
    bound = big * big * max([abs(int(x)) for x in w] + [1]) * max(1, a.shape[1]) * p
    dtype = np.int64 if bound < (1 << 62) else object
    a, b, w = a.astype(dtype), b.astype(dtype), w.astype(dtype)
    aw = (a * w[None, :, None]).reshape(a.shape[0], -1)
    out = np.zeros((a.shape[0], b.shape[0], p), dtype=dtype)
    for d in range(p):
        rolled = np.roll(b, d, axis=2).reshape(b.shape[0], -1)
        out[:, :, d] = aw @ rolled.T
    scale = Fraction(1, den * den)
    return [[Cyclotomic.from_exponent_counts(p, out[r, s].tolist(), scale)
             for s in range(b.shape[0])] for r in range(a.shape[0])]


# ---------------------------------------------------------------------------
# per-group engine


_ENGINES: dict[tuple, "Engine"] = {}
_ENGINES_LOCK = threading.Lock()


class Engine:
    """Classes, orbits and orbit class functions of one algebra group."""

    def __init__(self, algebra: Algebra, max_order: int = DEFAULT_MAX_ORDER):
        self.algebra = algebra
        self.group = AlgebraGroup(algebra, max_order)
        self.coadjoint = Coadjoint(self.group)
        self.gf = algebra.gf
        self.p = self.gf.p
        self.q = self.gf.q
        self.n = algebra.n
        self._subgroups: dict[tuple, Subgroup] = {}
        self._lock = threading.Lock()

    @classmethod
    def of(cls, algebra: Algebra, max_order: int = DEFAULT_MAX_ORDER) -> "Engine":
        key = (algebra, max_order)
        with _ENGINES_LOCK:
            eng = _ENGINES.get(key)
            if eng is None:
                eng = _ENGINES[key] = cls(algebra, max_order)
        return eng

    def __repr__(self):
        return f"Engine({self.algebra!r})"

    @property
    def classes(self):
        return self.group.classes

    @property
    def orbits(self) -> list[CoadjointOrbit]:
        return self.coadjoint.orbits

    @property
    def order(self) -> int:
        return self.group.order

    # -- phi_O --------------------------------------------------------------

    @cached_property
    def _exponent_counts(self) -> np.ndarray:
        """counts[O, c, k] = #{f in O : psi(f(a_c)) = z^k}, a_c the class reps."""
        reps = self.classes.reps
        funcs = self.coadjoint.functionals()
        owner = self.coadjoint.orbit_index
        k = len(reps)
        counts = np.zeros((len(self.orbits), k, self.p), dtype=np.int64)
        step = max(1, (1 << 22) // max(1, k))
        cols = np.arange(k)[None, :]
        for s in range(0, len(funcs), step):
            vals = self.gf.matmul(funcs[s:s + step], reps.T) if self.n else \
                np.zeros((len(funcs[s:s + step]), k), dtype=np.int64)
            exps = self.gf.TRACE[vals]
            np.add.at(counts, (owner[s:s + step, None], cols, exps), 1)
        return counts

    def phi(self, orbit: int | CoadjointOrbit) -> ClassFunction:
        """phi_O(1 + a) = |O|^(-1/2) sum_{f in O} psi(f(a))."""
        if isinstance(orbit, CoadjointOrbit):
            orbit = self.coadjoint.orbit_number(orbit.rep)
        return self.phis[orbit]

    @cached_property
    def phis(self) -> list[ClassFunction]:
        out = []
        for t, o in enumerate(self.orbits):
            scale = Fraction(1, o.degree)
            vals = tuple(Cyclotomic.from_exponent_counts(self.p, row, scale)
                         for row in self._exponent_counts[t].tolist())
            out.append(ClassFunction(self.group, vals, label=f"phi[{t}]"))
        return out

    def trivial(self) -> ClassFunction:
        return ClassFunction(self.group, tuple(Cyclotomic.one(self.p) for _ in self.classes.sizes))

    def class_function(self, fn) -> ClassFunction:
        """Class function from a callable evaluated at the class representatives."""
        return ClassFunction(self.group, tuple(fn(r) for r in self.classes.reps))

    def value_matrix(self, functions: Sequence[ClassFunction] | None = None):
        functions = self.phis if functions is None else functions
        return [list(f.values) for f in functions]

    # -- orthogonality ------------------------------------------------------

    def gram(self, functions: Sequence[ClassFunction] | None = None) -> list[list[Cyclotomic]]:
        """Matrix of Frobenius products <u, v>."""
        functions = self.phis if functions is None else functions
        raw = exact_gram(self.value_matrix(functions), self.classes.sizes.tolist(), self.p)
        inv = Fraction(1, self.order)
        return [[x.scale(inv) for x in row] for row in raw]

    def column_gram(self) -> list[list[Cyclotomic]]:
        """sum_O phi_O(x) conj(phi_O(y)) over pairs of class representatives."""
        mat = self.value_matrix()
        cols = [list(col) for col in zip(*mat)]
        return exact_gram(cols, [1] * len(mat), self.p)

    def second_orthogonality_check(self, x, y) -> Cyclotomic:
        cx, cy = int(self.group.class_index(x)), int(self.group.class_index(y))
        acc = Cyclotomic.zero(self.p)
        for phi in self.phis:
            acc = acc + phi.values[cx] * phi.values[cy].conjugate()
        return acc

    def regular_decomposition_check(self) -> bool:
        """sum_O phi_O(1) phi_O = regular character, and sum phi_O(1)^2 = |G|."""
        reg = [Cyclotomic.zero(self.p) for _ in self.classes.sizes]
        for phi in self.phis:
            d = phi.degree
            reg = [r + d * v for r, v in zip(reg, phi.values)]
        expect = [Cyclotomic.rational(self.p, self.order)] + \
            [Cyclotomic.zero(self.p)] * (len(reg) - 1)
        squares = sum(phi.degree.to_rational() ** 2 for phi in self.phis)
        return reg == expect and squares == self.order

    # -- subgroups ----------------------------------------------------------

    def subgroup(self, u: Subspace) -> "Subgroup":
        with self._lock:
            sub = self._subgroups.get(u.key)
            if sub is None:
                sub = self._subgroups[u.key] = Subgroup(self, u)
        return sub

    def induce(self, sub: "Subgroup", values_on_h) -> ClassFunction:
        """theta^G(g) = |H|^-1 sum_{x in G} theta°(x^-1 g x), theta° = 0 off H.

        ``values_on_h`` maps an (m, dim U) array of U-coordinates to an
        (m, p) array of integer exponent weights, or is a ClassFunction of H.
        """
        if isinstance(values_on_h, ClassFunction):
            return self._induce_class_function(sub, values_on_h)
        vals = []
        for c in range(len(self.classes)):
            conj = self.group.conjugates(c)
            inside = sub.u.contains(conj)
            w = values_on_h(sub.u.coords(conj[inside]))
            vals.append(Cyclotomic.from_exponent_counts(self.p, w.sum(axis=0).tolist(),
                                                        Fraction(1, sub.order)))
        return ClassFunction(self.group, tuple(vals))

    def _induce_class_function(self, sub: "Subgroup", theta: ClassFunction) -> ClassFunction:
        h = sub.engine.group
        vals = []
        for c in range(len(self.classes)):
            conj = self.group.conjugates(c)
            inside = sub.u.contains(conj)
            hcls = h.classes.class_of[h.key(sub.u.coords(conj[inside]))] if sub.u.dim else \
                np.zeros(int(inside.sum()), dtype=np.int64)
            counts = np.bincount(hcls, minlength=len(h.classes))
            acc = Cyclotomic.zero(self.p)
            for t, m in enumerate(counts.tolist()):
                if m:
                    acc = acc + theta.values[t].scale(m)
            vals.append(acc.scale(Fraction(1, sub.order)))
        return ClassFunction(self.group, tuple(vals))

    def restrict(self, chi: ClassFunction, sub: "Subgroup") -> ClassFunction:
        h = sub.engine.group
        g_idx = self.group.class_index(sub.u.embed(h.classes.reps))
        return ClassFunction(h, tuple(chi.values[int(i)] for i in np.atleast_1d(g_idx)))


class Subgroup:
    """An algebra subgroup H = 1 + U of G, with its own engine."""

    def __init__(self, parent: Engine, u: Subspace):
        alg = parent.algebra
        if not alg.is_mult_closed(u):
            raise ValueError(f"{u} is not multiplicatively closed")
        self.parent = parent
        self.u = u
        self.algebra = alg.subalgebra(u, name=f"U<{alg.name or 'J'}>")
        self.engine = Engine.of(self.algebra, parent.group.max_order)
        self.order = parent.q ** u.dim
        self.perp = u.annihilator()

    def project(self, f) -> np.ndarray:
        """pi(f) = f restricted to U, in coordinates dual to u.basis."""
        f = np.asarray(f, dtype=np.int64)
        if self.u.dim == 0:
            return np.zeros(f.shape[:-1] + (0,), dtype=np.int64)
        return self.parent.gf.matmul(f, self.u.basis.T)

    def lift(self, g0) -> np.ndarray:
        """A functional on J restricting to g0 (supported on the pivot columns)."""
        g0 = np.asarray(g0, dtype=np.int64)
        f = np.zeros(g0.shape[:-1] + (self.u.n,), dtype=np.int64)
        f[..., list(self.u.pivots)] = g0
        return f

    def h_key(self, g0):
        return self.engine.group.key(g0)

    @property
    def is_maximal(self) -> bool:
        alg = self.parent.algebra
        powers = alg.radical_powers()
        j2 = powers[1] if len(powers) > 1 else alg.zero_subspace()
        return self.u.dim == alg.n - 1 and self.u.contains_subspace(j2)

    @cached_property
    def complement(self) -> tuple[np.ndarray, np.ndarray]:
        """(e, e*) with J = U + F_q e, e* in U^perp and e*(e) = 1."""
        if not self.is_maximal:
            raise ValueError("complement is only defined for maximal U")
        gf = self.parent.gf
        alg = self.parent.algebra
        e = next(alg.basis_vector(i) for i in range(alg.n) if not self.u.contains(alg.basis_vector(i)))
        w = self.perp.basis[0]
        e_star = gf.mul(w, gf.INV[int(gf.matmul(w, e))])
        return e, e_star

    def coset_reps(self) -> list[np.ndarray]:
        """x_alpha = 1 + alpha e, alpha in F_q, in code order."""
        e, _ = self.complement
        return [self.parent.gf.mul(alpha, e) for alpha in range(self.parent.q)]


# ---------------------------------------------------------------------------
# projection to a maximal subgroup and the type I / II dichotomy


def _maximal(engine: Engine, u: Subspace) -> Subgroup:
    sub = engine.subgroup(u)
    if not sub.is_maximal:
        raise ValueError(f"{u} is not a maximal multiplicatively closed subspace")
    return sub


def project(engine: Engine, f, u: Subspace) -> np.ndarray:
    return _maximal(engine, u).project(f)


def fiber(engine: Engine, f, u: Subspace) -> np.ndarray:
    """L(f) = f + U^perp, sorted by key."""
    sub = _maximal(engine, u)
    gf = engine.gf
    combos = all_vectors(engine.q, sub.perp.dim)
    shifts = gf.matmul(combos, sub.perp.basis)
    out = gf.add(np.asarray(f, dtype=np.int64)[None, :], shifts)
    return out[np.argsort(engine.coadjoint.key(out))]


@dataclass(frozen=True, eq=False)
class OrbitProjectionReport:
    orbit: CoadjointOrbit
    orbit_index: int
    u: Subspace
    pi_image_size: int
    type: str                  # "I" or "II"
    suborbits: list[int]       # H-orbit numbers making up pi(O)
    o0: int                    # H-orbit of pi(rep)
    checks: dict = field(default_factory=dict)


def classify_orbit(engine: Engine, orbit: int, u: Subspace) -> OrbitProjectionReport:
    """Type of an orbit relative to a maximal H = 1 + U, with every equivalent test.

    Raises InconsistencyError if the equivalent characterisations disagree.
    """
    sub = _maximal(engine, u)
    co, h = engine.coadjoint, sub.engine.coadjoint
    q = engine.q
    o = engine.orbits[orbit]
    proj = sub.project(o.elements)
    pkeys = h.key(proj) if sub.u.dim else np.zeros(len(proj), dtype=np.int64)
    image = np.unique(pkeys)
    if o.size == len(image):
        kind = "I"
    elif o.size == q * len(image):
        kind = "II"
    else:
        raise InconsistencyError(f"|O| = {o.size} is neither |pi(O)| nor q |pi(O)| = {q * len(image)}")

    checks: dict[str, bool] = {}
    # every f in O: L(f) n O is {f} (type I) or all of L(f) (type II)
    fib_sizes = []
    for f in o.elements:
        fib = co.key(fiber(engine, f, u))
        fib_sizes.append(int(np.isin(fib, o.keys).sum()))
    checks["fibres"] = all(s == (1 if kind == "I" else q) for s in fib_sizes)

    f = o.rep
    f0 = sub.project(f)
    o0 = h.orbit_number(f0)
    size0 = h.orbits[o0].size
    rad, rad0 = co.radical(f).dim, h.radical(f0).dim
    c_g, c_h = co.centralizer_order(f), h.centralizer_order(f0)
    if kind == "I":
        checks["sizes"] = o.size == size0
        checks["radicals"] = rad == rad0 + 1
        checks["centralizers"] = c_g == q * c_h
    else:
        checks["sizes"] = o.size == q * q * size0
        checks["radicals"] = rad == rad0 - 1
        checks["centralizers"] = q * c_g == c_h

    owner = h.orbit_index
    subs = sorted(set(owner[image].tolist()))
    if kind == "I":
        checks["decomposition"] = subs == [o0]
    else:
        # pi(O) is the disjoint union of x_alpha . O_0, alpha in F_q, each of size |O| / q^2
        expect = set()
        ok = True
        for x in sub.coset_reps():
            moved = sub.project(co.coact(x, sub.lift(h.orbits[o0].elements)))
            idx = set(owner[h.key(moved)].tolist())
            ok &= len(idx) == 1
            expect |= idx
        checks["decomposition"] = (ok and len(expect) == q and sorted(expect) == subs
                                   and all(h.orbits[t].size * q * q == o.size for t in subs))
    if not all(checks.values()):
        bad = [k for k, v in checks.items() if not v]
        raise InconsistencyError(f"orbit {orbit} over U = {u.basis.tolist()} (type {kind}): "
                                 f"failed {bad}")
    return OrbitProjectionReport(o, orbit, u, len(image), kind, subs, o0, checks)


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    kind: str
    computed: ClassFunction
    predicted: ClassFunction
    parts: list[int]

    @property
    def ok(self) -> bool:
        return self.computed == self.predicted


def restrict_phi(engine: Engine, orbit: int, u: Subspace) -> DecompositionReport:
    """phi_O restricted to H: phi_{O_0} (type I) or sum_alpha phi_alpha (type II)."""
    rep = classify_orbit(engine, orbit, u)
    sub = engine.subgroup(u)
    h = sub.engine
    res = engine.restrict(engine.phis[orbit], sub)
    if rep.type == "I":
        return DecompositionReport("I", res, h.phis[rep.o0], [rep.o0])
    phi0 = h.phis[rep.o0]
    parts = []
    total = None
    for x in sub.coset_reps():
        # phi_alpha(y) = phi_0(x^-1 y x), evaluated on the classes of H
        ys = sub.u.embed(h.classes.reps)
        moved = sub.u.coords(engine.group.gconj_rows(ys, x))
        conj = ClassFunction(h.group, tuple(phi0(m) for m in moved))
        # it must be phi of the H-orbit x . O_0
        moved_o = h.coadjoint.orbit_number(sub.project(engine.coadjoint.coact(x, sub.lift(h.orbits[rep.o0].rep))))
        if conj != h.phis[moved_o]:
            raise InconsistencyError(f"phi_0 twisted by {x.tolist()} is not phi of x . O_0")
        parts.append(moved_o)
        total = conj if total is None else total + conj
    if len(set(parts)) != engine.q:
        raise InconsistencyError("twisted H-orbits are not distinct")
    return DecompositionReport("II", res, total, parts)


def induce_phi(engine: Engine, h_orbit: int, u: Subspace) -> DecompositionReport:
    """(phi_{O_0})^G: phi_O (type II) or sum_alpha phi_{O(alpha)} (type I)."""
    sub = _maximal(engine, u)
    h = sub.engine
    co = engine.coadjoint
    induced = engine.induce(sub, h.phis[h_orbit])
    f = sub.lift(h.orbits[h_orbit].rep)
    orbit = co.orbit_number(f)
    kind = classify_orbit(engine, orbit, u).type
    if kind == "II":
        return DecompositionReport("II", induced, engine.phis[orbit], [orbit])
    _, e_star = sub.complement
    parts = [co.orbit_number(engine.gf.add(f, engine.gf.mul(alpha, e_star)))
             for alpha in range(engine.q)]
    if len(set(parts)) != engine.q:
        raise InconsistencyError(f"orbits O(alpha) through {f.tolist()} are not distinct")
    total = engine.phis[parts[0]]
    for t in parts[1:]:
        total = total + engine.phis[t]
    return DecompositionReport("I", induced, total, parts)


def inverse_image_check(engine: Engine, h_orbit: int, u: Subspace) -> bool:
    """pi^-1(O_0) is a disjoint union of q orbits (type I) or a proper subset of O (type II)."""
    sub = _maximal(engine, u)
    h, co = sub.engine, engine.coadjoint
    o0 = h.coadjoint.orbits[h_orbit]
    funcs = co.functionals()
    pk = h.group.key(sub.project(funcs)) if sub.u.dim else np.zeros(len(funcs), dtype=np.int64)
    pre = np.nonzero(np.isin(pk, o0.keys))[0]
    f = sub.lift(o0.rep)
    orbit = co.orbit_number(f)
    kind = classify_orbit(engine, orbit, u).type
    owners = co.orbit_index[pre]
    if kind == "II":
        return bool(np.all(owners == orbit)) and len(pre) < engine.orbits[orbit].size
    _, e_star = sub.complement
    parts = {co.orbit_number(engine.gf.add(f, engine.gf.mul(alpha, e_star)))
             for alpha in range(engine.q)}
    union = np.concatenate([engine.orbits[t].keys for t in parts])
    return len(parts) == engine.q and np.array_equal(np.sort(union), np.sort(pre))
