"""Polarizations, the linear characters lambda_f, and table certification.

For f in J* and a chain of ideals 0 = U_0 < ... < U_n = J, the pieces
R_i = {a in U_i : f([a, b]) = 0 for all b in U_i} add up to a subspace U
that is closed under multiplication and maximal isotropic for B_f.  Then
lambda_f(1 + a) = psi(f(a)) is a linear character of H = 1 + U and its
induced character is phi of the orbit of f.  ``certify_irreducible_table``
runs that construction for every orbit and checks each link exactly.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import Algebra, IdealChain, Subspace, all_vectors, null_space
from .chars import ClassFunction, Engine, Subgroup, exact_gram, frobenius
from .cyclo import Cyclotomic

log = logging.getLogger(__name__)

# exhaustive pair check for multiplicativity up to this many (x, y) pairs
PAIR_LIMIT = 1 << 22


class CertificationError(AssertionError):
    """A certified identity failed; carries the stage and orbit."""

    def __init__(self, stage: str, detail: str, orbit: int | None = None):
        where = "" if orbit is None else f" (orbit {orbit})"
        super().__init__(f"{stage}{where}: {detail}")
        self.stage = stage
        self.orbit = orbit
        self.detail = detail


# ---------------------------------------------------------------------------
# polarization


@dataclass(frozen=True, eq=False)
class Polarization:
    f: np.ndarray
    chain: IdealChain
    pieces: tuple[Subspace, ...]   # R_1 .. R_n
    u: Subspace
    rad: Subspace                  # Rad(f) on all of J
    q: int

    @property
    def h_order(self) -> int:
        return self.q ** self.u.dim

    def to_dict(self) -> dict:
        return {
            "f": self.f.tolist(),
            "u_basis": self.u.basis.tolist(),
            "dim_u": self.u.dim,
            "dim_rad": self.rad.dim,
            "pieces": [r.basis.tolist() for r in self.pieces],
        }


def check_chain(algebra: Algebra, chain: IdealChain) -> None:
    if len(chain) != algebra.n + 1:
        raise ValueError(f"chain has {len(chain)} members, expected {algebra.n + 1}")
    for i, u in enumerate(chain):
        if u.dim != i:
            raise ValueError(f"chain member {i} has dimension {u.dim}")
        if not algebra.is_ideal(u):
            raise ValueError(f"chain member {i} is not an ideal")
        if i and not u.contains_subspace(chain[i - 1]):
            raise ValueError(f"chain member {i} does not contain member {i - 1}")


def form_on(algebra: Algebra, f, basis: np.ndarray) -> np.ndarray:
    """Matrix of B_f(a, b) = f([a, b]) restricted to span(basis)."""
    gf = algebra.gf
    if not len(basis) or not algebra.n:
        return np.zeros((len(basis), len(basis)), dtype=np.int64)
    m = gf.matmul(algebra.bracket_table, np.asarray(f, dtype=np.int64))
    return gf.matmul(gf.matmul(basis, m), basis.T)


def _restricted_radical(algebra: Algebra, f, u: Subspace) -> Subspace:
    gf, n = algebra.gf, algebra.n
    if u.dim == 0:
        return u
    coeffs = null_space(gf, form_on(algebra, f, u.basis), u.dim)
    vecs = gf.matmul(coeffs, u.basis) if len(coeffs) else np.zeros((0, n), dtype=np.int64)
    return Subspace(gf, vecs, n)


def polarize(algebra: Algebra, f, chain: IdealChain | None = None) -> Polarization:
    """U = R_1 + ... + R_n along the chain; every property of U is asserted."""
    gf, n = algebra.gf, algebra.n
    f = np.asarray(f, dtype=np.int64)
    if chain is None:
        chain = algebra.maximal_ideal_chain()
    else:
        check_chain(algebra, chain)
    pieces = tuple(_restricted_radical(algebra, f, chain[i]) for i in range(1, n + 1))
    u = algebra.zero_subspace()
    for r in pieces:
        u = u + r
    rad = _restricted_radical(algebra, f, algebra.whole())

    def fail(what):
        raise CertificationError("polarize", f"f = {f.tolist()}: {what}")

    if not algebra.is_mult_closed(u):
        fail("U is not multiplicatively closed")
    if np.any(form_on(algebra, f, u.basis)):
        fail("U is not isotropic for B_f")
    if 2 * u.dim != n + rad.dim:
        fail(f"2 dim U = {2 * u.dim} but dim J + dim Rad f = {n + rad.dim}")
    if not u.contains_subspace(rad):
        fail("Rad f is not contained in U")
    # a in R_i, b in R_j, i <= j: ab and ba lie in R_i
    for i, ri in enumerate(pieces):
        for rj in pieces[i:]:
            if not ri.dim or not rj.dim:
                continue
            a = np.repeat(ri.basis, rj.dim, axis=0)
            b = np.tile(rj.basis, (ri.dim, 1))
            if not (ri.contains(algebra.mul_rows(a, b)).all() and ri.contains(algebra.mul_rows(b, a)).all()):
                fail(f"R_{i + 1} R_j is not inside R_{i + 1}")
    return Polarization(f, chain, pieces, u, rad, algebra.q)


# ---------------------------------------------------------------------------
# lambda_f


@dataclass(frozen=True, eq=False)
class LinearCharacter:
    """lambda(1 + a) = psi(f(a)) on H = 1 + U."""

    sub: Subgroup
    f: np.ndarray

    @property
    def u(self) -> Subspace:
        return self.sub.u

    def exponents(self, coords) -> np.ndarray:
        """psi-exponents at 1 + a for a given by U-coordinates."""
        gf = self.sub.parent.gf
        coords = np.asarray(coords, dtype=np.int64)
        if self.u.dim == 0:
            return np.zeros(coords.shape[:-1], dtype=np.int64)
        return gf.TRACE[gf.matmul(self.u.embed(coords), self.f)]

    def weights(self, coords) -> np.ndarray:
        """One-hot (m, p) exponent weights, the form ``Engine.induce`` takes."""
        p = self.sub.parent.p
        e = self.exponents(coords)
        return (e[:, None] == np.arange(p)[None, :]).astype(np.int64)

    def table(self) -> list[int]:
        """Exponents over all of H, in key order of U-coordinates."""
        return self.exponents(all_vectors(self.sub.parent.q, self.u.dim)).tolist()

    def class_function(self) -> ClassFunction:
        h = self.sub.engine
        p = h.p
        return ClassFunction(h.group, tuple(Cyclotomic.root_of_unity(p, int(k))
                                            for k in np.atleast_1d(self.exponents(h.classes.reps))))

    def multiplicativity_check(self) -> bool:
        """lambda(xy) = lambda(x) lambda(y) on H.

        Exhaustive over all pairs when |H|^2 <= PAIR_LIMIT; otherwise by
        the equivalent bilinear test f(u_i u_j) = 0 on a basis of U.
        """
        h = self.sub.engine.group
        order = h.order
        if order * order <= PAIR_LIMIT:
            elems = h.elements()
            ex = self.exponents(elems)
            p = self.sub.parent.p
            for x, ex_x in zip(elems, ex.tolist()):
                prod = h.gmul_rows(x, elems)
                if np.any(self.exponents(prod) != (ex + ex_x) % p):
                    return False
            return True
        basis = self.u.basis
        alg = self.sub.parent.algebra
        a = np.repeat(basis, len(basis), axis=0)
        b = np.tile(basis, (len(basis), 1))
        return not np.any(alg.gf.matmul(alg.mul_rows(a, b), self.f))


def linear_character(engine: Engine, pol: Polarization, strict: bool = True) -> LinearCharacter:
    sub = engine.subgroup(pol.u)
    lam = LinearCharacter(sub, pol.f)
    if strict and not lam.multiplicativity_check():
        raise CertificationError("linear_character",
                                 f"psi o f is not multiplicative on 1 + U for f = {pol.f.tolist()}")
    return lam


def induce_linear(engine: Engine, lam: LinearCharacter) -> ClassFunction:
    """lambda^G by the full |G|-sum, with lambda extended by zero off H."""
    return engine.induce(lam.sub, lam.weights)


def frobenius_pairing_check(engine: Engine, orbit: int, lam: LinearCharacter,
                            induced: ClassFunction | None = None) -> Cyclotomic:
    """<phi_O, lambda^G> computed directly and as |(f + U^perp) n O| / sqrt|O|."""
    if induced is None:
        induced = induce_linear(engine, lam)
    lhs = frobenius(engine.phis[orbit], induced)
    o = engine.orbits[orbit]
    perp = lam.u.annihilator()
    gf = engine.gf
    shifts = gf.matmul(all_vectors(engine.q, perp.dim), perp.basis) if perp.dim else \
        np.zeros((1, engine.n), dtype=np.int64)
    coset = engine.coadjoint.key(gf.add(lam.f[None, :], shifts))
    hits = int(np.isin(coset, o.keys).sum())
    rhs = Cyclotomic.rational(engine.p, Fraction(hits, o.degree))
    if lhs != rhs:
        raise CertificationError("frobenius_pairing", f"{lhs} != {hits}/{o.degree}", orbit)
    return lhs


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class Check:
    stage: str
    orbit: int | None
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"stage": self.stage, "orbit": self.orbit, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True, eq=False)
class Witness:
    orbit: int
    polarization: Polarization
    lam: LinearCharacter

    def to_dict(self) -> dict:
        d = {"orbit": self.orbit}
        d.update(self.polarization.to_dict())
        d["lambda_exponents"] = self.lam.table()
        return d


@dataclass(eq=False)
class CertifiedTable:
    engine: Engine
    checks: list[Check] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def degrees(self) -> list[int]:
        return [o.degree for o in self.engine.orbits]


def is_power_of(q: int, d: int) -> bool:
    while d > 1 and d % q == 0:
        d //= q
    return d == 1


def _certify_orbit(engine: Engine, t: int) -> tuple[list[Check], Witness | None]:
    o = engine.orbits[t]
    checks: list[Check] = []
    try:
        pol = polarize(engine.algebra, o.rep)
        checks.append(Check("polarize", t, True, f"dim U = {pol.u.dim} = ({engine.n} + {pol.rad.dim})/2"))
        lam = linear_character(engine, pol, strict=False)
    except CertificationError as exc:
        checks.append(Check(exc.stage, t, False, exc.detail))
        return checks, None

    mult = lam.multiplicativity_check()
    checks.append(Check("multiplicative", t, mult,
                        "" if mult else f"psi o f is not multiplicative on 1 + U for f = {pol.f.tolist()}"))
    h = lam.sub.engine
    f0 = lam.sub.project(pol.f)
    o0 = h.coadjoint.orbit_number(f0)
    same = h.orbits[o0].size == 1 and lam.class_function() == h.phis[o0]
    checks.append(Check("lambda_is_phi_of_point_orbit", t, same))

    induced = induce_linear(engine, lam)
    deg = induced.degree
    expect_deg = engine.q ** (engine.n - pol.u.dim)
    checks.append(Check("induced_degree", t, deg == expect_deg and expect_deg == o.degree,
                        f"{deg} vs |G:H| = {expect_deg}, sqrt|O| = {o.degree}"))
    checks.append(Check("induced_equals_phi", t, induced == engine.phis[t]))
    try:
        val = frobenius_pairing_check(engine, t, lam, induced)
        checks.append(Check("frobenius_pairing", t, val == 1, str(val)))
    except CertificationError as exc:
        checks.append(Check(exc.stage, t, False, exc.detail))
    return checks, Witness(t, pol, lam)


def certify_irreducible_table(engine: Engine, threads: int = 1) -> CertifiedTable:
    """Every phi_O is induced from a linear character, has norm 1, the phi_O are
    orthogonal and as many as the classes, degrees are q-powers, and the set is
    closed under complex conjugation."""
    out = CertifiedTable(engine)
    q = engine.q
    orbits = engine.orbits
    phis = engine.phis
    # warm the shared caches before any worker touches them
    for c in range(len(engine.classes)):
        engine.group.conjugates(c)
    engine.algebra.maximal_ideal_chain()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: _certify_orbit(engine, t), range(len(orbits))))
    else:
        results = [_certify_orbit(engine, t) for t in range(len(orbits))]
    for checks, wit in results:
        out.checks.extend(checks)
        if wit is not None:
            out.witnesses.append(wit)

    gram = engine.gram()
    for t, row in enumerate(gram):
        out.checks.append(Check("norm_one", t, row[t] == 1, str(row[t])))
    off = [(s, t) for s in range(len(gram)) for t in range(len(gram)) if s != t and not gram[s][t].is_zero()]
    out.checks.append(Check("orthogonal", None, not off, f"nonzero pairs {off[:5]}" if off else ""))

    k = len(engine.classes)
    adj = engine.coadjoint.adjoint_orbit_count()
    out.checks.append(Check("class_count", None, len(orbits) == k == adj,
                            f"orbits {len(orbits)}, classes {k}, adjoint orbits {adj}"))
    bad = [t for t, o in enumerate(orbits) if not is_power_of(q, o.degree)]
    out.checks.append(Check("q_power_degrees", None, not bad, f"bad orbits {bad}" if bad else ""))

    perm = []
    for t, o in enumerate(orbits):
        s = engine.coadjoint.orbit_number(engine.gf.neg(o.rep))
        perm.append(s)
        if phis[t].conjugate() != phis[s]:
            out.checks.append(Check("conjugation_closed", t, False, f"conj(phi) != phi[{s}]"))
    out.checks.append(Check("conjugation_closed", None, sorted(perm) == list(range(len(orbits))),
                            "rows permuted by f -> -f"))
    return out


# ---------------------------------------------------------------------------
# branching to maximal algebra subgroups


@dataclass(frozen=True)
class BranchRecord:
    u_basis: list
    orbit: int
    case: str                 # "a" (chi_H irreducible) or "b" (chi_H splits)
    norm: str                 # <chi_H, chi_H>_H
    constituents: list[int]   # G-rows (case a) or H-rows (case b)
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _pairings(engine: Engine, fs: Sequence[ClassFunction], gs: Sequence[ClassFunction]):
    raw = exact_gram([list(f.values) for f in fs], engine.classes.sizes.tolist(), engine.p,
                     other=[list(g.values) for g in gs])
    inv = Fraction(1, engine.order)
    return [[x.scale(inv) for x in row] for row in raw]


def _support(row) -> tuple[list[int], bool]:
    """Indices with nonzero pairing, and whether each of them is exactly 1."""
    idx = [i for i, x in enumerate(row) if not x.is_zero()]
    return idx, all(row[i] == 1 for i in idx)


def clifford_branching_check(engine: Engine, subspaces: Iterable[Subspace] | None = None) -> list[BranchRecord]:
    """For each maximal H and each phi_O check which alternative holds, exactly."""
    q = engine.q
    phis = engine.phis
    if subspaces is None:
        subspaces = engine.algebra.maximal_mult_closed_subspaces()
    out = []
    for u in subspaces:
        sub = engine.subgroup(u)
        if not sub.is_maximal:
            raise ValueError(f"{u} is not a maximal multiplicatively closed subspace")
        h = sub.engine
        _, e_star = sub.complement
        quotient = [engine.phis[engine.coadjoint.orbit_number(engine.gf.mul(a, e_star))]
                    for a in range(q)]
        restricted = [engine.restrict(phi, sub) for phi in phis]
        res_gram = h.gram(restricted)
        to_h = _pairings(h, restricted, h.phis)
        for t, chi in enumerate(phis):
            norm = res_gram[t][t]
            basis = u.basis.tolist()
            if norm == 1:
                theta = restricted[t]
                ind = engine.induce(sub, theta)
                cons, mult_one = _support(_pairings(engine, [ind], phis)[0])
                twists = sorted({phis.index(lam * chi) if (lam * chi) in phis else -1 for lam in quotient})
                ok = mult_one and len(cons) == q and twists == cons
                # <chi_H, chi'_H> != 0 exactly for the twists
                partners = [s for s in range(len(phis)) if not res_gram[t][s].is_zero()]
                ok &= partners == cons
                out.append(BranchRecord(basis, t, "a", str(norm), cons, ok,
                                        "" if ok else f"constituents {cons}, twists {twists}, partners {partners}"))
            elif norm == q:
                cons, mult_one = _support(to_h[t])
                ok = mult_one and len(cons) == q
                ok &= all(engine.induce(sub, h.phis[s]) == chi for s in cons)
                partners = [s for s in range(len(phis)) if not res_gram[t][s].is_zero()]
                ok &= partners == [t]
                out.append(BranchRecord(basis, t, "b", str(norm), cons, ok,
                                        "" if ok else f"H-constituents {cons}, partners {partners}"))
            else:
                out.append(BranchRecord(basis, t, "?", str(norm), [], False, "norm is neither 1 nor q"))
    return out
