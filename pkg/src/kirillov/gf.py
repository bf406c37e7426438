"""Finite fields F_q, q = p^e, with elements encoded as integers.

An element with polynomial coefficients (c_0, ..., c_{e-1}) over F_p is
stored as the integer code c_0 + c_1 p + ... + c_{e-1} p^{e-1}.  Codes
0 and 1 are the field's zero and one, and for e = 1 the code is the
residue itself.  Vectors and matrices over F_q are numpy integer arrays
of codes; the ``GF`` methods accept scalars or arrays.

The additive character is fixed as psi(a) = zeta_p ** trace(a).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

# Conway polynomials, low degree first.
CONWAY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
}


class FieldError(ValueError):
    """Invalid field spec or an undefined field operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _polymod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    d = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) > d and any(a[d:]):
        top = len(a) - 1
        c = a[top] * inv_lead % p
        if c:
            for i in range(d + 1):
                a[top - d + i] = (a[top - d + i] - c * m[i]) % p
        a.pop()
    return (a + [0] * d)[:d]


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..e//2."""
    e = len(modulus) - 1
    if e < 1 or modulus[-1] % p == 0:
        return False
    for d in range(1, e // 2 + 1):
        for low in product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_polymod(list(modulus), divisor, p)):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"p = {self.p} is not prime")
        if self.e < 1:
            raise FieldError(f"extension degree e = {self.e} must be >= 1")
        mod = self.modulus
        if mod is None:
            if self.e == 1:
                mod = (0, 1)
            elif (self.p, self.e) in CONWAY:
                mod = CONWAY[(self.p, self.e)]
            else:
                raise FieldError(
                    f"no built-in modulus for q = {self.p}^{self.e}; supply one")
        mod = tuple(int(c) % self.p for c in mod)
        if len(mod) != self.e + 1 or mod[-1] != 1:
            raise FieldError(f"modulus {list(mod)} is not monic of degree {self.e}")
        if not is_irreducible(mod, self.p):
            raise FieldError(f"modulus {list(mod)} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p ** self.e

    def to_dict(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}


class GF:
    """Arithmetic in F_q on integer codes, vectorised over numpy arrays."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = spec.p
        self.e = spec.e
        self.q = spec.q
        p, e, q = self.p, self.e, self.q

        self.digits = np.array([[(c // p**t) % p for t in range(e)] for c in range(q)],
                               dtype=np.int64).reshape(q, e)
        self.powers = p ** np.arange(e, dtype=np.int64)

        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = self._encode((self.digits[a] + self.digits[b]) % p)
                mul[a, b] = self._mul_poly(a, b)
        self.ADD = add
        self.MUL = mul
        self.NEG = np.array([self._encode((-self.digits[a]) % p) for a in range(q)],
                            dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.INV = inv

        trace = np.zeros(q, dtype=np.int64)
        for a in range(q):
            acc, x = 0, a
            for _ in range(e):
                acc = add[acc, x]
                x = self._pow(x, p)
            if acc >= p:
                raise FieldError("trace left the prime field; modulus table is corrupt")
            trace[a] = acc
        self.TRACE = trace

    def __repr__(self):
        return f"GF({self.q})"

    def _encode(self, digits) -> int:
        return int(sum(int(d) * self.p**t for t, d in enumerate(digits)))

    def _mul_poly(self, a: int, b: int) -> int:
        da, db = self.digits[a], self.digits[b]
        prod = [0] * (2 * self.e - 1)
        for i in range(self.e):
            for j in range(self.e):
                prod[i + j] += int(da[i]) * int(db[j])
        return self._encode(_polymod(prod, self.spec.modulus, self.p))

    def _pow(self, a: int, k: int) -> int:
        r = 1
        for _ in range(k):
            r = self._mul_poly(r, a)
        return r

    # -- element-level API --------------------------------------------------

    def element(self, coeffs: Sequence[int]) -> int:
        """Code of the element with the given polynomial coefficients."""
        if len(coeffs) > self.e:
            raise FieldError(f"{list(coeffs)} has more than e = {self.e} coefficients")
        return self._encode([c % self.p for c in coeffs])

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digits[int(a)])

    def elements(self) -> range:
        return range(self.q)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise FieldError("zero has no multiplicative inverse")
        return self.INV[a]

    def trace(self, a):
        return self.TRACE[a]

    def psi_exponent(self, a):
        """k with psi(a) = zeta_p ** k."""
        return self.TRACE[a]

    def format(self, a: int) -> str:
        a = int(a)
        if self.e == 1:
            return str(a)
        terms = []
        for t, c in enumerate(self.coeffs(a)):
            if c == 0:
                continue
            mono = "" if t == 0 else ("x" if t == 1 else f"x^{t}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{mono}")
        return "+".join(terms) if terms else "0"

    _TERM = re.compile(r"^(\d*)\*?(x(?:\^(\d+))?)?$")

    def parse(self, text: str) -> int:
        """Element from a literal: an integer (a residue when e = 1, else a
        code below q) or a polynomial in x such as ``1+x`` or ``2x^2``."""
        s = str(text).replace(" ", "")
        if re.fullmatch(r"-?\d+", s):
            v = int(s)
            if self.e == 1:
                return v % self.p
            if not 0 <= v < self.q:
                raise FieldError(f"code {v} out of range for F_{self.q}")
            return v
        coeffs = [0] * self.e
        for body in s.split("+"):
            m = self._TERM.match(body)
            if not body or not m or (not m.group(1) and not m.group(2)):
                raise FieldError(f"bad field literal {text!r}")
            k = 0 if not m.group(2) else int(m.group(3) or 1)
            if k >= self.e:
                raise FieldError(f"degree {k} too large in {text!r} (e = {self.e})")
            coeffs[k] += int(m.group(1) or 1)
        return self.element(coeffs)

    # -- vectorised arithmetic ----------------------------------------------

    def add(self, a, b):
        if self.e == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        return self.ADD[a, b]

    def sub(self, a, b):
        if self.e == 1:
            return (np.asarray(a) - np.asarray(b)) % self.p
        return self.ADD[a, self.NEG[b]]

    def neg(self, a):
        if self.e == 1:
            return (-np.asarray(a)) % self.p
        return self.NEG[a]

    def mul(self, a, b):
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
        return self.MUL[a, b]

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return a.sum(axis=axis) % self.p
        d = self.digits[a]
        if axis is None:
            d = d.reshape(-1, self.e).sum(axis=0)
        else:
            # the digit expansion appends a trailing axis
            axes = axis if isinstance(axis, tuple) else (axis,)
            d = d.sum(axis=tuple(ax if ax >= 0 else ax - 1 for ax in axes))
        return (d % self.p) @ self.powers

    def matmul(self, a, b):
        """Matrix (or matrix-vector) product over F_q; broadcasts over leading axes."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a @ b) % self.p
        if b.ndim == 1:
            return self.sum(self.MUL[a, b], axis=-1)
        if a.ndim == 1:
            return self.matmul(a[None, :], b)[0]
        return self.sum(self.MUL[a[..., :, :, None], b[..., None, :, :]], axis=-2)

    def rank(self, m) -> int:
        from .algebra import rref
        return len(rref(self, m)[1])


@lru_cache(maxsize=None)
def get_field(spec: FieldSpec) -> GF:
    return GF(spec)


def field(p: int, e: int = 1, modulus: Sequence[int] | None = None) -> GF:
    return get_field(FieldSpec(p, e, None if modulus is None else tuple(modulus)))
