"""Exact arithmetic in Q(zeta_p).

Values are stored on the power basis 1, z, ..., z^(p-2) after reduction
modulo 1 + z + ... + z^(p-1), with ``Fraction`` coefficients.  For p = 2
the field is Q itself and z = -1.
"""

from __future__ import annotations

import cmath
import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence


class CycloError(ValueError):
    pass


def _reduce_full(p: int, full: Sequence) -> tuple[Fraction, ...]:
    # full: length-p coefficients on z^0..z^(p-1); z^(p-1) = -(1 + ... + z^(p-2))
    top = full[p - 1]
    return tuple(Fraction(full[k] - top) for k in range(p - 1))


class Cyclotomic:
    __slots__ = ("p", "coeffs", "_hash")

    def __init__(self, p: int, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        if len(c) > p - 1:
            raise CycloError(f"{len(c)} coefficients given for p = {p}")
        c += [Fraction(0)] * (p - 1 - len(c))
        self.p = p
        self.coeffs = tuple(c)
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def rational(cls, p: int, r) -> "Cyclotomic":
        return cls(p, [Fraction(r)])

    @classmethod
    def zero(cls, p: int) -> "Cyclotomic":
        return cls(p)

    @classmethod
    def one(cls, p: int) -> "Cyclotomic":
        return cls(p, [1])

    @classmethod
    def root_of_unity(cls, p: int, k: int) -> "Cyclotomic":
        full = [0] * p
        full[k % p] = 1
        return cls(p, _reduce_full(p, full))

    @classmethod
    def from_exponent_counts(cls, p: int, counts: Sequence[int], scale=1) -> "Cyclotomic":
        """scale * sum_k counts[k] * z^k, counts indexed by residue mod p."""
        if len(counts) != p:
            raise CycloError(f"need {p} exponent counts, got {len(counts)}")
        scale = Fraction(scale)
        full = [int(c) for c in counts]
        return cls(p, [scale * x for x in _reduce_full(p, full)])

    # -- helpers ------------------------------------------------------------

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.p != self.p:
                raise CycloError(f"cannot mix Q(zeta_{self.p}) and Q(zeta_{other.p})")
            return other
        if isinstance(other, (int, Rational)):
            return Cyclotomic(self.p, [Fraction(other)])
        return NotImplemented

    def full(self) -> list[Fraction]:
        """Length-p coefficient list on z^0..z^(p-1) (last entry zero)."""
        return list(self.coeffs) + [Fraction(0)]

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic(self.p, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyclotomic(self.p, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        full = [Fraction(0)] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        full[(i + j) % p] += a * b
        return Cyclotomic(p, _reduce_full(p, full))

    __rmul__ = __mul__

    def scale(self, r) -> "Cyclotomic":
        r = Fraction(r)
        return Cyclotomic(self.p, [a * r for a in self.coeffs])

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation z -> z^-1."""
        p = self.p
        full = [Fraction(0)] * p
        for k, a in enumerate(self.coeffs):
            full[(-k) % p] += a
        return Cyclotomic(p, _reduce_full(p, full))

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_nonnegative_integer(self) -> bool:
        c = self.coeffs[0]
        return self.is_rational() and c.denominator == 1 and c >= 0

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise CycloError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.coeffs == o.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.coeffs))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- rendering ----------------------------------------------------------

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            terms.append((c < 0, body))
        if not terms:
            return "0"
        neg, body = terms[0]
        out = ("-" if neg else "") + body
        for neg, body in terms[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"Cyclotomic({self.p}, {str(self)!r})"

    def approx(self) -> complex:
        """Floating-point value under z = exp(2 pi i / p); display only."""
        z = cmath.exp(2j * cmath.pi / self.p)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coeffs)))

    _TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?(z(?:\^(\d+))?)?$")

    @classmethod
    def parse(cls, p: int, text: str) -> "Cyclotomic":
        """Inverse of ``str``; also accepts unreduced powers of z."""
        s = text.replace(" ", "")
        if not s:
            raise CycloError("empty cyclotomic literal")
        full = [Fraction(0)] * p
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            m = cls._TERM.match(body)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise CycloError(f"bad cyclotomic term {body!r} in {text!r}")
            c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            k = 0 if m.group(2) is None else int(m.group(3) or 1)
            full[k % p] += -c if sign == "-" else c
        return cls(p, _reduce_full(p, full))
