"""Exact arithmetic in Q(2^(1/b)).

Cover costs are sums of terms ``2^(-level*s)`` with rational ``s``.  They are
not rational, but they are elements of the field Q(2^(1/b)) where ``b`` is the
denominator of ``s``.  Since ``x^b - 2`` is irreducible over Q (Eisenstein),
``1, 2^(1/b), ..., 2^((b-1)/b)`` is a basis, so the coefficient vector below is
a unique representation and equality is decided exactly.  Signs of nonzero
elements are decided by numerical evaluation at increasing precision, which
always terminates.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Union

import mpmath

Rational = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def fmt_fraction(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class Pow2Sum:
    """Element ``sum_r c_r * 2^(r/den)`` with rational ``c_r``, ``0 <= r < den``."""

    __slots__ = ("den", "coeffs")

    def __init__(self, den: int, coeffs: Iterable[Rational]):
        coeffs = tuple(as_fraction(c) for c in coeffs)
        if den < 1 or len(coeffs) != den:
            raise ValueError("coefficient vector must have length den >= 1")
        self.den, self.coeffs = _reduce(den, coeffs)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "Pow2Sum":
        return cls(1, (0,))

    @classmethod
    def rational(cls, x: Rational) -> "Pow2Sum":
        return cls(1, (x,))

    @classmethod
    def term(cls, coef: Rational, exponent: Rational) -> "Pow2Sum":
        """``coef * 2^exponent``."""
        e = as_fraction(exponent)
        b = e.denominator
        q, r = divmod(e.numerator, b)
        coeffs = [Fraction(0)] * b
        coeffs[r] = as_fraction(coef) * (Fraction(2) ** q)
        return cls(b, coeffs)

    # -- structure ----------------------------------------------------
    def _lift(self, den: int) -> tuple:
        m = den // self.den
        out = [Fraction(0)] * den
        for r, c in enumerate(self.coeffs):
            if c:
                out[r * m] = c
        return tuple(out)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return self.den == 1

    def as_rational(self) -> Fraction:
        if self.den != 1:
            raise ValueError("value is irrational")
        return self.coeffs[0]

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "Pow2Sum":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        den = _lcm(self.den, other.den)
        a, b = self._lift(den), other._lift(den)
        return Pow2Sum(den, (x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "Pow2Sum":
        return Pow2Sum(self.den, (-c for c in self.coeffs))

    def __sub__(self, other) -> "Pow2Sum":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Pow2Sum":
        return (-self) + other

    def __mul__(self, other) -> "Pow2Sum":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        den = _lcm(self.den, other.den)
        a, b = self._lift(den), other._lift(den)
        out = [Fraction(0)] * den
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                k = i + j
                if k >= den:
                    out[k - den] += 2 * x * y
                else:
                    out[k] += x * y
        return Pow2Sum(den, out)

    __rmul__ = __mul__

    # -- ordering -----------------------------------------------------
    def sign(self) -> int:
        nz = [(r, c) for r, c in enumerate(self.coeffs) if c]
        if not nz:
            return 0
        if all(c > 0 for _, c in nz):
            return 1
        if all(c < 0 for _, c in nz):
            return -1
        prec = 64
        while True:
            with mpmath.workprec(prec):
                total = mpmath.mpf(0)
                mag = mpmath.mpf(0)
                for r, c in nz:
                    t = mpmath.mpf(c.numerator) / c.denominator
                    t *= mpmath.power(2, mpmath.mpf(r) / self.den)
                    total += t
                    mag += abs(t)
                err = mag * mpmath.power(2, 10 - prec)
                if abs(total) > err:
                    return 1 if total > 0 else -1
            prec *= 2

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError("cannot compare")
        return (self - other).sign()

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.den == other.den and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.den, self.coeffs))

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    # -- display ------------------------------------------------------
    def to_mpf(self, prec: int = 80):
        with mpmath.workprec(prec):
            total = mpmath.mpf(0)
            for r, c in enumerate(self.coeffs):
                if c:
                    total += (mpmath.mpf(c.numerator) / c.denominator) * mpmath.power(
                        2, mpmath.mpf(r) / self.den
                    )
            return total

    def __float__(self) -> float:
        return float(self.to_mpf())

    def log2(self) -> float:
        if self.sign() <= 0:
            raise ValueError("log2 of a nonpositive value")
        return float(mpmath.log(self.to_mpf(), 2))

    def __repr__(self) -> str:
        return f"Pow2Sum({self})"

    def __str__(self) -> str:
        if self.den == 1:
            return fmt_fraction(self.coeffs[0])
        parts = []
        for r, c in enumerate(self.coeffs):
            if not c:
                continue
            e = Fraction(r, self.den)
            parts.append(fmt_fraction(c) if r == 0 else f"{fmt_fraction(c)}*2^({fmt_fraction(e)})")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "den": self.den,
            "coeffs": [fmt_fraction(c) for c in self.coeffs],
            "approx": mpmath.nstr(self.to_mpf(), 12),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Pow2Sum":
        return cls(int(obj["den"]), [Fraction(c) for c in obj["coeffs"]])


def _coerce(x):
    if isinstance(x, Pow2Sum):
        return x
    if isinstance(x, (int, Fraction)):
        return Pow2Sum.rational(x)
    return NotImplemented


def _reduce(den: int, coeffs: tuple) -> tuple:
    # smallest den' | den such that every nonzero index is a multiple of den/den'
    idx = [r for r, c in enumerate(coeffs) if c]
    if not idx:
        return 1, (Fraction(0),)
    g = den
    for r in idx:
        g = gcd(g, r)
    if g == 1:
        return den, coeffs
    new_den = den // g
    out = [Fraction(0)] * new_den
    for r in idx:
        out[r // g] = coeffs[r]
    return new_den, tuple(out)


def pow2_cost(level: int, s: Rational, count: Rational = 1) -> Pow2Sum:
    """``count * (2^-level)^s``."""
    return Pow2Sum.term(count, -level * as_fraction(s))


def ceil_log2_fraction(x: Fraction) -> int:
    """Smallest integer ``e`` with ``2^e >= x`` for ``x > 0``."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("x must be positive")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    while Fraction(2) ** e < x:
        e += 1
    while Fraction(2) ** (e - 1) >= x:
        e -= 1
    return e
