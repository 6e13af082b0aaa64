"""Univariate polynomials with exact rational coefficients.

Coefficients are stored lowest power first as a tuple of
:class:`fractions.Fraction`, with trailing zeros trimmed so that equality
is structural. The indeterminate is printed as ``z``.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import BothZero

RationalLike = Union[int, Fraction, str, float, Decimal]


def to_fraction(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may be integers, ``p/q`` or decimals (``"0.25"``); floats are
    read through their shortest repr, so ``0.1`` becomes ``1/10`` rather
    than the binary approximation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(q: Fraction) -> str:
    """``p/q`` text, or just ``p`` for integers."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class RationalPoly:
    """Immutable polynomial over the rationals.

    >>> p = RationalPoly([0, 0, 2, 2, 1])
    >>> str(p)
    'z^4 + 2*z^3 + 2*z^2'
    >>> p.degree
    4
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        c = [to_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._coeffs = tuple(c)

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, value: RationalLike) -> "RationalPoly":
        return cls([value])

    @classmethod
    def monomial(cls, power: int, coeff: RationalLike = 1) -> "RationalPoly":
        if power < 0:
            raise ValueError("negative power")
        return cls([0] * power + [coeff])

    @classmethod
    def linear(cls, const: RationalLike, slope: RationalLike) -> "RationalPoly":
        """``const + slope*z``."""
        return cls([const, slope])

    @classmethod
    def _raw(cls, coeffs: tuple) -> "RationalPoly":
        # caller guarantees Fractions with no trailing zeros
        obj = cls.__new__(cls)
        obj._coeffs = coeffs
        return obj

    # -- basic properties ------------------------------------------------

    @property
    def coeffs(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self._coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return len(self._coeffs) <= 1

    def coeff(self, power: int) -> Fraction:
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return Fraction(0)

    def monic(self) -> "RationalPoly":
        if not self._coeffs:
            return self
        lc = self._coeffs[-1]
        if lc == 1:
            return self
        return RationalPoly._raw(tuple(c / lc for c in self._coeffs))

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        return RationalPoly([other])

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._coeffs, o._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly._raw(tuple(-c for c in self._coeffs))

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            try:
                s = to_fraction(other)
            except TypeError:
                return NotImplemented
            if s == 0:
                return RationalPoly()
            return RationalPoly._raw(tuple(c * s for c in self._coeffs))
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return RationalPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero scalar only; use :meth:`divmod` otherwise."""
        if isinstance(other, RationalPoly):
            if other.degree == 0:
                return self * (1 / other.leading)
            return self.exact_div(other)
        return self * (1 / to_fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = RationalPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, divisor: "RationalPoly") -> tuple:
        """Euclidean division ``self = q*divisor + r`` with ``deg r < deg divisor``."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        d = divisor._coeffs
        dd = len(d) - 1
        lc = d[-1]
        if len(rem) - 1 < dd:
            return RationalPoly(), self
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            q = rem[k + dd] / lc
            quot[k] = q
            if q:
                for j in range(dd + 1):
                    rem[k + j] -= q * d[j]
        return RationalPoly(quot), RationalPoly(rem[:dd])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def exact_div(self, divisor: "RationalPoly") -> "RationalPoly":
        """Quotient of an exact division; raises if the remainder is nonzero."""
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise ArithmeticError(f"{divisor} does not divide {self}")
        return q

    def divides(self, other: "RationalPoly") -> bool:
        """True if ``self`` divides ``other`` exactly."""
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    # -- evaluation and comparison --------------------------------------

    def __call__(self, x: RationalLike) -> Fraction:
        return poly_eval(self, x)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            return self._coeffs == other._coeffs
        try:
            return self._coeffs == RationalPoly([other])._coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"RationalPoly({str(self)!r})"

    def __str__(self):
        return format_poly(self)

    def to_floats(self) -> list:
        """Coefficients, highest power first, as floats (numpy.polyval order)."""
        return [float(c) for c in reversed(self._coeffs)]


def format_poly(p: RationalPoly, var: str = "z") -> str:
    """Canonical text: descending powers, coefficients as ``p/q``."""
    if p.is_zero():
        return "0"
    parts = []
    for power in range(p.degree, -1, -1):
        c = p.coeff(power)
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if power == 0:
            body = format_fraction(mag)
        else:
            mono = var if power == 1 else f"{var}^{power}"
            body = mono if mag == 1 else f"{format_fraction(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def poly_eval(p: RationalPoly, x: RationalLike) -> Fraction:
    """Exact Horner evaluation."""
    x = to_fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic greatest common divisor over Q.

    Euclid's algorithm; every remainder is rescaled to monic before the
    next step to keep coefficient growth in check.
    """
    if a.is_zero() and b.is_zero():
        raise BothZero("gcd of two zero polynomials")
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        a, b = b, a.divmod(b)[1].monic()
    return a


def from_roots(roots: Sequence[RationalLike], scale: RationalLike = 1) -> RationalPoly:
    """``scale * prod(z - r)``."""
    p = RationalPoly([scale])
    for r in roots:
        p = p * RationalPoly([-to_fraction(r), 1])
    return p


def product(polys: Iterable[RationalPoly]) -> RationalPoly:
    out = RationalPoly([1])
    for p in polys:
        out = out * p
    return out
