"""Exact arithmetic in the Gaussian rationals Q(i)."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussianRational", "as_gaussian", "parse_gaussian", "format_gaussian", "ZERO", "ONE", "I"]

_ZERO_Q = mpq(0)


def _to_mpq(x) -> mpq:
    if isinstance(x, type(_ZERO_Q)):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class GaussianRational:
    """An element re + im*i of Q(i), stored as two gmpy2 rationals.

    Instances are immutable and hashable.  Integers, ``Fraction`` and ``mpq``
    values are accepted wherever a GaussianRational is expected.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _to_mpq(re))
        object.__setattr__(self, "im", _to_mpq(im))

    @classmethod
    def _make(cls, re: mpq, im: mpq) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (Fraction(int(self.re.numerator), int(self.re.denominator)),
                                   Fraction(int(self.im.numerator), int(self.im.denominator))))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                return GaussianRational._make(self.re + _to_mpq(other), self.im)
            except TypeError:
                return NotImplemented
        return GaussianRational._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                return GaussianRational._make(self.re - _to_mpq(other), self.im)
            except TypeError:
                return NotImplemented
        return GaussianRational._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        try:
            return GaussianRational._make(_to_mpq(other) - self.re, -self.im)
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                q = _to_mpq(other)
            except TypeError:
                return NotImplemented
            return GaussianRational._make(self.re * q, self.im * q)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._make(a * c, _ZERO_Q)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero in Q(i)")
            return GaussianRational._make(1 / a, _ZERO_Q)
        norm = a * a + b * b
        return GaussianRational._make(a / norm, -b / norm)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                q = _to_mpq(other)
            except TypeError:
                return NotImplemented
            if not q:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational._make(self.re / q, self.im / q)
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            return GaussianRational(other) * self.inverse()
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.re, -self.im)

    def norm(self) -> mpq:
        """Squared modulus re^2 + im^2 (exact)."""
        return self.re * self.re + self.im * self.im

    # -- comparisons / conversions -----------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, complex):
            return complex(self) == other
        try:
            return not self.im and self.re == _to_mpq(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def is_one(self) -> bool:
        return self.re == 1 and not self.im

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_gaussian(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def as_gaussian(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        return GaussianRational(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, str):
        return parse_gaussian(x)
    return GaussianRational(x)


def _fmt_q(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_gaussian(c: GaussianRational) -> str:
    """Canonical text form, e.g. ``3/2``, ``-i``, ``1/2+3/4*i``."""
    re_, im_ = c.re, c.im
    if not im_:
        return _fmt_q(re_)
    if abs(im_) == 1:
        im_txt = "i"
    else:
        im_txt = f"{_fmt_q(abs(im_))}*i"
    sign = "-" if im_ < 0 else "+"
    if not re_:
        return im_txt if sign == "+" else "-" + im_txt
    return f"{_fmt_q(re_)}{sign}{im_txt}"


def parse_gaussian(text: str) -> GaussianRational:
    """Parse constant literals such as ``2``, ``-1/3``, ``i``, ``a/b+c/d*i``."""
    from .poly import parse_poly

    try:
        p = parse_poly(text, ())
    except ValueError as exc:
        raise ValueError(f"malformed Gaussian rational literal {text!r}: {exc}") from None
    return p.constant_value()
