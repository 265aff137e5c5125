"""Exact Gaussian rationals ``a + b*i`` with ``a, b`` rational."""

from __future__ import annotations

import re

from gmpy2 import is_square, isqrt, mpq, mpz

__all__ = ["Scalar", "as_scalar", "parse_scalar", "format_rational", "Q0", "Q1"]

Q0 = mpq(0)
Q1 = mpq(1)

_RAT = r"[0-9]+(?:/[0-9]+)?"
_TERM = re.compile(
    rf"\s*(?:([+-]?)\s*(?:({_RAT})\s*\*?\s*)?(i)|([+-]?)\s*({_RAT}))\s*"
)


def _q(value) -> mpq:
    if isinstance(value, Scalar):
        if value.im:
            raise ValueError("expected a real value, got %s" % value)
        return value.re
    return mpq(value)


class Scalar:
    """Element of Q(i).

    Both parts are stored as reduced ``gmpy2.mpq`` values, so structural
    equality is exact equality.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "Scalar":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # numerator/denominator views
    @property
    def re_num(self) -> int:
        return int(self.re.numerator)

    @property
    def re_den(self) -> int:
        return int(self.re.denominator)

    @property
    def im_num(self) -> int:
        return int(self.im.numerator)

    @property
    def im_den(self) -> int:
        return int(self.im.denominator)

    def __repr__(self):
        return "Scalar(%r)" % str(self)

    def __str__(self):
        return format_scalar(self.re, self.im)

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return Scalar._raw(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_scalar(other, strict=False)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exp: int):
        if not isinstance(exp, int):
            return NotImplemented
        base = self
        if exp < 0:
            base, exp = self.inverse(), -exp
        result = Scalar._raw(Q1, Q0)
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def inverse(self) -> "Scalar":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(self.re / norm, -self.im / norm)

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def norm(self) -> mpq:
        """Squared modulus ``a^2 + b^2``."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def sqrt(self) -> "Scalar | None":
        """Exact principal square root, or ``None`` if it is not in Q(i).

        The principal root has positive real part, or is ``t*i`` with
        ``t >= 0`` when the real part vanishes.
        """
        a, b = self.re, self.im
        if not b:
            if a >= 0:
                r = _rat_sqrt(a)
                return None if r is None else Scalar._raw(r, Q0)
            r = _rat_sqrt(-a)
            return None if r is None else Scalar._raw(Q0, r)
        modulus = _rat_sqrt(a * a + b * b)
        if modulus is None:
            return None
        x = _rat_sqrt((a + modulus) / 2)
        if x is None or not x:
            return None
        y = b / (2 * x)
        return Scalar._raw(x, y)


def _rat_sqrt(q: mpq) -> mpq | None:
    if q < 0:
        return None
    num, den = mpz(q.numerator), mpz(q.denominator)
    if not (is_square(num) and is_square(den)):
        return None
    return mpq(isqrt(num), isqrt(den))


def as_scalar(value, strict: bool = True) -> Scalar | None:
    """Coerce ints, rationals, strings and Python complex-free values to Scalar."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, bool):
        value = int(value)
    try:
        return Scalar._raw(mpq(value), Q0)
    except (TypeError, ValueError):
        if strict:
            raise TypeError("cannot convert %r to Scalar" % (value,))
        return None


def format_rational(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


def format_scalar(re: mpq, im: mpq) -> str:
    if not im:
        return format_rational(re)
    imag = "i" if abs(im) == 1 else format_rational(abs(im)) + "*i"
    if not re:
        return ("-" if im < 0 else "") + imag
    return format_rational(re) + ("-" if im < 0 else "+") + imag


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q+r/s*i"`` style strings (integers, ``i``, ``-i`` allowed)."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar literal")
    re_part, im_part = None, None
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError("malformed scalar literal %r" % text)
        if pos and not (m.group(1) or m.group(4)):
            raise ValueError("malformed scalar literal %r" % text)
        try:
            if m.group(3):
                if im_part is not None:
                    raise ValueError("malformed scalar literal %r" % text)
                im_part = mpq(m.group(2)) if m.group(2) else Q1
                if m.group(1) == "-":
                    im_part = -im_part
            else:
                if re_part is not None:
                    raise ValueError("malformed scalar literal %r" % text)
                re_part = mpq(m.group(5))
                if m.group(4) == "-":
                    re_part = -re_part
        except ZeroDivisionError:
            raise ValueError("zero denominator in %r" % text) from None
        pos = m.end()
    return Scalar._raw(Q0 if re_part is None else re_part, Q0 if im_part is None else im_part)
