"""Exact scalar arithmetic: rationals and Gaussian rationals.

Every value is a pair of ``fractions.Fraction`` (real and imaginary part),
so field operations are closed and exact -- no floats, no rounding, ever.
Quantities that may be irrational (the modulus of a Gaussian rational) are
never produced as scalars; they are only reported as certified rational
enclosures (`ModulusInterval`), computed by integer-square-root bracketing.

Textual syntax (CLI, config files, report serialization):

    rational:   "p", "-p", "p/q"
    complex:    "a/b+c/d*i", "a/b-c/d*i", "c/d*i"

Parsing is exact and strict; anything else raises `ScalarParseError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import isqrt

__all__ = [
    "Field",
    "Scalar",
    "ModulusInterval",
    "ScalarParseError",
    "ZERO",
    "ONE",
    "field_op",
    "modulus_squared",
    "compare_modulus",
    "modulus_interval",
    "parse_scalar",
    "format_scalar",
    "format_rational",
    "parse_rational",
    "integer_root",
    "root_interval",
]


class ScalarParseError(ValueError):
    """Malformed scalar, vector, or spec literal."""


class Field(Enum):
    REAL = "real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Scalar:
    """A rational or Gaussian-rational field element, always in lowest terms."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if isinstance(self.re, float) or isinstance(self.im, float):
            raise TypeError("floats are not exact scalars; use int or Fraction")
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def of(value: "Scalar | int | Fraction | str") -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction)):
            return Scalar(Fraction(value))
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot build an exact scalar from {type(value).__name__}")

    @property
    def is_real(self) -> bool:
        return self.im == 0

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def reciprocal(self) -> "Scalar":
        if self.is_zero:
            raise ZeroDivisionError("scalar division by zero")
        m2 = self.re * self.re + self.im * self.im
        return Scalar(self.re / m2, -self.im / m2)

    def _coerce(self, other: object) -> "Scalar | None":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(Fraction(other))
        return None

    def __add__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return Scalar(self.re * o.re)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other: object) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        if self.im == 0:
            return Scalar(self.re ** n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = Scalar()
ONE = Scalar(Fraction(1))


def field_op(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Apply one of the four field operations by name."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown field operation {op!r}")


def modulus_squared(z: Scalar) -> Fraction:
    """|z|^2 as an exact rational."""
    return z.re * z.re + z.im * z.im


def compare_modulus(a: Scalar, b: Scalar) -> int:
    """-1, 0 or 1 according as |a| <, =, > |b| (exact, via squared moduli)."""
    sa, sb = modulus_squared(a), modulus_squared(b)
    if sa < sb:
        return -1
    if sa > sb:
        return 1
    return 0


@dataclass(frozen=True)
class ModulusInterval:
    """Certified rational enclosure lo <= |z| <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not (0 <= self.lo <= self.hi):
            raise ValueError(f"invalid modulus interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi


def integer_root(n: int, r: int) -> tuple[int, bool]:
    """(floor(n**(1/r)), exact?) for n >= 0, r >= 1, by integer Newton steps."""
    if n < 0:
        raise ValueError("integer_root requires n >= 0")
    if r < 1:
        raise ValueError("integer_root requires r >= 1")
    if r == 1 or n in (0, 1):
        return n, True
    if r == 2:
        s = isqrt(n)
        return s, s * s == n
    if n.bit_length() <= r:
        # n < 2^r means floor root is 1
        return 1, n == 1
    x = 1 << -(-n.bit_length() // r)  # 2^ceil(bits/r) >= n^(1/r)
    while True:
        y = ((r - 1) * x + n // x ** (r - 1)) // r
        if y >= x:
            break
        x = y
    return x, x ** r == n


def root_interval(q: Fraction, r: int, precision: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of q**(1/r) for rational q >= 0.

    Degenerate (lo == hi) exactly when q is a perfect r-th power of a
    rational; otherwise lo <= q**(1/r) <= hi with hi - lo <= 2**-precision.
    """
    if q < 0:
        raise ValueError("root_interval requires q >= 0")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if q == 0:
        return Fraction(0), Fraction(0)
    num, den = q.numerator, q.denominator
    rn, n_exact = integer_root(num, r)
    rd, d_exact = integer_root(den, r)
    if n_exact and d_exact:
        exact = Fraction(rn, rd)
        return exact, exact
    m = precision + 1
    t = (num << (r * m)) // den
    lo_int, _ = integer_root(t, r)
    hi_int, _ = integer_root(t + 1, r)
    scale = 1 << m
    return Fraction(lo_int, scale), Fraction(hi_int + 1, scale)


def modulus_interval(z: Scalar, precision: int) -> ModulusInterval:
    """Certified enclosure of |z|, exact whenever |z| is rational.

    Width is at most 2**-precision (hence at most 2**-precision * max(hi, 1)).
    """
    lo, hi = root_interval(modulus_squared(z), 2, precision)
    return ModulusInterval(lo, hi)


# --- textual syntax ---------------------------------------------------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_REAL_RE = re.compile(rf"^({_RAT})$")
_COMPLEX_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?=[+-]))?(?P<im>{_RAT})\*i$"
)


def parse_rational(text: str) -> Fraction:
    """Parse "p" or "p/q" exactly; decimals and floats are rejected."""
    s = text.strip()
    if not _REAL_RE.match(s):
        raise ScalarParseError(f"not an exact rational literal: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ScalarParseError(f"zero denominator in {text!r}") from None


def parse_scalar(text: str) -> Scalar:
    """Parse the exact scalar syntax (rational or a+b*i)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ScalarParseError("empty scalar literal")
    if s.endswith("*i"):
        m = _COMPLEX_RE.match(s)
        if not m:
            raise ScalarParseError(f"malformed complex literal: {text!r}")
        try:
            re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
            im_part = Fraction(m.group("im"))
        except ZeroDivisionError:
            raise ScalarParseError(f"zero denominator in {text!r}") from None
        return Scalar(re_part, im_part)
    return Scalar(parse_rational(s))


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(z: Scalar) -> str:
    """Canonical form; round-trips through parse_scalar."""
    if z.im == 0:
        return format_rational(z.re)
    im = format_rational(abs(z.im))
    sign = "+" if z.im > 0 else "-"
    if z.re == 0:
        return f"{'-' if z.im < 0 else ''}{im}*i"
    return f"{format_rational(z.re)}{sign}{im}*i"
