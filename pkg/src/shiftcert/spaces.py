"""Sequence spaces with normalized coordinate bases and certified norms.

Vectors are finitely supported maps k -> scalar (k >= 1) relative to the
canonical normalized basis of the ambient space.  Supported space kinds:

* ``lp:p`` -- p-summable sequences for rational p >= 1 ("l1", "l2" shorthands);
* ``c0``   -- null sequences, supremum norm;
* ``c``    -- convergent sequences, supremum norm.

For ``c`` the basis is reindexed to be 1-based: coordinate 1 multiplies the
constant all-ones sequence and coordinate k+1 the k-th standard unit
sequence, so a coordinate vector describes the concrete sequence with j-th
term ``x_1 + x_{j+1}`` and limit ``x_1`` (see `c_space_embed`).

Norm evaluation returns a certified rational enclosure.  The enclosure is
degenerate (lo == hi) whenever the norm itself is rational -- in particular
for c0/c and lp(1) on rational-modulus data; lp(p) norms are bracketed by
scaled integer-root enclosures on the coordinate moduli.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import (
    Scalar,
    ScalarParseError,
    compare_modulus,
    format_rational,
    format_scalar,
    modulus_interval,
    modulus_squared,
    parse_rational,
    parse_scalar,
    root_interval,
)

__all__ = [
    "CoordVector",
    "SpaceSpec",
    "NormInterval",
    "EventuallyConstant",
    "basis_vector",
    "coordinate",
    "norm",
    "norm_le",
    "c_space_embed",
    "parse_vector",
    "format_vector",
    "parse_space",
]

DEFAULT_PRECISION = 32

# retries when a certified comparison straddles the bound at the requested
# precision; each retry doubles the working precision
_ESCALATIONS = 6


@dataclass(frozen=True)
class CoordVector:
    """Finitely supported coordinate vector; zero coordinates are never stored."""

    entries: tuple[tuple[int, Scalar], ...] = ()

    def __post_init__(self) -> None:
        last = 0
        for k, x in self.entries:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"basis index must be a positive integer, got {k!r}")
            if k <= last:
                raise ValueError("entries must be sorted by strictly increasing index")
            if not isinstance(x, Scalar):
                raise ValueError("coordinates must be Scalar values")
            if x.is_zero:
                raise ValueError("zero coordinates must not be stored")
            last = k

    @staticmethod
    def from_dict(coords: dict[int, Scalar | int | Fraction]) -> "CoordVector":
        items = []
        for k, x in sorted(coords.items()):
            s = Scalar.of(x)
            if not s.is_zero:
                items.append((k, s))
        return CoordVector(tuple(items))

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def max_support(self) -> int:
        return self.entries[-1][0] if self.entries else 0

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    def items(self) -> tuple[tuple[int, Scalar], ...]:
        return self.entries

    def coordinate(self, k: int) -> Scalar:
        if k < 1:
            raise ValueError("basis indices start at 1")
        for idx, x in self.entries:
            if idx == k:
                return x
            if idx > k:
                break
        return Scalar()

    def truncate(self, max_index: int) -> "CoordVector":
        return CoordVector(tuple((k, x) for k, x in self.entries if k <= max_index))

    def __add__(self, other: "CoordVector") -> "CoordVector":
        acc = dict(self.entries)
        for k, x in other.entries:
            s = acc.get(k)
            total = x if s is None else s + x
            if total.is_zero:
                acc.pop(k, None)
            else:
                acc[k] = total
        return CoordVector(tuple(sorted(acc.items())))

    def __neg__(self) -> "CoordVector":
        return CoordVector(tuple((k, -x) for k, x in self.entries))

    def __sub__(self, other: "CoordVector") -> "CoordVector":
        return self + (-other)

    def scale(self, alpha: Scalar | int | Fraction) -> "CoordVector":
        a = Scalar.of(alpha)
        if a.is_zero:
            return CoordVector()
        return CoordVector(tuple((k, a * x) for k, x in self.entries))

    def __repr__(self) -> str:
        return f"CoordVector({format_vector(self)!r})"


def basis_vector(k: int) -> CoordVector:
    """The k-th basis coordinate vector (k >= 1)."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"basis index must be a positive integer, got {k!r}")
    return CoordVector(((k, Scalar(Fraction(1))),))


def coordinate(v: CoordVector, k: int) -> Scalar:
    """The k-th coordinate functional (zero outside the support)."""
    return v.coordinate(k)


@dataclass(frozen=True)
class SpaceSpec:
    """Ambient space: kind in {"lp", "c0", "c"}; p is used for kind "lp" only."""

    kind: str
    p: Fraction | None = None
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        if self.kind not in ("lp", "c0", "c"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or self.p < 1:
                raise ValueError("lp spaces require rational p >= 1")
        elif self.p is not None:
            raise ValueError(f"space kind {self.kind!r} takes no exponent")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")

    def __str__(self) -> str:
        if self.kind != "lp":
            return self.kind
        if self.p == 1:
            return "l1"
        if self.p == 2:
            return "l2"
        return f"lp:{format_rational(self.p)}"


def parse_space(text: str, precision: int = DEFAULT_PRECISION) -> SpaceSpec:
    """Parse "l1", "l2", "lp:p", "c0" or "c"."""
    s = text.strip()
    if s == "l1":
        return SpaceSpec("lp", Fraction(1), precision)
    if s == "l2":
        return SpaceSpec("lp", Fraction(2), precision)
    if s.startswith("lp:"):
        try:
            p = parse_rational(s[3:])
        except ScalarParseError:
            raise ScalarParseError(f"malformed space exponent in {text!r}") from None
        if p < 1:
            raise ScalarParseError(f"lp exponent must be >= 1, got {s[3:]!r}")
        return SpaceSpec("lp", p, precision)
    if s == "c0":
        return SpaceSpec("c0", None, precision)
    if s == "c":
        return SpaceSpec("c", None, precision)
    raise ScalarParseError(f"unknown space spec {text!r}")


@dataclass(frozen=True)
class NormInterval:
    """Certified rational enclosure lo <= ||v|| <= hi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if not (0 <= self.lo <= self.hi):
            raise ValueError(f"invalid norm interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class EventuallyConstant:
    """Concrete eventually-constant sequence described by a c-space vector."""

    head: tuple[Scalar, ...]
    limit: Scalar

    def term(self, j: int) -> Scalar:
        if j < 1:
            raise ValueError("sequence terms are indexed from 1")
        if j <= len(self.head):
            return self.head[j - 1]
        return self.limit


def c_space_embed(v: CoordVector) -> EventuallyConstant:
    """Materialize the eventually-constant sequence with terms x_1 + x_{j+1}."""
    x1 = v.coordinate(1)
    head = tuple(x1 + v.coordinate(j + 1) for j in range(1, max(v.max_support(), 1)))
    return EventuallyConstant(head, x1)


def _max_modulus_interval(values: list[Scalar], precision: int) -> NormInterval:
    winner = values[0]
    for x in values[1:]:
        if compare_modulus(x, winner) > 0:
            winner = x
    iv = modulus_interval(winner, precision)
    return NormInterval(iv.lo, iv.hi)


def _lp_norm(v: CoordVector, p: Fraction, precision: int) -> NormInterval:
    a, b = p.numerator, p.denominator
    work = precision + 4 + len(v.entries).bit_length()
    threshold = Fraction(1, 1 << precision)
    while True:
        s_lo = Fraction(0)
        s_hi = Fraction(0)
        for _, x in v.entries:
            # |x|^p = (|x|^2)^(a/(2b)), enclosed by a 2b-th root bracket
            lo, hi = root_interval(modulus_squared(x) ** a, 2 * b, work)
            s_lo += lo
            s_hi += hi
        n_lo = root_interval(s_lo ** b, a, work)[0]
        n_hi = root_interval(s_hi ** b, a, work)[1]
        if n_hi - n_lo <= threshold * max(n_hi, Fraction(1)):
            return NormInterval(max(n_lo, Fraction(0)), n_hi)
        work *= 2


def norm(space: SpaceSpec, v: CoordVector, precision: int | None = None) -> NormInterval:
    """Certified enclosure of ||v|| in the given space.

    Width is at most 2**-precision * max(hi, 1); the enclosure is degenerate
    whenever the norm is rational.
    """
    prec = space.precision if precision is None else precision
    if v.is_zero:
        return NormInterval(Fraction(0), Fraction(0))
    if space.kind == "c0":
        return _max_modulus_interval([x for _, x in v.entries], prec)
    if space.kind == "c":
        seq = c_space_embed(v)
        return _max_modulus_interval([seq.limit, *seq.head], prec)
    return _lp_norm(v, space.p, prec)


def norm_le(
    space: SpaceSpec,
    v: CoordVector,
    bound: Fraction,
    precision: int | None = None,
) -> tuple[bool, NormInterval]:
    """Certified test ||v|| <= bound via the interval upper endpoint.

    If the enclosure straddles the bound the precision is doubled a bounded
    number of times before giving up; the returned interval is the last one
    computed, so callers can report the decisive endpoints.
    """
    prec = space.precision if precision is None else precision
    iv = norm(space, v, prec)
    for _ in range(_ESCALATIONS):
        if iv.hi <= bound or iv.lo > bound:
            break
        prec *= 2
        iv = norm(space, v, prec)
    return iv.hi <= bound, iv


# --- vector literals --------------------------------------------------------


def parse_vector(text: str) -> CoordVector:
    """Parse "{1: 1/2, 4: -3}" (index: scalar pairs); "{}" is the zero vector."""
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ScalarParseError(f"vector literal must be brace-delimited: {text!r}")
    body = s[1:-1].strip()
    coords: dict[int, Scalar] = {}
    if body:
        for part in body.split(","):
            if ":" not in part:
                raise ScalarParseError(f"malformed vector entry {part.strip()!r}")
            key, value = part.split(":", 1)
            try:
                k = int(key.strip())
            except ValueError:
                raise ScalarParseError(f"malformed vector index {key.strip()!r}") from None
            if k < 1:
                raise ScalarParseError(f"vector index must be >= 1, got {k}")
            if k in coords:
                raise ScalarParseError(f"duplicate vector index {k}")
            coords[k] = parse_scalar(value)
    return CoordVector.from_dict(coords)


def format_vector(v: CoordVector) -> str:
    """Canonical form; round-trips through parse_vector."""
    body = ", ".join(f"{k}: {format_scalar(x)}" for k, x in v.entries)
    return "{" + body + "}"
