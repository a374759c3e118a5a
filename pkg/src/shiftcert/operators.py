"""Weighted backward shifts on coordinate vectors, exactly.

The shift acts coordinatewise as ``(Ax)_k = w_k x_{k+1}``; its n-th power
has the closed form ``(A^n x)_k = [prod_{j=k}^{n+k-1} w_j] x_{k+n}`` and the
right inverse is ``(Bx)_{k+1} = x_k / w_k``.  All of these are evaluated
exactly on finitely supported vectors, which lie in the domain of every
power of the shift.

Weight sequences come in two kinds (spec syntax in parentheses):

* exponential, ``w_k = lambda**k`` with |lambda| > 1  (``exp:2``, ``exp:1+1*i``);
* finite table with a declared continuation  (``table:[2,3,5];tail=geometric:2``,
  ``table:[1,1];tail=constant``; a missing tail rule means constant).

Each sequence exposes a canonical rational upper bound ``reciprocal_upper(k)
>= 1/|w_k|`` whose infinite sums have the closed form ``reciprocal_tail(N)``;
finite partial sums of the upper bounds are therefore strictly below the
declared tail, which is what the summability certificate checks.  Constant
continuations have no finite reciprocal tail and raise
`TailBoundUnavailable`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .certificates import Certificate, Check, error_check, make_check
from .scalars import (
    ModulusInterval,
    ONE,
    Scalar,
    ScalarParseError,
    format_rational,
    format_scalar,
    modulus_interval,
    modulus_squared,
    parse_scalar,
    root_interval,
)
from .spaces import CoordVector, NormInterval, SpaceSpec, basis_vector

__all__ = [
    "TailBoundUnavailable",
    "WeightSequence",
    "ExponentialWeights",
    "GeometricTail",
    "TableWeights",
    "ShiftOperator",
    "WitnessResult",
    "apply_shift",
    "apply_power",
    "right_inverse",
    "right_inverse_power",
    "unboundedness_witness",
    "check_weight_conditions",
    "parse_weights",
]

# precision for the cached certified reciprocal bases (only relevant when
# |w_k| is irrational; exact values bypass it)
RECIPROCAL_PRECISION = 64


class TailBoundUnavailable(ValueError):
    """The declared continuation has no finite reciprocal tail bound."""


def _reciprocal_upper_of(z: Scalar, precision: int = RECIPROCAL_PRECISION) -> Fraction:
    """Rational u >= 1/|z|, exact whenever |z| is rational."""
    return root_interval(1 / modulus_squared(z), 2, precision)[1]


class WeightSequence:
    """Base class: exact weights plus memoized prefix products."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._prefix: list[Scalar] = [ONE]
        self._prefix_sq: list[Fraction] = [Fraction(1)]

    def weight(self, k: int) -> Scalar:
        raise NotImplementedError

    def reciprocal_upper(self, k: int) -> Fraction:
        raise NotImplementedError

    def reciprocal_tail(self, start: int) -> Fraction:
        """Rational T(N) >= sum_{k>=N} 1/|w_k|, nonincreasing in N."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def _extend_prefix(self, upto: int) -> None:
        with self._lock:
            while len(self._prefix) <= upto:
                k = len(self._prefix)
                w = self.weight(k)
                self._prefix.append(self._prefix[-1] * w)
                self._prefix_sq.append(self._prefix_sq[-1] * modulus_squared(w))

    def weight_product(self, k: int, n: int) -> Scalar:
        """prod_{j=k}^{n+k-1} w_j exactly; the empty product (n = 0) is 1."""
        if k < 1:
            raise ValueError("weight indices start at 1")
        if n < 0:
            raise ValueError("weight_product needs n >= 0")
        if n == 0:
            return ONE
        self._extend_prefix(k + n - 1)
        return self._prefix[k + n - 1] / self._prefix[k - 1]

    def prefix_modulus_squared(self, upto: int) -> Fraction:
        """prod_{j=1}^{upto} |w_j|^2 exactly (1 for upto = 0)."""
        if upto < 0:
            raise ValueError("prefix length must be >= 0")
        self._extend_prefix(upto)
        return self._prefix_sq[upto]


class ExponentialWeights(WeightSequence):
    """w_k = lambda**k for a rational or Gaussian-rational lambda, |lambda| > 1."""

    def __init__(self, lam: Scalar) -> None:
        super().__init__()
        lam = Scalar.of(lam)
        if modulus_squared(lam) <= 1:
            raise ValueError(
                f"exponential weights need |lambda| > 1, got {format_scalar(lam)}"
            )
        self.lam = lam
        self._recip_base = self._certified_reciprocal_base()

    def _certified_reciprocal_base(self) -> Fraction:
        # rational u with 1/|lambda| <= u < 1; exact when |lambda| is rational
        precision = RECIPROCAL_PRECISION
        while True:
            u = _reciprocal_upper_of(self.lam, precision)
            if u < 1:
                return u
            precision *= 2

    def weight(self, k: int) -> Scalar:
        if k < 1:
            raise ValueError("weight indices start at 1")
        return self.lam ** k

    def reciprocal_upper(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("weight indices start at 1")
        return self._recip_base ** k

    def reciprocal_tail(self, start: int) -> Fraction:
        if start < 1:
            raise ValueError("tail start index must be >= 1")
        u = self._recip_base
        return u ** start / (1 - u)

    def describe(self) -> str:
        return f"exp:{format_scalar(self.lam)}"


@dataclass(frozen=True)
class GeometricTail:
    """Continuation w_{L+j} = w_L * ratio**j beyond a weight table."""

    ratio: Scalar


class TableWeights(WeightSequence):
    """Finite weight table with a declared continuation.

    ``tail=None`` means the last table entry repeats forever; such a
    continuation has no finite reciprocal tail.
    """

    def __init__(self, values: list[Scalar], tail: GeometricTail | None = None) -> None:
        super().__init__()
        if not values:
            raise ValueError("weight table must not be empty")
        vals = tuple(Scalar.of(v) for v in values)
        if any(v.is_zero for v in vals):
            raise ValueError("weights must be nonzero (the shift needs 1/w_k)")
        if tail is not None and Scalar.of(tail.ratio).is_zero:
            raise ValueError("geometric tail ratio must be nonzero")
        self.values = vals
        self.tail = tail
        self._table_upper = [_reciprocal_upper_of(v) for v in vals]
        self._ratio_upper = (
            _reciprocal_upper_of(Scalar.of(tail.ratio)) if tail is not None else None
        )

    def weight(self, k: int) -> Scalar:
        if k < 1:
            raise ValueError("weight indices start at 1")
        length = len(self.values)
        if k <= length:
            return self.values[k - 1]
        if self.tail is None:
            return self.values[-1]
        return self.values[-1] * Scalar.of(self.tail.ratio) ** (k - length)

    def reciprocal_upper(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("weight indices start at 1")
        length = len(self.values)
        if k <= length:
            return self._table_upper[k - 1]
        if self.tail is None:
            return self._table_upper[-1]
        return self._table_upper[-1] * self._ratio_upper ** (k - length)

    def reciprocal_tail(self, start: int) -> Fraction:
        if start < 1:
            raise ValueError("tail start index must be >= 1")
        if self.tail is None:
            raise TailBoundUnavailable(
                f"constant continuation from k={len(self.values) + 1} has a divergent"
                " reciprocal sum"
            )
        u = self._ratio_upper
        if u >= 1:
            raise TailBoundUnavailable(
                "geometric continuation needs |ratio| > 1 for a finite reciprocal tail"
            )
        length = len(self.values)
        last = self._table_upper[-1]
        if start > length:
            return last * u ** (start - length) / (1 - u)
        head = sum(
            (self._table_upper[k - 1] for k in range(start, length + 1)),
            Fraction(0),
        )
        return head + last * u / (1 - u)

    def describe(self) -> str:
        body = ",".join(format_scalar(v) for v in self.values)
        if self.tail is None:
            return f"table:[{body}];tail=constant"
        return f"table:[{body}];tail=geometric:{format_scalar(self.tail.ratio)}"


def parse_weights(text: str) -> WeightSequence:
    """Parse the weight spec syntax (see module docstring)."""
    s = text.strip()
    if s.startswith("exp:"):
        return ExponentialWeights(parse_scalar(s[4:]))
    if s.startswith("table:"):
        body = s[6:]
        tail: GeometricTail | None = None
        if ";" in body:
            body, tail_text = body.split(";", 1)
            tail_text = tail_text.strip()
            if not tail_text.startswith("tail="):
                raise ScalarParseError(f"malformed weight tail rule in {text!r}")
            rule = tail_text[5:]
            if rule == "constant":
                tail = None
            elif rule.startswith("geometric:"):
                tail = GeometricTail(parse_scalar(rule[10:]))
            else:
                raise ScalarParseError(f"unknown weight tail rule {rule!r}")
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ScalarParseError(f"weight table must be bracket-delimited: {text!r}")
        inner = body[1:-1].strip()
        if not inner:
            raise ScalarParseError("weight table must not be empty")
        values = [parse_scalar(part) for part in inner.split(",")]
        return TableWeights(values, tail)
    raise ScalarParseError(f"unknown weight spec {text!r}")


# --- the shift, its powers, and the right inverse ---------------------------


def apply_shift(w: WeightSequence, x: CoordVector) -> CoordVector:
    """(Ax)_k = w_k x_{k+1}; drops the support floor by one."""
    return CoordVector(
        tuple((k - 1, w.weight(k - 1) * val) for k, val in x.items() if k >= 2)
    )


def apply_power(w: WeightSequence, n: int, x: CoordVector) -> CoordVector:
    """A^n x via the closed-form products; A^0 is the identity."""
    if n < 0:
        raise ValueError("shift powers need n >= 0")
    if n == 0:
        return x
    return CoordVector(
        tuple(
            (k - n, w.weight_product(k - n, n) * val)
            for k, val in x.items()
            if k > n
        )
    )


def right_inverse(w: WeightSequence, x: CoordVector) -> CoordVector:
    """(Bx)_{k+1} = x_k / w_k; raises the support by one."""
    return CoordVector(tuple((k + 1, val / w.weight(k)) for k, val in x.items()))


def right_inverse_power(w: WeightSequence, n: int, x: CoordVector) -> CoordVector:
    """B^n x via the closed-form reciprocal products; B^0 is the identity."""
    if n < 0:
        raise ValueError("shift powers need n >= 0")
    if n == 0:
        return x
    return CoordVector(
        tuple((k + n, val / w.weight_product(k, n)) for k, val in x.items())
    )


@dataclass(frozen=True)
class WitnessResult:
    """Growth witness at exponent n: ||A^n e_{2n}|| against |w_n|."""

    witness: CoordVector
    value: NormInterval
    floor: ModulusInterval
    value_squared: Fraction
    floor_squared: Fraction
    certificate: Certificate


def unboundedness_witness(
    w: WeightSequence, n: int, precision: int = 32
) -> WitnessResult:
    """Evaluate ||A^n e_{2n}|| = prod_{j=n}^{2n-1} |w_j| and compare to |w_n|.

    A^n e_{2n} is a scalar multiple of e_n, so the norm equals the product
    modulus in every supported space; the comparison is exact on squared
    moduli, the intervals are reported for inspection.
    """
    if n < 1:
        raise ValueError("witness exponent must be >= 1")
    product = w.weight_product(n, n)
    value_sq = modulus_squared(product)
    floor_sq = modulus_squared(w.weight(n))
    lo, hi = root_interval(value_sq, 2, precision)
    cert = Certificate.comparing(
        name=f"unbounded_growth_n={n}",
        claim=(
            f"squared norm of A^{n} e_{2 * n} (= prod of |w_j|^2, j={n}..{2 * n - 1}) "
            f"is at least |w_{n}|^2"
        ),
        lhs=value_sq,
        relation=">=",
        rhs=floor_sq,
        context={"n": str(n)},
    )
    return WitnessResult(
        witness=basis_vector(2 * n),
        value=NormInterval(lo, hi),
        floor=modulus_interval(w.weight(n), precision),
        value_squared=value_sq,
        floor_squared=floor_sq,
        certificate=cert,
    )


def check_weight_conditions(w: WeightSequence, upto: int) -> Certificate:
    """Certify the weight hypotheses on the prefix k = 1..upto.

    (a) 1 <= |w_1| and |w_k| <= |w_{k+1}| for k < upto, exactly on squared
        moduli;
    (b) for every N <= upto, the partial sum of reciprocal upper bounds
        sum_{k=N}^{upto} reciprocal_upper(k) stays below the declared tail
        bound T(N).

    Violations yield a failing certificate whose context names the first
    offending index.
    """
    if upto < 2:
        raise ValueError("weight-condition checks need a prefix length >= 2")
    checks: list[Check] = []
    checks.append(
        make_check("lower_bound:k=1", Fraction(1), "<=", modulus_squared(w.weight(1)))
    )
    for k in range(1, upto):
        checks.append(
            make_check(
                f"monotone:k={k}",
                modulus_squared(w.weight(k)),
                "<=",
                modulus_squared(w.weight(k + 1)),
            )
        )
    try:
        tails = {n: w.reciprocal_tail(n) for n in range(1, upto + 1)}
    except TailBoundUnavailable as exc:
        checks.append(error_check("summable:tail", str(exc)))
    else:
        suffix = Fraction(0)
        suffix_sums: dict[int, Fraction] = {}
        for k in range(upto, 0, -1):
            suffix += w.reciprocal_upper(k)
            suffix_sums[k] = suffix
        for n in range(1, upto + 1):
            checks.append(
                make_check(f"summable:N={n}", suffix_sums[n], "<=", tails[n])
            )
    return Certificate.aggregate(
        name="weight_conditions",
        claim=(
            "weight moduli are >= 1 and nondecreasing, and every partial sum of "
            "reciprocal upper bounds is dominated by the declared tail bound"
        ),
        checks=checks,
        context={"weights": w.describe(), "prefix": str(upto)},
    )


@dataclass(frozen=True)
class ShiftOperator:
    """A weighted backward shift paired with the space its norms live in."""

    weights: WeightSequence
    space: SpaceSpec

    def apply(self, x: CoordVector) -> CoordVector:
        return apply_shift(self.weights, x)

    def apply_power(self, n: int, x: CoordVector) -> CoordVector:
        return apply_power(self.weights, n, x)

    def right_inverse(self, x: CoordVector) -> CoordVector:
        return right_inverse(self.weights, x)

    def right_inverse_power(self, n: int, x: CoordVector) -> CoordVector:
        return right_inverse_power(self.weights, n, x)

    def unboundedness_witness(self, n: int) -> WitnessResult:
        return unboundedness_witness(self.weights, n, self.space.precision)
