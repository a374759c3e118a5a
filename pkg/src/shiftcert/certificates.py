"""Self-contained, re-checkable comparison certificates.

A certificate records a named claim together with the exact operand strings
and the relation that was tested; its verdict is pass precisely when the
recorded comparison holds, so `recheck` can re-derive the verdict from the
serialized fields alone.  Aggregated certificates additionally carry a list
of sub-checks; their top-level comparison is then the recorded failure
count against zero, which keeps the pass-iff-comparison-holds invariant.

Operand encoding: exact scalar syntax ("p/q", "a/b+c/d*i") or a vector
literal ("{1: 1/2}"); order relations require real rational operands.
The special relation "error" marks a check that could not be evaluated
(for example a divergent tail bound) and never holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar, format_rational, format_scalar, parse_scalar
from .spaces import CoordVector, format_vector, parse_vector

__all__ = [
    "Check",
    "Certificate",
    "encode_operand",
    "make_check",
    "error_check",
    "recheck",
]

_RELATIONS = ("==", "<=", ">=", "<", ">", "error")


def encode_operand(value) -> str:
    """Canonical string for a certificate operand."""
    if isinstance(value, CoordVector):
        return format_vector(value)
    if isinstance(value, Scalar):
        return format_scalar(value)
    if isinstance(value, (int, Fraction)):
        return format_rational(Fraction(value))
    if isinstance(value, str):
        return value
    raise TypeError(f"cannot encode {type(value).__name__} as a certificate operand")


def _holds(lhs: str, relation: str, rhs: str) -> bool:
    if relation == "error":
        return False
    if lhs.startswith("{") or rhs.startswith("{"):
        if relation != "==":
            raise ValueError("vector operands support only equality")
        return parse_vector(lhs) == parse_vector(rhs)
    a = parse_scalar(lhs)
    b = parse_scalar(rhs)
    if relation == "==":
        return a == b
    if not (a.is_real and b.is_real):
        raise ValueError("order relations require real rational operands")
    if relation == "<=":
        return a.re <= b.re
    if relation == ">=":
        return a.re >= b.re
    if relation == "<":
        return a.re < b.re
    if relation == ">":
        return a.re > b.re
    raise ValueError(f"unknown relation {relation!r}")


@dataclass(frozen=True)
class Check:
    """One recorded comparison inside an aggregated certificate."""

    label: str
    lhs: str
    relation: str
    rhs: str
    ok: bool


@dataclass(frozen=True)
class Certificate:
    name: str
    claim: str
    lhs: str
    relation: str
    rhs: str
    verdict: bool
    context: tuple[tuple[str, str], ...] = ()
    checks: tuple[Check, ...] = ()

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    @staticmethod
    def comparing(
        name: str,
        claim: str,
        lhs,
        relation: str,
        rhs,
        context: dict[str, str] | None = None,
    ) -> "Certificate":
        """Single-comparison certificate; the verdict is computed, not asserted."""
        lhs_s, rhs_s = encode_operand(lhs), encode_operand(rhs)
        return Certificate(
            name=name,
            claim=claim,
            lhs=lhs_s,
            relation=relation,
            rhs=rhs_s,
            verdict=_holds(lhs_s, relation, rhs_s),
            context=tuple(sorted((context or {}).items())),
        )

    @staticmethod
    def aggregate(
        name: str,
        claim: str,
        checks: list[Check],
        context: dict[str, str] | None = None,
    ) -> "Certificate":
        """Aggregated certificate: passes iff every recorded check holds."""
        failures = sum(1 for c in checks if not c.ok)
        ctx = dict(context or {})
        first_bad = next((c.label for c in checks if not c.ok), None)
        if first_bad is not None:
            ctx["first_failure"] = first_bad
        return Certificate(
            name=name,
            claim=claim,
            lhs=str(failures),
            relation="==",
            rhs="0",
            verdict=failures == 0,
            context=tuple(sorted(ctx.items())),
            checks=tuple(checks),
        )

    @staticmethod
    def error(name: str, claim: str, context: dict[str, str] | None = None) -> "Certificate":
        """Failing certificate for a check that could not be evaluated."""
        return Certificate(
            name=name,
            claim=claim,
            lhs="",
            relation="error",
            rhs="",
            verdict=False,
            context=tuple(sorted((context or {}).items())),
        )


def make_check(label: str, lhs, relation: str, rhs) -> Check:
    lhs_s, rhs_s = encode_operand(lhs), encode_operand(rhs)
    return Check(label, lhs_s, relation, rhs_s, _holds(lhs_s, relation, rhs_s))


def error_check(label: str, detail: str) -> Check:
    return Check(label, detail, "error", "", False)


def recheck(cert: Certificate) -> bool:
    """Re-verify a certificate from its serialized fields alone."""
    for check in cert.checks:
        if check.relation == "error":
            if check.ok:
                return False
            continue
        if _holds(check.lhs, check.relation, check.rhs) != check.ok:
            return False
    if cert.checks:
        failures = sum(1 for c in cert.checks if not c.ok)
        if cert.lhs != str(failures) or cert.rhs != "0" or cert.relation != "==":
            return False
        return cert.verdict == (failures == 0)
    if cert.relation == "error":
        return cert.verdict is False
    return cert.verdict == _holds(cert.lhs, cert.relation, cert.rhs)
