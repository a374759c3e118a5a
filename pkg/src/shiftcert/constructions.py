"""Constructive objects for the shift's dynamics, exact at every step.

* `DenseEnumeration`: a deterministic bijection between positive integers
  and finitely supported vectors with rational (or Gaussian-rational)
  coordinates, ordered by height then lexicographically (documented on the
  class).  It supplies the approximation targets everything else visits.
* `build_schedule`: the greedy-minimal increasing exponent sequence (n_m)
  whose pair inequalities make later orbit terms small; every pair is
  certified exactly on squared moduli.
* `hypercyclic_prefix` / `orbit_visit`: the finite partial sums
  x_M = sum_j B^{n_j} y^(j), the exact decomposition of A^{n_m} x_M into the
  m-th target plus a certified-small residual, and the annihilation of all
  earlier terms.
* `periodic_point` / `periodic_fixpoint_check`: exact points of period N.
  The coefficient of e_{kN+m} is the cumulative product
  x_m * prod_{i=m}^{kN+m-1} w_i^{-1}, which is what the fixed-point
  recursion x_{k+N} = x_k / prod_{j=k}^{N+k-1} w_j forces; A^N x = x then
  holds coordinate-exactly on every materialized prefix.
* `periodic_point_distance`: the certified bound S_y * T(N) on the distance
  from a target to its induced periodic point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .certificates import Certificate, make_check
from .operators import (
    WeightSequence,
    apply_power,
    right_inverse_power,
)
from .scalars import (
    Field,
    Scalar,
    format_rational,
    modulus_squared,
    root_interval,
)
from .spaces import CoordVector, SpaceSpec, norm_le

__all__ = [
    "METADATA_PRECISION",
    "DenseEnumeration",
    "ScheduleSearchError",
    "Schedule",
    "HypercyclicPrefix",
    "OrbitVisit",
    "PeriodicPoint",
    "DistanceResult",
    "target_metadata",
    "build_schedule",
    "schedule_certificates",
    "hypercyclic_prefix",
    "summand_decay_certificates",
    "first_summand_report",
    "orbit_visit",
    "periodic_point",
    "periodic_fixpoint_check",
    "periodic_block_certificates",
    "periodic_point_distance",
    "default_heads",
]

# precision of the certified modulus upper bounds entering target metadata;
# exact values are unaffected
METADATA_PRECISION = 64

_ZERO_SCALAR = Scalar()


def _modulus_upper(x: Scalar, precision: int = METADATA_PRECISION) -> Fraction:
    """Rational upper bound for |x|, exact whenever |x| is rational."""
    return root_interval(modulus_squared(x), 2, precision)[1]


def target_metadata(y: CoordVector) -> tuple[int, Fraction]:
    """(max support index, rational upper bound for the coordinate l1 mass)."""
    mass = sum((_modulus_upper(x) for _, x in y.items()), Fraction(0))
    return y.max_support(), mass


def _scalar_height(s: Scalar) -> int:
    def part(q: Fraction) -> int:
        return max(abs(q.numerator), q.denominator)

    return max(part(s.re), part(s.im))


def _rationals_upto(height: int) -> list[Fraction]:
    out = []
    for den in range(1, height + 1):
        for num in range(-height, height + 1):
            if gcd(abs(num), den) == 1:
                out.append(Fraction(num, den))
    out.sort()
    return out


class DenseEnumeration:
    """Deterministic, stable bijection m <-> finitely supported vectors.

    Heights: a scalar p/q in lowest terms has height max(|p|, q) (a Gaussian
    rational the max over both parts, so height(0) = 1); a nonzero vector
    has height max(max_support, coordinate heights) and the zero vector
    height 0.  Vectors are enumerated by increasing height; inside the
    height-h class the dense tuples (x_1, ..., x_h) are compared
    lexicographically, scalars ordered by value ((re, im) for the complex
    field).  Index 1 is therefore the zero vector, and `index_of` inverts
    `vector` exactly.
    """

    def __init__(self, field: Field = Field.REAL) -> None:
        self.field = field
        self._pools: dict[int, tuple[Scalar, ...]] = {0: ()}
        self._heights: dict[int, tuple[int, ...]] = {0: ()}
        self._positions: dict[int, dict[Scalar, int]] = {0: {}}

    def _pool(self, height: int) -> tuple[Scalar, ...]:
        cached = self._pools.get(height)
        if cached is not None:
            return cached
        rats = _rationals_upto(height)
        if self.field is Field.REAL:
            scalars = [Scalar(r) for r in rats]
        else:
            scalars = [Scalar(a, b) for a in rats for b in rats]
        scalars.sort(key=lambda s: (s.re, s.im))
        pool = tuple(scalars)
        self._pools[height] = pool
        self._heights[height] = tuple(_scalar_height(s) for s in pool)
        self._positions[height] = {s: i for i, s in enumerate(pool)}
        return pool

    def _count_upto(self, height: int) -> int:
        # vectors of height <= h correspond exactly to dense tuples in pool(h)^h
        if height == 0:
            return 1
        return len(self._pool(height)) ** height

    def vector(self, index: int) -> CoordVector:
        if index < 1:
            raise ValueError("enumeration indices start at 1")
        if index == 1:
            return CoordVector()
        height = 1
        while self._count_upto(height) < index:
            height += 1
        rank = index - self._count_upto(height - 1) - 1
        pool = self._pool(height)
        heights = self._heights[height]
        size = len(pool)
        prev_size = len(self._pool(height - 1))
        coords: dict[int, Scalar] = {}
        embeddable = True
        for pos in range(1, height + 1):
            for idx, candidate in enumerate(pool):
                if pos < height:
                    embedded = (
                        prev_size ** (height - 1 - pos)
                        if embeddable and heights[idx] <= height - 1
                        else 0
                    )
                    block = size ** (height - pos) - embedded
                else:
                    embedded = 1 if embeddable and candidate == _ZERO_SCALAR else 0
                    block = 1 - embedded
                if rank < block:
                    if not candidate.is_zero:
                        coords[pos] = candidate
                    if pos < height:
                        embeddable = embeddable and heights[idx] <= height - 1
                    break
                rank -= block
            else:
                raise AssertionError("enumeration rank out of range")
        return CoordVector.from_dict(coords)

    def index_of(self, v: CoordVector) -> int:
        if self.field is Field.REAL and any(not x.is_real for _, x in v.items()):
            raise ValueError("vector has complex coordinates but the field is real")
        if v.is_zero:
            return 1
        height = max(v.max_support(), max(_scalar_height(x) for _, x in v.items()))
        pool = self._pool(height)
        positions = self._positions[height]
        heights = self._heights[height]
        size = len(pool)
        prev_size = len(self._pool(height - 1))
        tuple_positions = [positions[v.coordinate(pos)] for pos in range(1, height + 1)]
        lex_rank = 0
        for pos, idx in enumerate(tuple_positions, start=1):
            lex_rank += idx * size ** (height - pos)
        embedded_before = 0
        embeddable = True
        zero_pos = positions[_ZERO_SCALAR]
        for pos, idx in enumerate(tuple_positions, start=1):
            if not embeddable:
                break
            if pos < height:
                smaller_prev = sum(
                    1 for j in range(idx) if heights[j] <= height - 1
                )
                embedded_before += smaller_prev * prev_size ** (height - 1 - pos)
                embeddable = heights[idx] <= height - 1
            else:
                if zero_pos < idx:
                    embedded_before += 1
        rank = lex_rank - embedded_before
        return self._count_upto(height - 1) + rank + 1

    def first(self, count: int) -> list[CoordVector]:
        return [self.vector(m) for m in range(1, count + 1)]


# --- orbit schedules ---------------------------------------------------------


class ScheduleSearchError(RuntimeError):
    """The greedy exponent search exceeded its cap for some target index."""


@dataclass(frozen=True)
class Schedule:
    """Strictly increasing exponents with per-pair exact certificates."""

    weights_desc: str
    targets: tuple[CoordVector, ...]
    metadata: tuple[tuple[int, Fraction], ...]
    exponents: tuple[int, ...]
    certificates: tuple[Certificate, ...]

    @property
    def size(self) -> int:
        return len(self.exponents)


def _pair_ok(
    w: WeightSequence,
    meta: list[tuple[int, Fraction]],
    exponents: list[int],
    j: int,
    m: int,
    candidate: int,
) -> bool:
    gap = candidate - exponents[j - 1]
    if gap < max(m, meta[j - 1][0]):
        return False
    mass = meta[m - 1][1]
    if mass == 0:
        return True
    rhs = modulus_squared(w.weight(m)) * mass * mass
    return w.prefix_modulus_squared(gap) >= rhs


def build_schedule(
    w: WeightSequence,
    targets: list[CoordVector],
    search_cap: int = 2000,
) -> Schedule:
    """Greedy-minimal schedule: n_1 = 1, then the smallest n_m > n_{m-1}
    satisfying, for every j < m, the gap constraint n_m - n_j >= max(m, k_j)
    and the product constraint prod_{i=1}^{n_m-n_j} |w_i| >= |w_m| S_m
    (checked exactly on squared moduli).  Targets with S_m = 0 impose only
    the gap constraint.
    """
    if not targets:
        raise ValueError("schedules need at least one target")
    meta = [target_metadata(y) for y in targets]
    exponents: list[int] = []
    for m in range(1, len(targets) + 1):
        if m == 1:
            exponents.append(1)
            continue
        base = exponents[-1]
        for step in range(1, search_cap + 1):
            candidate = base + step
            if all(_pair_ok(w, meta, exponents, j, m, candidate) for j in range(1, m)):
                exponents.append(candidate)
                break
        else:
            raise ScheduleSearchError(
                f"no admissible exponent for target m={m} within "
                f"{search_cap} steps of n_{m - 1}={base}; the weight growth "
                "cannot reach |w_m| * S_m"
            )
    schedule = Schedule(
        weights_desc=w.describe(),
        targets=tuple(targets),
        metadata=tuple(meta),
        exponents=tuple(exponents),
        certificates=(),
    )
    certs = schedule_certificates(w, schedule)
    return Schedule(
        weights_desc=schedule.weights_desc,
        targets=schedule.targets,
        metadata=schedule.metadata,
        exponents=schedule.exponents,
        certificates=tuple(certs),
    )


def schedule_certificates(w: WeightSequence, schedule: Schedule) -> list[Certificate]:
    """Re-derivable per-pair certificates: the gap constraint plus the
    product constraint in both the full and the cancelled form (all on
    squared moduli, hence exact rationals)."""
    certs: list[Certificate] = []
    exps = schedule.exponents
    for m in range(2, schedule.size + 1):
        mass = schedule.metadata[m - 1][1]
        rhs = modulus_squared(w.weight(m)) * mass * mass
        for j in range(1, m):
            gap = exps[m - 1] - exps[j - 1]
            full = w.prefix_modulus_squared(exps[m - 1])
            shifted = full / w.prefix_modulus_squared(exps[m - 1] - gap)
            checks = [
                make_check(
                    "gap",
                    Fraction(gap),
                    ">=",
                    Fraction(max(m, schedule.metadata[j - 1][0])),
                ),
                make_check("product", full, ">=", shifted * rhs),
                make_check("product_cancelled", w.prefix_modulus_squared(gap), ">=", rhs),
            ]
            certs.append(
                Certificate.aggregate(
                    name=f"schedule_pair_j={j}_m={m}",
                    claim=(
                        f"exponent gap n_{m}-n_{j} covers max({m}, k_{j}) and the "
                        f"squared weight products dominate |w_{m}|^2 * S_{m}^2"
                    ),
                    checks=checks,
                    context={
                        "j": str(j),
                        "m": str(m),
                        "n_j": str(exps[j - 1]),
                        "n_m": str(exps[m - 1]),
                        "S_m": format_rational(mass),
                    },
                )
            )
    return certs


# --- hypercyclic prefixes and orbit visits -----------------------------------


@dataclass(frozen=True)
class HypercyclicPrefix:
    """Partial sum x_M = sum_{j<=M} B^{n_j} y^(j) with a certified tail bound."""

    schedule: Schedule
    size: int
    vector: CoordVector
    tail_bound: Fraction
    summands: tuple[tuple[int, CoordVector, CoordVector], ...]


def hypercyclic_prefix(
    w: WeightSequence, schedule: Schedule, size: int | None = None
) -> HypercyclicPrefix:
    m_count = schedule.size if size is None else size
    if not 1 <= m_count <= schedule.size:
        raise ValueError(f"prefix size must lie in 1..{schedule.size}")
    summands = []
    total = CoordVector()
    for j in range(1, m_count + 1):
        target = schedule.targets[j - 1]
        term = right_inverse_power(w, schedule.exponents[j - 1], target)
        summands.append((j, target, term))
        total = total + term
    return HypercyclicPrefix(
        schedule=schedule,
        size=m_count,
        vector=total,
        tail_bound=w.reciprocal_tail(m_count + 1),
        summands=tuple(summands),
    )


def summand_decay_certificates(
    w: WeightSequence,
    prefix: HypercyclicPrefix,
    space: SpaceSpec,
    precision: int | None = None,
) -> list[Certificate]:
    """Certified ||B^{n_j} y^(j)|| <= reciprocal_upper(j) for j >= 2.

    The j = 1 summand carries no such bound (see `first_summand_report`).
    """
    certs = []
    for j, _, term in prefix.summands:
        if j < 2:
            continue
        bound = w.reciprocal_upper(j)
        ok, interval = norm_le(space, term, bound, precision)
        certs.append(
            Certificate.comparing(
                name=f"summand_decay_j={j}",
                claim=f"norm of the j={j} series term is at most the reciprocal "
                f"upper bound for |w_{j}|",
                lhs=interval.hi,
                relation="<=",
                rhs=bound,
                context={
                    "space": str(space),
                    "j": str(j),
                    "norm_lo": format_rational(interval.lo),
                },
            )
        )
        del ok
    return certs


def first_summand_report(
    w: WeightSequence,
    prefix: HypercyclicPrefix,
    space: SpaceSpec,
    precision: int | None = None,
) -> dict[str, str]:
    """Informational j = 1 numbers; never part of pass/fail accounting."""
    _, _, term = prefix.summands[0]
    bound = w.reciprocal_upper(1)
    ok, interval = norm_le(space, term, bound, precision)
    return {
        "summand_1_norm_hi": format_rational(interval.hi),
        "summand_1_bound": format_rational(bound),
        "summand_1_within": "true" if ok else "false",
    }


@dataclass(frozen=True)
class OrbitVisit:
    """A^{n_m} x_M, split into the visited target and a certified residual."""

    m: int
    image: CoordVector
    residual: CoordVector
    bound: Fraction
    certificates: tuple[Certificate, ...]


def orbit_visit(
    w: WeightSequence,
    prefix: HypercyclicPrefix,
    m: int,
    space: SpaceSpec,
    precision: int | None = None,
) -> OrbitVisit:
    """Apply A^{n_m} to the prefix and certify the decomposition.

    Three exact facts are certified: earlier series terms annihilate
    (A^{n_m} B^{n_j} y^(j) = 0 for j < m), the image equals the m-th target
    plus the later terms shifted down (computed along an independent route),
    and the residual norm stays below the reciprocal-sum bound.
    """
    if not 1 <= m <= prefix.size:
        raise ValueError(f"orbit index m must lie in 1..{prefix.size}")
    exps = prefix.schedule.exponents
    n_m = exps[m - 1]
    image = apply_power(w, n_m, prefix.vector)
    target = prefix.schedule.targets[m - 1]

    annihilation_checks = [
        make_check(f"j={j}", apply_power(w, n_m, term), "==", CoordVector())
        for j, _, term in prefix.summands
        if j < m
    ]
    expected = target
    for j, later_target, _ in prefix.summands:
        if j > m:
            expected = expected + right_inverse_power(w, exps[j - 1] - n_m, later_target)
    residual = image - target
    bound = (
        sum(
            (w.reciprocal_upper(j) for j in range(m + 1, prefix.size + 1)),
            Fraction(0),
        )
        + prefix.tail_bound
    )
    ok, interval = norm_le(space, residual, bound, precision)
    del ok
    certs = (
        Certificate.aggregate(
            name=f"orbit_annihilation_m={m}",
            claim=f"series terms before m={m} vanish under A^{{n_{m}}}",
            checks=annihilation_checks,
            context={"m": str(m), "n_m": str(n_m)},
        ),
        Certificate.comparing(
            name=f"orbit_identity_m={m}",
            claim=f"A^{{n_{m}}} applied to the prefix equals target {m} plus the "
            "later terms shifted down, coordinate-exactly",
            lhs=image,
            relation="==",
            rhs=expected,
            context={"m": str(m), "n_m": str(n_m)},
        ),
        Certificate.comparing(
            name=f"orbit_residual_m={m}",
            claim=f"residual norm after visiting target {m} is at most the "
            "reciprocal-sum bound",
            lhs=interval.hi,
            relation="<=",
            rhs=bound,
            context={
                "series": "orbit_residual",
                "space": str(space),
                "x": str(m),
                "bound": format_rational(bound),
                "norm_hi": format_rational(interval.hi),
            },
        ),
    )
    return OrbitVisit(m=m, image=image, residual=residual, bound=bound, certificates=certs)


# --- periodic points ----------------------------------------------------------


@dataclass(frozen=True)
class PeriodicPoint:
    """Materialized prefix of a period-N point: head block plus K tail blocks.

    The coefficient of e_{kN+m} is head[m-1] * prod_{i=m}^{kN+m-1} w_i^{-1};
    rebuilding with a larger K extends the prefix exactly (weight products
    are memoized, so extension costs only the new blocks).
    """

    period: int
    head: tuple[Scalar, ...]
    blocks: int
    vector: CoordVector


def periodic_point(
    w: WeightSequence, head: list[Scalar], blocks: int
) -> PeriodicPoint:
    if not head:
        raise ValueError("periodic points need at least one head coefficient")
    if blocks < 1:
        raise ValueError("at least one tail block must be materialized")
    coeffs = tuple(Scalar.of(x) for x in head)
    period = len(coeffs)
    coords: dict[int, Scalar] = {}
    for m, x in enumerate(coeffs, start=1):
        if x.is_zero:
            continue
        coords[m] = x
        for k in range(1, blocks + 1):
            coords[k * period + m] = x / w.weight_product(m, k * period)
    return PeriodicPoint(
        period=period,
        head=coeffs,
        blocks=blocks,
        vector=CoordVector.from_dict(coords),
    )


def periodic_fixpoint_check(w: WeightSequence, point: PeriodicPoint) -> Certificate:
    """Exact coordinatewise check that A^N maps the K-block prefix onto the
    (K-1)-block content, i.e. A^N x = x on indices 1..KN."""
    if point.blocks < 2:
        raise ValueError("fixpoint checks need at least two materialized blocks")
    limit = point.period * point.blocks
    image = apply_power(w, point.period, point.vector)
    return Certificate.comparing(
        name=f"periodic_fixpoint_N={point.period}_K={point.blocks}",
        claim=f"A^{point.period} reproduces the materialized point on "
        f"indices 1..{limit}",
        lhs=image.truncate(limit),
        relation="==",
        rhs=point.vector.truncate(limit),
        context={"period": str(point.period), "blocks": str(point.blocks)},
    )


def periodic_block_certificates(
    w: WeightSequence, point: PeriodicPoint, precision: int | None = None
) -> list[Certificate]:
    """Certified block decay: the l1 mass of tail block k is at most
    (sum of head modulus bounds) * reciprocal_upper(kN)."""
    head_vec = CoordVector.from_dict(
        {m: x for m, x in enumerate(point.head, start=1)}
    )
    head_mass = target_metadata(head_vec)[1]
    space = SpaceSpec("lp", Fraction(1))
    certs = []
    for k in range(1, point.blocks + 1):
        low = k * point.period
        block = CoordVector(
            tuple(
                (idx, x)
                for idx, x in point.vector.items()
                if low < idx <= low + point.period
            )
        )
        bound = head_mass * w.reciprocal_upper(low)
        ok, interval = norm_le(space, block, bound, precision)
        del ok
        certs.append(
            Certificate.comparing(
                name=f"periodic_block_k={k}",
                claim=f"l1 mass of tail block {k} is at most the head mass times "
                f"the reciprocal bound at index {low}",
                lhs=interval.hi,
                relation="<=",
                rhs=bound,
                context={"k": str(k), "period": str(point.period)},
            )
        )
    return certs


@dataclass(frozen=True)
class DistanceResult:
    """Periodic point induced by a target plus the certified distance bound."""

    point: PeriodicPoint
    bound: Fraction
    certificate: Certificate


def periodic_point_distance(
    w: WeightSequence,
    y: CoordVector,
    period: int,
    blocks: int = 8,
    space: SpaceSpec | None = None,
    precision: int | None = None,
) -> DistanceResult:
    """Build the period-`period` point with head y_1..y_N (zero-padded) and
    certify that the materialized prefix stays within S_y * T(period) of y."""
    if period < max(y.max_support(), 1):
        raise ValueError(
            f"period {period} is smaller than the target support {y.max_support()}"
        )
    head = [y.coordinate(m) for m in range(1, period + 1)]
    point = periodic_point(w, head, blocks)
    mass = target_metadata(y)[1]
    bound = mass * w.reciprocal_tail(period)
    target_space = space if space is not None else SpaceSpec("lp", Fraction(1))
    ok, interval = norm_le(target_space, point.vector - y, bound, precision)
    del ok
    cert = Certificate.comparing(
        name=f"periodic_distance_N={period}",
        claim=f"materialized period-{period} point stays within the geometric "
        "tail bound of its target",
        lhs=interval.hi,
        relation="<=",
        rhs=bound,
        context={
            "series": "periodic_distance",
            "space": str(target_space),
            "x": str(period),
            "bound": format_rational(bound),
            "norm_hi": format_rational(interval.hi),
        },
    )
    return DistanceResult(point=point, bound=bound, certificate=cert)


def default_heads(
    enumeration: DenseEnumeration, period: int, count: int
) -> list[tuple[Scalar, ...]]:
    """Deterministic period-N head coefficients drawn from the enumeration:
    the first `count` nonzero vectors supported inside 1..period."""
    heads: list[tuple[Scalar, ...]] = []
    index = 2
    while len(heads) < count and index < 100_000:
        v = enumeration.vector(index)
        index += 1
        if 1 <= v.max_support() <= period:
            heads.append(tuple(v.coordinate(m) for m in range(1, period + 1)))
    return heads
