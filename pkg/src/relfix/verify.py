"""Empirical contraction estimates and full hypothesis verification.

``estimate_lambda`` measures the worst ratio p(Tx, Ty) / p(x, y) over related
sampled pairs.  Pairs with p(x, y) = 0 are never divided through: they must
map to p(Tx, Ty) = 0 and are otherwise recorded on a separate violation
channel, since 0/0 is a hypothesis question rather than a number.  Diagonal
pairs are excluded by default because a pair distance may be positive at a
fixed point, which pins the ratio at 1; callers are expected to disclose the
diagonal-included estimate alongside.

``compare_classical`` measures the same map against the plain metric
contraction and against the generalized displacement
M(x, y) = max{d(x,y), d(x,Tx), d(y,Ty), (d(x,Ty) + d(y,Tx)) / 2}, recording
every pair on which either comparison test fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .engine import OrbitTrace, SelfMap, StopReason, iterate
from .errors import DivergenceError, EstimationError, PreconditionError
from .relations import (
    Relation,
    check_t_closed,
    find_start_points,
    witness_d_self_closed,
)
from .spaces import MetricSpace, Point, describe_point, metric_eval, points_equal
from .wdistance import WDistance

__all__ = [
    "ContractionEstimate",
    "PairComparison",
    "ClassicalComparison",
    "OverallVerdict",
    "TheoremReport",
    "related_pairs",
    "estimate_lambda",
    "compare_classical",
    "verify_theorem",
]


@dataclass(frozen=True)
class ContractionEstimate:
    lambda_hat: float
    witness_pair: tuple[Point, Point] | None
    pairs_checked: int
    zero_p_pairs: int
    zero_p_violations: tuple[tuple[Point, Point], ...]
    include_diagonal: bool

    @property
    def is_contraction(self) -> bool:
        return self.lambda_hat < 1.0 and not self.zero_p_violations

    def to_record(self) -> dict:
        return {
            "lambda_hat": self.lambda_hat,
            "witness_pair": [describe_point(a) for a in self.witness_pair]
            if self.witness_pair
            else None,
            "pairs_checked": self.pairs_checked,
            "zero_p_pairs": self.zero_p_pairs,
            "zero_p_violations": len(self.zero_p_violations),
            "include_diagonal": self.include_diagonal,
            "is_contraction": self.is_contraction,
        }


@dataclass(frozen=True)
class PairComparison:
    x: Point
    y: Point
    d_image: float
    d_pair: float
    m_displacement: float

    def to_record(self) -> dict:
        return {
            "x": describe_point(self.x),
            "y": describe_point(self.y),
            "d_image": self.d_image,
            "d_pair": self.d_pair,
            "m_displacement": self.m_displacement,
        }


@dataclass(frozen=True)
class ClassicalComparison:
    rows: tuple[PairComparison, ...]
    banach_failures: tuple[PairComparison, ...]
    mt_failures: tuple[PairComparison, ...]

    def to_record(self) -> dict:
        return {
            "pairs": len(self.rows),
            "banach_failures": [r.to_record() for r in self.banach_failures[:10]],
            "banach_failure_count": len(self.banach_failures),
            "mt_failures": [r.to_record() for r in self.mt_failures[:10]],
            "mt_failure_count": len(self.mt_failures),
        }


class OverallVerdict(Enum):
    ALL_VERIFIED_ON_SAMPLE = "all_verified_on_sample"
    INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class TheoremReport:
    """Per-hypothesis verdicts for the contraction fixed-point theorem."""

    r_complete_proxy: bool
    start_points: bool
    t_closed: bool
    continuity_or_self_closed: bool
    contraction: bool
    overall: OverallVerdict
    lambda_hat: float
    lambda_hat_with_diagonal: float
    estimate: ContractionEstimate
    orbit: OrbitTrace | None
    reasons: tuple[str, ...]

    def to_record(self) -> dict:
        return {
            "r_complete_proxy": self.r_complete_proxy,
            "start_points": self.start_points,
            "t_closed": self.t_closed,
            "continuity_or_self_closed": self.continuity_or_self_closed,
            "contraction": self.contraction,
            "overall": self.overall.value,
            "lambda_hat": self.lambda_hat,
            "lambda_hat_with_diagonal": self.lambda_hat_with_diagonal,
            "estimate": self.estimate.to_record(),
            "orbit": self.orbit.to_record() if self.orbit else None,
            "reasons": list(self.reasons),
        }


def related_pairs(
    rel: Relation, sample: Sequence[Point], *, cap: int = 1_000_000
) -> list[tuple[Point, Point]]:
    """All related ordered pairs from sample x sample, deterministically
    strided down when the count exceeds ``cap``."""
    pairs = [(x, y) for x in sample for y in sample if rel(x, y)]
    if len(pairs) > cap:
        stride = math.ceil(len(pairs) / cap)
        pairs = pairs[::stride]
    return pairs


def estimate_lambda(
    map_: SelfMap,
    p: WDistance,
    rel: Relation,
    pairs: Sequence[tuple[Point, Point]],
    include_diagonal: bool = False,
) -> ContractionEstimate:
    """Worst-case contraction ratio over the supplied related pairs."""
    pairs = list(pairs)
    if not pairs:
        raise EstimationError("cannot estimate a contraction factor from an empty pair set")
    images: dict[int, Point] = {}

    def image(pt: Point) -> Point:
        key = id(pt)
        if key not in images:
            images[key] = map_.apply(pt)
        return images[key]

    best = 0.0
    witness: tuple[Point, Point] | None = None
    zero_pairs = 0
    violations: list[tuple[Point, Point]] = []
    checked = 0
    for x, y in pairs:
        if not rel(x, y):
            raise PreconditionError(f"pair is not related under {rel.name}")
        if not include_diagonal and points_equal(x, y):
            continue
        checked += 1
        base = p(x, y)
        if base == 0.0:
            zero_pairs += 1
            if p(image(x), image(y)) > 0.0:
                violations.append((x, y))
            continue
        ratio = p(image(x), image(y)) / base
        if witness is None or ratio > best:
            best = ratio
            witness = (x, y)
    return ContractionEstimate(
        best, witness, checked, zero_pairs, tuple(violations), include_diagonal
    )


def compare_classical(
    map_: SelfMap,
    space: MetricSpace,
    rel: Relation,
    pairs: Sequence[tuple[Point, Point]],
) -> ClassicalComparison:
    """Metric and generalized-displacement comparison on related pairs.

    A pair lands in ``banach_failures`` when d(Tx, Ty) >= d(x, y) > 0 is
    impossible to dominate with any factor below 1, and in ``mt_failures``
    when d(Tx, Ty) >= M(x, y), which rules out every comparison function
    that is strictly below the identity.
    """
    images: dict[int, Point] = {}

    def image(pt: Point) -> Point:
        key = id(pt)
        if key not in images:
            images[key] = map_.apply(pt)
        return images[key]

    rows = []
    banach = []
    mt = []
    for x, y in pairs:
        if not rel(x, y):
            raise PreconditionError(f"pair is not related under {rel.name}")
        tx, ty = image(x), image(y)
        d_image = metric_eval(space, tx, ty)
        d_pair = metric_eval(space, x, y)
        m = max(
            d_pair,
            metric_eval(space, x, tx),
            metric_eval(space, y, ty),
            0.5 * (metric_eval(space, x, ty) + metric_eval(space, y, tx)),
        )
        row = PairComparison(x, y, d_image, d_pair, m)
        rows.append(row)
        if d_image > 0.0 and d_image >= d_pair:
            banach.append(row)
        if d_image > 0.0 and d_image >= m:
            mt.append(row)
    return ClassicalComparison(tuple(rows), tuple(banach), tuple(mt))


def verify_theorem(
    map_: SelfMap,
    space: MetricSpace,
    rel: Relation,
    p: WDistance,
    sample: Sequence[Point],
    orbit_seed: Point,
    *,
    max_iter: int = 10_000,
    tol: float | None = None,
    pair_cap: int = 1_000_000,
) -> TheoremReport:
    """Aggregate every hypothesis check and produce the factor to feed the
    iteration engine.

    The completeness of the ambient space is proxied by the generated orbit
    itself: it must converge and stay inside the space.  The
    continuity-or-self-closedness alternative is decided on the self-closed
    branch, witnessed along the generated orbit against its final point.
    """
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    if not rel(orbit_seed, map_.apply(orbit_seed)):
        raise PreconditionError("orbit seed is not a start point: (x0, Tx0) unrelated")

    reasons: list[str] = []

    starts = find_start_points(rel, map_, sample)
    start_ok = bool(starts)
    if not start_ok:
        reasons.append("no sampled start points")

    closure = check_t_closed(rel, map_, sample)
    t_ok = closure.ok
    if not t_ok:
        reasons.append("relation is not map-closed on the sample")

    pairs = related_pairs(rel, sample, cap=pair_cap)
    try:
        estimate = estimate_lambda(map_, p, rel, pairs)
        estimate_diag = estimate_lambda(map_, p, rel, pairs, include_diagonal=True)
    except EstimationError as exc:
        reasons.append(str(exc))
        empty = ContractionEstimate(math.inf, None, 0, 0, (), False)
        return TheoremReport(
            False, start_ok, t_ok, False, False,
            OverallVerdict.INCOMPLETE, math.inf, math.inf, empty, None, tuple(reasons),
        )

    contraction_ok = estimate.is_contraction
    if not contraction_ok:
        reasons.append(
            f"contraction unverified: lambda_hat = {estimate.lambda_hat:.6g}, "
            f"{len(estimate.zero_p_violations)} zero-p violations"
        )

    orbit: OrbitTrace | None = None
    self_closed_ok = False
    complete_ok = False
    if contraction_ok:
        try:
            orbit = iterate(map_, orbit_seed, p, estimate.lambda_hat, max_iter, tol)
            witness = witness_d_self_closed(rel, orbit.points, orbit.final)
            self_closed_ok = witness.ok
            if not self_closed_ok:
                reasons.append("orbit has tail entries unrelated to its limit")
            complete_ok = orbit.stop_reason is StopReason.CONVERGED and all(
                space.contains(pt) for pt in orbit.points
            )
            if not complete_ok:
                reasons.append("orbit did not converge inside the space")
        except (DivergenceError, PreconditionError) as exc:
            reasons.append(f"orbit check failed: {exc}")
    else:
        reasons.append("orbit checks skipped without a verified contraction")

    verdicts = (complete_ok, start_ok, t_ok, self_closed_ok, contraction_ok)
    overall = (
        OverallVerdict.ALL_VERIFIED_ON_SAMPLE
        if all(verdicts)
        else OverallVerdict.INCOMPLETE
    )
    return TheoremReport(
        complete_ok,
        start_ok,
        t_ok,
        self_closed_ok,
        contraction_ok,
        overall,
        estimate.lambda_hat,
        estimate_diag.lambda_hat,
        estimate,
        orbit,
        tuple(reasons),
    )
