"""Generalized pair distances and sample-based axiom checkers.

A pair distance p is a nonnegative function of ordered point pairs.  Unlike a
metric it need not be symmetric and p(x, x) may be positive.  Three axioms
are checked on finite data: the triangle inequality over sampled triples, a
lower-semi-continuity condition along relation-preserving sequences (the
liminf over an infinite tail is proxied by the minimum over a declared tail
window), and a separation property tying small p-balls to small metric
distance, with the existential delta searched over a fixed geometric ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .relations import Relation, Verdict, is_preserving
from .spaces import (
    MetricSpace,
    Point,
    as_scalar,
    describe_point,
    metric_eval,
    point_distance,
)

__all__ = [
    "Axiom",
    "WDistance",
    "TriangleWitness",
    "SeparationRow",
    "AxiomReport",
    "default_delta_ladder",
    "check_triangle",
    "check_rlsc",
    "check_w3",
]


class Axiom(Enum):
    W1_TRIANGLE = "triangle"
    W2_RLSC = "relation_lsc"
    W3_SEPARATION = "separation"


@dataclass(frozen=True)
class WDistance:
    """Named nonnegative pair function; evaluations are validated lazily."""

    name: str
    p: Callable[[Point, Point], float]

    def __call__(self, x: Point, y: Point) -> float:
        value = float(self.p(x, y))
        if not (math.isfinite(value) and value >= 0.0):
            raise DomainError(f"{self.name} produced an invalid pair distance {value!r}")
        return value

    @staticmethod
    def on_scalars(name: str, fn: Callable[[float, float], float]) -> "WDistance":
        return WDistance(name, lambda x, y: float(fn(as_scalar(x), as_scalar(y))))

    @staticmethod
    def from_metric(name: str = "metric") -> "WDistance":
        """The canonical point distance wrapped as a pair distance."""
        return WDistance(name, point_distance)


@dataclass(frozen=True)
class TriangleWitness:
    x: Point
    y: Point
    z: Point
    lhs: float
    rhs: float


@dataclass(frozen=True)
class SeparationRow:
    """One epsilon row of the separation search: the largest working ladder
    delta, or the violating triple found at the smallest ladder delta."""

    eps: float
    delta: float | None
    witness: tuple[Point, Point, Point, float] | None


@dataclass(frozen=True)
class AxiomReport:
    axiom: Axiom
    verdict: Verdict
    witnesses: tuple = ()
    table: tuple[SeparationRow, ...] = ()
    detail: dict = field(default_factory=dict)
    sample_size: int = 0

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.HOLDS_ON_SAMPLE

    def to_record(self) -> dict:
        rec = {
            "axiom": self.axiom.value,
            "verdict": self.verdict.value,
            "sample_size": self.sample_size,
            "detail": dict(self.detail),
        }
        if self.axiom is Axiom.W1_TRIANGLE:
            rec["violations"] = [
                {
                    "x": describe_point(w.x),
                    "y": describe_point(w.y),
                    "z": describe_point(w.z),
                    "lhs": w.lhs,
                    "rhs": w.rhs,
                }
                for w in self.witnesses[:10]
            ]
            rec["violation_count"] = len(self.witnesses)
        if self.table:
            rec["table"] = [
                {"eps": row.eps, "delta": row.delta, "found": row.delta is not None}
                for row in self.table
            ]
        return rec


def _pair_matrix(fn, sample: list[Point]) -> np.ndarray:
    m = len(sample)
    out = np.empty((m, m))
    for i, x in enumerate(sample):
        for j, y in enumerate(sample):
            out[i, j] = fn(x, y)
    return out


def check_triangle(p: WDistance, sample: Sequence[Point], *, tol: float = 1e-12) -> AxiomReport:
    """Exhaustive p(x, z) <= p(x, y) + p(y, z) over all sampled triples."""
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    P = _pair_matrix(p, sample)
    # lhs[i, j, k] = p(x_i, z_k), rhs[i, j, k] = p(x_i, y_j) + p(y_j, z_k)
    lhs = P[:, None, :]
    rhs = P[:, :, None] + P[None, :, :]
    bad = np.argwhere(lhs > rhs + tol)
    witnesses = tuple(
        TriangleWitness(
            sample[i], sample[j], sample[k], float(P[i, k]), float(P[i, j] + P[j, k])
        )
        for i, j, k in bad[:50]
    )
    verdict = Verdict.FAILS_WITH_WITNESS if len(bad) else Verdict.HOLDS_ON_SAMPLE
    return AxiomReport(
        Axiom.W1_TRIANGLE,
        verdict,
        witnesses,
        detail={"triples": len(sample) ** 3, "violations": int(len(bad))},
        sample_size=len(sample),
    )


def check_rlsc(
    p: WDistance,
    anchor: Point,
    rel: Relation,
    seq: Sequence[Point],
    limit: Point,
    tol: float = 1e-9,
    *,
    conv_tol: float = 1e-9,
    tail_fraction: float = 0.25,
) -> AxiomReport:
    """Lower semi-continuity of p(anchor, .) along one preserving sequence.

    Asserts min over the tail window of p(anchor, x_n) >= p(anchor, limit) - tol.
    The sequence must be preserving (use the universal relation for a plain,
    relation-free check) and must converge to ``limit`` within ``conv_tol``.
    """
    seq = list(seq)
    if len(seq) < 2:
        raise PreconditionError("need at least two sequence entries")
    if not is_preserving(rel, seq):
        raise PreconditionError(f"sequence is not {rel.name}-preserving")
    gap = point_distance(seq[-1], limit)
    if gap > conv_tol:
        raise PreconditionError(
            f"sequence tail is {gap:.3e} from the limit, above tolerance {conv_tol:.3e}"
        )
    window = max(1, int(len(seq) * tail_fraction))
    tail = seq[-window:]
    tail_values = [p(anchor, x) for x in tail]
    tail_min = min(tail_values)
    at_limit = p(anchor, limit)
    ok = tail_min >= at_limit - tol
    worst = tail[tail_values.index(tail_min)]
    return AxiomReport(
        Axiom.W2_RLSC,
        Verdict.HOLDS_ON_SAMPLE if ok else Verdict.FAILS_WITH_WITNESS,
        () if ok else ((worst, limit),),
        detail={"tail_min": tail_min, "at_limit": at_limit, "tail_window": window},
        sample_size=len(seq),
    )


def default_delta_ladder() -> tuple[float, ...]:
    return tuple(2.0**-i for i in range(21))


def _separation_holds(P, D, delta, eps):
    """All triples: p(z, x) <= delta and p(z, y) <= delta imply d(x, y) <= eps."""
    for zi in range(P.shape[0]):
        near = np.flatnonzero(P[zi] <= delta)
        if near.size < 2:
            continue
        sub = D[np.ix_(near, near)]
        worst = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[worst] > eps:
            return False, (zi, int(near[worst[0]]), int(near[worst[1]]), float(sub[worst]))
    return True, None


def check_w3(
    p: WDistance,
    space: MetricSpace,
    sample: Sequence[Point],
    eps_grid: Sequence[float],
    delta_ladder: Sequence[float] | None = None,
) -> AxiomReport:
    """For each epsilon, the largest ladder delta satisfying separation.

    The ladder is searched top down, so the first success is the largest
    working delta; an epsilon with no working delta fails the axiom and the
    violating triple at the smallest ladder delta is reported.
    """
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    ladder = tuple(delta_ladder) if delta_ladder is not None else default_delta_ladder()
    if not ladder or any(d <= 0 for d in ladder) or any(
        a <= b for a, b in zip(ladder, ladder[1:])
    ):
        raise PreconditionError("delta ladder must be positive and strictly descending")
    if not eps_grid or any(e <= 0 for e in eps_grid):
        raise PreconditionError("eps grid must be positive")

    P = _pair_matrix(p, sample)
    D = _pair_matrix(lambda x, y: metric_eval(space, x, y), sample)
    rows = []
    for eps in eps_grid:
        found = None
        last_witness = None
        for delta in ladder:
            ok, wit = _separation_holds(P, D, delta, eps)
            if ok:
                found = delta
                break
            last_witness = wit
        if found is not None:
            rows.append(SeparationRow(float(eps), found, None))
        else:
            zi, xi, yi, dval = last_witness
            rows.append(
                SeparationRow(float(eps), None, (sample[zi], sample[xi], sample[yi], dval))
            )
    all_found = all(row.delta is not None for row in rows)
    return AxiomReport(
        Axiom.W3_SEPARATION,
        Verdict.HOLDS_ON_SAMPLE if all_found else Verdict.FAILS_WITH_WITNESS,
        tuple(row.witness for row in rows if row.witness is not None),
        table=tuple(rows),
        sample_size=len(sample),
    )
