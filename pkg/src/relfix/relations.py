"""Binary relations on points and sample-based closure checks.

Universally quantified relation properties are decided on finite samples;
every report records the size of the sample it was decided on, and a failing
verdict always carries at least one concrete counterexample pair.  The
infinite-tail condition behind ``witness_d_self_closed`` is proxied by a
declared tail window of the supplied finite sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, Sequence

from .errors import PreconditionError
from .spaces import Point, as_scalar, as_values, describe_point, point_distance

if TYPE_CHECKING:  # pragma: no cover
    from .engine import SelfMap

__all__ = [
    "RelationProperty",
    "Verdict",
    "Relation",
    "RelationReport",
    "SubsequenceWitness",
    "universal_relation",
    "is_preserving",
    "check_t_closed",
    "check_weak_t_closed",
    "find_start_points",
    "check_complete_on",
    "witness_d_self_closed",
]


class RelationProperty(Enum):
    T_CLOSED = "t_closed"
    WEAK_T_CLOSED = "weak_t_closed"
    COMPLETE = "complete"
    START_POINTS_NONEMPTY = "start_points_nonempty"


class Verdict(Enum):
    HOLDS_ON_SAMPLE = "holds_on_sample"
    FAILS_WITH_WITNESS = "fails_with_witness"


@dataclass(frozen=True)
class Relation:
    """A decidable predicate over ordered point pairs."""

    name: str
    holds: Callable[[Point, Point], bool]
    note: str = ""

    def __call__(self, x: Point, y: Point) -> bool:
        return bool(self.holds(x, y))

    def either_order(self, x: Point, y: Point) -> bool:
        """Symmetric closure: (x, y) or (y, x) is related."""
        return self(x, y) or self(y, x)

    @staticmethod
    def on_scalars(name: str, pred: Callable[[float, float], bool], note: str = "") -> "Relation":
        return Relation(name, lambda x, y: bool(pred(as_scalar(x), as_scalar(y))), note)

    @staticmethod
    def on_grids(name: str, pred, note: str = "") -> "Relation":
        return Relation(name, lambda x, y: bool(pred(as_values(x), as_values(y))), note)


def universal_relation() -> Relation:
    return Relation("universal", lambda x, y: True, "relates every ordered pair")


@dataclass(frozen=True)
class RelationReport:
    """Sample-relative verdict for one relation property."""

    prop: RelationProperty
    verdict: Verdict
    witnesses: tuple[tuple[Point, Point], ...]
    sample_size: int

    def __post_init__(self) -> None:
        if self.verdict is Verdict.FAILS_WITH_WITNESS and not self.witnesses:
            raise PreconditionError("a failing verdict needs at least one witness pair")

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.HOLDS_ON_SAMPLE

    def to_record(self) -> dict:
        return {
            "property": self.prop.value,
            "verdict": self.verdict.value,
            "sample_size": self.sample_size,
            "witnesses": [
                [describe_point(a), describe_point(b)] for a, b in self.witnesses[:10]
            ],
            "witness_count": len(self.witnesses),
        }


def is_preserving(rel: Relation, seq: Sequence[Point]) -> bool:
    """True iff every consecutive pair of the sequence is related."""
    seq = list(seq)
    if len(seq) < 2:
        raise PreconditionError("a preserving check needs at least two points")
    return all(rel(a, b) for a, b in zip(seq, seq[1:]))


def check_t_closed(rel: Relation, map_: "SelfMap", sample: Sequence[Point]) -> RelationReport:
    """Do images of related sampled pairs stay related, in the same order?"""
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    images = {id(x): map_.apply(x) for x in sample}
    bad = []
    for x in sample:
        for y in sample:
            if rel(x, y) and not rel(images[id(x)], images[id(y)]):
                bad.append((x, y))
    verdict = Verdict.FAILS_WITH_WITNESS if bad else Verdict.HOLDS_ON_SAMPLE
    return RelationReport(RelationProperty.T_CLOSED, verdict, tuple(bad), len(sample))


def check_weak_t_closed(rel: Relation, map_: "SelfMap", sample: Sequence[Point]) -> RelationReport:
    """Like ``check_t_closed`` but the image pair may be related in either order."""
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    images = {id(x): map_.apply(x) for x in sample}
    bad = []
    for x in sample:
        for y in sample:
            if rel(x, y) and not rel.either_order(images[id(x)], images[id(y)]):
                bad.append((x, y))
    verdict = Verdict.FAILS_WITH_WITNESS if bad else Verdict.HOLDS_ON_SAMPLE
    return RelationReport(RelationProperty.WEAK_T_CLOSED, verdict, tuple(bad), len(sample))


def find_start_points(rel: Relation, map_: "SelfMap", sample: Sequence[Point]) -> list[Point]:
    """All sampled x with (x, map(x)) related; admissible iteration seeds."""
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    return [x for x in sample if rel(x, map_.apply(x))]


def check_complete_on(rel: Relation, sample: Sequence[Point]) -> RelationReport:
    """Is every sampled pair, including the diagonal, related in some order?"""
    sample = list(sample)
    if not sample:
        raise PreconditionError("empty sample")
    bad = []
    for i, x in enumerate(sample):
        for y in sample[i:]:
            if not rel.either_order(x, y):
                bad.append((x, y))
    verdict = Verdict.FAILS_WITH_WITNESS if bad else Verdict.HOLDS_ON_SAMPLE
    return RelationReport(RelationProperty.COMPLETE, verdict, tuple(bad), len(sample))


@dataclass(frozen=True)
class SubsequenceWitness:
    """Indices at which a convergent preserving sequence relates to its limit.

    ``ok`` means the relation held at every index of the tail window, the
    finite proxy for an infinite subsequence; on failure ``indices`` lists
    every position where the relation fails instead.
    """

    ok: bool
    indices: tuple[int, ...]
    tail_start: int


def witness_d_self_closed(
    rel: Relation,
    seq: Sequence[Point],
    limit: Point,
    *,
    tol: float = 1e-9,
    tail_fraction: float = 0.25,
) -> SubsequenceWitness:
    """Check the subsequence-to-limit condition on a finite sequence.

    The sequence must be preserving and its final entry must lie within
    ``tol`` of ``limit``; otherwise a ``PreconditionError`` is raised.
    """
    seq = list(seq)
    if len(seq) < 2:
        raise PreconditionError("need at least two sequence entries")
    if not is_preserving(rel, seq):
        raise PreconditionError(f"sequence is not {rel.name}-preserving")
    gap = point_distance(seq[-1], limit)
    if gap > tol:
        raise PreconditionError(
            f"sequence tail is {gap:.3e} from the limit, above tolerance {tol:.3e}"
        )
    related = [rel(x, limit) for x in seq]
    window = max(1, int(len(seq) * tail_fraction))
    tail_start = len(seq) - window
    if all(related[tail_start:]):
        good = tuple(i for i, r in enumerate(related) if r)
        return SubsequenceWitness(True, good, tail_start)
    bad = tuple(i for i, r in enumerate(related) if not r)
    return SubsequenceWitness(False, bad, tail_start)
