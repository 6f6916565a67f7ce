"""Picard iteration with certified geometric bounds and uniqueness probes.

The engine generates the orbit x0, Tx0, T^2 x0, ... and records, per step,
the metric gap d(x_n, x_{n+1}), the pair-distance gap p(x_n, x_{n+1}), and
the theoretical tail bound u_n = lambda^n p(x0, x1) / (1 - lambda).
Convergence is detected on d-gaps, not p-gaps: a pair distance may vanish
off the diagonal or stay positive on it, while the metric controls actual
point separation.  lambda is always an input, either an analytic constant
or an estimate from sampling; the engine never invents one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DivergenceError, DomainError, PreconditionError
from .relations import Relation, check_complete_on
from .spaces import (
    GridFn,
    MetricSpace,
    Point,
    ScalarPoint,
    as_scalar,
    as_values,
    describe_point,
    point_distance,
    points_equal,
)
from .wdistance import WDistance

__all__ = [
    "StopReason",
    "UniquenessVerdict",
    "SelfMap",
    "OrbitTrace",
    "FixedPointCertificate",
    "CauchyCheck",
    "ProbeResult",
    "default_tolerance",
    "iterate",
    "cauchy_bound",
    "certify_cauchy",
    "certify_limit_uniqueness",
    "certify_fixed_point",
    "probe_uniqueness",
]

GAP_LIMIT = 1e8


class StopReason(Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    DIVERGED = "diverged"


class UniquenessVerdict(Enum):
    UNIQUE_BY_CONDITION_1 = "unique_by_condition_1"
    UNIQUE_BY_CONDITION_2 = "unique_by_condition_2"
    NOT_PROBED = "not_probed"
    PROBE_FAILED = "probe_failed"


@dataclass(frozen=True)
class SelfMap:
    """A named map from points to points of the same kind."""

    name: str
    apply: Callable[[Point], Point]

    @staticmethod
    def on_scalars(name: str, fn: Callable[[float], float]) -> "SelfMap":
        return SelfMap(name, lambda pt: ScalarPoint(fn(as_scalar(pt))))

    @staticmethod
    def on_grids(name: str, fn) -> "SelfMap":
        def apply(pt: Point) -> Point:
            values = as_values(pt)
            return GridFn(pt.grid, fn(values))

        return SelfMap(name, apply)

    @staticmethod
    def identity() -> "SelfMap":
        return SelfMap("identity", lambda pt: pt)


@dataclass(frozen=True)
class OrbitTrace:
    """The recorded orbit together with gap and bound sequences.

    ``points`` has length N + 1 while the gap and bound arrays have length N.
    The bound entries are finite only when ``lambda_used`` is below 1.
    """

    points: tuple[Point, ...]
    p_gaps: np.ndarray
    d_gaps: np.ndarray
    bound: np.ndarray
    lambda_used: float
    stop_reason: StopReason

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def final(self) -> Point:
        return self.points[-1]

    def to_csv(self, path) -> None:
        """Write rows of (n, point value or sup norm, d_gap, p_gap, bound)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "point_or_norm", "d_gap", "p_gap", "bound"])
            for n, pt in enumerate(self.points):
                size = pt.value if isinstance(pt, ScalarPoint) else pt.sup_norm
                if n < self.steps:
                    writer.writerow(
                        [n, repr(size), repr(float(self.d_gaps[n])),
                         repr(float(self.p_gaps[n])), repr(float(self.bound[n]))]
                    )
                else:
                    writer.writerow([n, repr(size), "", "", ""])

    def to_record(self) -> dict:
        return {
            "steps": self.steps,
            "stop_reason": self.stop_reason.value,
            "lambda_used": self.lambda_used,
            "final": describe_point(self.final),
            "final_d_gap": float(self.d_gaps[-1]) if self.steps else 0.0,
        }


@dataclass(frozen=True)
class FixedPointCertificate:
    point: Point
    residual: float
    p_self: float
    unique: UniquenessVerdict

    def to_record(self) -> dict:
        return {
            "point": describe_point(self.point),
            "residual": self.residual,
            "p_self": self.p_self,
            "unique": self.unique.value,
        }


class CauchyCheck(NamedTuple):
    ok: bool
    violations: tuple[tuple[int, int, float, float], ...]


@dataclass(frozen=True)
class ProbeResult:
    verdict: UniquenessVerdict
    z: Point | None
    notes: tuple[str, ...] = ()

    def to_record(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "z": describe_point(self.z) if self.z is not None else None,
            "notes": list(self.notes),
        }


def default_tolerance(point: Point) -> float:
    return 1e-9 if isinstance(point, ScalarPoint) else 1e-8


def _build_trace(points, d_gaps, p_gaps, lam, stop) -> OrbitTrace:
    n = len(d_gaps)
    d = np.asarray(d_gaps, dtype=float)
    p = np.asarray(p_gaps, dtype=float)
    p01 = p[0] if n else 0.0
    if lam < 1.0:
        bound = p01 * lam ** np.arange(n) / (1.0 - lam)
    else:
        bound = np.full(n, np.inf)
    for arr in (d, p, bound):
        arr.setflags(write=False)
    return OrbitTrace(tuple(points), p, d, bound, lam, stop)


def iterate(
    map_: SelfMap,
    x0: Point,
    p: WDistance,
    lam: float,
    max_iter: int = 10_000,
    tol: float | None = None,
) -> OrbitTrace:
    """Run Picard iteration from x0 until the d-gap falls below ``tol``.

    Divergence (a gap beyond 1e8 or a non-finite iterate) raises
    ``DivergenceError`` carrying the last finite portion of the trace.
    """
    if not (math.isfinite(lam) and lam >= 0.0):
        raise DomainError(f"contraction factor must be a finite nonnegative real, got {lam!r}")
    if max_iter < 1:
        raise PreconditionError("max_iter must be at least 1")
    if tol is None:
        tol = default_tolerance(x0)
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")

    points: list[Point] = [x0]
    d_gaps: list[float] = []
    p_gaps: list[float] = []
    stop = StopReason.MAX_ITER
    x = x0
    for _ in range(max_iter):
        try:
            nxt = map_.apply(x)
        except DomainError as exc:
            raise DivergenceError(
                f"iterate of {map_.name} left the finite range: {exc}",
                _build_trace(points, d_gaps, p_gaps, lam, StopReason.DIVERGED),
            ) from exc
        gap = point_distance(x, nxt)
        d_gaps.append(gap)
        p_gaps.append(p(x, nxt))
        points.append(nxt)
        if not math.isfinite(gap) or gap > GAP_LIMIT:
            raise DivergenceError(
                f"gap {gap:.3e} exceeded the divergence threshold {GAP_LIMIT:.0e}",
                _build_trace(points, d_gaps, p_gaps, lam, StopReason.DIVERGED),
            )
        if gap <= tol:
            stop = StopReason.CONVERGED
            break
        x = nxt
    return _build_trace(points, d_gaps, p_gaps, lam, stop)


def cauchy_bound(lam: float, p01: float, n: int) -> float:
    """The geometric tail bound lambda^n * p01 / (1 - lambda)."""
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"contraction factor must lie in [0, 1), got {lam!r}")
    if p01 < 0.0:
        raise DomainError("initial pair distance must be nonnegative")
    if n < 0:
        raise DomainError("step index must be nonnegative")
    return lam**n * p01 / (1.0 - lam)


def certify_cauchy(trace: OrbitTrace, p: WDistance, tol: float = 1e-10) -> CauchyCheck:
    """Check p(x_n, x_m) <= u_n + tol for every recorded index pair n < m."""
    pts = trace.points
    if not pts:
        raise PreconditionError("empty trace")
    violations = []
    for n in range(len(pts) - 1):
        u = float(trace.bound[n])
        for m in range(n + 1, len(pts)):
            value = p(pts[n], pts[m])
            if value > u + tol:
                violations.append((n, m, value, u))
    return CauchyCheck(not violations, tuple(violations))


def certify_limit_uniqueness(
    p: WDistance,
    xs: Sequence[Point],
    y: Point,
    z: Point,
    u: Sequence[float],
    v: Sequence[float],
    space: MetricSpace | None = None,
    *,
    vanish_tol: float = 1e-6,
    sep_slack: float = 1e-12,
) -> bool:
    """Numeric form of the two-target limit lemma: the bounds force y = z.

    Verifies p(x_n, y) <= u_n and p(x_n, z) <= v_n for every n and that both
    bound sequences have vanished at the tail, then asserts
    d(y, z) <= u[-1] + v[-1] + sep_slack.
    """
    xs = list(xs)
    u = [float(a) for a in u]
    v = [float(a) for a in v]
    if not xs or len(u) != len(xs) or len(v) != len(xs):
        raise PreconditionError("xs, u, v must be nonempty and of equal length")
    if u[-1] > vanish_tol or v[-1] > vanish_tol:
        raise PreconditionError(
            f"bound sequences have not vanished: final values {u[-1]:.3e}, {v[-1]:.3e}"
        )
    for n, x in enumerate(xs):
        if p(x, y) > u[n]:
            raise PreconditionError(f"hypothesis p(x_n, y) <= u_n fails at n = {n}")
        if p(x, z) > v[n]:
            raise PreconditionError(f"hypothesis p(x_n, z) <= v_n fails at n = {n}")
    dist = space.d(y, z) if space is not None else point_distance(y, z)
    return dist <= u[-1] + v[-1] + sep_slack


def certify_fixed_point(
    map_: SelfMap,
    point: Point,
    p: WDistance,
    tol: float | None = None,
    unique: UniquenessVerdict = UniquenessVerdict.NOT_PROBED,
) -> FixedPointCertificate:
    """Issue a certificate after re-checking the residual with an extra map
    application; refuses when either residual exceeds the tolerance."""
    if tol is None:
        tol = default_tolerance(point)
    image = map_.apply(point)
    residual = point_distance(point, image)
    follow_up = point_distance(image, map_.apply(image))
    if residual > tol or follow_up > tol:
        raise PreconditionError(
            f"residual {residual:.3e} (follow-up {follow_up:.3e}) above tolerance {tol:.3e}"
        )
    return FixedPointCertificate(point, residual, p(point, point), unique)


def _geometric_decay_holds(
    map_: SelfMap,
    p: WDistance,
    lam: float,
    z: Point,
    candidates: list[Point],
    n_steps: int,
    tol: float,
) -> bool:
    base = [p(z, c) for c in candidates]
    zn = z
    for n in range(n_steps + 1):
        factor = lam**n
        for c, p0 in zip(candidates, base):
            if p(zn, c) > factor * p0 + tol:
                return False
        if n < n_steps:
            zn = map_.apply(zn)
    return True


def probe_uniqueness(
    rel: Relation,
    map_: SelfMap,
    p: WDistance,
    lam: float,
    fp_candidates: Sequence[Point],
    sample: Sequence[Point],
    n_steps: int = 25,
    *,
    residual_tol: float | None = None,
    decay_tol: float = 1e-9,
    sep_tol: float = 1e-8,
    z_hint: Point | None = None,
) -> ProbeResult:
    """Try the two uniqueness conditions against the candidate fixed points.

    Condition 1 looks for a point z related to every candidate (a caller
    hint is tried first, then images of the sample) and verifies the
    lambda^n decay of p(T^n z, c); condition 2 checks completeness of the
    relation on the image sample and that the contraction forces the pair
    distance between distinct candidates to vanish.  The verdict names the
    condition that certified uniqueness, or reports failure.
    """
    candidates = list(fp_candidates)
    if not candidates:
        raise PreconditionError("no fixed-point candidates supplied")
    for c in candidates:
        tol_c = residual_tol if residual_tol is not None else default_tolerance(c)
        res = point_distance(c, map_.apply(c))
        if res > tol_c:
            raise PreconditionError(
                f"candidate residual {res:.3e} above tolerance {tol_c:.3e}"
            )

    notes: list[str] = []
    separated = any(
        point_distance(a, b) > sep_tol
        for i, a in enumerate(candidates)
        for b in candidates[i + 1 :]
    )

    # Condition 1: a common relation ancestor with geometrically decaying
    # pair distance to every candidate.
    z_pool: list[Point] = list([z_hint] if z_hint is not None else [])
    z_pool.extend(map_.apply(s) for s in sample)
    found_related_z = False
    for z in z_pool:
        if not all(rel(z, c) for c in candidates):
            continue
        found_related_z = True
        if _geometric_decay_holds(map_, p, lam, z, candidates, n_steps, decay_tol):
            if separated:
                notes.append("decay held but candidates stay separated")
                break
            return ProbeResult(UniquenessVerdict.UNIQUE_BY_CONDITION_1, z, tuple(notes))
    if found_related_z and not notes:
        notes.append("no related z sustained the geometric decay")
    elif not found_related_z:
        notes.append("no sampled image is related to every candidate")

    # Condition 2: relation complete on the image sample and the contraction
    # collapses every distinct candidate pair.
    images = [map_.apply(s) for s in sample]
    completeness = check_complete_on(rel, images) if images else None
    if completeness is not None and completeness.ok:
        if lam >= 1.0:
            notes.append("contraction factor not below 1, condition 2 inapplicable")
        else:
            collapse_ok = True
            for i, a in enumerate(candidates):
                for b in candidates[i + 1 :]:
                    if points_equal(a, b):
                        continue
                    if rel(a, b):
                        first, second = a, b
                    elif rel(b, a):
                        first, second = b, a
                    else:
                        collapse_ok = False
                        notes.append("candidate pair unrelated in both orders")
                        break
                    pv = p(first, second)
                    contracted = p(map_.apply(first), map_.apply(second))
                    if contracted > lam * pv + decay_tol:
                        collapse_ok = False
                        notes.append("contraction fails on a candidate pair")
                        break
                    if pv > decay_tol / (1.0 - lam) or point_distance(a, b) > sep_tol:
                        collapse_ok = False
                        notes.append("candidate pair distance did not collapse")
                        break
                if not collapse_ok:
                    break
            if collapse_ok and not separated:
                return ProbeResult(UniquenessVerdict.UNIQUE_BY_CONDITION_2, None, tuple(notes))
    elif completeness is not None:
        notes.append("relation is not complete on the image sample")

    return ProbeResult(UniquenessVerdict.PROBE_FAILED, None, tuple(notes))
