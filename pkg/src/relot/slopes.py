"""Directional derivatives of h and boundary-direction classification.

The one-sided derivative of a convex h along a ray is the limit of the
difference quotients s(eps) = (h(P + eps v) - h(P)) / eps, which decrease
monotonically as eps shrinks and converge either to a real number or to
-inf.  The classifier walks a geometric schedule of eps values and reports
which of the two regimes the tail of the sequence is in, or declares itself
inconclusive rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import BOUNDARY_CLASS_TOL, GAUGE_TOL
from .costs import CostModel
from .errors import ConvexityViolation, NotInternalDirection, NotOnBoundary
from .values import Slope

# Schedule eps_k = 1e-2 * 2^-k.  Depth 18 is calibrated so that (a) the
# divergence test fires for the built-in heat cost (quotients reach ~-7e3,
# past S_MAX) and (b) float64 cancellation noise in the quotients, of order
# 1e-16 / eps_min ~ 1e-8, stays below the true step-to-step decrease.
SCHEDULE_DEPTH = 18
S_MAX = 1e3
STABILITY_WINDOW = 4
FINITE_RTOL = 1e-6
MONOTONE_TOL = 1e-9


def default_schedule() -> np.ndarray:
    return 1e-2 * 0.5 ** np.arange(SCHEDULE_DEPTH + 1)


@dataclass(frozen=True)
class SlopeClassification:
    """Outcome of a difference-quotient scan along one ray."""

    point: np.ndarray
    direction: np.ndarray
    slope: Slope
    quotients: np.ndarray
    epsilons: np.ndarray
    confidence: str  # converged | diverging | inconclusive

    @property
    def diverges(self) -> bool:
        return not self.slope.is_finite


def directional_slope(model: CostModel, point, direction,
                      schedule: np.ndarray | None = None) -> SlopeClassification:
    """Classify the one-sided derivative of h at ``point`` along ``direction``.

    ``direction`` must be a unit vector pointing into the interior of the
    body at ``point`` (checked at the smallest schedule step).
    """
    body = model.body
    P = np.asarray(point, dtype=float)
    v = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError("direction must have unit Euclidean norm")
    if body.gauge(P) > 1.0 + GAUGE_TOL:
        raise ValueError("base point lies outside the body")

    if schedule is None:
        schedule = default_schedule()
    eps = np.asarray(schedule, dtype=float)
    if eps.size == 0 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ValueError("schedule must be a nonempty strictly decreasing positive sequence")

    if body.gauge(P + eps[-1] * v) >= 1.0 - GAUGE_TOL:
        raise NotInternalDirection(
            "direction does not enter the interior at the smallest step"
        )

    pts = P[None, :] + eps[:, None] * v[None, :]
    inside = np.asarray(body.gauge(pts)) <= 1.0 + GAUGE_TOL
    first = int(np.argmax(inside))  # inside is a suffix along shrinking eps
    eps = eps[first:]
    pts = pts[first:]

    h0 = model.h_inside(P)
    quotients = (np.asarray(model.h_inside(pts)) - h0) / eps

    bad = np.flatnonzero(
        quotients[1:] > quotients[:-1] + MONOTONE_TOL * (1.0 + np.abs(quotients[:-1]))
    )
    if bad.size:
        k = int(bad[0])
        raise ConvexityViolation(
            f"difference quotients increased at step {k + 1}: "
            f"{quotients[k]:.6g} -> {quotients[k + 1]:.6g}"
        )

    slope, confidence = _classify_tail(quotients)
    return SlopeClassification(P, v, slope, quotients, eps, confidence)


def _classify_tail(s: np.ndarray) -> tuple[Slope, str]:
    if s.size < STABILITY_WINDOW + 1:
        return Slope.finite(float(s[-1])), "inconclusive"
    last = float(s[-1])
    ref = float(s[-1 - STABILITY_WINDOW])
    if last < -S_MAX and last < ref - 1.0:
        return Slope.NEG_INF, "diverging"
    if abs(last - ref) < FINITE_RTOL * (1.0 + abs(last)):
        return Slope.finite(last), "converged"
    return Slope.finite(last), "inconclusive"


def is_theta_direction(model: CostModel, v) -> tuple[bool | None, SlopeClassification]:
    """Does the slope of h at boundary point v along -v diverge to -inf?

    Returns (True, cls) for a diverging slope, (False, cls) for a finite one
    and (None, cls) when the scan is inconclusive; the caller decides how to
    treat the undecided case.
    """
    v = np.asarray(v, dtype=float)
    g = model.body.gauge(v)
    if abs(g - 1.0) > BOUNDARY_CLASS_TOL:
        raise NotOnBoundary(f"gauge(v) = {g:.9g}, expected 1 within {BOUNDARY_CLASS_TOL}")
    inward = -v / np.linalg.norm(v)
    cls = directional_slope(model, v, inward)
    if cls.confidence == "inconclusive":
        return None, cls
    return cls.diverges, cls


@dataclass(frozen=True)
class HighlyRelativisticReport:
    """Sampled verdict on whether all boundary slopes diverge."""

    verdict: bool
    n_samples: int
    finite_count: int
    inconclusive_count: int
    exceptions: tuple  # (point, direction, classification) for non-diverging samples


def is_highly_relativistic(model: CostModel, boundary_samples: int,
                           seed: int = 0) -> HighlyRelativisticReport:
    """Sample boundary points and interior directions, classify each slope.

    True only when every sampled slope diverges; finite or inconclusive
    samples are listed in the report rather than silently dropped.
    """
    if boundary_samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    pts = model.body.sample_boundary(rng, boundary_samples)
    targets = model.body.sample_interior(rng, boundary_samples, max_gauge=0.5)
    finite = 0
    inconclusive = 0
    exceptions = []
    for P, z in zip(pts, targets):
        v = z - P
        v = v / np.linalg.norm(v)
        cls = directional_slope(model, P, v)
        if cls.confidence == "diverging":
            continue
        if cls.confidence == "converged":
            finite += 1
        else:
            inconclusive += 1
        exceptions.append((P, v, cls))
    return HighlyRelativisticReport(
        verdict=(finite == 0 and inconclusive == 0),
        n_samples=boundary_samples,
        finite_count=finite,
        inconclusive_count=inconclusive,
        exceptions=tuple(exceptions),
    )


def interior_direction_at(body, point, rng: np.random.Generator) -> np.ndarray:
    """A random unit direction entering the interior at a boundary point."""
    z = body.sample_interior(rng, 1, max_gauge=0.5)[0]
    v = z - np.asarray(point, dtype=float)
    return v / np.linalg.norm(v)
