"""Exact discrete transport under a cost model, across the time axis.

For fixed time t the problem is a transportation LP over the finite-cost
edge set; infinite costs are simply absent edges.  Feasibility is decided
by max-flow, optima by successive shortest paths with dual potentials, and
the critical time is located exactly within the finite candidate set of
displacement gauges, over which feasibility is monotone.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bodies import GAUGE_TOL
from .costs import CostModel
from .errors import DimensionMismatch, InfeasibleResult, InvalidTime, MarginalMismatch
from .measures import DiscreteMeasure
from .plans import TransportPlan
from .flow import max_routable_mass, min_cost_flow
from .slopes import is_theta_direction
from .values import Cost

FEASIBLE_SHORTFALL = 1e-8  # relative to total mass


@dataclass(frozen=True)
class OTInstance:
    """Source and target measures of equal mass plus the cost model."""

    mu: DiscreteMeasure
    nu: DiscreteMeasure
    cost_model: CostModel

    def __post_init__(self):
        d = self.cost_model.dimension
        if self.mu.dimension != d or self.nu.dimension != d:
            raise DimensionMismatch(
                f"measures of dimension {self.mu.dimension}/{self.nu.dimension} "
                f"vs cost model dimension {d}"
            )
        if not np.isclose(self.mu.total_mass, self.nu.total_mass, rtol=1e-9, atol=0.0):
            raise MarginalMismatch(
                f"total masses differ: {self.mu.total_mass} vs {self.nu.total_mass}"
            )
        disp = self.nu.positions[None, :, :] - self.mu.positions[:, None, :]
        gauges = np.asarray(self.cost_model.body.gauge(disp))
        gauges.setflags(write=False)
        object.__setattr__(self, "_gauges", gauges)

    @property
    def displacement_gauges(self) -> np.ndarray:
        """Matrix gauge(y_j - x_i), shape (n, m)."""
        return self._gauges  # type: ignore[attr-defined]


@dataclass(frozen=True)
class SolveResult:
    """Optimal value (tagged), one optimal plan, and certifying duals."""

    value: Cost
    plan: TransportPlan | None
    potentials: tuple[np.ndarray, np.ndarray] | None
    t: float

    def to_payload(self) -> dict:
        payload: dict = {"t": self.t, "feasible": self.value.is_finite}
        payload["value"] = self.value.value if self.value.is_finite else "inf"
        if self.plan is not None:
            payload["plan"] = [
                [int(i), int(j), float(m)]
                for i, j, m in zip(self.plan.rows, self.plan.cols, self.plan.masses)
            ]
            u, v = self.potentials
            payload["potentials"] = {"u": u.tolist(), "v": v.tolist()}
        return payload


@dataclass(frozen=True)
class CurveSample:
    t: float
    value: Cost
    feasible: bool


@dataclass(frozen=True)
class CostCurve:
    """Sampled t -> C(t) together with the exact critical time."""

    critical_time: float
    samples: tuple[CurveSample, ...]
    grid: tuple[float, float, int]

    def to_payload(self) -> dict:
        return {
            "critical_time": self.critical_time,
            "grid": {"t_min": self.grid[0], "t_max": self.grid[1], "steps": self.grid[2]},
            "samples": [
                {
                    "t": s.t,
                    "value": s.value.value if s.value.is_finite else "inf",
                    "feasible": s.feasible,
                }
                for s in self.samples
            ],
        }

    def to_csv(self) -> str:
        lines = ["t,value,feasible"]
        for s in self.samples:
            value = repr(s.value.value) if s.value.is_finite else "inf"
            lines.append(f"{s.t!r},{value},{str(s.feasible).lower()}")
        return "\n".join(lines) + "\n"


def _feasible_mask(instance: OTInstance, t: float) -> np.ndarray:
    return instance.displacement_gauges <= t * (1.0 + GAUGE_TOL)

def _mask_feasible(instance: OTInstance, mask: np.ndarray) -> bool:
    total = instance.mu.total_mass
    routed, _ = max_routable_mass(instance.mu.weights, instance.nu.weights, mask)
    return total - routed <= FEASIBLE_SHORTFALL * max(1.0, total)


def feasible(instance: OTInstance, t: float) -> bool:
    """Can all mass move at time t using only finite-cost pairs?"""
    if t <= 0:
        raise InvalidTime(f"time must be positive, got {t}")
    return _mask_feasible(instance, _feasible_mask(instance, t))


def critical_time(instance: OTInstance) -> float:
    """The least t at which a finite-cost coupling exists.

    Feasibility is monotone in t and can only switch at one of the finitely
    many displacement gauges, so the exact value is found by bisecting that
    sorted candidate set; no tolerance is applied to the result itself.
    """
    gauges = instance.displacement_gauges
    candidates = np.unique(gauges)

    def ok(c: float) -> bool:
        bound = c * (1.0 + GAUGE_TOL) if c > 0 else 0.0
        return _mask_feasible(instance, gauges <= bound)

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def solve(instance: OTInstance, t: float) -> SolveResult:
    """Optimal transport at time t: tagged value, plan, and dual certificate."""
    if t <= 0:
        raise InvalidTime(f"time must be positive, got {t}")
    mask = _feasible_mask(instance, t)
    if not _mask_feasible(instance, mask):
        return SolveResult(Cost.INF, None, None, t)

    mu, nu = instance.mu, instance.nu
    disp = nu.positions[None, :, :] - mu.positions[:, None, :]
    costs = np.zeros(mask.shape)
    costs[mask] = instance.cost_model.h_inside(disp[mask] / t)

    flow, u, v, routed = min_cost_flow(mu.weights, nu.weights, costs, mask)
    total = mu.total_mass
    if total - routed > FEASIBLE_SHORTFALL * max(1.0, total):
        return SolveResult(Cost.INF, None, None, t)

    rows, cols = np.nonzero(flow)
    plan = TransportPlan(mu, nu, rows, cols, flow[rows, cols])
    value = float(np.sum(plan.masses * costs[plan.rows, plan.cols]))
    return SolveResult(Cost.finite(value), plan, (u, v), t)


def check_complementary_slackness(instance: OTInstance, result: SolveResult,
                                  tol: float = 1e-7) -> list[str]:
    """Violations of the dual optimality certificate (empty list = certified)."""
    if not result.value.is_finite:
        raise InfeasibleResult("no duals for an infeasible solve")
    t = result.t
    mask = _feasible_mask(instance, t)
    disp = instance.nu.positions[None, :, :] - instance.mu.positions[:, None, :]
    costs = np.zeros(mask.shape)
    costs[mask] = instance.cost_model.h_inside(disp[mask] / t)
    u, v = result.potentials
    slack = costs - u[:, None] - v[None, :]
    out = []
    worst = float(slack[mask].min()) if mask.any() else 0.0
    if worst < -tol:
        out.append(f"dual feasibility violated by {-worst:.3g}")
    plan = result.plan
    on_support = np.abs(slack[plan.rows, plan.cols])
    if plan.n_entries and float(on_support.max()) > tol:
        out.append(f"support slack {float(on_support.max()):.3g} exceeds {tol}")
    recomputed = float(np.sum(plan.masses * costs[plan.rows, plan.cols]))
    if abs(recomputed - result.value.value) > 1e-9 * max(1.0, abs(recomputed)):
        out.append("reported value does not match plan cost")
    return out


def cost_curve(instance: OTInstance, t_min: float, t_max: float,
               steps: int) -> CostCurve:
    """Solve on a grid augmented with the exact critical time.

    Grid points are independent; RELOT_THREADS > 1 evaluates them in a
    thread pool, with results merged in grid order either way.
    """
    if not (0 < t_min < t_max) or steps < 2:
        raise ValueError("need 0 < t_min < t_max and steps >= 2")
    T = critical_time(instance)
    ts = np.linspace(t_min, t_max, steps)
    if T > 0:
        ts = np.union1d(ts, [T])

    def at(t: float) -> CurveSample:
        res = solve(instance, float(t))
        return CurveSample(float(t), res.value, res.value.is_finite)

    workers = int(os.environ.get("RELOT_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = tuple(pool.map(at, ts))
    else:
        samples = tuple(at(t) for t in ts)
    return CostCurve(T, samples, (float(t_min), float(t_max), int(steps)))


@dataclass(frozen=True)
class ThetaEntry:
    row: int
    col: int
    mass: float
    gauge: float
    verdict: str  # theta | not_theta | inconclusive


@dataclass(frozen=True)
class ThetaMassResult:
    """Plan mass in the boundary band, split by boundary-direction class."""

    boundary_mass: float
    theta_mass: float
    inconclusive_mass: float
    band: float
    entries: tuple[ThetaEntry, ...]

    def to_payload(self) -> dict:
        return {
            "band": self.band,
            "boundary_mass": self.boundary_mass,
            "theta_mass": self.theta_mass,
            "inconclusive_mass": self.inconclusive_mass,
            "entries": [
                [e.row, e.col, e.mass, e.gauge, e.verdict] for e in self.entries
            ],
        }


def theta_mass(result: SolveResult, cost_model: CostModel,
               band: float = 1e-3) -> ThetaMassResult:
    """How much plan mass rides the boundary band, and how much of that
    moves along directions where the slope of h diverges.

    Displacements z = (y - x)/t with gauge(z) >= 1 - band are radially
    projected onto the boundary and classified; inconclusive classifications
    are accumulated separately, never folded into either bucket.
    """
    if not result.value.is_finite or result.plan is None:
        raise InfeasibleResult("theta_mass requires a finite solve result")
    plan = result.plan
    z = plan.displacements() / result.t
    body = cost_model.body
    gauges = np.asarray(body.gauge(z))
    boundary = 0.0
    theta = 0.0
    undecided = 0.0
    entries = []
    for k in np.flatnonzero(gauges >= 1.0 - band):
        g = float(gauges[k])
        mass = float(plan.masses[k])
        boundary += mass
        direction = z[k] / g
        verdict, _ = is_theta_direction(cost_model, direction)
        if verdict is True:
            theta += mass
            label = "theta"
        elif verdict is False:
            label = "not_theta"
        else:
            undecided += mass
            label = "inconclusive"
        entries.append(ThetaEntry(int(plan.rows[k]), int(plan.cols[k]), mass, g, label))
    return ThetaMassResult(boundary, theta, undecided, band, tuple(entries))
