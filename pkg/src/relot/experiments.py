"""Refinement experiments over the structural claims about the cost curve.

Two drivers share one config format:

  - the continuity experiment tracks how the near-critical jump of the
    sampled cost curve behaves as the discretization refines (it should
    shrink for absolutely continuous sources and persist for atomic ones);
  - the theta experiment tracks how much optimal-plan mass rides the
    boundary band at supercritical times, split by boundary-direction class.

The paper-scale claims are trends, not rates, so verdicts only report the
sign of a least-squares slope over log(level).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .costs import cost_model_from_spec
from .discretize import measure_from_spec
from .solver import CostCurve, OTInstance, cost_curve, solve, theta_mass

TREND_DEAD_BAND = 0.05


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one refinement experiment byte-for-byte."""

    experiment: str  # continuity | theta
    cost: dict
    source: dict
    target: dict
    levels: tuple[int, ...]
    t_grid: tuple[float, float, int]
    theta_times: tuple[float, ...] = ()
    theta_time_mode: str = "offset_from_T"  # or "absolute"
    band: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.experiment not in ("continuity", "theta"):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        levels = tuple(int(x) for x in self.levels)
        if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("levels must be strictly increasing, at least two")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "t_grid", tuple(self.t_grid))
        object.__setattr__(self, "theta_times", tuple(float(t) for t in self.theta_times))
        if self.theta_time_mode not in ("offset_from_T", "absolute"):
            raise ValueError(f"unknown theta_time_mode {self.theta_time_mode!r}")
        if self.experiment == "theta":
            if not self.theta_times:
                raise ValueError("theta experiment needs theta_times")
            if self.theta_time_mode == "offset_from_T" and any(
                o <= 0 for o in self.theta_times
            ):
                raise ValueError("offsets from T must be positive (supercritical)")

    def to_payload(self) -> dict:
        return {
            "experiment": self.experiment,
            "cost": self.cost,
            "source": self.source,
            "target": self.target,
            "levels": list(self.levels),
            "t_grid": list(self.t_grid),
            "theta_times": list(self.theta_times),
            "theta_time_mode": self.theta_time_mode,
            "band": self.band,
            "seed": self.seed,
        }

    @staticmethod
    def from_payload(payload: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            experiment=payload["experiment"],
            cost=payload["cost"],
            source=payload["source"],
            target=payload["target"],
            levels=tuple(payload["levels"]),
            t_grid=tuple(payload["t_grid"]),
            theta_times=tuple(payload.get("theta_times", [])),
            theta_time_mode=payload.get("theta_time_mode", "offset_from_T"),
            band=float(payload.get("band", 1e-3)),
            seed=int(payload.get("seed", 0)),
        )


@dataclass(frozen=True)
class ContinuityLevel:
    level: int
    critical_time: float
    curve: CostCurve
    max_jump: float | None  # over adjacent feasible samples
    near_critical_jump: float | None  # between the sample at T and the next one


@dataclass(frozen=True)
class ThetaPoint:
    requested: float
    t: float | None  # None when skipped (t <= level's critical time)
    skipped: bool
    boundary_mass: float | None = None
    theta_mass: float | None = None
    inconclusive_mass: float | None = None


@dataclass(frozen=True)
class ThetaLevel:
    level: int
    critical_time: float
    points: tuple[ThetaPoint, ...]


@dataclass(frozen=True)
class RefinementReport:
    config: ExperimentConfig
    levels: tuple = field(default_factory=tuple)
    verdicts: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        payload = {"config": self.config.to_payload(), "levels": [], "verdicts": self.verdicts}
        for rec in self.levels:
            if isinstance(rec, ContinuityLevel):
                payload["levels"].append({
                    "level": rec.level,
                    "critical_time": rec.critical_time,
                    "max_jump": rec.max_jump,
                    "near_critical_jump": rec.near_critical_jump,
                    "curve": rec.curve.to_payload(),
                })
            else:
                payload["levels"].append({
                    "level": rec.level,
                    "critical_time": rec.critical_time,
                    "points": [
                        {
                            "requested": p.requested,
                            "t": p.t,
                            "skipped": p.skipped,
                            "boundary_mass": p.boundary_mass,
                            "theta_mass": p.theta_mass,
                            "inconclusive_mass": p.inconclusive_mass,
                        }
                        for p in rec.points
                    ],
                })
        return payload


def trend_label(levels, values) -> str:
    """Sign of the least-squares slope of value against log2(level).

    Values are normalized by their largest magnitude so the dead-band is
    scale-free; an all-zero or single-point series reads as flat.
    """
    pairs = [(l, v) for l, v in zip(levels, values) if v is not None]
    if len(pairs) < 2:
        return "flat"
    x = np.log2([float(l) for l, _ in pairs])
    y = np.array([float(v) for _, v in pairs])
    scale = np.max(np.abs(y))
    if scale == 0.0:
        return "flat"
    slope = np.polyfit(x, y / scale, 1)[0]
    if abs(slope) < TREND_DEAD_BAND:
        return "flat"
    return "decreasing" if slope < 0 else "increasing"


def _build_instance(config: ExperimentConfig, level: int) -> OTInstance:
    model = cost_model_from_spec(config.cost)
    mu = measure_from_spec(config.source, level)
    nu = measure_from_spec(config.target, level)
    return OTInstance(mu, nu, model)


def run_continuity_experiment(config: ExperimentConfig) -> RefinementReport:
    """Cost curves per refinement level, with jump metrics at the critical time."""
    records = []
    for level in config.levels:
        instance = _build_instance(config, level)
        curve = cost_curve(instance, *config.t_grid)
        feas = [s for s in curve.samples if s.feasible]
        jumps = [
            abs(b.value.value - a.value.value) for a, b in zip(feas, feas[1:])
        ]
        max_jump = max(jumps) if jumps else None
        near = None
        idx = next(
            (k for k, s in enumerate(curve.samples) if s.t == curve.critical_time), None
        )
        if idx is not None and idx + 1 < len(curve.samples):
            a, b = curve.samples[idx], curve.samples[idx + 1]
            if a.feasible and b.feasible:
                near = abs(b.value.value - a.value.value)
        records.append(
            ContinuityLevel(level, curve.critical_time, curve, max_jump, near)
        )
    verdicts = {
        "near_critical_jump": trend_label(
            [r.level for r in records], [r.near_critical_jump for r in records]
        ),
        "max_jump": trend_label(
            [r.level for r in records], [r.max_jump for r in records]
        ),
    }
    return RefinementReport(config, tuple(records), verdicts)


def run_theta_experiment(config: ExperimentConfig) -> RefinementReport:
    """Boundary-band mass diagnostics at supercritical times, per level."""
    from .solver import critical_time as _critical_time

    records = []
    for level in config.levels:
        instance = _build_instance(config, level)
        T = _critical_time(instance)
        points = []
        for requested in config.theta_times:
            t = requested + T if config.theta_time_mode == "offset_from_T" else requested
            if t <= T:
                points.append(ThetaPoint(requested, None, True))
                continue
            result = solve(instance, t)
            tm = theta_mass(result, instance.cost_model, config.band)
            points.append(
                ThetaPoint(requested, t, False, tm.boundary_mass, tm.theta_mass,
                           tm.inconclusive_mass)
            )
        records.append(ThetaLevel(level, T, tuple(points)))
    verdicts = {}
    for k, requested in enumerate(config.theta_times):
        lv = [r.level for r in records]
        verdicts[f"theta_mass@{requested}"] = trend_label(
            lv, [r.points[k].theta_mass for r in records]
        )
        verdicts[f"boundary_mass@{requested}"] = trend_label(
            lv, [r.points[k].boundary_mass for r in records]
        )
    return RefinementReport(config, tuple(records), verdicts)


def emit_report(report: RefinementReport, format: str, path) -> Path:
    """Write a report to disk; JSON is lossless, CSV is one row per (level, t)."""
    path = Path(path)
    if format == "json":
        path.write_text(report_to_json(report), encoding="utf-8")
    elif format == "csv":
        path.write_text(report_to_csv(report), encoding="utf-8")
    else:
        raise ValueError(f"unknown report format {format!r}")
    return path


def report_to_json(report: RefinementReport) -> str:
    return json.dumps(report.to_payload(), indent=2) + "\n"


def report_to_csv(report: RefinementReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.config.experiment == "continuity":
        writer.writerow([
            "level", "critical_time", "t", "value", "feasible",
            "max_jump", "near_critical_jump",
        ])
        for rec in report.levels:
            for s in rec.curve.samples:
                writer.writerow([
                    rec.level, repr(rec.critical_time), repr(s.t),
                    repr(s.value.value) if s.value.is_finite else "inf",
                    str(s.feasible).lower(),
                    "" if rec.max_jump is None else repr(rec.max_jump),
                    "" if rec.near_critical_jump is None else repr(rec.near_critical_jump),
                ])
    else:
        writer.writerow([
            "level", "critical_time", "requested", "t", "skipped",
            "boundary_mass", "theta_mass", "inconclusive_mass",
        ])
        for rec in report.levels:
            for p in rec.points:
                writer.writerow([
                    rec.level, repr(rec.critical_time), repr(p.requested),
                    "" if p.t is None else repr(p.t),
                    str(p.skipped).lower(),
                    "" if p.boundary_mass is None else repr(p.boundary_mass),
                    "" if p.theta_mass is None else repr(p.theta_mass),
                    "" if p.inconclusive_mass is None else repr(p.inconclusive_mass),
                ])
    return buf.getvalue()
