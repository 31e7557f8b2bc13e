"""Transport plans: sparse couplings between two atom registries.

Entries are (source index, target index, mass) triples against fixed
DiscreteMeasure registries; all plan algebra (marginals, restriction,
composition, sub-plan comparisons) happens at atom-index level, never by
matching floating-point positions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import MarginalMismatch
from .measures import MERGE_TOL, DiscreteMeasure

MARGINAL_RTOL = 1e-9


@dataclass(frozen=True)
class TransportPlan:
    """A nonnegative coupling; ``partial`` relaxes marginals from == to <=."""

    source: DiscreteMeasure
    target: DiscreteMeasure
    rows: np.ndarray  # (k,) int
    cols: np.ndarray  # (k,) int
    masses: np.ndarray  # (k,) positive float
    partial: bool = False

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=int).ravel()
        cols = np.asarray(self.cols, dtype=int).ravel()
        masses = np.asarray(self.masses, dtype=float).ravel()
        if not rows.shape == cols.shape == masses.shape:
            raise ValueError("rows, cols, masses must have equal length")
        if np.any(masses <= 0):
            raise ValueError("entry masses must be strictly positive")
        if rows.size and (rows.min() < 0 or rows.max() >= self.source.n_atoms):
            raise ValueError("row index out of range")
        if cols.size and (cols.min() < 0 or cols.max() >= self.target.n_atoms):
            raise ValueError("column index out of range")
        order = np.lexsort((cols, rows))
        rows, cols, masses = rows[order], cols[order], masses[order]
        if rows.size > 1:
            same = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            if np.any(same):
                raise ValueError("duplicate (i, j) entry")
        for a in (rows, cols, masses):
            a.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "masses", masses)
        self._check_marginals()

    def _check_marginals(self):
        r, c = self.row_sums(), self.col_sums()
        sw, tw = self.source.weights, self.target.weights
        slack = MARGINAL_RTOL * np.maximum(sw.max(initial=1.0), tw.max(initial=1.0))
        if self.partial:
            ok = np.all(r <= sw + slack) and np.all(c <= tw + slack)
        else:
            ok = np.allclose(r, sw, rtol=MARGINAL_RTOL, atol=slack) and np.allclose(
                c, tw, rtol=MARGINAL_RTOL, atol=slack
            )
        if not ok:
            kind = "sub-coupling" if self.partial else "coupling"
            raise MarginalMismatch(f"entries do not form a valid {kind}")

    @property
    def n_entries(self) -> int:
        return int(self.masses.size)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.rows, weights=self.masses, minlength=self.source.n_atoms)

    def col_sums(self) -> np.ndarray:
        return np.bincount(self.cols, weights=self.masses, minlength=self.target.n_atoms)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.source.n_atoms, self.target.n_atoms))
        dense[self.rows, self.cols] = self.masses
        return dense

    def displacements(self) -> np.ndarray:
        """Per-entry displacement vectors y_j - x_i, shape (k, d)."""
        return self.target.positions[self.cols] - self.source.positions[self.rows]


def identity_plan(mu: DiscreteMeasure) -> TransportPlan:
    idx = np.arange(mu.n_atoms)
    return TransportPlan(mu, mu, idx, idx, mu.weights.copy())


def product_plan(mu: DiscreteMeasure, nu: DiscreteMeasure) -> TransportPlan:
    """The product coupling mu (x) nu / |mu|."""
    i, j = np.meshgrid(np.arange(mu.n_atoms), np.arange(nu.n_atoms), indexing="ij")
    masses = np.outer(mu.weights, nu.weights).ravel() / mu.total_mass
    return TransportPlan(mu, nu, i.ravel(), j.ravel(), masses)


def marginals(plan: TransportPlan) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Both projections of a plan, zero-weight atoms dropped."""
    out = []
    for measure, sums in (
        (plan.source, plan.row_sums()),
        (plan.target, plan.col_sums()),
    ):
        keep = sums > 0
        out.append(DiscreteMeasure(measure.positions[keep], sums[keep]))
    return out[0], out[1]


def restrict(plan: TransportPlan,
             predicate: Callable[[np.ndarray, np.ndarray], bool]) -> TransportPlan:
    """Keep exactly the entries whose atom pair satisfies the predicate.

    The result is marked partial; restrict(plan, S) and restrict(plan, not S)
    partition the entries exactly.
    """
    xs = plan.source.positions[plan.rows]
    ys = plan.target.positions[plan.cols]
    keep = np.fromiter(
        (bool(predicate(x, y)) for x, y in zip(xs, ys)), dtype=bool, count=plan.n_entries
    )
    return TransportPlan(
        plan.source, plan.target,
        plan.rows[keep], plan.cols[keep], plan.masses[keep], partial=True,
    )


def same_registry(a: DiscreteMeasure, b: DiscreteMeasure, rtol: float = MARGINAL_RTOL) -> bool:
    return (
        a.positions.shape == b.positions.shape
        and bool(np.all(np.abs(a.positions - b.positions) <= MERGE_TOL))
        and bool(np.allclose(a.weights, b.weights, rtol=rtol, atol=0.0))
    )


def compose(plan1: TransportPlan, plan2: TransportPlan) -> TransportPlan:
    """Glue plan1: mu -> alpha and plan2: alpha -> nu through the middle marginal.

    Discrete disintegration: mass(i -> k) = sum_j plan1(i, j) plan2(j, k) / alpha(j).
    The support of the result is exactly the set of (i, k) joined by some j.
    """
    if plan1.partial or plan2.partial:
        raise ValueError("composition is defined for full couplings")
    if plan1.target.positions.shape != plan2.source.positions.shape or np.any(
        np.abs(plan1.target.positions - plan2.source.positions) > MERGE_TOL
    ):
        raise MarginalMismatch("middle registries do not match")
    alpha = plan1.col_sums()
    if not np.allclose(alpha, plan2.row_sums(), rtol=MARGINAL_RTOL, atol=0.0):
        raise MarginalMismatch("middle marginals differ beyond tolerance")

    by_col: dict[int, list[tuple[int, float]]] = {}
    for i, j, m in zip(plan1.rows, plan1.cols, plan1.masses):
        by_col.setdefault(int(j), []).append((int(i), float(m)))
    by_row: dict[int, list[tuple[int, float]]] = {}
    for j, k, m in zip(plan2.rows, plan2.cols, plan2.masses):
        by_row.setdefault(int(j), []).append((int(k), float(m)))

    acc: dict[tuple[int, int], float] = {}
    for j in sorted(by_col):
        if j not in by_row:
            continue
        aj = alpha[j]
        for i, m1 in by_col[j]:
            scale = m1 / aj
            for k, m2 in by_row[j]:
                acc[(i, k)] = acc.get((i, k), 0.0) + scale * m2
    keys = sorted(acc)
    rows = np.array([i for i, _ in keys], dtype=int)
    cols = np.array([k for _, k in keys], dtype=int)
    masses = np.array([acc[key] for key in keys])
    return TransportPlan(plan1.source, plan2.target, rows, cols, masses)


def plan_to_json(plan: TransportPlan) -> str:
    payload = {
        "source_atoms": _atoms_payload(plan.source),
        "target_atoms": _atoms_payload(plan.target),
        "entries": [
            [int(i), int(j), float(m)]
            for i, j, m in zip(plan.rows, plan.cols, plan.masses)
        ],
        "partial": bool(plan.partial),
    }
    return json.dumps(payload)


def plan_from_json(text: str) -> TransportPlan:
    payload = json.loads(text)
    source = _atoms_from_payload(payload["source_atoms"])
    target = _atoms_from_payload(payload["target_atoms"])
    entries = payload.get("entries", [])
    rows = np.array([e[0] for e in entries], dtype=int)
    cols = np.array([e[1] for e in entries], dtype=int)
    masses = np.array([e[2] for e in entries], dtype=float)
    return TransportPlan(source, target, rows, cols, masses,
                         partial=bool(payload.get("partial", False)))


def _atoms_payload(measure: DiscreteMeasure) -> list:
    return [
        [float(c) for c in p] + [float(w)]
        for p, w in zip(measure.positions, measure.weights)
    ]


def _atoms_from_payload(atoms: list) -> DiscreteMeasure:
    arr = np.asarray(atoms, dtype=float)
    return DiscreteMeasure(arr[:, :-1], arr[:, -1])
