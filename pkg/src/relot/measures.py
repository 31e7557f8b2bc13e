"""Finitely supported nonnegative measures as weighted atom clouds."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms (position, weight) with positive weights and distinct positions.

    Construction merges positions that coincide within MERGE_TOL (max-norm),
    summing their weights, and keeps atoms in first-occurrence order.
    """

    positions: np.ndarray  # (n, d)
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pos.shape[0] != w.shape[0]:
            raise ValueError("positions and weights must have matching length")
        if pos.shape[0] == 0:
            raise ValueError("a measure needs at least one atom")
        if np.any(w <= 0):
            raise ValueError("atom weights must be strictly positive")
        pos, w = _merge_duplicates(pos, w)
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.positions.shape == other.positions.shape
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.weights, other.weights)
        )

    def allclose(self, other: "DiscreteMeasure", rtol: float = 1e-9) -> bool:
        """Same atoms in the same order, weights within relative tolerance."""
        return (
            self.positions.shape == other.positions.shape
            and bool(np.all(np.abs(self.positions - other.positions) <= MERGE_TOL))
            and bool(np.allclose(self.weights, other.weights, rtol=rtol, atol=0.0))
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x_{k + 1}" for k in range(self.dimension)] + ["weight"])
        for p, w in zip(self.positions, self.weights):
            writer.writerow([repr(float(c)) for c in p] + [repr(float(w))])
        return buf.getvalue()


def dirac(position, mass: float = 1.0) -> DiscreteMeasure:
    pos = np.atleast_1d(np.asarray(position, dtype=float))
    return DiscreteMeasure(pos[None, :], np.array([mass]))


def measure_from_csv(text: str) -> DiscreteMeasure:
    """Parse the atom CSV format: header x_1..x_d,weight, one row per atom."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    header = [c.strip() for c in rows[0]]
    if header[-1] != "weight" or not all(h.startswith("x_") for h in header[:-1]):
        raise ValueError(f"expected header x_1..x_d,weight, got {header}")
    d = len(header) - 1
    if d < 1:
        raise ValueError("need at least one coordinate column")
    positions, weights = [], []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != d + 1:
            raise DimensionMismatch(f"row has {len(row)} fields, expected {d + 1}")
        positions.append([float(c) for c in row[:d]])
        weights.append(float(row[d]))
    return DiscreteMeasure(np.array(positions), np.array(weights))


def _merge_duplicates(pos: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = pos.shape[0]
    order = np.lexsort(pos.T[::-1])  # primary key: first coordinate
    canon = np.arange(n)
    sorted_first = pos[order, 0]
    for a in range(n):
        ia = order[a]
        for b in range(a + 1, n):
            if sorted_first[b] - sorted_first[a] > MERGE_TOL:
                break
            ib = order[b]
            if np.max(np.abs(pos[ia] - pos[ib])) <= MERGE_TOL:
                root = min(_find(canon, ia), _find(canon, ib))
                canon[_find(canon, ia)] = root
                canon[_find(canon, ib)] = root
    roots = np.array([_find(canon, i) for i in range(n)])
    if np.array_equal(roots, np.arange(n)):
        return pos.copy(), w.copy()
    keep = np.unique(roots)
    merged_w = np.zeros(keep.size)
    for i, r in enumerate(roots):
        merged_w[np.searchsorted(keep, r)] += w[i]
    return pos[keep].copy(), merged_w


def _find(canon: np.ndarray, i: int) -> int:
    while canon[i] != i:
        canon[i] = canon[canon[i]]
        i = canon[i]
    return int(i)
