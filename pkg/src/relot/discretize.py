"""Discretization of density specs into atom clouds, for the experiment harness."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .measures import DiscreteMeasure


def discretize_density(density: Callable[[np.ndarray], np.ndarray],
                       box: Sequence, resolution: int,
                       total_mass: float = 1.0) -> DiscreteMeasure:
    """Cell-centered quadrature of a nonnegative density on a box.

    resolution^d atoms at cell centers, weighted by density(center) times the
    cell volume and renormalized to total_mass; zero-weight cells are dropped.
    First-order accuracy is all the trend experiments need.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    bounds = np.atleast_2d(np.asarray(box, dtype=float))
    if bounds.shape[1] != 2 or np.any(bounds[:, 1] <= bounds[:, 0]):
        raise ValueError("box must be a sequence of (lo, hi) pairs with lo < hi")
    d = bounds.shape[0]
    axes = [
        lo + (hi - lo) * (np.arange(resolution) + 0.5) / resolution
        for lo, hi in bounds
    ]
    grids = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=-1)
    values = np.asarray(density(centers), dtype=float).ravel()
    if values.shape != (centers.shape[0],):
        values = np.array([float(density(c)) for c in centers])
    if np.any(values < 0):
        raise ValueError("density must be nonnegative on the box")
    cell_volume = float(np.prod((bounds[:, 1] - bounds[:, 0]) / resolution))
    weights = values * cell_volume
    total = weights.sum()
    if total <= 0:
        raise ValueError("density vanishes at every sampled cell center")
    weights = weights * (total_mass / total)
    keep = weights > 0
    return DiscreteMeasure(centers[keep], weights[keep])


def density_from_spec(spec: dict) -> Callable[[np.ndarray], np.ndarray]:
    """Named density forms: uniform, or affine(offset + coeffs . x)."""
    form = spec.get("form", "uniform")
    if form == "uniform":
        return lambda x: np.ones(np.asarray(x).shape[:-1])
    if form == "affine":
        coeffs = np.asarray(spec.get("coeffs", []), dtype=float)
        offset = float(spec.get("offset", 0.0))

        def density(x):
            x = np.asarray(x, dtype=float)
            return offset + x @ coeffs

        return density
    raise ValueError(f"unknown density form {form!r}")


def measure_from_spec(spec: dict, resolution: int) -> DiscreteMeasure:
    """Realize a source/target spec at a refinement level.

    Kinds: "density" (discretized at the given resolution), "atoms" (a fixed
    atom list, unaffected by refinement), and "combo" (a singular atom part
    plus a density part, split by atom_fraction).
    """
    kind = spec.get("kind")
    mass = float(spec.get("mass", 1.0))
    if kind == "density":
        return discretize_density(
            density_from_spec(spec.get("density", {})), spec["box"], resolution, mass
        )
    if kind == "atoms":
        positions = np.asarray(spec["positions"], dtype=float)
        if positions.ndim == 1:
            positions = positions[:, None]
        weights = np.asarray(spec["weights"], dtype=float)
        scale = mass / weights.sum()
        return DiscreteMeasure(positions, weights * scale)
    if kind == "combo":
        p = float(spec.get("atom_fraction", 0.5))
        if not 0.0 < p < 1.0:
            raise ValueError("atom_fraction must lie strictly between 0 and 1")
        atoms = measure_from_spec({**spec["atoms"], "kind": "atoms", "mass": p * mass},
                                  resolution)
        dens = measure_from_spec(
            {**spec["density_part"], "kind": "density", "mass": (1.0 - p) * mass},
            resolution,
        )
        return DiscreteMeasure(
            np.vstack([atoms.positions, dens.positions]),
            np.concatenate([atoms.weights, dens.weights]),
        )
    raise ValueError(f"unknown measure spec kind {kind!r}")
