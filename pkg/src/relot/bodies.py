"""Convex bodies represented through their gauge (Minkowski functional).

A body is the sublevel set {v : g(v) <= 1} of a positively homogeneous,
subadditive functional g with g(0) = 0.  Everything downstream (membership,
shrunken copies, boundary detection, radial projection) reduces to gauge
comparisons, so the gauge is the only geometric primitive stored here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch

# Membership tolerance: v counts as inside when g(v) <= 1 + GAUGE_TOL.
GAUGE_TOL = 1e-9
# Looser tolerance for classification entry points that require |g(v) - 1| small.
BOUNDARY_CLASS_TOL = 1e-6


@dataclass(frozen=True)
class ConvexBody:
    """A closed bounded convex set containing the origin in its interior.

    ``inner_radius`` (A) and ``outer_radius`` (B) sandwich the body between
    Euclidean balls: A * g(v) <= |v| <= B * g(v) for every v.
    """

    dimension: int
    kind: str
    inner_radius: float
    outer_radius: float
    _gauge_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if not 0.0 < self.inner_radius <= self.outer_radius:
            raise ValueError(
                f"need 0 < inner_radius <= outer_radius, got "
                f"{self.inner_radius}, {self.outer_radius}"
            )

    def _check_dim(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1:] != (self.dimension,):
            raise DimensionMismatch(
                f"expected vectors of dimension {self.dimension}, got shape {v.shape}"
            )
        return v

    def gauge(self, v) -> float | np.ndarray:
        """Evaluate g(v); accepts a single vector or an (..., d) array."""
        v = self._check_dim(v)
        g = self._gauge_fn(v)
        if v.ndim == 1:
            return float(g)
        return np.asarray(g, dtype=float)

    def contains(self, v, tol: float = GAUGE_TOL) -> bool | np.ndarray:
        """Membership test g(v) <= 1 + tol."""
        g = self.gauge(v)
        if np.ndim(g) == 0:
            return bool(g <= 1.0 + tol)
        return g <= 1.0 + tol

    def on_boundary(self, v, tol: float = BOUNDARY_CLASS_TOL) -> bool:
        return bool(abs(self.gauge(v) - 1.0) <= tol)

    def to_boundary(self, v) -> np.ndarray:
        """Radial projection v / g(v) onto the boundary; v must be nonzero."""
        v = self._check_dim(v)
        g = float(self._gauge_fn(v))
        if g <= 0.0:
            raise ValueError("cannot project the origin to the boundary")
        return v / g

    def sample_boundary(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n boundary points, radial projections of Gaussian directions."""
        u = rng.standard_normal((n, self.dimension))
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        u = np.where(norms > 0, u / np.maximum(norms, 1e-300), 0.0)
        u[np.all(u == 0.0, axis=1)] = _e1(self.dimension)
        g = self._gauge_fn(u)
        return u / g[:, None]

    def sample_interior(self, rng: np.random.Generator, n: int,
                        max_gauge: float = 0.5) -> np.ndarray:
        """n interior points with gauge <= max_gauge (uniform over that copy)."""
        pts = self.sample_boundary(rng, n)
        radii = max_gauge * rng.random(n) ** (1.0 / self.dimension)
        return pts * radii[:, None]


def _e1(d: int) -> np.ndarray:
    e = np.zeros(d)
    e[0] = 1.0
    return e


def ball(dimension: int, radius: float = 1.0) -> ConvexBody:
    """Euclidean ball of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")

    def g(v):
        return np.linalg.norm(v, axis=-1) / radius

    return ConvexBody(dimension, "ball", radius, radius, g)


def box(halfwidths) -> ConvexBody:
    """Axis-aligned box prod_k [-a_k, a_k]; gauge is max_k |v_k| / a_k."""
    a = np.asarray(halfwidths, dtype=float)
    if a.ndim != 1 or np.any(a <= 0):
        raise ValueError("halfwidths must be a 1-d array of positive reals")

    def g(v):
        return np.max(np.abs(v) / a, axis=-1)

    return ConvexBody(len(a), "box", float(a.min()), float(np.linalg.norm(a)), g)


def ellipsoid(semi_axes) -> ConvexBody:
    """Ellipsoid sum_k (v_k / a_k)^2 <= 1."""
    a = np.asarray(semi_axes, dtype=float)
    if a.ndim != 1 or np.any(a <= 0):
        raise ValueError("semi_axes must be a 1-d array of positive reals")

    def g(v):
        return np.sqrt(np.sum((v / a) ** 2, axis=-1))

    return ConvexBody(len(a), "ellipsoid", float(a.min()), float(a.max()), g)


def custom(dimension: int, gauge_fn: Callable[[np.ndarray], np.ndarray],
           inner_radius: float, outer_radius: float) -> ConvexBody:
    """Wrap a user gauge; radii bounds are the caller's responsibility."""
    return ConvexBody(dimension, "custom", inner_radius, outer_radius, gauge_fn)


def body_from_spec(spec: dict) -> ConvexBody:
    """Build a body from a JSON-style {kind, dimension, parameters} mapping."""
    kind = spec.get("kind")
    d = int(spec.get("dimension", 0))
    params = spec.get("parameters", {})
    if kind == "ball":
        return ball(d, float(params.get("radius", 1.0)))
    if kind == "box":
        return box(params.get("halfwidths", [1.0] * d))
    if kind == "ellipsoid":
        return ellipsoid(params.get("semi_axes", [1.0] * d))
    raise ValueError(f"unknown body kind {kind!r}")
