"""Cost models c_t(x, y) = h((y - x) / t) for a convex h finite on a body.

h is strictly convex and bounded on the body, +inf outside it, and h(0) = 0.
The public entry points return tagged ``Cost`` values; array-level helpers
used by the solver return float arrays with ``np.inf`` markers and are kept
module-internal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bodies import GAUGE_TOL, ConvexBody, ball, body_from_spec, ellipsoid
from .errors import InvalidTime
from .values import Cost

FAMILIES = ("brenier", "quadratic_ball", "finite_slope_demo", "custom")


@dataclass(frozen=True)
class CostModel:
    """The pair (body, h) plus the sup of h over the body."""

    body: ConvexBody
    family: str
    h_sup: float
    _h_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self):
        origin = np.zeros(self.body.dimension)
        h0 = float(self._h_fn(origin))
        if abs(h0) > 1e-12:
            raise ValueError(f"h(0) must be 0, got {h0}")

    @property
    def dimension(self) -> int:
        return self.body.dimension

    def h(self, z) -> Cost:
        """Evaluate h at a single displacement, as a tagged extended real."""
        z = np.asarray(z, dtype=float)
        if self.body.gauge(z) > 1.0 + GAUGE_TOL:
            return Cost.INF
        return Cost.finite(max(0.0, float(self._h_fn(z))))

    def h_inside(self, z) -> float | np.ndarray:
        """Raw h on points already known to satisfy g(z) <= 1 + tol."""
        z = np.asarray(z, dtype=float)
        vals = np.maximum(self._h_fn(z), 0.0)
        if z.ndim == 1:
            return float(vals)
        return vals


def cost(model: CostModel, t: float, x, y) -> Cost:
    """c_t(x, y) = h((y - x) / t); infinite exactly when (y - x)/t leaves the body."""
    if t <= 0:
        raise InvalidTime(f"time must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return model.h((y - x) / t)


def displacement_costs(model: CostModel, z: np.ndarray) -> np.ndarray:
    """Array h(z) with np.inf outside the body (solver plumbing, not public API)."""
    z = np.asarray(z, dtype=float)
    g = model.body.gauge(z)
    out = np.full(np.shape(g), np.inf)
    mask = np.asarray(g <= 1.0 + GAUGE_TOL)
    if out.ndim == 0:
        return np.where(mask, max(0.0, float(model._h_fn(z))), np.inf)
    if np.any(mask):
        out[mask] = np.maximum(model._h_fn(z[mask]), 0.0)
    return out


def brenier(dimension: int) -> CostModel:
    """The relativistic heat cost h(z) = 1 - sqrt(1 - |z|^2) on the unit ball."""
    body = ball(dimension)

    def h(z):
        sq = 1.0 - np.sum(np.asarray(z, dtype=float) ** 2, axis=-1)
        return 1.0 - np.sqrt(np.maximum(sq, 0.0))

    return CostModel(body, "brenier", 1.0, h)


def quadratic_ball(dimension: int) -> CostModel:
    """h(z) = |z|^2 on the unit ball; finite slope everywhere on the boundary."""
    body = ball(dimension)

    def h(z):
        return np.sum(np.asarray(z, dtype=float) ** 2, axis=-1)

    return CostModel(body, "quadratic_ball", 1.0, h)


def finite_slope_demo(dimension: int, body: ConvexBody | None = None) -> CostModel:
    """h(z) = g(z)^2 on a chosen body: relativistic but not highly relativistic."""
    if body is None:
        axes = [1.0 if k % 2 == 0 else 0.8 for k in range(dimension)]
        body = ellipsoid(axes)

    def h(z):
        return np.asarray(body.gauge(np.asarray(z, dtype=float))) ** 2

    return CostModel(body, "finite_slope_demo", 1.0, h)


def custom_cost(body: ConvexBody, h_fn: Callable[[np.ndarray], np.ndarray],
                h_sup: float | None = None) -> CostModel:
    """Wrap a user h; h_sup is estimated by boundary/interior sampling if absent."""
    if h_sup is None:
        rng = np.random.default_rng(0)
        pts = body.sample_boundary(rng, 512)
        scales = np.linspace(0.0, 1.0, 9)[1:]
        samples = [np.asarray(h_fn(pts * s)) for s in scales]
        h_sup = float(max(np.max(s) for s in samples))
    return CostModel(body, "custom", float(h_sup), h_fn)


def cost_family(name: str, dimension: int, **params) -> CostModel:
    """Look up a built-in family by name."""
    if name == "brenier":
        return brenier(dimension)
    if name == "quadratic_ball":
        return quadratic_ball(dimension)
    if name == "finite_slope_demo":
        body = params.get("body")
        if isinstance(body, dict):
            body = body_from_spec(body)
        return finite_slope_demo(dimension, body)
    raise ValueError(f"unknown cost family {name!r}")


def cost_model_from_spec(spec: dict) -> CostModel:
    """Build a cost model from a JSON-style {family, dimension, parameters} mapping.

    Custom costs support two named forms:
      - {"form": "gauge_power", "exponent": p}: h(z) = g(z)^p,
      - {"form": "sqrt_cap"}: h(z) = 1 - sqrt(1 - g(z)^2),
    both over a body given as a nested body spec.
    """
    family = spec.get("family") or spec.get("kind")
    d = int(spec.get("dimension", 0))
    params = spec.get("parameters", {})
    if family in ("brenier", "quadratic_ball", "finite_slope_demo"):
        return cost_family(family, d, **params)
    if family == "custom":
        body = body_from_spec(params["body"])
        form = params.get("h", {})
        name = form.get("form")
        if name == "gauge_power":
            p = float(form.get("exponent", 2.0))

            def h(z):
                return np.asarray(body.gauge(np.asarray(z, dtype=float))) ** p

            return CostModel(body, "custom", 1.0, h)
        if name == "sqrt_cap":

            def h(z):
                g2 = np.asarray(body.gauge(np.asarray(z, dtype=float))) ** 2
                return 1.0 - np.sqrt(np.maximum(1.0 - g2, 0.0))

            return CostModel(body, "custom", 1.0, h)
        raise ValueError(f"unknown custom h form {name!r}")
    raise ValueError(f"unknown cost family {family!r}")
