import numpy as np
import pytest

from relot import (Cost, box, brenier, cost, cost_family, cost_model_from_spec,
                   custom_cost, finite_slope_demo, quadratic_ball)
from relot.bodies import GAUGE_TOL
from relot.costs import displacement_costs
from relot.errors import InvalidTime

MODELS = {
    "brenier": brenier(2),
    "quadratic_ball": quadratic_ball(2),
    "finite_slope_demo": finite_slope_demo(2),
}

# lower bound on the midpoint convexity gap, as a multiple of |u - v|^2
STRICTNESS_MARGIN = {
    "brenier": 1.0 / 16.0,
    "quadratic_ball": 1.0 / 8.0,
    "finite_slope_demo": 1.0 / 8.0,
}


@pytest.mark.parametrize("model", MODELS.values(), ids=MODELS.keys())
def test_h_vanishes_at_origin(model):
    assert cost(model, 1.0, [0.3, -0.2], [0.3, -0.2]) == Cost.finite(0.0)


def test_brenier_matches_closed_form():
    m = brenier(2)
    got = cost(m, 1.0, [0.0, 0.0], [0.6, 0.0])
    assert got.is_finite and got.value == pytest.approx(0.2, abs=1e-12)
    assert cost(m, 1.0, [0.0, 0.0], [1.5, 0.0]) is Cost.INF
    # rescaling by t: |y| = 1.2 at t = 2 lands at z = 0.6 again
    rescaled = cost(m, 2.0, [0.0, 0.0], [1.2, 0.0])
    assert rescaled.value == pytest.approx(0.2, abs=1e-12)


def test_nonpositive_time_rejected():
    with pytest.raises(InvalidTime):
        cost(brenier(1), 0.0, [0.0], [0.1])
    with pytest.raises(InvalidTime):
        cost(brenier(1), -2.0, [0.0], [0.1])


@pytest.mark.parametrize("model", MODELS.values(), ids=MODELS.keys())
def test_extended_real_discipline(model):
    """Infinite exactly when the displacement leaves the body (never a sentinel)."""
    rng = np.random.default_rng(23)
    dirs = model.body.sample_boundary(rng, 2500)
    scales = rng.uniform(0.3, 1.7, size=2500)
    ts = rng.uniform(0.5, 2.0, size=2500)
    for u, s, t in zip(dirs, scales, ts):
        y = s * u
        value = cost(model, t, np.zeros(2), y)
        outside = model.body.gauge(y / t) > 1.0 + GAUGE_TOL
        assert value.is_finite == (not outside)
        if value.is_finite:
            assert 0.0 <= value.value <= model.h_sup + 1e-12


@pytest.mark.parametrize("name", MODELS.keys())
def test_midpoint_convexity_with_strict_margin(name):
    model = MODELS[name]
    rng = np.random.default_rng(41)
    pts = model.body.sample_interior(rng, 400, max_gauge=0.9)
    u, v = pts[:200], pts[200:]
    hu = model.h_inside(u)
    hv = model.h_inside(v)
    hm = model.h_inside((u + v) / 2.0)
    gap = (hu + hv) / 2.0 - hm
    assert np.all(gap >= -1e-9)  # midpoint convexity
    sep = np.sum((u - v) ** 2, axis=1)
    margin = STRICTNESS_MARGIN[name]
    keep = sep > 1e-4
    assert np.all(gap[keep] >= margin * sep[keep] - 1e-12)


@pytest.mark.parametrize("model", MODELS.values(), ids=MODELS.keys())
def test_h_sup_bounds_h_on_the_body(model):
    rng = np.random.default_rng(9)
    pts = model.body.sample_boundary(rng, 256)
    for s in (1.0, 0.75, 0.5, 0.25):
        vals = model.h_inside(pts * s)
        assert np.all(vals <= model.h_sup + 1e-12)
        assert np.all(vals >= 0.0)
    assert model.h_sup == 1.0


def test_displacement_costs_mark_infinite_as_inf():
    m = brenier(1)
    z = np.array([[0.0], [0.5], [1.5]])
    vals = displacement_costs(m, z)
    assert vals[0] == 0.0
    assert vals[1] == pytest.approx(1.0 - np.sqrt(0.75))
    assert np.isinf(vals[2])


def test_cost_family_lookup():
    assert cost_family("brenier", 3).family == "brenier"
    assert cost_family("quadratic_ball", 1).body.kind == "ball"
    with pytest.raises(ValueError):
        cost_family("entropic", 2)


def test_custom_cost_spec_forms():
    spec = {
        "family": "custom",
        "dimension": 2,
        "parameters": {
            "body": {"kind": "box", "dimension": 2, "parameters": {"halfwidths": [1.0, 1.0]}},
            "h": {"form": "gauge_power", "exponent": 2.0},
        },
    }
    m = cost_model_from_spec(spec)
    assert cost(m, 1.0, [0.0, 0.0], [0.5, -1.0]).value == pytest.approx(1.0)

    cap = cost_model_from_spec({
        "family": "custom",
        "dimension": 2,
        "parameters": {
            "body": {"kind": "ellipsoid", "dimension": 2, "parameters": {"semi_axes": [1.0, 0.5]}},
            "h": {"form": "sqrt_cap"},
        },
    })
    assert cap.h(np.array([0.0, 0.0])).value == 0.0
    assert cap.h(np.array([0.8, 0.0])).value == pytest.approx(0.4)
    assert not cap.h(np.array([1.2, 0.0])).is_finite


def test_custom_cost_h_sup_sampled():
    body = box([1.0, 1.0])
    m = custom_cost(body, lambda z: 3.0 * np.asarray(body.gauge(z)))
    assert m.h_sup == pytest.approx(3.0, rel=1e-6)


def test_nonzero_h_at_origin_rejected():
    with pytest.raises(ValueError):
        custom_cost(box([1.0]), lambda z: np.asarray(box([1.0]).gauge(z)) + 1.0)
