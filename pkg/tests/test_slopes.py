import math

import numpy as np
import pytest

from relot import (brenier, default_schedule, directional_slope, finite_slope_demo,
                   is_highly_relativistic, is_theta_direction, quadratic_ball)
from relot.errors import NotInternalDirection, NotOnBoundary
from relot.slopes import interior_direction_at

E1 = np.array([1.0, 0.0])


def test_brenier_boundary_slope_diverges():
    cls = directional_slope(brenier(2), E1, -E1)
    assert cls.confidence == "diverging"
    assert not cls.slope.is_finite
    # quotient oracle: (h((1-eps) e1) - 1)/eps = -sqrt(2 eps - eps^2)/eps
    expected = -np.sqrt(2.0 * cls.epsilons - cls.epsilons**2) / cls.epsilons
    assert np.allclose(cls.quotients, expected, rtol=1e-6)


def test_quadratic_boundary_slope_is_minus_two():
    cls = directional_slope(quadratic_ball(2), E1, -E1)
    assert cls.confidence == "converged"
    assert cls.slope.value == pytest.approx(-2.0, abs=1e-4)


def test_brenier_slope_at_origin_is_zero():
    cls = directional_slope(brenier(2), np.zeros(2), E1)
    assert cls.confidence == "converged"
    assert cls.slope.value == pytest.approx(0.0, abs=1e-4)


@pytest.mark.parametrize("model", [brenier(2), quadratic_ball(2), finite_slope_demo(2)],
                         ids=["brenier", "quadratic_ball", "finite_slope_demo"])
def test_quotients_monotone_nonincreasing(model):
    rng = np.random.default_rng(5)
    pts = np.vstack([
        model.body.sample_boundary(rng, 20),
        model.body.sample_interior(rng, 20, max_gauge=0.8),
    ])
    for P in pts:
        v = interior_direction_at(model.body, P, rng)
        cls = directional_slope(model, P, v)
        steps = np.diff(cls.quotients)
        assert np.all(steps <= 1e-9 * (1.0 + np.abs(cls.quotients[:-1])))


def test_schedule_validation():
    m = brenier(2)
    with pytest.raises(ValueError):
        directional_slope(m, np.zeros(2), E1, schedule=np.array([]))
    with pytest.raises(ValueError):
        directional_slope(m, np.zeros(2), E1, schedule=np.array([1e-3, 1e-2]))
    with pytest.raises(ValueError):
        directional_slope(m, np.zeros(2), E1, schedule=np.array([1e-2, -1e-3]))


def test_non_unit_direction_rejected():
    with pytest.raises(ValueError):
        directional_slope(brenier(2), np.zeros(2), np.array([2.0, 0.0]))


def test_tangent_direction_is_not_internal():
    with pytest.raises(NotInternalDirection):
        directional_slope(brenier(2), E1, np.array([0.0, 1.0]))
    with pytest.raises(NotInternalDirection):
        directional_slope(brenier(2), E1, E1)  # outward


def test_default_schedule_shape():
    eps = default_schedule()
    assert eps[0] == 1e-2
    assert np.all(np.diff(eps) < 0)
    assert eps[-1] == pytest.approx(1e-2 * 2.0**-18)


def test_theta_direction_classification():
    rng = np.random.default_rng(17)
    for v in brenier(2).body.sample_boundary(rng, 10):
        verdict, cls = is_theta_direction(brenier(2), v)
        assert verdict is True and cls.confidence == "diverging"
    verdict, cls = is_theta_direction(quadratic_ball(2), E1)
    assert verdict is False and cls.confidence == "converged"
    demo = finite_slope_demo(2)
    bpt = demo.body.sample_boundary(rng, 1)[0]
    verdict, _ = is_theta_direction(demo, bpt)
    assert verdict is False


def test_theta_direction_requires_boundary_point():
    with pytest.raises(NotOnBoundary):
        is_theta_direction(brenier(2), np.array([0.5, 0.0]))


def test_highly_relativistic_reports():
    rep = is_highly_relativistic(brenier(2), 64, seed=4)
    assert rep.verdict and rep.finite_count == 0 and rep.inconclusive_count == 0

    rep_q = is_highly_relativistic(quadratic_ball(2), 64, seed=4)
    assert not rep_q.verdict
    assert rep_q.finite_count == 64 and rep_q.inconclusive_count == 0

    rep_d = is_highly_relativistic(finite_slope_demo(2), 64, seed=4)
    assert not rep_d.verdict and rep_d.finite_count == 64
    assert len(rep_d.exceptions) == 64

    with pytest.raises(ValueError):
        is_highly_relativistic(brenier(2), 0)


@pytest.mark.parametrize("model", [brenier(2), quadratic_ball(2), finite_slope_demo(2)],
                         ids=["brenier", "quadratic_ball", "finite_slope_demo"])
def test_realness_dichotomy_at_sampled_boundary_points(model):
    """Per boundary point, classifications are unanimous across directions."""
    rng = np.random.default_rng(29)
    for P in model.body.sample_boundary(rng, 5):
        labels = set()
        for _ in range(100):
            v = interior_direction_at(model.body, P, rng)
            labels.add(directional_slope(model, P, v).confidence)
        assert labels == {"diverging"} or labels == {"converged"}


def test_slope_continuous_in_direction_where_finite():
    """|D_v h - D_v' h| shrinks as v' -> v (finite regime)."""
    model = quadratic_ball(2)
    P = E1
    v = np.array([-1.0, 0.0])
    base = directional_slope(model, P, v).slope.value
    tangent = np.array([0.0, 1.0])
    gaps = []
    for k in range(1, 7):
        w = v + 2.0**-k * tangent
        w = w / np.linalg.norm(w)
        gaps.append(abs(directional_slope(model, P, w).slope.value - base))
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_interior_point_slopes_always_converge():
    model = brenier(2)
    rng = np.random.default_rng(13)
    pts = model.body.sample_interior(rng, 30, max_gauge=0.7)
    for P in pts:
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        cls = directional_slope(model, P, u)
        assert cls.confidence == "converged"
        # gradient of 1 - sqrt(1 - |z|^2) is z / sqrt(1 - |z|^2)
        grad = P / math.sqrt(max(1e-12, 1.0 - float(P @ P)))
        assert cls.slope.value == pytest.approx(float(grad @ u), abs=1e-4)
