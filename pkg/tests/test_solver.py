import math

import numpy as np
import pytest

from relot import (Cost, DiscreteMeasure, OTInstance, brenier, quadratic_ball,
                   check_complementary_slackness, cost_curve, critical_time,
                   dirac, feasible, solve, theta_mass)
from relot.errors import (DimensionMismatch, InfeasibleResult, InvalidTime,
                          MarginalMismatch)

from oracles import (bottleneck_by_enumeration, brenier_h, brute_force_value,
                     random_uniform_instance, random_weighted_instance)


def bottleneck_instance() -> OTInstance:
    """mu = (d_0 + d_1)/2, nu = (d_1 + d_3)/2 on the segment [-1, 1]."""
    mu = DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))
    nu = DiscreteMeasure(np.array([[1.0], [3.0]]), np.array([0.5, 0.5]))
    return OTInstance(mu, nu, brenier(1))


def test_instance_validation():
    with pytest.raises(MarginalMismatch):
        OTInstance(dirac([0.0], 1.0), dirac([1.0], 0.5), brenier(1))
    with pytest.raises(DimensionMismatch):
        OTInstance(dirac([0.0], 1.0), dirac([1.0], 1.0), brenier(2))


def test_feasible_single_pair():
    inst = OTInstance(dirac([0.0, 0.0]), dirac([2.0, 0.0]), brenier(2))
    assert not feasible(inst, 1.0)
    assert feasible(inst, 2.0)  # gauge exactly 1 stays inside the closed body
    with pytest.raises(InvalidTime):
        feasible(inst, 0.0)


def test_feasible_bottleneck_matching_argument():
    # both perfect matchings contain a step of length >= 2, so t = 1.5 fails
    inst = bottleneck_instance()
    assert not feasible(inst, 1.5)
    assert feasible(inst, 2.0)


def test_critical_time_single_pair_is_gauge():
    inst = OTInstance(dirac([0.0, 0.0]), dirac([2.0, 0.0]), brenier(2))
    assert critical_time(inst) == 2.0


def test_critical_time_bottleneck_exact():
    assert critical_time(bottleneck_instance()) == 2.0


def test_critical_time_zero_for_identical_measures():
    mu = DiscreteMeasure(np.array([[0.0], [0.5]]), np.array([0.4, 0.6]))
    inst = OTInstance(mu, mu, brenier(1))
    assert critical_time(inst) == 0.0
    curve = cost_curve(inst, 0.5, 2.0, 4)
    assert all(s.feasible and s.value.value == 0.0 for s in curve.samples)


def test_critical_time_matches_bottleneck_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        inst, _ = random_uniform_instance(rng, int(rng.integers(1, 3)))
        T = critical_time(inst)
        assert T == pytest.approx(bottleneck_by_enumeration(inst), abs=0.0)
        assert feasible(inst, T)
        assert not feasible(inst, T * (1.0 - 1e-6))


def test_solve_bottleneck_value_closed_form():
    res = solve(bottleneck_instance(), 2.0)
    want = 0.5 * brenier_h(0.5) + 0.5 * brenier_h(1.0)
    assert res.value.value == pytest.approx(want, rel=1e-12)
    assert check_complementary_slackness(bottleneck_instance(), res) == []
    # only one matching is feasible at t = 2
    assert res.plan.to_dense() == pytest.approx(np.diag([0.5, 0.5]))


def test_solve_infeasible_below_critical_time():
    res = solve(bottleneck_instance(), 1.9)
    assert res.value is Cost.INF
    assert res.plan is None and res.potentials is None
    with pytest.raises(InfeasibleResult):
        theta_mass(res, brenier(1))
    with pytest.raises(InfeasibleResult):
        check_complementary_slackness(bottleneck_instance(), res)


def test_solve_matches_permutation_oracle_3x3():
    rng = np.random.default_rng(99)
    for _ in range(10):
        mu = DiscreteMeasure(rng.uniform(0, 1, (3, 2)), np.full(3, 1 / 3))
        nu = DiscreteMeasure(rng.uniform(0.5, 1.5, (3, 2)), np.full(3, 1 / 3))
        inst = OTInstance(mu, nu, brenier(2))
        t = float(rng.uniform(0.5, 2.5))
        res = solve(inst, t)
        want = brute_force_value(inst, t)
        if math.isinf(want):
            assert not res.value.is_finite
        else:
            assert res.value.value == pytest.approx(want, abs=1e-9)


def test_value_decreases_toward_zero_for_large_t():
    inst = bottleneck_instance()
    values = [solve(inst, t).value.value for t in (2.0, 4.0, 8.0, 16.0, 64.0)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3


def test_duality_certificate_on_weighted_instances():
    rng = np.random.default_rng(7)
    for _ in range(15):
        inst = random_weighted_instance(rng, 2)
        t = critical_time(inst) * float(rng.uniform(1.0, 1.6))
        res = solve(inst, t)
        assert res.value.is_finite
        assert check_complementary_slackness(inst, res) == []
        a = res.plan.row_sums()
        b = res.plan.col_sums()
        assert np.allclose(a, inst.mu.weights, rtol=1e-9)
        assert np.allclose(b, inst.nu.weights, rtol=1e-9)


def test_cost_curve_single_pair_closed_form():
    inst = OTInstance(dirac([0.0]), dirac([1.0]), brenier(1))
    curve = cost_curve(inst, 0.5, 4.0, 15)
    assert curve.critical_time == 1.0
    for s in curve.samples:
        if s.t < 1.0:
            assert not s.feasible and not s.value.is_finite
        else:
            assert s.feasible
            assert s.value.value == pytest.approx(brenier_h(1.0 / s.t), rel=1e-12)


def test_cost_curve_invariants_on_random_instances():
    rng = np.random.default_rng(5)
    for _ in range(5):
        inst, _ = random_uniform_instance(rng, 1)
        curve = cost_curve(inst, 0.3, 3.5, 25)
        T = curve.critical_time
        ts = [s.t for s in curve.samples]
        assert ts == sorted(ts)
        assert T in ts  # grid is augmented with the exact critical time
        feas_values = []
        for s in curve.samples:
            assert s.feasible == (s.t >= T)
            assert s.value.is_finite == s.feasible
            if s.feasible:
                feas_values.append(s.value.value)
        assert all(b <= a + 1e-9 for a, b in zip(feas_values, feas_values[1:]))
        # feasibility is closed at T: the sample just above T is finite too
        res_eps = solve(inst, T + 1e-6 * (3.5 - T))
        assert res_eps.value.is_finite


def test_cost_curve_grid_validation():
    inst = bottleneck_instance()
    with pytest.raises(ValueError):
        cost_curve(inst, 0.0, 2.0, 10)
    with pytest.raises(ValueError):
        cost_curve(inst, 2.0, 1.0, 10)
    with pytest.raises(ValueError):
        cost_curve(inst, 0.5, 2.0, 1)


def test_theta_mass_interior_plan_is_empty():
    inst = bottleneck_instance()
    res = solve(inst, 4.0)  # displacements at gauge <= 0.5
    tm = theta_mass(res, brenier(1), band=1e-3)
    assert tm.boundary_mass == 0.0 and tm.theta_mass == 0.0
    assert tm.entries == ()


def test_theta_mass_forced_boundary_pair():
    inst = OTInstance(dirac([0.0, 0.0]), dirac([1.0, 0.0]), brenier(2))
    tm = theta_mass(solve(inst, 1.0), brenier(2), band=1e-3)
    assert tm.boundary_mass == pytest.approx(1.0)
    assert tm.theta_mass == pytest.approx(1.0)
    assert tm.entries[0].verdict == "theta"

    inst_q = OTInstance(dirac([0.0, 0.0]), dirac([1.0, 0.0]), quadratic_ball(2))
    tm_q = theta_mass(solve(inst_q, 1.0), quadratic_ball(2), band=1e-3)
    assert tm_q.boundary_mass == pytest.approx(1.0)
    assert tm_q.theta_mass == 0.0
    assert tm_q.inconclusive_mass == 0.0
    assert tm_q.entries[0].verdict == "not_theta"


def test_feasibility_monotone_in_t():
    rng = np.random.default_rng(13)
    for _ in range(10):
        inst, _ = random_uniform_instance(rng, 2)
        times = np.sort(rng.uniform(0.2, 3.0, size=6))
        flags = [feasible(inst, float(t)) for t in times]
        assert flags == sorted(flags)  # False ... False True ... True


def test_solve_deterministic():
    rng = np.random.default_rng(21)
    inst = random_weighted_instance(rng, 2)
    t = critical_time(inst) * 1.2
    a = solve(inst, t)
    b = solve(inst, t)
    assert np.array_equal(a.plan.to_dense(), b.plan.to_dense())
    assert a.value.value == b.value.value
    assert np.array_equal(a.potentials[0], b.potentials[0])


def test_curve_threading_matches_sequential(monkeypatch):
    inst = bottleneck_instance()
    seq = cost_curve(inst, 1.0, 4.0, 12)
    monkeypatch.setenv("RELOT_THREADS", "4")
    par = cost_curve(inst, 1.0, 4.0, 12)
    assert seq.to_payload() == par.to_payload()
