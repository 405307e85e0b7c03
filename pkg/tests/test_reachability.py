import numpy as np
import pytest

from maxprop import (DriftField, ReachConfig, TrajectorySpec, arrival_time,
                     build_example, build_scenario, integrate_trajectory,
                     is_controllable, reach_step, reachable_set)
from maxprop.grids import Domain
from maxprop.reachability import ReachabilityError
from conftest import two_speed_config


# ----------------------------------------------------------- trajectories

def test_unit_speed_trajectory():
    spec = TrajectorySpec(start=(0.0,), velocity_schedule=[(0.5, (1.0,))], dt=0.01)
    path = integrate_trajectory(spec, DriftField.velocity_identity())
    assert path.points[-1][0] == pytest.approx(0.5, abs=1e-12)
    assert path.times[-1] == pytest.approx(0.5)


def test_axis_segments_reach_target_in_taxicab_time():
    x = np.array([0.2, 0.3])
    y = np.array([0.8, 0.9])
    legs = [(abs(y[0] - x[0]), (np.sign(y[0] - x[0]), 0.0)),
            (abs(y[1] - x[1]), (0.0, np.sign(y[1] - x[1])))]
    spec = TrajectorySpec(start=tuple(x), velocity_schedule=legs, dt=0.01)
    path = integrate_trajectory(spec, DriftField.velocity_identity())
    assert np.allclose(path.points[-1], y, atol=1e-12)
    assert path.times[-1] == pytest.approx(np.abs(y - x).sum())


def test_constant_winding_on_torus():
    gamma = np.sqrt(2.0) - 1.0
    drift = DriftField.constant_vector([1.0, gamma])
    spec = TrajectorySpec(start=(0.0, 0.0), velocity_schedule=[(3.0, (0.0, 0.0))], dt=0.05)
    dom = Domain.box([0.0, 0.0], [1.0, 1.0], [8, 8], [True, True])
    path = integrate_trajectory(spec, drift, dom)
    wrapped = dom.wrap(path.points)
    expect = np.stack([path.times % 1.0, (gamma * path.times) % 1.0], axis=1)
    assert np.allclose(wrapped, expect, atol=1e-10)


def test_segment_exactness_rk4_constant_drift():
    spec = TrajectorySpec(start=(0.25,), velocity_schedule=[(1.0, (0.7,))], dt=0.013)
    path = integrate_trajectory(spec, DriftField.velocity_identity())
    exact = 0.25 + 0.7 * path.times
    assert np.max(np.abs(path.points[:, 0] - exact)) < 1e-12


def test_exit_time_recorded_not_raised():
    dom = Domain.interval(-1.0, 1.0, 9)
    spec = TrajectorySpec(start=(0.5,), velocity_schedule=[(1.0, (1.0,))], dt=0.01)
    path = integrate_trajectory(spec, DriftField.velocity_identity(), dom)
    assert path.exit_time == pytest.approx(0.5, abs=0.02)


def test_trajectory_spec_validation():
    with pytest.raises(ReachabilityError):
        TrajectorySpec(start=(0.0,), velocity_schedule=[(-1.0, (1.0,))])
    with pytest.raises(ReachabilityError):
        TrajectorySpec(start=(0.0,), velocity_schedule=[(1.0, (1.0,))],
                       control_schedule=[(0.2, (0.0,))])
    with pytest.raises(ReachabilityError):
        TrajectorySpec(start=(0.0,), velocity_schedule=[(1.0, (1.0,))], dt=0.0)


# --------------------------------------------------------------- reach_step

@pytest.fixture
def interval_scenario():
    config = two_speed_config(periodic=False)
    config["domain_x"] = {"lower": (-1.0,), "upper": (1.0,), "resolution": (33,)}
    return build_scenario(config)


def test_reach_step_two_speeds_covers_interval(interval_scenario):
    s = interval_scenario
    mask = np.zeros(s.domain_x.shape, dtype=bool)
    mask[16] = True  # x = 0
    out = reach_step(mask, s, t_step=2.5)
    assert out.all()


def test_reach_step_rightward_only():
    s = build_example("2.5", nx=65)
    mask = np.zeros(s.domain_x.shape, dtype=bool)
    mask[32] = True  # x = 0
    out = reach_step(mask, s)
    xs = s.domain_x.axes[0]
    assert out[xs >= -1e-12].all()
    assert not out[xs < -s.domain_x.spacing[0] / 2].any()


def test_reach_step_zero_drift_is_identity():
    config = two_speed_config()
    config["drift"] = {"kind": "constant-vector", "vector": (0.0,)}
    s = build_scenario(config)
    mask = np.zeros(s.domain_x.shape, dtype=bool)
    mask[3] = True
    out = reach_step(mask, s, t_step=1.0)
    assert np.array_equal(out, mask)


def test_reach_step_empty_mask_errors(interval_scenario):
    with pytest.raises(ReachabilityError):
        reach_step(np.zeros(interval_scenario.domain_x.shape, bool), interval_scenario)


def test_reach_step_includes_input(interval_scenario):
    mask = np.zeros(interval_scenario.domain_x.shape, dtype=bool)
    mask[5] = True
    out = reach_step(mask, interval_scenario, t_step=0.01)
    assert out[5]


# ------------------------------------------------------------ reachable_set

def test_masks_are_nested(interval_scenario):
    seeds = np.zeros(interval_scenario.domain_x.shape, bool)
    seeds[16] = True
    rep = reachable_set(seeds, interval_scenario, ReachConfig(t_step=0.3))
    for a, b in zip(rep.masks[:-1], rep.masks[1:]):
        assert np.all(b[a])  # a subset of b
    assert rep.arrival[16] == 0.0
    assert rep.converged


def test_square_lattice_cover_and_taxicab_times(rng):
    s = build_example("2.2", nx=40)
    dom = s.domain_x
    for _ in range(4):
        x = rng.uniform(0.1, 0.9, size=2)
        y = rng.uniform(0.1, 0.9, size=2)
        seeds = np.zeros(dom.shape, bool)
        seeds[dom.nearest_index(x)] = True
        rep = reachable_set(seeds, s)
        assert rep.covers_grid
        t = arrival_time(rep, dom, y)
        xg = dom.point(dom.nearest_index(x))
        yg = dom.point(dom.nearest_index(y))
        expected = np.abs(yg - xg).sum()
        cell = np.sqrt(sum(h * h for h in dom.spacing))
        assert abs(t - expected) <= 2 * cell


def test_one_sided_scenario_fixed_point():
    s = build_example("2.5")
    dom = s.domain_x
    seeds = np.zeros(dom.shape, bool)
    seeds[dom.nearest_index([0.0])] = True
    rep = reachable_set(seeds, s)
    xs = dom.axes[0]
    x0 = dom.point(dom.nearest_index([0.0]))[0]
    assert rep.converged
    assert rep.final_mask[xs >= x0 - 1e-12].all()
    assert not rep.final_mask[xs < x0 - dom.spacing[0]].any()
    assert not rep.covers_grid


def test_mirror_symmetry_two_speeds(interval_scenario):
    s = interval_scenario
    dom = s.domain_x
    left = np.zeros(dom.shape, bool)
    left[8] = True   # x = -0.5
    right = np.zeros(dom.shape, bool)
    right[24] = True  # x = +0.5
    rep_l = reachable_set(left, s)
    rep_r = reachable_set(right, s)
    assert np.array_equal(rep_l.final_mask, rep_r.final_mask[::-1])
    assert np.allclose(rep_l.arrival, rep_r.arrival[::-1], equal_nan=True)


def test_seed_shape_and_emptiness_checks(interval_scenario):
    with pytest.raises(ReachabilityError):
        reachable_set(np.zeros((5,), bool), interval_scenario)
    with pytest.raises(ReachabilityError):
        reachable_set(np.zeros(interval_scenario.domain_x.shape, bool),
                      interval_scenario)


def test_arrival_nonincreasing_under_seed_refinement(interval_scenario):
    s = interval_scenario
    small = np.zeros(s.domain_x.shape, bool)
    small[16] = True
    bigger = small.copy()
    bigger[4] = True
    rep_small = reachable_set(small, s)
    rep_big = reachable_set(bigger, s)
    finite = np.isfinite(rep_small.arrival)
    assert np.all(rep_big.arrival[finite] <= rep_small.arrival[finite] + 1e-12)
    assert np.all(rep_small.final_mask <= rep_big.final_mask)


def test_budget_limits_layers(interval_scenario):
    seeds = np.zeros(interval_scenario.domain_x.shape, bool)
    seeds[16] = True
    rep = reachable_set(seeds, interval_scenario,
                        ReachConfig(t_step=0.25, total_horizon=0.5))
    assert len(rep.masks) - 1 <= 2
    assert np.nanmax(np.where(np.isfinite(rep.arrival), rep.arrival, np.nan)) \
        <= 0.5 + 1e-9


# --------------------------------------------------------- is_controllable

def test_controllable_examples():
    assert is_controllable(build_example("2.1")).controllable
    assert is_controllable(build_example("2.2", nx=40)).controllable
    assert is_controllable(build_example("2.3", nx=32)).controllable


def test_uncontrollable_with_witness():
    res = is_controllable(build_example("2.5"))
    assert not res.controllable
    assert res.witness is not None
    x_pt, y_pt = res.witness
    assert y_pt[0] < x_pt[0]  # cannot move left


def test_probe_strategy_agrees_on_small_grids():
    s1 = build_example("2.1", nx=17)
    assert is_controllable(s1, strategy="probe").controllable
    s5 = build_example("2.5", nx=17)
    res = is_controllable(s5, strategy="probe")
    assert not res.controllable


def test_ergodic_winding_dense():
    s = build_example("2.6", nx=64)
    entry_cfg = ReachConfig(t_step=200.0, total_horizon=200.0)
    dom = s.domain_x
    seeds = np.zeros(dom.shape, bool)
    seeds[dom.nearest_index([0.3, 0.7])] = True
    rep = reachable_set(seeds, s, entry_cfg)
    pts = dom.all_points()
    reached = pts[rep.final_mask.reshape(-1)]
    # torus distance from every node to the reached set
    gaps = []
    for p in pts:
        d = np.abs(reached - p)
        d = np.minimum(d, 1.0 - d)
        gaps.append(np.min(np.hypot(d[:, 0], d[:, 1])))
    assert max(gaps) <= 0.05
