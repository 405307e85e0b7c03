import numpy as np
import pytest

from maxprop import (GridFunction, build_example, build_scenario, grid_sample,
                     jump_sign_audit, subsolution_check, verify_smp)
from maxprop.smp import argmax_set, argmax_x_projection
from conftest import two_speed_config


# --------------------------------------------------------- subsolution_check

def test_counterexample_profile_is_subsolution():
    s = build_example("2.5")
    u = grid_sample("minimum(1, 1 + x0)", s.domain_x, s.domain_v)
    verdict = subsolution_check(u, s, tol=1e-12)
    assert verdict.holds
    assert verdict.worst_residual <= 1e-12


def test_constant_with_matching_source():
    s = build_scenario(two_speed_config(source="const:0.9", lam=1.0))
    u = GridFunction.constant(s.domain_x, s.domain_v, 0.9)
    verdict = subsolution_check(u, s, tol=1e-12)
    assert verdict.holds
    assert abs(verdict.worst_residual) < 1e-13


def test_decreasing_profile_fails_with_positive_speeds():
    # u = -x with positive speeds: residual is exactly v > 0 at every
    # interior node, so the sign test fails
    config = {
        "domain_x": {"lower": (-2.0,), "upper": (2.0,), "resolution": (33,)},
        "domain_v": {"lower": (0.0,), "upper": (1.0,), "resolution": (9,)},
        "measure": {"kind": "uniform-box", "lower": (0.0,), "upper": (1.0,),
                    "mass": 1.0, "nodes": 8},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 0.0, "source": "const:0", "boundary": "0 - x0"},
    }
    s = build_scenario(config)
    u = grid_sample("0 - x0", s.domain_x, s.domain_v)
    verdict = subsolution_check(u, s, tol=1e-9)
    assert not verdict.holds
    vs = s.domain_v.axes[0]
    assert verdict.worst_residual == pytest.approx(vs.max(), abs=1e-12)


def test_supersolution_sense():
    config = {
        "domain_x": {"lower": (-2.0,), "upper": (2.0,), "resolution": (33,)},
        "domain_v": {"lower": (0.0,), "upper": (1.0,), "resolution": (9,)},
        "measure": {"kind": "uniform-box", "lower": (0.0,), "upper": (1.0,),
                    "mass": 1.0, "nodes": 8},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 0.0, "source": "const:0", "boundary": "0 - x0"},
    }
    s = build_scenario(config)
    u = grid_sample("0 - x0", s.domain_x, s.domain_v)
    assert subsolution_check(u, s, tol=1e-9, sense="super").holds


# ----------------------------------------------------------------- argmax_set

def test_argmax_constant_everything(torus_two_speed):
    s = torus_two_speed
    u = GridFunction.constant(s.domain_x, s.domain_v, 1.5)
    m, nodes = argmax_set(u, s, "support")
    assert m == 1.5
    assert len(nodes) == s.domain_x.num_nodes * s.measure.num_nodes


def test_argmax_counterexample_right_half():
    s = build_example("2.5")
    u = grid_sample("minimum(1, 1 + x0)", s.domain_x, s.domain_v)
    mask = argmax_x_projection(u, s, "support", eps=1e-9)
    xs = s.domain_x.axes[0]
    assert np.array_equal(mask, xs >= -1e-12)


def test_argmax_single_bump(torus_two_speed):
    s = torus_two_speed
    values = np.zeros(s.domain_x.shape + s.domain_v.shape)
    values[7, 1] = 1.0
    u = GridFunction(s.domain_x, s.domain_v, values)
    m, nodes = argmax_set(u, s, "support", eps=0.5)
    assert m == 1.0
    assert nodes == [((7,), 1)]


# ------------------------------------------------------------------ verify_smp

def test_counterexample_full_report():
    s = build_example("2.5")
    u = grid_sample("minimum(1, 1 + x0)", s.domain_x, s.domain_v)
    rep = verify_smp(u, s, variant="interior", residual_tol=1e-12)
    assert rep.subsolution.holds
    assert rep.verdict == "violated"
    assert rep.controllable is False
    assert rep.propagation_consistent  # constant on the reachable half-line
    x_idx, _ = rep.violating_node
    assert s.domain_x.point(x_idx)[0] < 0
    # re-evaluating u at the named node confirms the gap (report soundness)
    assert rep.violating_value < rep.max_value - rep.eps


def test_constant_holds_on_controllable(torus_two_speed):
    s = torus_two_speed
    u = GridFunction.constant(s.domain_x, s.domain_v, 0.0)
    rep = verify_smp(u, s, variant="interior")
    assert rep.verdict == "holds"
    assert rep.controllable is True


def test_interior_bump_breaks_subsolution_contrapositive():
    # free-space scattering box: adding a strict interior bump to a constant
    # makes the sign test fail (no nonconstant subsolution peaks inside)
    s = build_example("2.4", nx=17, nv=5)
    values = np.zeros(s.domain_x.shape + s.domain_v.shape)
    u0 = GridFunction(s.domain_x, s.domain_v, values.copy())
    rep0 = verify_smp(u0, s, variant="interior", check_controllability=False)
    assert rep0.verdict == "holds"
    bumped = values.copy()
    bumped[8, 8, :, :] = 0.5
    u1 = GridFunction(s.domain_x, s.domain_v, bumped)
    rep1 = verify_smp(u1, s, variant="interior", check_controllability=False)
    assert rep1.verdict == "not-applicable"
    assert not rep1.subsolution.holds


def test_not_applicable_when_not_subsolution(torus_two_speed):
    s = torus_two_speed
    rng = np.random.default_rng(3)
    u = GridFunction(s.domain_x, s.domain_v,
                     rng.normal(size=s.domain_x.shape + s.domain_v.shape))
    rep = verify_smp(u, s, variant="interior")
    assert rep.verdict == "not-applicable"
    assert rep.reason


def test_torus_variant_checks_full_v_grid():
    # value 1 at the support nodes but a dip at a non-support v node:
    # the support restriction holds, the full-grid variant reports it
    config = two_speed_config()
    config["domain_v"] = {"lower": (-1.0,), "upper": (1.0,), "resolution": (3,)}
    config["equation"]["source"] = "const:1"
    s = build_scenario(config)
    values = np.ones(s.domain_x.shape + s.domain_v.shape)
    values[:, 1] = 0.5  # v = 0 is not a support node
    u = GridFunction(s.domain_x, s.domain_v, values)
    rep_interior = verify_smp(u, s, variant="interior",
                              check_controllability=False)
    rep_torus = verify_smp(u, s, variant="torus-full-v",
                           check_controllability=False)
    assert rep_interior.verdict == "holds"
    assert rep_torus.verdict == "violated"
    assert rep_torus.violating_node[1] == (1,)


def test_z_closure_variant_checks_reached_set_only():
    s = build_example("2.5")
    u = grid_sample("minimum(1, 1 + x0)", s.domain_x, s.domain_v)
    rep = verify_smp(u, s, variant="z-closure", check_controllability=False)
    # on the closure of the argmax projection the profile is constant
    assert rep.verdict == "holds"
    assert rep.propagation_consistent


def test_inf_min_variant_minimum_propagation():
    # supersolution with a minimum: reflected form of the constant case
    s = build_scenario(two_speed_config(source="const:-1", lam=1.0))
    config = two_speed_config(source="const:-1", lam=1.0)
    config["equation"]["mode"] = "inf"
    s = build_scenario(config)
    u = GridFunction.constant(s.domain_x, s.domain_v, -1.0)
    rep = verify_smp(u, s, variant="inf-min", check_controllability=False)
    assert rep.verdict == "holds"


def test_levy_variant_needs_levy_scenario(torus_two_speed):
    u = GridFunction.constant(torus_two_speed.domain_x,
                              torus_two_speed.domain_v, 0.0)
    rep = verify_smp(u, torus_two_speed, variant="levy",
                     check_controllability=False)
    assert rep.verdict == "not-applicable"


def _levy_scenario(measure):
    return build_scenario({
        "domain_x": {"lower": (0.0,), "upper": (1.0,), "resolution": (9,),
                     "periodic": (True,)},
        "domain_v": {"lower": (-2.0,), "upper": (2.0,), "resolution": (17,)},
        "measure": measure,
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 0.0, "nonlocal": "levy-shift",
                     "source": "const:0", "boundary": "const:0"},
    })


def test_levy_variant_support_ball_gate():
    atoms_measure = {"kind": "discrete-atoms", "points": [(-0.5,), (0.5,)],
                     "weights": [0.5, 0.5]}
    s = _levy_scenario(atoms_measure)
    u = GridFunction.constant(s.domain_x, s.domain_v, 1.0)
    rep = verify_smp(u, s, variant="levy", check_controllability=False)
    assert rep.verdict == "not-applicable"
    assert "support-ball" in rep.reason

    ball_measure = {"kind": "uniform-ball", "radius": 0.5, "mass": 1.0,
                    "nodes": 8}
    s2 = _levy_scenario(ball_measure)
    u2 = GridFunction.constant(s2.domain_x, s2.domain_v, 1.0)
    rep2 = verify_smp(u2, s2, variant="levy", check_controllability=False)
    assert rep2.verdict == "holds"


def test_levy_sign_property_at_interior_maxima(rng):
    from maxprop import levy_jump_apply
    from maxprop.measures import uniform_ball
    from maxprop.grids import Domain
    dom_x = Domain.interval(0.0, 1.0, 4)
    dom_v = Domain.box([-2.0, -2.0], [2.0, 2.0], [9, 9])
    measure = uniform_ball(2, radius=0.7, mass=1.0, count=32)
    for _ in range(20):
        values = rng.normal(size=(4, 9, 9))
        ix = int(rng.integers(0, 4))
        iv = (int(rng.integers(2, 7)), int(rng.integers(2, 7)))
        values[ix][iv] = values.max() + rng.uniform(0.5, 2.0)
        u = GridFunction(dom_x, dom_v, values)
        assert levy_jump_apply(u, measure, (ix,), iv) <= 1e-10


# ------------------------------------------------------------ jump sign audit

def test_audit_flags_contradiction_with_positive_below_weight(torus_two_speed):
    s = torus_two_speed
    values = np.zeros(s.domain_x.shape + s.domain_v.shape)
    m_val = 2.0
    values[5, 1] = m_val          # attains the max at the second speed
    values[5, 0] = m_val - 1.0    # strictly below at the first
    values[6, 1] = m_val          # keep the max unique to x index 5 and 6
    u = GridFunction(s.domain_x, s.domain_v, values)
    audit = jump_sign_audit(u, s, (5,))
    assert audit.max_value == m_val
    assert audit.attaining == [1]
    assert audit.jump_values[0] == pytest.approx(-0.5)
    assert audit.below_nodes == [0]
    assert audit.below_weight == pytest.approx(0.5)
    assert audit.contradiction


def test_audit_no_flag_when_constant_on_support(torus_two_speed):
    s = torus_two_speed
    u = GridFunction.constant(s.domain_x, s.domain_v, 3.0)
    audit = jump_sign_audit(u, s, (0,))
    assert audit.below_weight == 0.0
    assert not audit.contradiction
    assert np.allclose(audit.jump_values, 0.0)


def test_audit_flag_iff_positive_weight(torus_two_speed):
    s = torus_two_speed
    for gap, expect_flag in [(0.0, False), (1.0, True)]:
        values = np.full(s.domain_x.shape + s.domain_v.shape, 1.0)
        values[:, 0] = 1.0 - gap
        u = GridFunction(s.domain_x, s.domain_v, values)
        audit = jump_sign_audit(u, s, (2,))
        assert audit.contradiction is expect_flag
        assert (audit.below_weight > 0) is expect_flag
