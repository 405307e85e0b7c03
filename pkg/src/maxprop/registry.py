"""Built-in scenario registry.

Each entry is a complete, runnable configuration with its expected
qualitative outcomes (grid controllability, propagation verdict for the
entry's default verification field, analytic arrival-time law where one
exists).  Unbounded domains in the original formulations are truncated to
boxes, reported in the entry description; ball-shaped position domains are
represented by their bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .reachability import ReachConfig
from .scenario import Scenario, build_scenario

SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class ExampleRegistryEntry:
    name: str
    description: str
    config_factory: Callable[..., dict]
    expected: dict = field(default_factory=dict)
    verify_field: str = "const:1"   # default field fed to the verifier
    verify_variant: str = "interior"
    reach_defaults: dict = field(default_factory=dict)
    default_resolution_x: int = 128
    default_resolution_v: int = 32

    def build(self, nx: int | None = None, nv: int | None = None,
              **equation_overrides) -> Scenario:
        nx = nx or self.default_resolution_x
        nv = nv or self.default_resolution_v
        config = self.config_factory(nx, nv)
        config.setdefault("equation", {})
        for key, value in equation_overrides.items():
            if value is not None:
                config["equation"][key] = value
        return build_scenario(config)

    def reach_config(self, **overrides) -> ReachConfig:
        kwargs = dict(self.reach_defaults)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return ReachConfig(**kwargs)


def _two_speed_system(nx, nv):
    # M coupled transport equations on a circle: two unit speeds, equal weights
    return {
        "domain_x": {"lower": (0.0,), "upper": (1.0,), "resolution": (nx,),
                     "periodic": (True,)},
        "domain_v": {"lower": (-1.0,), "upper": (1.0,), "resolution": (2,)},
        "measure": {"kind": "discrete-atoms", "points": [(-1.0,), (1.0,)],
                    "weights": [0.5, 0.5], "mass": 1.0},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "sin(2*pi*x0)", "boundary": "const:0"},
    }


def _sphere_scattering(nx, nv):
    return {
        "domain_x": {"lower": (0.0, 0.0), "upper": (1.0, 1.0),
                     "resolution": (nx, nx), "periodic": (True, True)},
        "domain_v": {"lower": (-2.0, -2.0), "upper": (2.0, 2.0),
                     "resolution": (nv, nv)},
        "measure": {"kind": "uniform-sphere", "radius": 1.0, "mass": 1.0,
                    "nodes": 32},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


def _interval_two_speeds(nx, nv):
    return {
        "domain_x": {"lower": (-1.0,), "upper": (1.0,), "resolution": (nx,)},
        "domain_v": {"lower": (-2.0,), "upper": (2.0,), "resolution": (5,)},
        "measure": {"kind": "discrete-atoms", "points": [(-1.0,), (1.0,)],
                    "weights": [0.5, 0.5], "mass": 1.0},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


def _square_lattice_speeds(nx, nv):
    return {
        "domain_x": {"lower": (0.0, 0.0), "upper": (1.0, 1.0),
                     "resolution": (nx, nx)},
        "domain_v": {"lower": (-2.0, -2.0), "upper": (2.0, 2.0),
                     "resolution": (5, 5)},
        "measure": {"kind": "discrete-atoms",
                    "points": [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
                    "weights": [0.25, 0.25, 0.25, 0.25], "mass": 1.0},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


def _steered_unit_speed(nx, nv):
    # drift equals the chosen control; directions on the unit circle plus rest
    return {
        "domain_x": {"lower": (-1.0, -1.0), "upper": (1.0, 1.0),
                     "resolution": (nx, nx)},
        "domain_v": {"lower": (-2.0, -2.0), "upper": (2.0, 2.0),
                     "resolution": (nv, nv)},
        "measure": {"kind": "uniform-ball", "radius": 1.0, "mass": 1.0,
                    "nodes": 64},
        "drift": {"kind": "control-direction", "control_set": "sphere",
                  "sphere_count": 32},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


def _free_space_sphere(nx, nv):
    return {
        "domain_x": {"lower": (-2.0, -2.0), "upper": (2.0, 2.0),
                     "resolution": (nx, nx)},
        "domain_v": {"lower": (-2.0, -2.0), "upper": (2.0, 2.0),
                     "resolution": (nv, nv)},
        "measure": {"kind": "uniform-sphere", "radius": 1.0, "mass": 1.0,
                    "nodes": 64},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


def _one_sided_speeds(nx, nv):
    # all speeds positive: the maximum set {x >= 0} never grows leftward
    return {
        "domain_x": {"lower": (-2.0,), "upper": (2.0,), "resolution": (nx,)},
        "domain_v": {"lower": (0.0,), "upper": (1.0,), "resolution": (nv,)},
        "measure": {"kind": "uniform-box", "lower": (0.0,), "upper": (1.0,),
                    "mass": 1.0, "nodes": 16},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": 0.0, "gamma": 0.0, "mode": "sup",
                     "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "minimum(1, 1 + x0)"},
    }


def _irrational_winding(nx, nv):
    return {
        "domain_x": {"lower": (0.0, 0.0), "upper": (1.0, 1.0),
                     "resolution": (nx, nx), "periodic": (True, True)},
        "domain_v": {"lower": (-1.0, -1.0), "upper": (1.0, 1.0),
                     "resolution": (nv, nv)},
        "measure": {"kind": "uniform-box", "lower": (-1.0, -1.0),
                    "upper": (1.0, 1.0), "mass": 1.0, "nodes": 64},
        "drift": {"kind": "constant-vector",
                  "vector": (1.0, SQRT2_MINUS_1)},
        "equation": {"lambda": 1.0, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": "const:0", "boundary": "const:0"},
    }


REGISTRY: dict[str, ExampleRegistryEntry] = {}


def _register(entry: ExampleRegistryEntry) -> None:
    REGISTRY[entry.name] = entry


_register(ExampleRegistryEntry(
    name="1.1",
    description="Two-speed transport system on a circle: atoms at speeds -1/+1 "
                "with equal weights, drift b = v, periodic in x.",
    config_factory=_two_speed_system,
    expected={"controllable": True, "smp": "holds", "arrival": None},
))

_register(ExampleRegistryEntry(
    name="1.2",
    description="Unit-sphere scattering on the 2-torus: normalized measure on "
                "the unit circle of velocities, drift b = v.",
    config_factory=_sphere_scattering,
    expected={"controllable": True, "smp": "holds"},
    default_resolution_x=48, default_resolution_v=9,
))

_register(ExampleRegistryEntry(
    name="2.1",
    description="Two speeds on the interval (-1, 1) with Dirichlet exits: "
                "any pair of points joined by one constant-speed segment.",
    config_factory=_interval_two_speeds,
    expected={"controllable": True, "smp": "holds", "arrival": "l2"},
))

_register(ExampleRegistryEntry(
    name="2.2",
    description="Axis speeds on the unit square: one horizontal then one "
                "vertical segment joins any two points in taxicab time.",
    config_factory=_square_lattice_speeds,
    expected={"controllable": True, "smp": "holds", "arrival": "l1"},
    default_resolution_x=64, default_resolution_v=5,
))

_register(ExampleRegistryEntry(
    name="2.3",
    description="Steered unit-speed motion on a square: drift equals the "
                "control, directions on the unit circle plus rest.",
    config_factory=_steered_unit_speed,
    expected={"controllable": True, "smp": "holds", "arrival": "l2"},
    default_resolution_x=48, default_resolution_v=16,
))

_register(ExampleRegistryEntry(
    name="2.4",
    description="Unit-circle speeds in free space, truncated to the box "
                "[-2, 2]^2 with Dirichlet continuation.",
    config_factory=_free_space_sphere,
    expected={"controllable": True, "smp": "holds"},
    default_resolution_x=48, default_resolution_v=9,
))

_register(ExampleRegistryEntry(
    name="2.5",
    description="One-sided speeds on a line, truncated to [-2, 2]: rightward "
                "motion only, so the maximum of the built-in field fails to "
                "propagate left of the origin.",
    config_factory=_one_sided_speeds,
    expected={"controllable": False, "smp": "violated"},
    verify_field="minimum(1, 1 + x0)",
))

_register(ExampleRegistryEntry(
    name="2.6",
    description="Constant irrational winding (1, sqrt(2)-1) on the 2-torus: "
                "a single orbit is dense, so the maximum set closure fills "
                "the grid.",
    config_factory=_irrational_winding,
    expected={"controllable": True, "smp": "holds", "dense": 0.05},
    verify_variant="z-closure",
    reach_defaults={"t_step": 200.0, "total_horizon": 200.0},
    default_resolution_v=8,
))


def example_names() -> list[str]:
    return sorted(REGISTRY)


def get_example(name: str) -> ExampleRegistryEntry:
    if name not in REGISTRY:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(example_names())}")
    return REGISTRY[name]


def build_example(name: str, nx: int | None = None, nv: int | None = None,
                  **equation_overrides) -> Scenario:
    return get_example(name).build(nx, nv, **equation_overrides)
