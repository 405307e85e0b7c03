import numpy as np
import pytest

from maxprop import Domain, SolverConfig, build_scenario


def two_speed_config(nx=32, lam=1.0, source="const:0", boundary="const:0",
                     periodic=True):
    """Small two-speed scenario used across the suite."""
    return {
        "domain_x": {"lower": (0.0,), "upper": (1.0,), "resolution": (nx,),
                     "periodic": (periodic,)},
        "domain_v": {"lower": (-1.0,), "upper": (1.0,), "resolution": (2,)},
        "measure": {"kind": "discrete-atoms", "points": [(-1.0,), (1.0,)],
                    "weights": [0.5, 0.5], "mass": 1.0},
        "drift": {"kind": "velocity-identity"},
        "equation": {"lambda": lam, "mode": "sup", "nonlocal": "velocity-jump",
                     "source": source, "boundary": boundary},
    }


@pytest.fixture
def torus_two_speed():
    return build_scenario(two_speed_config())


@pytest.fixture
def interval_two_speed():
    config = two_speed_config(periodic=False)
    config["domain_x"] = {"lower": (-1.0,), "upper": (1.0,), "resolution": (33,)}
    return build_scenario(config)


@pytest.fixture
def tight_solver():
    return SolverConfig(tolerance=1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
