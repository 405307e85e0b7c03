"""Scenario construction and validation.

A scenario bundles everything a solver or verifier needs: the x and v grids,
the velocity measure, the drift family with its control set, the equation
parameters (zeroth-order coefficient, nonlocal weight exponent, sup/inf
mode, jump kind), and the source and boundary fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .drift import ControlSet, DriftField, DriftError
from .fields import FieldError, grid_sample
from .grids import Domain, DomainError, GridFunction
from .measures import MeasureError, VelocityMeasure, atoms, uniform_ball, uniform_box, uniform_sphere

MODES = ("sup", "inf")
NONLOCAL_KINDS = ("velocity-jump", "levy-shift")


class ScenarioError(ValueError):
    """Raised when a scenario description violates an invariant."""


@dataclass(frozen=True)
class Scenario:
    """Full problem description; immutable after construction."""

    domain_x: Domain
    domain_v: Domain
    measure: VelocityMeasure
    drift: DriftField
    lam: float
    gamma: float
    mode: str
    nonlocal_kind: str
    g: GridFunction
    psi: GridFunction
    theta: float
    config: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def dimension(self) -> int:
        return self.domain_x.dimension

    @property
    def is_torus(self) -> bool:
        return all(self.domain_x.periodic)

    def boundary_mask_x(self) -> np.ndarray:
        """Dirichlet nodes: non-periodic faces of the x grid, all v."""
        return self.domain_x.boundary_mask()


def _require(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ScenarioError(f"{key}: {message}")


def _build_domain(section: Mapping[str, Any], key: str) -> Domain:
    for name in ("lower", "upper", "resolution"):
        _require(name in section, f"{key}.{name}", "missing entry")
    lower = tuple(float(v) for v in np.ravel(section["lower"]))
    upper = tuple(float(v) for v in np.ravel(section["upper"]))
    resolution = tuple(int(v) for v in np.ravel(section["resolution"]))
    if len(resolution) == 1 and len(lower) > 1:
        resolution = resolution * len(lower)
    periodic = section.get("periodic", False)
    if isinstance(periodic, bool):
        periodic = (periodic,) * len(lower)
    else:
        periodic = tuple(bool(v) for v in np.ravel(periodic))
        if len(periodic) == 1 and len(lower) > 1:
            periodic = periodic * len(lower)
    try:
        return Domain(lower, upper, resolution, periodic)
    except DomainError as err:
        raise ScenarioError(f"{key}: {err}") from err


def _build_measure(section: Mapping[str, Any], dim: int) -> VelocityMeasure:
    kind = section.get("kind")
    _require(kind is not None, "measure.kind", "missing entry")
    mass = float(section.get("mass", 1.0))
    count = int(section.get("nodes", 64))
    try:
        if kind == "discrete-atoms":
            _require("points" in section, "measure.points", "missing entry")
            _require("weights" in section, "measure.weights", "missing entry")
            pts = [np.atleast_1d(p) for p in section["points"]]
            w = [float(x) for x in section["weights"]]
            _require(len(pts) == len(w), "measure.weights",
                     f"{len(w)} weights for {len(pts)} points")
            return atoms(pts, w, mass=mass if "mass" in section else None)
        if kind == "uniform-sphere":
            return uniform_sphere(dim, float(section.get("radius", 1.0)), mass, count,
                                  section.get("center"))
        if kind == "uniform-ball":
            return uniform_ball(dim, float(section.get("radius", 1.0)), mass, count,
                                section.get("center"))
        if kind == "uniform-box":
            _require("lower" in section and "upper" in section,
                     "measure.lower/upper", "uniform-box needs bounds")
            return uniform_box(np.atleast_1d(section["lower"]),
                               np.atleast_1d(section["upper"]), mass, count)
    except MeasureError as err:
        raise ScenarioError(f"measure: {err}") from err
    raise ScenarioError(f"measure.kind: unknown kind {kind!r}")


def _build_drift(section: Mapping[str, Any], dim: int) -> DriftField:
    kind = section.get("kind")
    _require(kind is not None, "drift.kind", "missing entry")
    cs_kind = section.get("control_set", "empty")
    try:
        if cs_kind == "empty":
            control_set = ControlSet.empty()
        elif cs_kind == "finite":
            _require("controls" in section, "drift.controls", "missing entry")
            control_set = ControlSet.finite([np.atleast_1d(c) for c in section["controls"]])
        elif cs_kind == "sphere":
            count = section.get("sphere_count")
            control_set = ControlSet.sphere_with_zero(dim, count)
        else:
            raise ScenarioError(f"drift.control_set: unknown kind {cs_kind!r}")
        if kind == "velocity-identity":
            return DriftField.velocity_identity()
        if kind == "constant-vector":
            _require("vector" in section, "drift.vector", "missing entry")
            return DriftField.constant_vector(np.atleast_1d(section["vector"]))
        if kind == "control-direction":
            return DriftField.control_direction(control_set)
        if kind == "affine":
            _require("matrix" in section, "drift.matrix", "missing entry")
            return DriftField.affine(section["matrix"], section.get("offset"))
    except DriftError as err:
        raise ScenarioError(f"drift: {err}") from err
    raise ScenarioError(f"drift.kind: unknown kind {kind!r}")


def build_scenario(config: Mapping[str, Any]) -> Scenario:
    """Construct and validate a Scenario from a parsed configuration.

    The configuration is a mapping of sections ``domain_x``, ``domain_v``,
    ``measure``, ``drift``, ``equation`` (and optionally ``solver``, which is
    read by the solver layer, not here).  Every invariant violation raises
    ScenarioError naming the offending key.
    """
    for name in ("domain_x", "domain_v", "measure", "drift"):
        _require(name in config, name, "missing section")
    domain_x = _build_domain(config["domain_x"], "domain_x")
    domain_v = _build_domain(config["domain_v"], "domain_v")
    _require(domain_x.dimension == domain_v.dimension, "domain_v.lower",
             "x and v grids must have the same dimension")

    measure = _build_measure(config["measure"], domain_v.dimension)
    _require(measure.dimension == domain_v.dimension, "measure.points",
             f"measure nodes have dimension {measure.dimension}, "
             f"expected {domain_v.dimension}")

    drift = _build_drift(config["drift"], domain_x.dimension)

    eq = dict(config.get("equation", {}))
    lam = float(eq.get("lambda", 0.0))
    _require(lam >= 0.0, "equation.lambda", f"{lam} must be >= 0")
    gamma = float(eq.get("gamma", 0.0))
    mode = eq.get("mode", "sup")
    _require(mode in MODES, "equation.mode", f"unknown mode {mode!r}")
    nonlocal_kind = eq.get("nonlocal", "velocity-jump")
    _require(nonlocal_kind in NONLOCAL_KINDS, "equation.nonlocal",
             f"unknown kind {nonlocal_kind!r}")
    theta = float(eq.get("holder_exponent", 1.0))
    _require(0.0 < theta <= 1.0, "equation.holder_exponent",
             f"{theta} must lie in (0, 1]")

    if nonlocal_kind == "velocity-jump":
        # jump nodes must lie in the v hull so the operator can interpolate
        for k, node in enumerate(measure.nodes):
            _require(domain_v.contains(node), "measure.points",
                     f"node {k} at {tuple(node)} lies outside the v domain")

    try:
        g = grid_sample(eq.get("source", 0.0), domain_x, domain_v)
        psi = grid_sample(eq.get("boundary", 0.0), domain_x, domain_v)
    except FieldError as err:
        raise ScenarioError(f"equation.source/boundary: {err}") from err

    return Scenario(domain_x, domain_v, measure, drift, lam, gamma, mode,
                    nonlocal_kind, g, psi, theta, config=_normalized_config(
                        config, domain_x, domain_v, measure, drift,
                        lam, gamma, mode, nonlocal_kind, theta, eq))


def _normalized_config(config, domain_x, domain_v, measure, drift, lam, gamma,
                       mode, nonlocal_kind, theta, eq) -> dict:
    """Canonical configuration dict used for exact-round-trip serialization."""
    out: dict = {}
    for key, dom in (("domain_x", domain_x), ("domain_v", domain_v)):
        out[key] = {"lower": dom.lower, "upper": dom.upper,
                    "resolution": list(dom.resolution),
                    "periodic": list(dom.periodic)}
    msec: dict = {"kind": measure.kind, "mass": measure.mass}
    if measure.kind == "discrete-atoms":
        msec["points"] = [tuple(p) for p in measure.nodes]
        msec["weights"] = [float(w) for w in measure.weights]
    else:
        msec.update(measure.support_params)
        msec["nodes"] = measure.support_params.get("count", measure.num_nodes)
    out["measure"] = msec
    dsec: dict = {"kind": drift.kind, "control_set": drift.control_set.kind}
    if drift.kind == "constant-vector":
        dsec["vector"] = tuple(drift.constant)
    if drift.kind == "affine":
        dsec["matrix"] = [tuple(row) for row in drift.matrix]
        dsec["offset"] = tuple(drift.offset)
    if drift.control_set.kind == "finite":
        dsec["controls"] = [tuple(c) for c in drift.control_set.vectors]
    if drift.control_set.kind == "sphere":
        dsec["sphere_count"] = len(drift.control_set.vectors) - 1
    out["drift"] = dsec
    out["equation"] = {
        "lambda": lam, "gamma": gamma, "mode": mode, "nonlocal": nonlocal_kind,
        "holder_exponent": theta,
        "source": eq.get("source", 0.0), "boundary": eq.get("boundary", 0.0),
    }
    if "solver" in config:
        out["solver"] = dict(config["solver"])
    return out
