"""Positive bounded velocity measures and their quadrature discretizations.

Every measure is carried as a finite list of nodes with strictly positive
weights summing to its total mass.  Continuous kinds (uniform on a box,
sphere, or ball) are discretized once at construction into equal-weight
low-discrepancy nodes, so downstream operators always see a weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MASS_RTOL = 1e-12

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


class MeasureError(ValueError):
    """Raised for an invalid measure description."""


class SupportError(ValueError):
    """Raised when a support predicate is not decidable for the measure kind."""


@dataclass(frozen=True)
class VelocityMeasure:
    """Finite-node representation of a positive bounded measure.

    kind: one of ``discrete-atoms``, ``uniform-box``, ``uniform-sphere``,
    ``uniform-ball``.  ``nodes`` has shape (K, dim) and ``weights`` shape
    (K,); the support descriptor keeps the geometric parameters of the
    continuous kinds (``center``/``radius`` or ``lower``/``upper``).
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    mass: float
    support_params: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape[0] != weights.shape[0]:
            raise MeasureError(
                f"measure has {nodes.shape[0]} nodes but {weights.shape[0]} weights")
        if nodes.shape[0] == 0:
            raise MeasureError("measure must have at least one node")
        if np.any(weights <= 0):
            k = int(np.argmax(weights <= 0))
            raise MeasureError(
                f"measure.weights: weight {weights[k]} at node {k} must be > 0")
        total = float(weights.sum())
        if self.mass <= 0:
            raise MeasureError(f"measure.mass: {self.mass} must be > 0")
        if abs(total - self.mass) > MASS_RTOL * max(abs(self.mass), 1.0):
            raise MeasureError(
                f"measure.weights: sum {total!r} does not match mass {self.mass!r}")

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def support_nodes(self) -> np.ndarray:
        """Quadrature nodes standing in for the support of the measure."""
        return self.nodes


def measure_mass(measure: VelocityMeasure) -> float:
    """Total mass, the weighted integral of 1."""
    return measure.total_weight()


def atoms(points: Sequence[Sequence[float]] | np.ndarray,
          weights: Sequence[float], mass: float | None = None) -> VelocityMeasure:
    """Finitely many atoms with the given positive weights."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(weights, dtype=float)
    m = float(w.sum()) if mass is None else float(mass)
    return VelocityMeasure("discrete-atoms", pts, w, m)


def _fibonacci_sphere(count: int) -> np.ndarray:
    """Near-uniform points on S^2."""
    i = np.arange(count)
    z = 1.0 - 2.0 * (i + 0.5) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    theta = 2.0 * np.pi * i / GOLDEN
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])


def sphere_directions(dim: int, count: int) -> np.ndarray:
    """Near-uniform unit vectors in R^dim.

    dim 1 gives {-1, +1}; dim 2 equally spaced angles; dim 3 a Fibonacci
    lattice.  Higher dimensions fall back to a deterministic quasi-random
    set projected to the sphere.
    """
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        return _fibonacci_sphere(count)
    rng = np.random.default_rng(1234)
    pts = rng.standard_normal((count, dim))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def uniform_sphere(dim: int, radius: float = 1.0, mass: float = 1.0,
                   count: int = 64, center: Sequence[float] | None = None) -> VelocityMeasure:
    """Equal-weight nodes for the uniform measure on a sphere."""
    if radius <= 0:
        raise MeasureError(f"measure.radius: {radius} must be > 0")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    dirs = sphere_directions(dim, count)
    nodes = c + radius * dirs
    k = nodes.shape[0]
    w = np.full(k, mass / k)
    return VelocityMeasure("uniform-sphere", nodes, w, mass,
                           {"center": tuple(c), "radius": float(radius), "count": k})


def uniform_ball(dim: int, radius: float = 1.0, mass: float = 1.0,
                 count: int = 64, center: Sequence[float] | None = None) -> VelocityMeasure:
    """Equal-weight nodes for the uniform measure on a solid ball.

    Radial Fibonacci layout: node i sits at radius ((i+1/2)/K)^(1/dim) along
    a low-discrepancy direction, which reproduces radial moments of the
    uniform ball measure to near machine accuracy at small K.
    """
    if radius <= 0:
        raise MeasureError(f"measure.radius: {radius} must be > 0")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    i = np.arange(count)
    r = ((i + 0.5) / count) ** (1.0 / dim)
    if dim == 1:
        sign = np.where(i % 2 == 0, 1.0, -1.0)
        nodes = c + (sign * r * radius)[:, None]
    elif dim == 2:
        theta = 2.0 * np.pi * i / GOLDEN
        nodes = c + radius * np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    elif dim == 3:
        dirs = _fibonacci_sphere(count)
        nodes = c + radius * r[:, None] * dirs
    else:
        dirs = sphere_directions(dim, count)
        nodes = c + radius * r[:, None] * dirs
    w = np.full(count, mass / count)
    return VelocityMeasure("uniform-ball", nodes, w, mass,
                           {"center": tuple(c), "radius": float(radius), "count": count})


def uniform_box(lower: Sequence[float], upper: Sequence[float],
                mass: float = 1.0, count: int = 64) -> VelocityMeasure:
    """Equal-weight cell-midpoint lattice for the uniform measure on a box.

    Nodes are strictly interior to the box.  The per-axis counts are chosen
    so the total is as close to ``count`` as the tensor structure allows.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if np.any(hi <= lo):
        raise MeasureError("measure: box upper bounds must exceed lower bounds")
    dim = lo.size
    per_axis = max(1, int(round(count ** (1.0 / dim))))
    axes = [lo[i] + (hi[i] - lo[i]) * (np.arange(per_axis) + 0.5) / per_axis
            for i in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.column_stack([m.ravel() for m in mesh])
    k = nodes.shape[0]
    w = np.full(k, mass / k)
    return VelocityMeasure("uniform-box", nodes, w, mass,
                           {"lower": tuple(lo), "upper": tuple(hi), "count": k})


def support_ball_radius(measure: VelocityMeasure) -> float:
    """Largest r with the origin-centered open ball B(0, r) inside the support.

    Only uniform-ball and uniform-box supports centered at the origin have a
    decidable answer; atomic and spherical supports have empty interior and
    raise SupportError.
    """
    if measure.kind == "uniform-ball":
        center = np.asarray(measure.support_params.get("center", ()), dtype=float)
        if center.size and np.any(center != 0.0):
            raise SupportError("support ball test requires a measure centered at the origin")
        return float(measure.support_params["radius"])
    if measure.kind == "uniform-box":
        lo = np.asarray(measure.support_params["lower"], dtype=float)
        hi = np.asarray(measure.support_params["upper"], dtype=float)
        if np.any(lo >= 0) or np.any(hi <= 0):
            raise SupportError("support ball test requires a box containing the origin")
        return float(min(np.min(-lo), np.min(hi)))
    if measure.kind == "discrete-atoms":
        raise SupportError("undecidable for atomic support: atoms never contain a ball")
    raise SupportError(f"support of a {measure.kind} measure has empty interior")


def support_contains_ball(measure: VelocityMeasure, r: float) -> bool:
    """Whether the geometric support contains the open ball B(0, r)."""
    if r <= 0:
        raise MeasureError(f"support ball radius {r} must be > 0")
    return r <= support_ball_radius(measure)
