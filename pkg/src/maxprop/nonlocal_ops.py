"""Velocity-jump and shift-type nonlocal operators.

The velocity-jump operator integrates u(x, v') - u(x, v) against the
measure; its gain part depends on x only.  The shift (Levy-type) operator
integrates u(x, v + w) - u(x, v) over increment nodes w, with constant
extension of u beyond the v hull: extension never exceeds an interior
maximum, which preserves the sign property the maximum-propagation
arguments rest on.  Off-grid evaluation is multilinear, a convex
combination, monotone for the same reason.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Domain, GridFunction, GridIndexError, interp_stencil
from .measures import VelocityMeasure, measure_mass, support_ball_radius, support_contains_ball

__all__ = [
    "JumpEvaluation", "JumpOperator", "ShiftOperator",
    "jump_apply", "jump_evaluate", "levy_jump_apply", "rho",
    "measure_mass", "support_ball_radius", "support_contains_ball",
    "RhoDegenerateError", "rho_weight",
]


class RhoDegenerateError(ArithmeticError):
    """rho^gamma with gamma < 0 requested where rho vanishes."""


@dataclass(frozen=True)
class JumpEvaluation:
    """Operator value with the per-node integrand samples kept for diagnostics."""

    value: float
    samples: tuple  # ((node coords, weight, u difference), ...)

    def weighted_sum(self) -> float:
        return float(sum(w * d for _, w, d in self.samples))


class JumpOperator:
    """Velocity-jump operator bound to a measure and a v grid.

    Precomputes one interpolation row per measure node, so full-grid
    evaluation is a single matrix product.
    """

    def __init__(self, measure: VelocityMeasure, domain_v: Domain):
        if measure.dimension != domain_v.dimension:
            raise ValueError("measure and v grid dimensions differ")
        self.measure = measure
        self.domain_v = domain_v
        nv = domain_v.num_nodes
        k = measure.num_nodes
        w_rows = np.zeros((k, nv))
        for j, node in enumerate(measure.nodes):
            for idx, wgt in interp_stencil(domain_v, node, out_of_hull="error"):
                w_rows[j, np.ravel_multi_index(idx, domain_v.shape)] += wgt
        self.node_matrix = w_rows                   # (K, nv)
        self.gain_vector = measure.weights @ w_rows  # (nv,)
        self.mass = measure.total_weight()

    def node_values(self, u: GridFunction) -> np.ndarray:
        """u interpolated at every measure node, shape (nx, K)."""
        return u.as_xv() @ self.node_matrix.T

    def gain(self, u: GridFunction) -> np.ndarray:
        """Weighted sum of u(x, node_k) over nodes; depends on x only."""
        return u.as_xv() @ self.gain_vector

    def apply(self, u: GridFunction) -> np.ndarray:
        """Full-grid jump values, shape (nx, nv)."""
        u2 = u.as_xv()
        return (u2 @ self.gain_vector)[:, None] - self.mass * u2

    def rho(self, u: GridFunction) -> np.ndarray:
        """Weighted integral of |u(x, v')|, shape (nx,)."""
        return np.abs(self.node_values(u)) @ self.measure.weights


class ShiftOperator:
    """Shift-type nonlocal operator over increment nodes w.

    For each v-grid node the rows of ``gain_matrix`` combine the stencils of
    v + w_k with the measure weights; u is extended constantly beyond the
    hull (clamped stencils) and wraps on periodic v axes.
    """

    def __init__(self, measure: VelocityMeasure, domain_v: Domain):
        if measure.dimension != domain_v.dimension:
            raise ValueError("measure and v grid dimensions differ")
        self.measure = measure
        self.domain_v = domain_v
        nv = domain_v.num_nodes
        q = np.zeros((nv, nv))
        points = domain_v.all_points()
        for i, vpt in enumerate(points):
            for wgt_k, node in zip(measure.weights, measure.nodes):
                for idx, wgt in interp_stencil(domain_v, vpt + node, out_of_hull="clamp"):
                    q[i, np.ravel_multi_index(idx, domain_v.shape)] += wgt_k * wgt
        self.gain_matrix = q  # (nv, nv)
        self.mass = measure.total_weight()

    def apply(self, u: GridFunction) -> np.ndarray:
        """Full-grid shift-jump values, shape (nx, nv)."""
        u2 = u.as_xv()
        return u2 @ self.gain_matrix.T - self.mass * u2


def jump_evaluate(u: GridFunction, measure: VelocityMeasure,
                  x_index, v_index) -> JumpEvaluation:
    """Velocity-jump value at one node, with retained integrand samples."""
    x_index = tuple(np.atleast_1d(x_index))
    v_index = tuple(np.atleast_1d(v_index))
    u_here = float(u.values[x_index + v_index])
    samples = []
    for wgt_k, node in zip(measure.weights, measure.nodes):
        u_node = 0.0
        for idx, wgt in interp_stencil(u.domain_v, node, out_of_hull="error"):
            u_node += wgt * float(u.values[x_index + idx])
        samples.append((tuple(node), float(wgt_k), u_node - u_here))
    value = float(sum(w * d for _, w, d in samples))
    return JumpEvaluation(value, tuple(samples))


def jump_apply(u: GridFunction, measure: VelocityMeasure, x_index, v_index) -> float:
    """Weighted sum of u(x, v') - u(x, v) over the measure nodes."""
    return jump_evaluate(u, measure, x_index, v_index).value


def levy_jump_apply(u: GridFunction, measure: VelocityMeasure,
                    x_index, v_index) -> float:
    """Weighted sum of u(x, v + w) - u(x, v) over increment nodes w."""
    x_index = tuple(np.atleast_1d(x_index))
    v_index = tuple(np.atleast_1d(v_index))
    vpt = u.domain_v.point(v_index)
    u_here = float(u.values[x_index + v_index])
    total = 0.0
    for wgt_k, node in zip(measure.weights, measure.nodes):
        u_shift = 0.0
        for idx, wgt in interp_stencil(u.domain_v, vpt + node, out_of_hull="clamp"):
            u_shift += wgt * float(u.values[x_index + idx])
        total += wgt_k * (u_shift - u_here)
    return float(total)


def rho(u: GridFunction, measure: VelocityMeasure, x_index) -> float:
    """Weighted integral of |u(x, v')|; nonnegative."""
    x_index = tuple(np.atleast_1d(x_index))
    total = 0.0
    for wgt_k, node in zip(measure.weights, measure.nodes):
        u_node = 0.0
        for idx, wgt in interp_stencil(u.domain_v, node, out_of_hull="error"):
            u_node += wgt * float(u.values[x_index + idx])
        total += wgt_k * abs(u_node)
    return float(total)


def rho_weight(rho_values: np.ndarray, gamma: float) -> np.ndarray:
    """rho**gamma with the degenerate case surfaced as an error.

    gamma = 0 is identically one (no weighting); gamma < 0 where rho
    vanishes is undefined and raises rather than returning infinity.
    """
    rho_values = np.asarray(rho_values, dtype=float)
    if gamma == 0.0:
        return np.ones_like(rho_values)
    if gamma < 0.0 and np.any(rho_values == 0.0):
        i = int(np.argmax(rho_values == 0.0))
        raise RhoDegenerateError(
            f"rho-degenerate: rho = 0 at x node {i} with gamma = {gamma}")
    return rho_values ** gamma
