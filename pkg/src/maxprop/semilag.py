"""Semi-Lagrangian value iteration for the stationary problem.

Independent oracle for the upwind solver: instead of differencing, it
realizes the exit-time value representation directly.  Over one step of
length dt the state moves to the foot point x + dt b(v, a) along the
controlled characteristic; with probability weights matching a jump at rate
m the velocity is redistributed by the measure.  The update

    u(x, v) = opt_a [ beta_g g(x, v) + beta_m mix(foot) + beta_u u(foot, v) ]

uses the exact exponential weights

    beta_g = (1 - exp(-lam dt)) / lam
    beta_m = exp(-lam dt) (1 - exp(-m dt))
    beta_u = exp(-(lam + m) dt)

so constants are exact fixed points: with g = lam M and boundary data M the
value M reproduces itself, the discrete analogue of riding a trajectory to
its exit and collecting the discounted boundary value.  sup mode takes the
minimum over controls, inf mode the maximum.  Feet beyond a non-periodic x
face are clamped onto it, where the pinned Dirichlet value psi is read off:
exiting trajectories take the boundary value at their exit point.
"""

from __future__ import annotations

import numpy as np

from .grids import Domain, GridFunction
from .nonlocal_ops import JumpOperator, ShiftOperator
from .scenario import Scenario, ScenarioError
from .solver import (SolveResult, SolverConfig, SolverConvergenceError,
                     _as_start, _contraction_estimate, _v_mesh,
                     make_nonlocal_operator)


def _axis_shift(values: np.ndarray, axis: int, offset_cells: float,
                periodic: bool) -> np.ndarray:
    """Linear interpolation of a uniform shift by offset_cells along one axis."""
    n = values.shape[axis]
    j0 = int(np.floor(offset_cells))
    f = offset_cells - j0
    idx = np.arange(n) + j0
    mode = "wrap" if periodic else "clip"
    lo = np.take(values, idx, axis=axis, mode=mode)
    if f == 0.0:
        return lo
    hi = np.take(values, idx + 1, axis=axis, mode=mode)
    return (1.0 - f) * lo + f * hi


def _shift_x(values: np.ndarray, domain_x: Domain, delta: np.ndarray) -> np.ndarray:
    """Evaluate a grid array at x + delta (all v slices), multilinear in x."""
    out = values
    for i in range(domain_x.dimension):
        cells = float(delta[i]) / domain_x.spacing[i]
        if cells != 0.0:
            out = _axis_shift(out, i, cells, domain_x.periodic[i])
    return out


def cfl_time_step(scenario: Scenario, config: SolverConfig) -> float:
    """Configured dt, validated against the one-cell CFL bound."""
    vmesh = _v_mesh(scenario.domain_v)
    v_flat = vmesh.reshape(-1, scenario.domain_v.dimension)
    bounds = scenario.drift.max_component_bound(v_flat)
    bmax = float(np.max(bounds))
    hmin = min(scenario.domain_x.spacing)
    if config.dt is not None:
        if bmax > 0 and config.dt * bmax > hmin * (1 + 1e-12):
            raise ScenarioError(
                f"solver.dt: {config.dt} violates the one-cell bound "
                f"dt * max|b| <= {hmin / bmax:.3e}")
        return config.dt
    return 0.8 * hmin / bmax if bmax > 0 else 0.8 * hmin


def semi_lagrangian_value(scenario: Scenario, config: SolverConfig | None = None,
                          initial=None) -> SolveResult:
    """Value-iteration fixed point of the one-step dynamic-programming operator."""
    config = config or SolverConfig()
    if scenario.lam <= 0:
        raise ScenarioError("equation.lambda: value iteration requires lambda > 0")
    if scenario.gamma != 0.0:
        raise ScenarioError("equation.gamma: value iteration requires gamma = 0")
    dt = cfl_time_step(scenario, config)
    op = make_nonlocal_operator(scenario)
    mass = op.mass

    beta_g = (1.0 - np.exp(-scenario.lam * dt)) / scenario.lam
    beta_m = np.exp(-scenario.lam * dt) * (1.0 - np.exp(-mass * dt))
    beta_u = np.exp(-(scenario.lam + mass) * dt)

    dom = scenario.domain_x
    domv = scenario.domain_v
    nx, nv = dom.num_nodes, domv.num_nodes
    full_shape = dom.shape + domv.shape
    g2 = scenario.g.values.reshape(nx, nv)
    psi2 = scenario.psi.values
    bmask = scenario.boundary_mask_x()
    bfull = np.broadcast_to(bmask.reshape(dom.shape + (1,) * domv.dimension),
                            full_shape) if bmask.any() else None

    vmesh = _v_mesh(domv).reshape(nv, domv.dimension)
    controls = scenario.drift.control_set.controls()
    # per (control, v node): constant foot offset dt * b
    offsets = [np.atleast_2d(scenario.drift(np.zeros(dom.dimension), vmesh, alpha)) * dt
               for alpha in controls]
    if isinstance(op, ShiftOperator):
        mix_rows = op.gain_matrix / mass      # (nv, nv)
    else:
        mix_rows = np.tile(op.gain_vector / mass, (nv, 1))

    values = _as_start(scenario, initial)
    if bfull is not None:
        values = np.where(bfull, psi2, values)

    history: list = []
    update = np.inf
    for it in range(1, config.max_iterations + 1):
        best2 = None
        for delta_per_v in offsets:
            cand2 = np.empty((nx, nv))
            for iv in range(nv):
                shifted = _shift_x(values, dom, delta_per_v[iv]).reshape(nx, nv)
                cand2[:, iv] = (beta_g * g2[:, iv]
                                + beta_m * (shifted @ mix_rows[iv])
                                + beta_u * shifted[:, iv])
            if best2 is None:
                best2 = cand2
            else:
                best2 = np.minimum(best2, cand2) if scenario.mode == "sup" \
                    else np.maximum(best2, cand2)
        new_values = best2.reshape(full_shape)
        if bfull is not None:
            new_values = np.where(bfull, psi2, new_values)
        update = float(np.max(np.abs(new_values - values)))
        history.append(update)
        values = new_values
        qhat = _contraction_estimate(history)
        if update <= config.tolerance * (1.0 - qhat) / qhat:
            uf = GridFunction(scenario.domain_x, scenario.domain_v, values)
            return SolveResult(uf, it, update, update, np.asarray(history))
    raise SolverConvergenceError(
        f"no convergence within {config.max_iterations} iterations "
        f"(last update {update:.3e})", update)
