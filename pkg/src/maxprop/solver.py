"""Monotone upwind solver for the stationary Dirichlet problem.

The discrete equation at a node couples the zeroth-order term, the
optimized one-sided transport differences, and the nonlocal gain:

    (lam + m + S) u = g + gain + sum_i (|b_i| / h_i) u(upwind neighbor)

with S = sum_i |b_i| / h_i for the optimizing control.  One-sided
differences are taken against the flow (forward where the drift component
is positive), which makes every fixed-point update a convex combination
with positive weights: the scheme is monotone and a sup-norm contraction
with factor (m + S) / (lam + m + S) < 1.

In sup mode the nodal value is the minimum of the per-control candidates
(the maximum of the increasing per-control residuals crosses zero there);
inf mode takes the maximum.  Dirichlet data is pinned on the faces of
non-periodic x axes; periodic axes wrap.  The v grid carries no boundary
data: the equation is first order in x only, and trajectories exit through
the x faces alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .drift import DriftField
from .grids import Domain, GridFunction, GridIndexError
from .nonlocal_ops import JumpOperator, ShiftOperator, rho_weight
from .scenario import Scenario, ScenarioError


class SolverConvergenceError(RuntimeError):
    """Fixed-point iteration exhausted its budget."""

    def __init__(self, message: str, last_update: float):
        super().__init__(message)
        self.last_update = last_update


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls shared by the upwind and semi-Lagrangian solvers."""

    max_iterations: int = 100_000
    tolerance: float = 1e-9
    sweep: str = "jacobi"  # or "gauss-seidel"
    dt: float | None = None  # semi-Lagrangian step; None picks 0.8 h / max|b|

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.sweep not in ("jacobi", "gauss-seidel"):
            raise ValueError(f"unknown sweep order {self.sweep!r}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class SolveResult:
    solution: GridFunction
    iterations: int
    final_update: float
    residual_norm: float
    update_history: np.ndarray = field(repr=False, default=None)


def hamiltonian(x: np.ndarray, v: np.ndarray, p: np.ndarray,
                drift: DriftField, mode: str = "sup") -> float:
    """Optimized transport term: extremum over controls of -<b(x,v,a), p>."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    vals = [-float(np.dot(drift(x, v, alpha), p))
            for alpha in drift.control_set.controls()]
    return max(vals) if mode == "sup" else min(vals)


def upwind_gradient(u: GridFunction, x_index, v_index,
                    direction: np.ndarray) -> np.ndarray:
    """One-sided x gradient chosen against the flow, axis by axis.

    Forward difference where the drift component is positive, backward where
    negative; a zero component takes whichever one-sided difference exists
    (it multiplies to zero in the transport term anyway).  Exact on linear
    functions.  Raises GridIndexError when a non-periodic face lacks the
    needed neighbor.
    """
    x_index = tuple(np.atleast_1d(x_index))
    v_index = tuple(np.atleast_1d(v_index))
    dom = u.domain_x
    direction = np.asarray(direction, dtype=float)
    grad = np.zeros(dom.dimension)
    u_here = u.values[x_index + v_index]
    for i in range(dom.dimension):
        n, h, per = dom.resolution[i], dom.spacing[i], dom.periodic[i]
        j = x_index[i]
        has_fwd = per or j + 1 <= n - 1
        has_bwd = per or j - 1 >= 0
        want_fwd = direction[i] > 0 or (direction[i] == 0 and has_fwd)
        if want_fwd:
            if not has_fwd:
                raise GridIndexError(
                    f"axis {i}: no forward neighbor at face index {j}")
            nbr = list(x_index)
            nbr[i] = (j + 1) % n
            grad[i] = (u.values[tuple(nbr) + v_index] - u_here) / h
        else:
            if not has_bwd:
                raise GridIndexError(
                    f"axis {i}: no backward neighbor at face index {j}")
            nbr = list(x_index)
            nbr[i] = (j - 1) % n
            grad[i] = (u_here - u.values[tuple(nbr) + v_index]) / h
    return grad


def make_nonlocal_operator(scenario: Scenario):
    if scenario.nonlocal_kind == "levy-shift":
        return ShiftOperator(scenario.measure, scenario.domain_v)
    return JumpOperator(scenario.measure, scenario.domain_v)


def _v_mesh(domain_v: Domain) -> np.ndarray:
    return np.stack(domain_v.meshgrid(), axis=-1)


def _shift_fwd(values: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    """Values at index i+1 along an x axis (wrap or clamp at the face)."""
    if periodic:
        return np.roll(values, -1, axis=axis)
    out = np.concatenate([np.take(values, range(1, values.shape[axis]), axis=axis),
                          np.take(values, [-1], axis=axis)], axis=axis)
    return out


def _shift_bwd(values: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    if periodic:
        return np.roll(values, 1, axis=axis)
    out = np.concatenate([np.take(values, [0], axis=axis),
                          np.take(values, range(0, values.shape[axis] - 1), axis=axis)],
                         axis=axis)
    return out


class _UpwindStencil:
    """Per-control precomputed coefficients for the vectorized sweeps."""

    def __init__(self, scenario: Scenario):
        dom = scenario.domain_x
        vmesh = _v_mesh(scenario.domain_v)
        self.controls = scenario.drift.control_set.controls()
        self.coeff = []  # per control: (list of |b_i|/h_i, list of b_i>0, S)
        for alpha in self.controls:
            b = scenario.drift(np.zeros(dom.dimension), vmesh, alpha)
            abs_over_h = []
            positive = []
            total = np.zeros(b.shape[:-1])
            for i in range(dom.dimension):
                a = np.abs(b[..., i]) / dom.spacing[i]
                abs_over_h.append(a)
                positive.append(b[..., i] > 0)
                total = total + a
            self.coeff.append((abs_over_h, positive, total))

    def transport_candidates(self, values: np.ndarray, dom: Domain):
        """Yield (sum_i (|b_i|/h_i) u(upwind nbr), S) per control."""
        fwd = [_shift_fwd(values, i, dom.periodic[i]) for i in range(dom.dimension)]
        bwd = [_shift_bwd(values, i, dom.periodic[i]) for i in range(dom.dimension)]
        for abs_over_h, positive, total in self.coeff:
            acc = np.zeros_like(values)
            for i in range(dom.dimension):
                acc = acc + abs_over_h[i] * np.where(positive[i], fwd[i], bwd[i])
            yield acc, total

    def transport_term(self, values: np.ndarray, dom: Domain, mode: str) -> np.ndarray:
        """Optimized discrete transport sum_i (|b_i|/h_i)(u - u(upwind nbr))."""
        best = None
        for acc, total in self.transport_candidates(values, dom):
            term = total * values - acc
            if best is None:
                best = term
            else:
                best = np.maximum(best, term) if mode == "sup" else np.minimum(best, term)
        return best


def _gain_full(op, u: GridFunction) -> np.ndarray:
    shape = u.values.shape
    if isinstance(op, ShiftOperator):
        return op.apply(u).reshape(shape) + op.mass * u.values
    nx_shape = u.domain_x.shape
    pad = (1,) * u.domain_v.dimension
    return op.gain(u).reshape(nx_shape + pad)


def residual(u: GridFunction, scenario: Scenario,
             op=None, stencil: _UpwindStencil | None = None) -> GridFunction:
    """Pointwise discrete residual of the stationary equation.

    Interior nodes carry lam u + transport - rho^gamma jump - g with the
    monotone one-sided differences; nodes on non-periodic x faces carry
    u - psi.  Negative residual everywhere below tolerance is the discrete
    subsolution test.
    """
    if op is None:
        op = make_nonlocal_operator(scenario)
    if stencil is None:
        stencil = _UpwindStencil(scenario)
    dom = scenario.domain_x
    jump2 = op.apply(u).reshape(u.values.shape)
    if scenario.gamma != 0.0:
        if scenario.nonlocal_kind == "levy-shift":
            raise ScenarioError(
                "equation.gamma: nonzero exponent is undefined for levy-shift")
        weight = rho_weight(JumpOperator(scenario.measure, scenario.domain_v).rho(u)
                            if not isinstance(op, JumpOperator) else op.rho(u),
                            scenario.gamma)
        pad = (1,) * scenario.domain_v.dimension
        jump2 = weight.reshape(dom.shape + pad) * jump2
    transport = stencil.transport_term(u.values, dom, scenario.mode)
    res = scenario.lam * u.values + transport - jump2 - scenario.g.values
    bmask = scenario.boundary_mask_x()
    if bmask.any():
        full = np.broadcast_to(bmask.reshape(dom.shape + (1,) * scenario.domain_v.dimension),
                               res.shape)
        res = np.where(full, u.values - scenario.psi.values, res)
    return GridFunction(scenario.domain_x, scenario.domain_v, res)


def _contraction_estimate(history: list, window: int = 4) -> float:
    """Safe factor q for the distance bound ||u_n - u*|| <= q/(1-q) update."""
    ratios = [history[k + 1] / history[k]
              for k in range(max(0, len(history) - window - 1), len(history) - 1)
              if history[k] > 0 and np.isfinite(history[k])]
    q = max(ratios) if ratios else 0.5
    return float(min(max(q, 0.5), 0.999999))


def _as_start(scenario: Scenario, initial) -> np.ndarray:
    if initial is None:
        return np.zeros(scenario.domain_x.shape + scenario.domain_v.shape)
    if isinstance(initial, GridFunction):
        return initial.values.copy()
    return np.full(scenario.domain_x.shape + scenario.domain_v.shape, float(initial))


def solve_stationary(scenario: Scenario, config: SolverConfig | None = None,
                     initial=None) -> SolveResult:
    """Fixed point of the monotone upwind scheme.

    Requires lam > 0 (contraction) and gamma = 0.  Iterates until the
    contraction-corrected distance to the fixed point is below tolerance
    and the discrete residual is below 10 x tolerance; raises
    SolverConvergenceError past the iteration budget.
    """
    config = config or SolverConfig()
    if scenario.lam <= 0:
        raise ScenarioError("equation.lambda: solver requires lambda > 0")
    if scenario.gamma != 0.0:
        raise ScenarioError("equation.gamma: solver requires gamma = 0")
    op = make_nonlocal_operator(scenario)
    stencil = _UpwindStencil(scenario)
    dom = scenario.domain_x
    mass = op.mass
    g2 = scenario.g.values
    psi2 = scenario.psi.values
    bmask = scenario.boundary_mask_x()
    bfull = np.broadcast_to(
        bmask.reshape(dom.shape + (1,) * scenario.domain_v.dimension), g2.shape) \
        if bmask.any() else None

    values = _as_start(scenario, initial)
    if bfull is not None:
        values = np.where(bfull, psi2, values)

    denoms = [scenario.lam + mass + total for (_, _, total) in stencil.coeff]

    def sweep_jacobi(u_arr: np.ndarray) -> np.ndarray:
        gain = _gain_full(op, GridFunction(scenario.domain_x, scenario.domain_v, u_arr))
        best = None
        for (acc, _), denom in zip(stencil.transport_candidates(u_arr, dom), denoms):
            cand = (g2 + gain + acc) / denom
            if best is None:
                best = cand
            else:
                best = np.minimum(best, cand) if scenario.mode == "sup" \
                    else np.maximum(best, cand)
        if bfull is not None:
            best = np.where(bfull, psi2, best)
        return best

    def sweep_gauss_seidel(u_arr: np.ndarray, reverse: bool) -> np.ndarray:
        u_new = u_arr.copy()
        uf = GridFunction(scenario.domain_x, scenario.domain_v, u_new)
        gain = _gain_full(op, uf)
        gain = np.broadcast_to(gain, u_arr.shape)
        nx_dims = dom.dimension
        order = list(np.ndindex(*u_arr.shape))
        if reverse:
            order = order[::-1]
        spacing = dom.spacing
        for node in order:
            xi, vi = node[:nx_dims], node[nx_dims:]
            if bmask.any() and bmask[xi]:
                u_new[node] = psi2[node]
                continue
            best = None
            for alpha, (abs_over_h, positive, total) in zip(stencil.controls, stencil.coeff):
                acc = 0.0
                for i in range(nx_dims):
                    a = abs_over_h[i][vi] if abs_over_h[i].ndim else float(abs_over_h[i])
                    if a == 0.0:
                        continue
                    nbr = list(xi)
                    pos = positive[i][vi] if positive[i].ndim else bool(positive[i])
                    nbr[i] = (xi[i] + (1 if pos else -1)) % dom.resolution[i]
                    acc += a * u_new[tuple(nbr) + vi]
                tot = total[vi] if total.ndim else float(total)
                cand = (g2[node] + gain[node] + acc) / (scenario.lam + mass + tot)
                if best is None:
                    best = cand
                else:
                    best = min(best, cand) if scenario.mode == "sup" else max(best, cand)
            u_new[node] = best
        return u_new

    history = []
    update = np.inf
    for it in range(1, config.max_iterations + 1):
        if config.sweep == "jacobi":
            new_values = sweep_jacobi(values)
        else:
            new_values = sweep_gauss_seidel(values, reverse=(it % 2 == 0))
        update = float(np.max(np.abs(new_values - values)))
        history.append(update)
        values = new_values
        qhat = _contraction_estimate(history)
        if update <= config.tolerance * (1.0 - qhat) / qhat:
            uf = GridFunction(scenario.domain_x, scenario.domain_v, values)
            res_norm = float(np.max(np.abs(
                residual(uf, scenario, op=op, stencil=stencil).values)))
            if res_norm <= 10.0 * config.tolerance:
                return SolveResult(uf, it, update, res_norm, np.asarray(history))
    raise SolverConvergenceError(
        f"no convergence within {config.max_iterations} iterations "
        f"(last update {update:.3e})", update)


@dataclass
class ComparisonReport:
    """Outcome of the discrete comparison check u <= w + tol."""

    holds: bool
    boundary_ok: bool
    interior_violations: list  # (node index, u - w)
    max_excess: float

    def summary(self) -> str:
        if self.holds:
            return "comparison holds"
        if not self.boundary_ok:
            return "boundary ordering violated"
        node, excess = self.interior_violations[0]
        return f"comparison fails at node {node} by {excess:.3e}"


def comparison_check(u: GridFunction, w: GridFunction, scenario: Scenario,
                     tol: float = 1e-10) -> ComparisonReport:
    """List interior nodes where u exceeds w + tol.

    Boundary ordering on the Dirichlet faces is verified first; an empty
    violation list with ordered boundary data means the comparison holds.
    """
    if not u.same_grids(w):
        raise ScenarioError("comparison_check: fields live on different grids")
    diff = u.values - w.values
    bmask = scenario.boundary_mask_x()
    vdims = scenario.domain_v.dimension
    bfull = np.broadcast_to(bmask.reshape(scenario.domain_x.shape + (1,) * vdims),
                            diff.shape)
    boundary_ok = bool(np.all(diff[bfull] <= tol)) if bfull.any() else True
    interior = ~bfull
    bad = (diff > tol) & interior
    violations = [(tuple(int(i) for i in node), float(diff[tuple(node)]))
                  for node in np.argwhere(bad)]
    max_excess = float(diff[interior].max()) if interior.any() else 0.0
    return ComparisonReport(boundary_ok and not violations, boundary_ok,
                            violations, max_excess)
