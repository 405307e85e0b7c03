"""Maximum-propagation verification on grid functions.

The core statement being checked: a discrete subsolution attaining its
maximum over the x grid and the measure-support nodes propagates that
maximum along the reachability closure of the argmax x-projection, and on a
controllable grid is constant on the whole product of the x grid with the
support nodes.  Variants cover the inf-form equation (minima of
supersolutions), the all-periodic grid (conclusion on the full v grid), the
closure statement without any controllability hypothesis, and the
shift-type operator (conclusion on the full v grid under a support-ball
condition on the increment measure).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import GridFunction
from .measures import SupportError, support_ball_radius
from .nonlocal_ops import JumpOperator
from .reachability import ReachConfig, is_controllable, reachable_set
from .scenario import Scenario, ScenarioError
from .solver import residual

VARIANTS = ("interior", "inf-min", "torus-full-v", "z-closure", "levy")


@dataclass
class SubsolutionVerdict:
    holds: bool
    worst_node: tuple
    worst_residual: float
    sense: str  # "sub" or "super"

    def __bool__(self) -> bool:
        return self.holds


def _interior_mask(scenario: Scenario, shape) -> np.ndarray:
    bmask = scenario.boundary_mask_x()
    vdims = scenario.domain_v.dimension
    full = np.broadcast_to(bmask.reshape(scenario.domain_x.shape + (1,) * vdims), shape)
    return ~full


def subsolution_check(u: GridFunction, scenario: Scenario, tol: float = 1e-9,
                      sense: str = "sub") -> SubsolutionVerdict:
    """Discrete viscosity-sign test: upwind residual <= tol at interior nodes.

    The supersolution test is symmetric (residual >= -tol).  The worst node
    reported is the one with the largest signed violation.
    """
    res = residual(u, scenario).values
    interior = _interior_mask(scenario, res.shape)
    signed = res if sense == "sub" else -res
    signed = np.where(interior, signed, -np.inf)
    worst_flat = int(np.argmax(signed))
    worst_node = tuple(int(i) for i in np.unravel_index(worst_flat, res.shape))
    worst = float(signed.reshape(-1)[worst_flat])
    return SubsolutionVerdict(bool(worst <= tol), worst_node,
                              float(res[worst_node]), sense)


def support_values(u: GridFunction, scenario: Scenario) -> np.ndarray:
    """u interpolated at the measure-support nodes, shape (nx, K)."""
    return JumpOperator(scenario.measure, scenario.domain_v).node_values(u)


def argmax_set(u: GridFunction, scenario: Scenario, restriction: str = "support",
               eps: float = 1e-9, sense: str = "max"):
    """Extremum M over the restricted node set and all nodes within eps of it.

    restriction "support" ranges over x times the measure-support nodes
    (off-grid nodes interpolated); "full" ranges over the whole v grid.
    Returns (M, nodes) where each node is (x index tuple, v label): the
    support-node ordinal for "support", the v-grid index tuple for "full".
    """
    if restriction == "support":
        table = support_values(u, scenario)  # (nx, K)
    elif restriction == "full":
        table = u.as_xv()
    else:
        raise ScenarioError(f"unknown restriction {restriction!r}")
    m_value = float(table.max() if sense == "max" else table.min())
    close = (table >= m_value - eps) if sense == "max" else (table <= m_value + eps)
    nodes = []
    for xi_flat, col in np.argwhere(close):
        x_idx = tuple(int(i) for i in np.unravel_index(xi_flat, scenario.domain_x.shape))
        if restriction == "support":
            nodes.append((x_idx, int(col)))
        else:
            nodes.append((x_idx, tuple(int(i) for i in
                                       np.unravel_index(col, scenario.domain_v.shape))))
    return m_value, nodes


def argmax_x_projection(u: GridFunction, scenario: Scenario,
                        restriction: str = "support", eps: float = 1e-9,
                        sense: str = "max") -> np.ndarray:
    """Boolean x mask of nodes where the extremum is attained within eps."""
    if restriction == "support":
        table = support_values(u, scenario)
    else:
        table = u.as_xv()
    m_value = table.max() if sense == "max" else table.min()
    close = (table >= m_value - eps) if sense == "max" else (table <= m_value + eps)
    return close.any(axis=1).reshape(scenario.domain_x.shape)


@dataclass
class SMPReport:
    """Outcome of one maximum-propagation verification."""

    variant: str
    eps: float
    subsolution: SubsolutionVerdict
    max_value: float = np.nan
    argmax_nodes: list = field(default_factory=list)
    propagation_mask: np.ndarray | None = None
    propagation_consistent: bool | None = None
    reach_converged: bool | None = None
    verdict: str = "not-applicable"
    violating_node: tuple | None = None
    violating_value: float | None = None
    controllable: bool | None = None
    controllability_witness: tuple | None = None
    reason: str = ""

    @property
    def exit_code(self) -> int:
        return 1 if self.verdict == "violated" else 0


def verify_smp(u: GridFunction, scenario: Scenario, variant: str = "interior",
               eps: float = 1e-9, residual_tol: float = 1e-9,
               reach_config: ReachConfig | None = None,
               check_controllability: bool | None = None) -> SMPReport:
    """Check the propagation-of-extrema conclusion of one variant.

    Pipeline: the sign test (sub- or supersolution) gates applicability;
    the argmax x-projection is grown through reachable_set; the conclusion
    region is scanned for nodes more than eps away from the extremum.  The
    report also records whether the extremum actually propagated along the
    computed reachability closure, the grid controllability verdict, and a
    named violating node whenever the verdict is "violated".
    """
    if variant not in VARIANTS:
        raise ScenarioError(f"unknown verification variant {variant!r}")
    sense = "min" if variant == "inf-min" else "max"
    check = subsolution_check(u, scenario, residual_tol,
                              "super" if variant == "inf-min" else "sub")
    report = SMPReport(variant, eps, check)
    if not check.holds:
        report.reason = (f"{check.sense}solution test failed at node "
                         f"{check.worst_node} (residual {check.worst_residual:.3e})")
        return report
    if variant == "levy":
        if scenario.nonlocal_kind != "levy-shift":
            report.reason = "levy variant requires a levy-shift scenario"
            return report
        try:
            r = support_ball_radius(scenario.measure)
        except SupportError as err:
            report.reason = f"support-ball condition not confirmed: {err}"
            return report
        if r <= 0:
            report.reason = "support-ball condition not confirmed: radius 0"
            return report

    restriction = "full" if variant in ("torus-full-v", "levy") else "support"
    hypothesis_restriction = "support" if variant != "levy" else "full"
    m_value, nodes = argmax_set(u, scenario, hypothesis_restriction, eps, sense)
    report.max_value = m_value
    report.argmax_nodes = nodes

    z0 = argmax_x_projection(u, scenario, hypothesis_restriction, eps, sense)
    reach = reachable_set(z0, scenario, reach_config)
    report.propagation_mask = reach.final_mask
    report.reach_converged = reach.converged

    table_support = support_values(u, scenario)
    table_full = u.as_xv()
    nv_dims = scenario.domain_v.shape

    def _gap(table):
        return (m_value - table) if sense == "max" else (table - m_value)

    # does the extremum propagate along the computed closure (theorem engine)?
    prop_flat = reach.final_mask.reshape(-1)
    report.propagation_consistent = bool(
        np.all(_gap(table_support)[prop_flat] <= eps))

    # conclusion region of the variant
    if variant == "z-closure":
        concl_table = _gap(table_support)[prop_flat]
        region_rows = np.flatnonzero(prop_flat)
        columns = "support"
    elif variant in ("torus-full-v", "levy"):
        concl_table = _gap(table_full)
        region_rows = np.arange(table_full.shape[0])
        columns = "full"
    else:
        concl_table = _gap(table_support)
        region_rows = np.arange(table_support.shape[0])
        columns = "support"

    bad = np.argwhere(concl_table > eps)
    if bad.size:
        row, col = bad[0]
        x_idx = tuple(int(i) for i in
                      np.unravel_index(region_rows[row], scenario.domain_x.shape))
        v_label = int(col) if columns == "support" \
            else tuple(int(i) for i in np.unravel_index(col, nv_dims))
        report.verdict = "violated"
        report.violating_node = (x_idx, v_label)
        value = (table_support if columns == "support" else table_full)[
            region_rows[row], col]
        report.violating_value = float(value)
    else:
        report.verdict = "holds"

    if check_controllability is None:
        check_controllability = variant != "z-closure"
    if check_controllability:
        ctrl = is_controllable(scenario, reach_config)
        report.controllable = ctrl.controllable
        report.controllability_witness = ctrl.witness
    return report


@dataclass
class JumpSignAudit:
    """Sign bookkeeping of the jump term at one argmax x node.

    At a node attaining the maximum, the jump integral is the weighted sum
    of nonpositive differences; it is strictly negative exactly when the
    below-maximum node set carries positive weight, which contradicts a
    zero-transport subsolution residual.  ``contradiction`` records that
    detection.
    """

    x_index: tuple
    max_value: float
    attaining: list          # support-node ordinals at the maximum
    jump_values: list        # jump at each attaining node
    below_nodes: list        # support-node ordinals strictly below the maximum
    below_weight: float
    contradiction: bool


def jump_sign_audit(u: GridFunction, scenario: Scenario, x_index,
                    eps: float = 1e-9) -> JumpSignAudit:
    """Audit the jump signs at an argmax x node (support-node restriction)."""
    x_index = tuple(np.atleast_1d(x_index))
    op = JumpOperator(scenario.measure, scenario.domain_v)
    table = op.node_values(u)  # (nx, K)
    m_value = float(table.max())
    flat = int(np.ravel_multi_index(x_index, scenario.domain_x.shape))
    here = table[flat]
    gain = float(op.gain_vector @ u.as_xv()[flat])
    attaining = [int(k) for k in np.flatnonzero(here >= m_value - eps)]
    below = [int(k) for k in np.flatnonzero(here < m_value - eps)]
    below_weight = float(scenario.measure.weights[below].sum()) if below else 0.0
    jump_values = [float(gain - op.mass * here[k]) for k in attaining]
    contradiction = any(j < -eps for j in jump_values)
    return JumpSignAudit(x_index, m_value, attaining, jump_values,
                         below, below_weight, contradiction)
