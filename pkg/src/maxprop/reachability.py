"""Reachable sets of the controlled drift system on the x grid.

The controlled state follows dX = b(X, v, a) dt with a velocity frozen at a
measure-support node and a control from the discretized control set.  The
reachable set is grown in layers: each layer adds every grid node some
single constant-(v, a) segment from the previous layer passes within the
capture radius of (half a cell diagonal by default).  The union over layers
is the grid realization of point-to-point controllability, and the layer
masks are nested by construction.

Built-in drift kinds do not depend on x, so each segment is a straight
line and marching it is exact; the public trajectory integrator still uses
explicit RK4 so that exactness is a property, not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .drift import DriftField
from .grids import Domain, GridFunction
from .scenario import Scenario


class ReachabilityError(ValueError):
    """Raised for invalid reachability inputs."""


@dataclass(frozen=True)
class TrajectorySpec:
    """Piecewise-constant velocity and control schedules from a start point."""

    start: tuple
    velocity_schedule: tuple  # ((duration, velocity vector), ...)
    control_schedule: tuple = ()  # ((duration, control vector), ...)
    dt: float = 1e-2

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(float(s) for s in np.atleast_1d(self.start)))
        vs = tuple((float(d), tuple(np.atleast_1d(v))) for d, v in self.velocity_schedule)
        cs = tuple((float(d), tuple(np.atleast_1d(a))) for d, a in self.control_schedule)
        object.__setattr__(self, "velocity_schedule", vs)
        object.__setattr__(self, "control_schedule", cs)
        if self.dt <= 0:
            raise ReachabilityError("integrator step dt must be positive")
        for d, _ in vs + cs:
            if d <= 0:
                raise ReachabilityError(f"schedule duration {d} must be positive")
        if cs and sum(d for d, _ in cs) < sum(d for d, _ in vs) - 1e-12:
            raise ReachabilityError("control schedule must cover the velocity schedule")

    @property
    def horizon(self) -> float:
        return sum(d for d, _ in self.velocity_schedule)


@dataclass
class TrajectoryPath:
    times: np.ndarray
    points: np.ndarray
    exit_time: float | None = None
    exit_point: np.ndarray | None = None


def _schedule_value(schedule, t: float):
    acc = 0.0
    for duration, value in schedule:
        acc += duration
        if t < acc - 1e-15:
            return np.asarray(value, dtype=float)
    return np.asarray(schedule[-1][1], dtype=float) if schedule else None


def integrate_trajectory(spec: TrajectorySpec, drift: DriftField,
                         domain_x: Domain | None = None) -> TrajectoryPath:
    """Explicit RK4 path of the controlled system; exact for constant drifts.

    Leaving the x domain is recorded (first sampled time outside the hull),
    never an error.  Steps never straddle a schedule breakpoint; the last
    partial step of each segment is shortened.
    """
    x = np.asarray(spec.start, dtype=float)
    breaks = sorted({0.0, spec.horizon}
                    | {sum(d for d, _ in spec.velocity_schedule[:i + 1])
                       for i in range(len(spec.velocity_schedule))}
                    | {sum(d for d, _ in spec.control_schedule[:i + 1])
                       for i in range(len(spec.control_schedule))})
    breaks = [t for t in breaks if t <= spec.horizon + 1e-15]
    times = [0.0]
    points = [x.copy()]
    exit_time = None
    exit_point = None

    def record(t, p):
        nonlocal exit_time, exit_point
        times.append(t)
        points.append(p.copy())
        if exit_time is None and domain_x is not None and not domain_x.contains(p):
            exit_time, exit_point = t, p.copy()

    for seg_start, seg_end in zip(breaks[:-1], breaks[1:]):
        t = seg_start
        v = _schedule_value(spec.velocity_schedule, (seg_start + seg_end) / 2)
        alpha_vec = _schedule_value(spec.control_schedule, (seg_start + seg_end) / 2)
        alpha = alpha_vec if spec.control_schedule else None
        while t < seg_end - 1e-15:
            h = min(spec.dt, seg_end - t)
            k1 = drift(x, v, alpha)
            k2 = drift(x + 0.5 * h * k1, v, alpha)
            k3 = drift(x + 0.5 * h * k2, v, alpha)
            k4 = drift(x + h * k3, v, alpha)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            record(t, x)
    return TrajectoryPath(np.asarray(times), np.asarray(points), exit_time, exit_point)


@dataclass(frozen=True)
class ReachConfig:
    """Controls for reachable-set growth.

    t_step: duration of one constant-(v, a) segment; default diameter of the
    x box over the smallest nonzero drift speed (one segment can cross).
    total_horizon: overall time budget across layers (None = unlimited).
    capture_radius: node-capture distance, default half a cell diagonal.
    k_max: layer budget, default 4 x number of grid nodes.
    """

    t_step: float | None = None
    total_horizon: float | None = None
    capture_radius: float | None = None
    k_max: int | None = None
    threads: int = 1


@dataclass
class ReachReport:
    masks: list  # nested boolean x-grid masks, layer 0 = seeds
    arrival: np.ndarray  # earliest capture time per node, inf if unreached
    first_layer: np.ndarray  # layer index of first capture, -1 if unreached
    converged: bool
    covers_grid: bool
    capture_radius: float

    @property
    def final_mask(self) -> np.ndarray:
        return self.masks[-1]


def _drift_groups(scenario: Scenario) -> np.ndarray:
    """Distinct constant drift vectors over (support node, control) pairs."""
    return scenario.drift.drift_vectors(scenario.measure.support_nodes())


def _default_t_step(scenario: Scenario, drifts: np.ndarray) -> float:
    speeds = np.linalg.norm(drifts, axis=1)
    nz = speeds[speeds > 0]
    if nz.size == 0:
        return 1.0
    return scenario.domain_x.diameter / float(nz.min())


def _mark_batch(dom: Domain, arrival: np.ndarray, pos: np.ndarray,
                t: np.ndarray, radius: float) -> None:
    """Scatter-min arrival over grid nodes within radius of each sample."""
    if pos.shape[0] == 0:
        return
    ndim = dom.dimension
    rel = np.empty_like(pos)
    base = np.empty((pos.shape[0], ndim), dtype=np.int64)
    for i in range(ndim):
        lo, h, n, per = dom.lower[i], dom.spacing[i], dom.resolution[i], dom.periodic[i]
        c = pos[:, i] - lo
        if per:
            c = np.mod(c, dom.extent[i])
        cell = np.floor(c / h).astype(np.int64)
        if per:
            cell = np.mod(cell, n)
        else:
            cell = np.clip(cell, 0, n - 2)
        base[:, i] = cell
        rel[:, i] = c
    r2 = radius * radius
    arrival_flat = arrival.reshape(-1)
    for corner in np.ndindex(*(2,) * ndim):
        dist2 = np.zeros(pos.shape[0])
        flat = np.zeros(pos.shape[0], dtype=np.int64)
        for i in range(ndim):
            n, h, per = dom.resolution[i], dom.spacing[i], dom.periodic[i]
            j = base[:, i] + corner[i]
            if per:
                j = np.mod(j, n)
                d = rel[:, i] - (base[:, i] + corner[i]) * h
            else:
                j = np.clip(j, 0, n - 1)
                d = rel[:, i] - j * h
            dist2 += d * d
            flat = flat * n + j
        ok = dist2 <= r2
        if ok.any():
            # scatter-min only where the sample actually improves the arrival
            cand_idx = flat[ok]
            cand_t = t[ok]
            improves = cand_t < arrival_flat[cand_idx]
            if improves.any():
                np.minimum.at(arrival_flat, cand_idx[improves], cand_t[improves])


_SAMPLE_CHUNK = 2_000_000


def _march_segments(scenario: Scenario, arrival: np.ndarray,
                    starts: np.ndarray, t0: np.ndarray, drifts: np.ndarray,
                    horizon: float, radius: float, threads: int = 1) -> None:
    """March one constant segment per (start, drift) pair, marking captures.

    Segments are straight lines (the drift kinds do not depend on x), so the
    samples are generated in closed form: one per capture radius of arc
    length, truncated at the analytic exit time through a non-periodic face
    (propagation only flows along segments inside the domain) or at the
    horizon, whichever comes first.
    """
    dom = scenario.domain_x
    speeds = np.linalg.norm(drifts, axis=1)
    moving = speeds > 0
    if not moving.any() or starts.shape[0] == 0:
        return
    drifts = drifts[moving]
    speeds = speeds[moving]
    n0, ng = starts.shape[0], drifts.shape[0]

    pos0 = np.repeat(starts, ng, axis=0)         # (B, N)
    base_t = np.repeat(t0, ng)                   # (B,)
    vel = np.tile(drifts, (n0, 1))               # (B, N)
    dt = radius / np.tile(speeds, n0)            # (B,)

    # analytic segment duration: horizon, cut at the first wall crossing
    duration = np.full(pos0.shape[0], float(horizon))
    for i in range(dom.dimension):
        if dom.periodic[i]:
            continue
        vi = vel[:, i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s_hi = np.where(vi > 0, (dom.upper[i] - pos0[:, i]) / vi, np.inf)
            s_lo = np.where(vi < 0, (dom.lower[i] - pos0[:, i]) / vi, np.inf)
        duration = np.minimum(duration, np.minimum(s_hi, s_lo))
    duration = np.maximum(duration, 0.0)

    nsamples = np.ceil(duration / dt).astype(np.int64)
    keep = nsamples > 0
    if not keep.any():
        return
    pos0, base_t, vel, dt = pos0[keep], base_t[keep], vel[keep], dt[keep]
    duration, nsamples = duration[keep], nsamples[keep]

    # chunk trajectories so each flat sample batch stays bounded
    order = np.arange(pos0.shape[0])
    start_idx = 0
    while start_idx < order.size:
        count = 0
        end_idx = start_idx
        while end_idx < order.size and count + nsamples[order[end_idx]] <= _SAMPLE_CHUNK:
            count += nsamples[order[end_idx]]
            end_idx += 1
        end_idx = max(end_idx, start_idx + 1)
        sel = order[start_idx:end_idx]
        m = nsamples[sel]
        total = int(m.sum())
        traj = np.repeat(np.arange(sel.size), m)
        offsets = np.concatenate([[0], np.cumsum(m)[:-1]])
        step_no = np.arange(total) - offsets[traj] + 1
        tau = np.minimum(step_no * dt[sel][traj], duration[sel][traj])
        sample_pos = pos0[sel][traj] + tau[:, None] * vel[sel][traj]
        sample_t = base_t[sel][traj] + tau
        _mark_batch(dom, arrival, sample_pos, sample_t, radius)
        start_idx = end_idx


def reach_step(mask: np.ndarray, scenario: Scenario,
               t_step: float | None = None,
               capture_radius: float | None = None) -> np.ndarray:
    """One layer of growth: nodes reachable from any masked node by a single
    constant-(v, a) segment of duration up to t_step."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != scenario.domain_x.shape:
        raise ReachabilityError("mask shape does not match the x grid")
    if not mask.any():
        raise ReachabilityError("reach_step requires a nonempty mask")
    dom = scenario.domain_x
    drifts = _drift_groups(scenario)
    horizon = t_step if t_step is not None else _default_t_step(scenario, drifts)
    radius = capture_radius if capture_radius is not None else dom.cell_half_diagonal
    arrival = np.full(dom.shape, np.inf)
    arrival[mask] = 0.0
    pts = dom.all_points()[mask.reshape(-1)]
    _march_segments(scenario, arrival, pts, np.zeros(pts.shape[0]), drifts,
                    horizon, radius)
    return np.isfinite(arrival)


def reachable_set(seeds: np.ndarray, scenario: Scenario,
                  config: ReachConfig | None = None,
                  _drifts: np.ndarray | None = None) -> ReachReport:
    """Grow layers from the seed mask to a fixed point or budget limit.

    Each new layer marches segments from the nodes first captured in the
    previous layer (earlier nodes were already expanded, so the union is
    unchanged); arrival times keep the minimum over all capture events.
    """
    config = config or ReachConfig()
    dom = scenario.domain_x
    seeds = np.asarray(seeds, dtype=bool)
    if seeds.shape != dom.shape:
        raise ReachabilityError("seed mask shape does not match the x grid")
    if not seeds.any():
        raise ReachabilityError("reachable_set requires a nonempty seed mask")

    drifts = _drifts if _drifts is not None else _drift_groups(scenario)
    t_step = config.t_step if config.t_step is not None \
        else _default_t_step(scenario, drifts)
    radius = config.capture_radius if config.capture_radius is not None \
        else dom.cell_half_diagonal
    k_max = config.k_max if config.k_max is not None else 4 * dom.num_nodes

    arrival = np.full(dom.shape, np.inf)
    arrival[seeds] = 0.0
    first_layer = np.where(seeds, 0, -1)
    masks = [seeds.copy()]
    if seeds.all():
        # nothing can be added to a full mask
        return ReachReport(masks, arrival, first_layer, True, True,
                           config.capture_radius or dom.cell_half_diagonal)
    all_points = dom.all_points()
    frontier = seeds.copy()
    budget = config.total_horizon
    used = 0.0
    converged = False
    k = 0
    while k < k_max:
        if budget is not None and used >= budget - 1e-15:
            break
        horizon = t_step if budget is None else min(t_step, budget - used)
        k += 1
        before = np.isfinite(arrival)
        pts = all_points[frontier.reshape(-1)]
        t0 = arrival[frontier]
        _march_segments(scenario, arrival, pts, t0, drifts, horizon, radius)
        now = np.isfinite(arrival)
        new_nodes = now & ~before
        first_layer[new_nodes] = k
        masks.append(now.copy())
        used += horizon
        if not new_nodes.any():
            converged = True
            break
        frontier = new_nodes
    covers = bool(np.isfinite(arrival).all())
    return ReachReport(masks, arrival, first_layer, converged, covers, radius)


@dataclass
class ControllabilityResult:
    controllable: bool
    witness: tuple | None  # ((x point), (unreachable y point)) on failure
    capture_radius: float
    strategy: str


def _first_unreached(dom: Domain, mask: np.ndarray) -> tuple:
    idx = tuple(int(i) for i in np.argwhere(~mask)[0])
    return tuple(dom.point(idx))


def _negated_scenario_drifts(scenario: Scenario) -> np.ndarray:
    return -_drift_groups(scenario)


def is_controllable(scenario: Scenario, config: ReachConfig | None = None,
                    strategy: str = "pivot",
                    probe_limit: int = 512) -> ControllabilityResult:
    """Grid-level controllability verdict with a witness on failure.

    pivot strategy: the grid is controllable iff the forward and the
    time-reversed reachable sets of a pivot node both cover the grid (any
    node reaches the pivot, the pivot reaches any node, and segments
    concatenate).  probe strategy: run reachable_set from every node of a
    coarse probe set (all nodes up to probe_limit, else a stride-stratified
    sample) and demand full coverage from each.
    """
    config = config or ReachConfig()
    dom = scenario.domain_x
    if strategy == "pivot":
        center = dom.nearest_index(0.5 * (np.asarray(dom.lower) + np.asarray(dom.upper)))
        seed = np.zeros(dom.shape, dtype=bool)
        seed[center] = True
        fwd = reachable_set(seed, scenario, config)
        if not fwd.covers_grid:
            witness = (tuple(dom.point(center)), _first_unreached(dom, fwd.final_mask))
            return ControllabilityResult(False, witness, fwd.capture_radius, strategy)
        # on a full torus the drifts do not depend on x, so reach sets
        # translate node-to-node: coverage from the pivot already implies
        # coverage from every node
        if all(dom.periodic):
            return ControllabilityResult(True, None, fwd.capture_radius, strategy)
        bwd = _reachable_set_negated(seed, scenario, config)
        if not bwd.covers_grid:
            witness = (_first_unreached(dom, bwd.final_mask), tuple(dom.point(center)))
            return ControllabilityResult(False, witness, bwd.capture_radius, strategy)
        return ControllabilityResult(True, None, fwd.capture_radius, strategy)

    if strategy != "probe":
        raise ReachabilityError(f"unknown controllability strategy {strategy!r}")
    total = dom.num_nodes
    if total <= probe_limit:
        probe_flat = np.arange(total)
    else:
        stride = int(np.ceil(total / probe_limit))
        probe_flat = np.arange(0, total, stride)
    radius = config.capture_radius if config.capture_radius is not None \
        else dom.cell_half_diagonal
    for flat in probe_flat:
        idx = np.unravel_index(int(flat), dom.shape)
        seed = np.zeros(dom.shape, dtype=bool)
        seed[idx] = True
        rep = reachable_set(seed, scenario, config)
        if not rep.covers_grid:
            witness = (tuple(dom.point(idx)), _first_unreached(dom, rep.final_mask))
            return ControllabilityResult(False, witness, rep.capture_radius, strategy)
    return ControllabilityResult(True, None, radius, strategy)


def _reachable_set_negated(seeds: np.ndarray, scenario: Scenario,
                           config: ReachConfig) -> ReachReport:
    """reachable_set under time reversal (all drift vectors negated)."""
    return reachable_set(seeds, scenario, config,
                         _drifts=-_drift_groups(scenario))


def arrival_time(report: ReachReport, dom: Domain, point) -> float:
    """Earliest capture time of the grid node nearest the given point."""
    return float(report.arrival[dom.nearest_index(np.asarray(point, dtype=float))])
