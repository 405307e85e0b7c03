"""CSV, bit-grid, and report renderers.

Reals are written with 17 significant digits; row order is lexicographic in
(x index, v index), so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .grids import Domain, GridFunction
from .reachability import ReachReport
from .smp import SMPReport


def format_real(x: float) -> str:
    return f"{float(x):.17g}"


def field_csv_lines(u: GridFunction, res: GridFunction | None = None):
    nx_dim = u.domain_x.dimension
    nv_dim = u.domain_v.dimension
    header = [f"x_{i}" for i in range(nx_dim)] + [f"v_{i}" for i in range(nv_dim)] + ["u"]
    if res is not None:
        header.append("residual")
    yield ",".join(header)
    xpts = u.domain_x.all_points()
    vpts = u.domain_v.all_points()
    u2 = u.as_xv()
    r2 = res.as_xv() if res is not None else None
    for ix in range(u2.shape[0]):
        xs = [format_real(c) for c in xpts[ix]]
        for iv in range(u2.shape[1]):
            row = xs + [format_real(c) for c in vpts[iv]] + [format_real(u2[ix, iv])]
            if r2 is not None:
                row.append(format_real(r2[ix, iv]))
            yield ",".join(row)


def write_field_csv(path, u: GridFunction, res: GridFunction | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in field_csv_lines(u, res):
            fh.write(line + "\n")


def reach_csv_lines(report: ReachReport, dom: Domain):
    header = [f"i_{k}" for k in range(dom.dimension)] \
        + [f"x_{k}" for k in range(dom.dimension)] + ["arrival", "first_layer"]
    yield ",".join(header)
    arrival = report.arrival.reshape(-1)
    layer = report.first_layer.reshape(-1)
    pts = dom.all_points()
    for flat in range(arrival.size):
        idx = np.unravel_index(flat, dom.shape)
        row = [str(int(i)) for i in idx] + [format_real(c) for c in pts[flat]]
        row.append(format_real(arrival[flat]) if np.isfinite(arrival[flat]) else "inf")
        row.append(str(int(layer[flat])))
        yield ",".join(row)


def write_reach_csv(path, report: ReachReport, dom: Domain) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in reach_csv_lines(report, dom):
            fh.write(line + "\n")


def mask_to_bitgrid(mask: np.ndarray) -> str:
    """Portable 0/1 text: one row per x-line along the last axis."""
    flat = mask.reshape(-1, mask.shape[-1]) if mask.ndim > 1 else mask.reshape(1, -1)
    return "\n".join("".join("1" if v else "0" for v in row) for row in flat)


def smp_report_text(report: SMPReport) -> str:
    lines = [
        f"variant: {report.variant}",
        f"epsilon: {format_real(report.eps)}",
        f"subsolution: {str(report.subsolution.holds).lower()}",
        f"worst_residual: {format_real(report.subsolution.worst_residual)}",
        f"worst_residual_node: {report.subsolution.worst_node}",
    ]
    if report.verdict != "not-applicable":
        lines.append(f"max_value: {format_real(report.max_value)}")
        lines.append(f"argmax_count: {len(report.argmax_nodes)}")
        if report.propagation_mask is not None:
            lines.append(f"propagation_nodes: {int(report.propagation_mask.sum())}"
                         f"/{report.propagation_mask.size}")
        lines.append(f"propagation_consistent: "
                     f"{str(bool(report.propagation_consistent)).lower()}")
    lines.append(f"smp: {report.verdict}")
    if report.violating_node is not None:
        lines.append(f"violating_node: {report.violating_node}")
        lines.append(f"violating_value: {format_real(report.violating_value)}")
    if report.controllable is not None:
        lines.append(f"controllable: {str(report.controllable).lower()}")
        if report.controllability_witness is not None:
            x_pt, y_pt = report.controllability_witness
            lines.append(f"witness_from: {tuple(round(c, 12) for c in x_pt)}")
            lines.append(f"witness_unreached: {tuple(round(c, 12) for c in y_pt)}")
    if report.reason:
        lines.append(f"reason: {report.reason}")
    return "\n".join(lines)


def smp_report_csv(report: SMPReport) -> str:
    header = ["variant", "epsilon", "subsolution", "worst_residual",
              "max_value", "smp", "controllable"]
    row = [report.variant, format_real(report.eps),
           str(report.subsolution.holds).lower(),
           format_real(report.subsolution.worst_residual),
           format_real(report.max_value) if np.isfinite(report.max_value) else "nan",
           report.verdict,
           "" if report.controllable is None else str(report.controllable).lower()]
    return ",".join(header) + "\n" + ",".join(row)
