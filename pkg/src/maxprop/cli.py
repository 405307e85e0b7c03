"""Command-line front end: solve, reach, verify-smp, compare, examples."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .fields import FieldError, grid_sample
from .output import (format_real, mask_to_bitgrid, smp_report_csv,
                     smp_report_text, write_field_csv, write_reach_csv)
from .reachability import ReachConfig, arrival_time, is_controllable, reachable_set
from .registry import REGISTRY, build_example, example_names, get_example
from .scenario import Scenario, ScenarioError, build_scenario
from .scenario_io import parse_scenario_text, scenario_to_text
from .semilag import semi_lagrangian_value
from .smp import verify_smp
from .solver import (SolverConfig, SolverConvergenceError, comparison_check,
                     residual, solve_stationary)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--example", help="built-in example name (see 'examples')")
    p.add_argument("--scenario", help="scenario file path")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="solver tolerance")
    p.add_argument("--resolution", help="grid sizes 'nx,nv' (per x / v axis)")
    p.add_argument("--bc", choices=["dirichlet", "torus"],
                   help="override the x boundary kind")


def _parse_resolution(text):
    if not text:
        return None, None
    parts = [p.strip() for p in text.split(",")]
    nx = int(parts[0]) if parts[0] else None
    nv = int(parts[1]) if len(parts) > 1 and parts[1] else None
    return nx, nv


def _load_config(args) -> tuple[dict, object]:
    if bool(args.example) == bool(args.scenario):
        raise ScenarioError("exactly one of --example or --scenario is required")
    nx, nv = _parse_resolution(args.resolution)
    entry = None
    if args.example:
        entry = get_example(args.example)
        config = entry.config_factory(nx or entry.default_resolution_x,
                                      nv or entry.default_resolution_v)
    else:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            config = parse_scenario_text(fh.read())
        if nx or nv:
            for key, n in (("domain_x", nx), ("domain_v", nv)):
                if n:
                    dim = len(np.atleast_1d(config[key]["lower"]))
                    config[key]["resolution"] = (n,) * dim
    if args.bc:
        dim = len(np.atleast_1d(config["domain_x"]["lower"]))
        config["domain_x"]["periodic"] = (args.bc == "torus",) * dim
    return config, entry


def _solver_config(args, config: dict) -> SolverConfig:
    section = dict(config.get("solver", {}))
    if args.tol is not None:
        section["tolerance"] = args.tol
    known = {k: section[k] for k in ("max_iterations", "tolerance", "sweep", "dt")
             if k in section}
    if "dt" in known and isinstance(known["dt"], str):
        known["dt"] = None if known["dt"] == "auto" else float(known["dt"])
    return SolverConfig(**known)


def _outdir(args) -> Path | None:
    if not args.out:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report(outdir: Path | None, text: str) -> None:
    print(text)
    if outdir is not None:
        (outdir / "report.txt").write_text(text + "\n", encoding="utf-8")


def cmd_examples(args) -> int:
    print(f"{'name':6} {'expected':32} description")
    for name in example_names():
        entry = REGISTRY[name]
        expect = []
        if "controllable" in entry.expected:
            expect.append(f"controllable={str(entry.expected['controllable']).lower()}")
        if "smp" in entry.expected:
            expect.append(f"smp={entry.expected['smp']}")
        print(f"{name:6} {';'.join(expect):32} {entry.description}")
    return EXIT_OK


def cmd_solve(args) -> int:
    config, entry = _load_config(args)
    eq = config.setdefault("equation", {})
    if args.g is not None:
        eq["source"] = args.g
    if args.psi is not None:
        eq["boundary"] = args.psi
    if getattr(args, "lambda_", None) is not None:
        eq["lambda"] = args.lambda_
    scenario = build_scenario(config)
    solver_config = _solver_config(args, config)
    t0 = time.perf_counter()
    if args.method == "semilag":
        result = semi_lagrangian_value(scenario, solver_config)
    else:
        result = solve_stationary(scenario, solver_config)
    elapsed = time.perf_counter() - t0
    res = residual(result.solution, scenario)
    outdir = _outdir(args)
    if outdir is not None:
        write_field_csv(outdir / "solution.csv", result.solution, res)
        write_field_csv(outdir / "residual.csv", res)
    lines = [
        f"method: {args.method}",
        f"iterations: {result.iterations}",
        f"final_update: {format_real(result.final_update)}",
        f"residual_sup: {format_real(float(np.max(np.abs(res.values))))}",
        f"u_min: {format_real(float(result.solution.values.min()))}",
        f"u_max: {format_real(float(result.solution.values.max()))}",
        f"seconds: {elapsed:.3f}",
        f"seed: {args.seed}",
    ]
    _write_report(outdir, "\n".join(lines))
    return EXIT_OK


def cmd_reach(args) -> int:
    config, entry = _load_config(args)
    scenario = build_scenario(config)
    dom = scenario.domain_x
    if args.from_:
        start = np.array([float(t) for t in args.from_.split(",")])
    else:
        start = 0.5 * (np.asarray(dom.lower) + np.asarray(dom.upper))
    seed_idx = dom.nearest_index(start)
    seeds = np.zeros(dom.shape, dtype=bool)
    seeds[seed_idx] = True
    overrides = {"t_step": args.t_step, "total_horizon": args.horizon,
                 "threads": args.threads}
    reach_cfg = entry.reach_config(**overrides) if entry is not None \
        else ReachConfig(**{k: v for k, v in overrides.items() if v is not None})
    t0 = time.perf_counter()
    report = reachable_set(seeds, scenario, reach_cfg)
    elapsed = time.perf_counter() - t0
    outdir = _outdir(args)
    if outdir is not None:
        write_reach_csv(outdir / "reach.csv", report, dom)
        (outdir / "mask.txt").write_text(mask_to_bitgrid(report.final_mask) + "\n",
                                         encoding="utf-8")
    lines = [
        f"seed_node: {tuple(round(c, 12) for c in dom.point(seed_idx))}",
        f"layers: {len(report.masks) - 1}",
        f"reached_nodes: {int(report.final_mask.sum())}/{report.final_mask.size}",
        f"converged: {str(report.converged).lower()}",
        f"covers_grid: {str(report.covers_grid).lower()}",
        f"capture_radius: {format_real(report.capture_radius)}",
        f"seconds: {elapsed:.3f}",
        f"seed: {args.seed}",
    ]
    if args.to:
        target = np.array([float(t) for t in args.to.split(",")])
        lines.append(f"arrival_time: {format_real(arrival_time(report, dom, target))}")
    _write_report(outdir, "\n".join(lines))
    return EXIT_OK


def cmd_verify_smp(args) -> int:
    config, entry = _load_config(args)
    # maximum propagation concerns the bare transport-jump operator: drop
    # the zeroth-order term and the source before checking sign conditions
    config.setdefault("equation", {})
    config["equation"]["lambda"] = 0.0
    config["equation"]["source"] = "const:0"
    scenario = build_scenario(config)
    field_spec = args.u if args.u is not None else \
        (entry.verify_field if entry is not None else "const:1")
    u = grid_sample(field_spec, scenario.domain_x, scenario.domain_v)
    variant = args.variant if args.variant is not None else \
        (entry.verify_variant if entry is not None else "interior")
    reach_cfg = entry.reach_config(threads=args.threads) if entry is not None \
        else ReachConfig(threads=args.threads)
    report = verify_smp(u, scenario, variant=variant, eps=args.eps,
                        residual_tol=args.residual_tol, reach_config=reach_cfg)
    outdir = _outdir(args)
    text = smp_report_text(report)
    if outdir is not None:
        (outdir / "smp.csv").write_text(smp_report_csv(report) + "\n",
                                        encoding="utf-8")
    _write_report(outdir, text)
    return report.exit_code


def cmd_compare(args) -> int:
    config, entry = _load_config(args)
    eq = config.setdefault("equation", {})
    base_g = eq.get("source", "const:0")
    base_psi = eq.get("boundary", "const:0")
    solver_config = _solver_config(args, config)

    def solve_with(g_spec, psi_spec):
        cfg = {k: (dict(v) if isinstance(v, dict) else v) for k, v in config.items()}
        cfg["equation"]["source"] = g_spec
        cfg["equation"]["boundary"] = psi_spec
        scen = build_scenario(cfg)
        return scen, solve_stationary(scen, solver_config)

    scen1, r1 = solve_with(args.g1 or base_g, args.psi1 or base_psi)
    scen2, r2 = solve_with(args.g2 or base_g, args.psi2 or base_psi)
    report = comparison_check(r1.solution, r2.solution, scen2, tol=args.ctol)
    outdir = _outdir(args)
    if outdir is not None:
        write_field_csv(outdir / "solution.csv", r1.solution)
        write_field_csv(outdir / "solution2.csv", r2.solution)
    lines = [
        f"holds: {str(report.holds).lower()}",
        f"boundary_ok: {str(report.boundary_ok).lower()}",
        f"violations: {len(report.interior_violations)}",
        f"max_excess: {format_real(report.max_excess)}",
        f"summary: {report.summary()}",
    ]
    _write_report(outdir, "\n".join(lines))
    return EXIT_OK if report.holds else EXIT_VIOLATION


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxprop",
        description="Controlled transport with velocity jumps: solve fields, "
                    "grow reachable sets, verify maximum propagation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("examples", help="list built-in scenarios")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("solve", help="solve the stationary problem")
    _add_common(p)
    p.add_argument("--g", help="source field expression")
    p.add_argument("--psi", help="boundary field expression")
    p.add_argument("--lambda", dest="lambda_", type=float,
                   help="zeroth-order coefficient")
    p.add_argument("--method", choices=["upwind", "semilag"], default="upwind")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reach", help="grow a reachable set")
    _add_common(p)
    p.add_argument("--from", dest="from_", help="start point 'x0,x1,...'")
    p.add_argument("--to", help="target point for the arrival-time query")
    p.add_argument("--t-step", dest="t_step", type=float,
                   help="single-segment duration")
    p.add_argument("--horizon", type=float, help="total time budget")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("verify-smp", help="verify maximum propagation")
    _add_common(p)
    p.add_argument("--u", help="field to verify (expression); default per example")
    p.add_argument("--variant",
                   choices=["interior", "inf-min", "torus-full-v", "z-closure", "levy"])
    p.add_argument("--eps", type=float, default=1e-9,
                   help="tolerance for 'attains the extremum'")
    p.add_argument("--residual-tol", dest="residual_tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify_smp)

    p = sub.add_parser("compare", help="solve an ordered pair and check comparison")
    _add_common(p)
    p.add_argument("--g1", help="first source expression")
    p.add_argument("--g2", help="second source expression")
    p.add_argument("--psi1", help="first boundary expression")
    p.add_argument("--psi2", help="second boundary expression")
    p.add_argument("--ctol", type=float, default=1e-10,
                   help="comparison tolerance")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage()
        return EXIT_INPUT_ERROR
    np.random.seed(args.seed if hasattr(args, "seed") else 0)
    try:
        return args.func(args)
    except (ScenarioError, FieldError, FileNotFoundError, KeyError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SolverConvergenceError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
