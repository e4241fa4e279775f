"""Command-line driver.

Subcommands: ``run`` (time-step a scenario and write outputs), ``validate``
(parse + validate a config, echo the resolved values), ``equilibrium``
(print the asymptotic state of the configured initial data), ``convergence``
(automated self-convergence study under grid refinement).

Exit codes: 0 success, 2 validation failure, 3 numerical blowup.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import (ScenarioConfig, echo_config, load_config,
                     with_refined_grid)
from .core import equilibrium_from_initial
from .errors import ConfigError, SimulationError
from .initial import build_initial_data, make_grid
from .runner import run


def _load(path) -> ScenarioConfig:
    return load_config(Path(path).read_text())


def _cmd_validate(args) -> int:
    cfg = _load(args.config)
    sys.stdout.write(echo_config(cfg))
    return 0


def _cmd_equilibrium(args) -> int:
    cfg = _load(args.config)
    grid = make_grid(cfg)
    sim = build_initial_data(cfg, grid)
    eq = equilibrium_from_initial(sim.fluid, sim.kinetic, grid)
    print(f"rho_bar = {eq.rho_bar:.17g}")
    print(f"n_bar = {eq.n_bar:.17g}")
    print(f"u_c = {eq.u_c:.17g}")
    return 0


def _cmd_run(args) -> int:
    cfg = _load(args.config)
    report = run(cfg, out_dir=args.out)
    print(f"scenario {cfg.name}: {report.status} after {report.n_steps} steps "
          f"({report.wall_time_s:.2f} s)")
    if report.final_record is not None:
        rec = report.final_record
        print(f"t = {rec.t:.6g}  fluid_mass = {rec.fluid_mass:.12g}  "
              f"kinetic_mass = {rec.kinetic_mass:.12g}  "
              f"mixture_momentum = {rec.mixture_momentum:.12g}")
        print(f"entropy_E = {rec.entropy_E:.12g}  f_L1_gap = "
              f"{rec.f_L1_gap_to_maxwellian:.6g}  |m1-m2| = {abs(rec.m1 - rec.m2):.6g}")
    if report.watchdog_violations:
        print(f"WARNING: {report.watchdog_violations} max-principle watchdog "
              f"violations", file=sys.stderr)
    if report.status != "completed":
        print(f"run failed: {report.error}", file=sys.stderr)
        return 3
    return 0


def _coarsen_x(arr, factor):
    if arr.ndim == 1:
        return arr.reshape(-1, factor).mean(axis=1)
    return arr.reshape(arr.shape[0] // factor, factor, -1).mean(axis=1)


def _cmd_convergence(args) -> int:
    cfg = _load(args.config)
    if cfg.dt_mode != "fixed":
        print("convergence studies need dt_mode = fixed so dt refines with dx",
              file=sys.stderr)
        return 2
    levels = []
    for k in range(args.refinements + 1):
        level_cfg = with_refined_grid(cfg, 2**k)
        report = run(level_cfg)
        if report.status != "completed":
            print(f"refinement level {k} failed: {report.error}", file=sys.stderr)
            return 3
        levels.append((level_cfg, report, make_grid(level_cfg)))
    return _report_orders(levels)


def _report_orders(levels) -> int:
    # self-convergence: L1 distance between consecutive refinement levels,
    # the fine fields coarsened to the coarse grid by cell averaging
    print("level  nx      L1(rho)        L1(m)          L1(f)        order")
    errors = []
    for k in range(len(levels) - 1):
        (_, rep_c, grid_c) = levels[k]
        (_, rep_f, grid_f) = levels[k + 1]
        coarse = rep_c.final_state
        fine = rep_f.final_state
        factor = grid_f.nx // grid_c.nx
        e_rho = grid_c.dx * np.abs(
            _coarsen_x(fine.fluid.rho, factor) - coarse.fluid.rho).sum()
        e_m = grid_c.dx * np.abs(
            _coarsen_x(fine.fluid.m, factor) - coarse.fluid.m).sum()
        e_f = grid_c.dx * grid_c.dv * np.abs(
            _coarsen_x(fine.kinetic.f, factor) - coarse.kinetic.f).sum()
        errors.append(e_rho + e_m + e_f)
        order = "" if k == 0 else f"{np.log2(errors[k - 1] / errors[k]):.2f}"
        print(f"{k:>5}  {grid_c.nx:<6} {e_rho:<14.6e} {e_m:<14.6e} "
              f"{e_f:<12.6e} {order}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nsvfp",
        description="1D fluid + kinetic particle simulator on the periodic torus")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="time-step a scenario and write outputs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)

    p_val = sub.add_parser("validate", help="validate a config and echo defaults")
    p_val.add_argument("--config", required=True)

    p_eq = sub.add_parser("equilibrium", help="print the asymptotic state")
    p_eq.add_argument("--config", required=True)

    p_conv = sub.add_parser("convergence", help="self-convergence study")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--refinements", type=int, default=2)

    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "validate": _cmd_validate,
                "equilibrium": _cmd_equilibrium, "convergence": _cmd_convergence}
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except SimulationError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
