"""The simulation driver: time stepping, sampling, watchdogs, file output."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import ScenarioConfig, config_as_dict
from .core import equilibrium_from_initial
from .coupling import SchemeConfigs, full_step, step_dt_bound
from .diagnostics import DiagnosticsRecord, collect_record
from .errors import NumericalBlowupError, StepRejectedError
from .initial import build_initial_data, make_grid
from .kinetic import max_principle_bound
from .output import (DiagnosticsWriter, sha256_of, write_manifest,
                     write_snapshot)

_EVENT_TOL = 1e-9


@dataclass
class RunReport:
    """Summary of one run; ``records`` keeps the sampled diagnostics in memory."""

    status: str                  # "completed" or "failed"
    error: str | None
    n_steps: int
    wall_time_s: float
    out_dir: str | None
    files: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    final_record: DiagnosticsRecord | None = None
    final_state: object = None
    min_rho: float = 0.0
    min_f: float = 0.0
    max_rho: float = 0.0
    max_f: float = 0.0
    watchdog_violations: int = 0




def run(cfg: ScenarioConfig, out_dir=None) -> RunReport:
    """Time-step the scenario to t_end.

    Writes (when ``out_dir`` is given) the diagnostics time series, optional
    field snapshots, and a manifest listing every output file with its
    content hash.  A numerical failure flushes partial output and marks the
    manifest failed instead of raising.
    """
    t_start = time.perf_counter()
    grid = make_grid(cfg)
    sim = build_initial_data(cfg, grid)
    eq = equilibrium_from_initial(sim.fluid, sim.kinetic, grid)
    cfgs = SchemeConfigs(cfg.fluid, cfg.kinetic, cfg.coupling)
    f0_sup = float(sim.kinetic.f.max())
    f_floor = 1e-30 * f0_sup if f0_sup > 0 else 1e-300

    out_path = None
    writer = None
    files = []
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        writer = DiagnosticsWriter(out_path / "diagnostics.csv")
        files.append("diagnostics.csv")

    report = RunReport(status="completed", error=None, n_steps=0,
                       wall_time_s=0.0, out_dir=str(out_path) if out_path else None)
    report.min_rho = float(sim.fluid.rho.min())
    report.max_rho = float(sim.fluid.rho.max())
    report.min_f = float(sim.kinetic.f.min())
    report.max_f = float(sim.kinetic.f.max())

    def sample(state):
        rec = collect_record(state, eq, cfg.params, grid, f_floor=f_floor)
        report.records.append(rec)
        if writer is not None:
            writer.append(rec)

    def snapshot(state):
        name = f"snapshot_{state.step_index:08d}.bin"
        write_snapshot(out_path / name, state.fluid.rho, state.fluid.m,
                       state.kinetic.f, grid.v_max, state.t)
        files.append(name)

    sample(sim)
    snapshots_on = out_path is not None and cfg.snapshot_every is not None
    if snapshots_on:
        snapshot(sim)

    # sample/snapshot at exact multiples of the cadences: dt is capped so the
    # step lands on the next pending event time
    k_sample, k_snap = 1, 1
    tol = _EVENT_TOL * max(1.0, cfg.t_end)
    try:
        while sim.t < cfg.t_end - tol:
            if cfg.dt_mode == "fixed":
                dt = cfg.dt
            else:
                dt = cfg.safety * step_dt_bound(sim, cfg.params, grid, cfgs)
            target = min(k_sample * cfg.sample_every, cfg.t_end)
            if snapshots_on:
                target = min(target, k_snap * cfg.snapshot_every)
            dt = min(dt, target - sim.t)
            sim = full_step(sim, dt, cfg.params, grid, cfgs)
            report.n_steps += 1

            rho, f = sim.fluid.rho, sim.kinetic.f
            report.min_rho = min(report.min_rho, float(rho.min()))
            report.max_rho = max(report.max_rho, float(rho.max()))
            report.min_f = min(report.min_f, float(f.min()))
            fmax = float(f.max())
            report.max_f = max(report.max_f, fmax)
            bound = max_principle_bound(f0_sup, report.max_rho, sim.t)
            if fmax > bound * (1.0 + 1e-12):
                report.watchdog_violations += 1

            if sim.t >= k_sample * cfg.sample_every - tol:
                sample(sim)
                k_sample += 1
            if snapshots_on and sim.t >= k_snap * cfg.snapshot_every - tol:
                snapshot(sim)
                k_snap += 1
        if report.records and report.records[-1].t < cfg.t_end - tol:
            sample(sim)
    except (NumericalBlowupError, StepRejectedError) as err:
        report.status = "failed"
        report.error = f"{type(err).__name__}: {err}"

    report.wall_time_s = time.perf_counter() - t_start
    report.final_record = report.records[-1] if report.records else None
    report.final_state = sim
    if writer is not None:
        writer.close()
    if out_path is not None:
        manifest = {
            "name": cfg.name,
            "status": report.status,
            "error": report.error,
            "version": __version__,
            "config": config_as_dict(cfg),
            "n_steps": report.n_steps,
            "wall_time_s": report.wall_time_s,
            "watchdog_violations": report.watchdog_violations,
            "final_record": vars(report.final_record) if report.final_record else None,
            "files": {name: sha256_of(out_path / name) for name in files},
        }
        write_manifest(out_path / "manifest.json", manifest)
    return report
