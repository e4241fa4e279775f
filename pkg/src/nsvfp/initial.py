"""Deterministic initial-data generators for the scenario families."""

from __future__ import annotations

import math

import numpy as np

from .config import ScenarioConfig, nominal_u_c
from .core import Grid, FluidState, KineticState, sample_maxwellian
from .coupling import SimulationState
from .errors import ConfigError
from .output import read_snapshot


def make_grid(cfg: ScenarioConfig) -> Grid:
    """Grid for the scenario; v_max defaults to 8 + |bulk speed| so the
    equilibrium Gaussian tail outside the window stays below 1e-14."""
    v_max = cfg.grid.v_max
    if v_max is None:
        u_c = nominal_u_c(cfg.initial)
        v_max = 8.0 + abs(u_c)
        if cfg.initial.kind == "two_stream":
            v_max += 0.5 * cfg.initial.separation
    return Grid(cfg.grid.nx, cfg.grid.nv, v_max)


def build_initial_data(cfg: ScenarioConfig, grid: Grid | None = None) -> SimulationState:
    """State at t = 0 for the configured scenario; deterministic per seed."""
    if grid is None:
        grid = make_grid(cfg)
    ini = cfg.initial
    if ini.kind == "custom_tabulated":
        rho, m, f, header = read_snapshot(ini.path)
        if header["nx"] != grid.nx or header["nv"] != grid.nv:
            raise ConfigError(
                f"tabulated data has grid {header['nx']}x{header['nv']}, "
                f"config asks for {grid.nx}x{grid.nv}", field="initial.path")
        if not math.isclose(header["v_max"], grid.v_max, rel_tol=1e-12):
            raise ConfigError(
                f"tabulated data has v_max = {header['v_max']}, config asks "
                f"for {grid.v_max}", field="initial.path")
        return SimulationState(FluidState(rho, m), KineticState(f))

    rng = np.random.default_rng(cfg.seed)
    phase = rng.uniform(0.0, 2.0 * math.pi) if ini.random_phase else 0.0
    u_c = nominal_u_c(ini)

    rho = np.full(grid.nx, ini.rho_mean)
    if ini.kind == "fluid_perturbation":
        rho = ini.rho_mean * (1.0 + ini.amplitude * np.cos(
            2.0 * math.pi * ini.mode * grid.x_centers + phase))
    m = rho * ini.u_fluid

    if ini.kind == "two_stream":
        half = 0.5 * ini.n_mean
        row = (sample_maxwellian(half, u_c - 0.5 * ini.separation, grid.v_centers)
               + sample_maxwellian(half, u_c + 0.5 * ini.separation, grid.v_centers))
    else:
        row = sample_maxwellian(ini.n_mean, u_c + ini.delta_u, grid.v_centers)
    f = np.tile(row, (grid.nx, 1))
    return SimulationState(FluidState(rho, m), KineticState(f))
