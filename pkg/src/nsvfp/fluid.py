"""One time substep of the 1D compressible flow equations without drag.

Mass and momentum are advanced in conservative flux form on the periodic grid
(local Lax-Friedrichs convective fluxes, pressure folded into the momentum
flux), so the discrete totals telescope exactly.  The viscous term uses
central differences with face viscosity evaluated at the arithmetic mean of
the adjacent densities, either as an explicit flux or as a backward-Euler
solve (one cyclic tridiagonal system in the velocity).  The density floor
only enters velocity and sound-speed reconstruction, never the conserved
variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, FluidState, ModelParams, VACUUM_FLOOR, viscosity
from .errors import NumericalBlowupError, StepRejectedError
from .kernels import minmod, solve_periodic_tridiagonal


@dataclass(frozen=True)
class FluidSchemeConfig:
    cfl: float = 0.9
    visc_theta: int = 1               # 0: explicit viscous flux, 1: backward Euler
    reconstruction: str = "first_order"  # or "muscl_minmod" (Heun in time)

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.visc_theta not in (0, 1):
            raise ValueError(f"visc_theta must be 0 or 1, got {self.visc_theta}")
        if self.reconstruction not in ("first_order", "muscl_minmod"):
            raise ValueError(f"unknown reconstruction {self.reconstruction!r}")


def _sound_speed(rho_floored, params):
    return np.sqrt(params.gamma * params.A * rho_floored ** (params.gamma - 1.0))


def stable_dt(state: FluidState, params: ModelParams, cfg: FluidSchemeConfig,
              grid: Grid) -> float:
    """Largest admissible dt: advective Courant bound, plus the diffusive
    bound when the viscous term is explicit.  MUSCL halves the advective
    bound (the limited reconstruction is TVD only up to Courant 1/2)."""
    rho_f = np.maximum(state.rho, VACUUM_FLOOR)
    u = state.m / rho_f
    speed = float(np.max(np.abs(u) + _sound_speed(rho_f, params)))
    dt = math.inf if speed == 0.0 else cfg.cfl * grid.dx / speed
    if cfg.reconstruction == "muscl_minmod":
        dt *= 0.5
    if cfg.visc_theta == 0:
        rate = float(np.max(viscosity(state.rho, params) / rho_f))
        dt = min(dt, cfg.cfl * grid.dx**2 / (2.0 * rate))
    return dt


def _reconstruct(q):
    """Left/right states at face i+1/2 from minmod-limited slopes."""
    slope = minmod(q - np.roll(q, 1), np.roll(q, -1) - q)
    return q + 0.5 * slope, np.roll(q, -1) - 0.5 * np.roll(slope, -1)


def _rhs(rho, m, params, cfg, grid, include_viscous):
    """Flux-form time derivative of (rho, m) at x-faces i+1/2."""
    if cfg.reconstruction == "first_order":
        rho_l, rho_r = rho, np.roll(rho, -1)
        m_l, m_r = m, np.roll(m, -1)
    else:
        rho_l, rho_r = _reconstruct(rho)
        m_l, m_r = _reconstruct(m)
    rf_l = np.maximum(rho_l, VACUUM_FLOOR)
    rf_r = np.maximum(rho_r, VACUUM_FLOOR)
    u_l, u_r = m_l / rf_l, m_r / rf_r
    # minmod keeps face values inside the neighbor hull, so rho_l/r >= 0
    p_l = params.A * rho_l**params.gamma
    p_r = params.A * rho_r**params.gamma
    a = np.maximum(np.abs(u_l) + _sound_speed(rf_l, params),
                   np.abs(u_r) + _sound_speed(rf_r, params))
    flux_rho = 0.5 * (m_l + m_r) - 0.5 * a * (rho_r - rho_l)
    flux_m = 0.5 * (m_l * u_l + p_l + m_r * u_r + p_r) - 0.5 * a * (m_r - m_l)
    if include_viscous:
        u_cell = m / np.maximum(rho, VACUUM_FLOOR)
        mu_face = viscosity(0.5 * (rho + np.roll(rho, -1)), params)
        flux_m = flux_m - mu_face * (np.roll(u_cell, -1) - u_cell) / grid.dx
    d_rho = -(flux_rho - np.roll(flux_rho, 1)) / grid.dx
    d_m = -(flux_m - np.roll(flux_m, 1)) / grid.dx
    return d_rho, d_m


def _implicit_viscous(rho_new, m_star, dt, params, grid):
    """Backward-Euler viscous update: solve for u, return rho * u.

    Summing the rows of the cyclic system telescopes the viscous fluxes away,
    so the discrete momentum total equals that of ``m_star`` exactly.  The
    true density (not the floored one) sits on the diagonal to keep that
    identity; the matrix stays positive definite because mu >= mu0 > 0.
    """
    if float(rho_new.max()) <= VACUUM_FLOOR:
        return m_star.copy()
    mu_face = viscosity(0.5 * (rho_new + np.roll(rho_new, -1)), params)  # face i+1/2
    lam = dt / grid.dx**2
    diag = rho_new + lam * (mu_face + np.roll(mu_face, 1))
    off = -lam * mu_face
    u = solve_periodic_tridiagonal(off[:-1], diag, off[:-1], off[-1], off[-1], m_star)
    return rho_new * u


def fluid_substep(state: FluidState, dt: float, params: ModelParams,
                  cfg: FluidSchemeConfig, grid: Grid) -> FluidState:
    """Advance (rho, m) by dt.  Drag is *not* applied here.

    First order marches with forward Euler, MUSCL with Heun's two-stage
    method; with ``visc_theta = 1`` the viscous term is then applied by a
    backward-Euler solve within the same substep.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    admissible = stable_dt(state, params, cfg, grid)
    if dt > admissible * (1.0 + 1e-9):
        raise StepRejectedError(
            f"fluid dt {dt:.3e} exceeds the stability bound {admissible:.3e}",
            admissible_dt=admissible)
    rho, m = state.rho, state.m
    explicit_visc = cfg.visc_theta == 0
    d_rho, d_m = _rhs(rho, m, params, cfg, grid, explicit_visc)
    rho1 = rho + dt * d_rho
    m1 = m + dt * d_m
    if cfg.reconstruction == "muscl_minmod":
        d_rho2, d_m2 = _rhs(rho1, m1, params, cfg, grid, explicit_visc)
        rho1 = 0.5 * (rho + rho1 + dt * d_rho2)
        m1 = 0.5 * (m + m1 + dt * d_m2)
    if cfg.visc_theta == 1:
        m1 = _implicit_viscous(rho1, m1, dt, params, grid)
    if not (np.all(np.isfinite(rho1)) and np.all(np.isfinite(m1))):
        raise NumericalBlowupError("fluid substep produced non-finite values")
    return FluidState(rho1, m1)
