"""Monitored functionals: conservation totals, entropy and its dissipation,
relative-entropy functionals of the fluid, mean velocities of both phases,
equilibrium gaps, weighted norms, and the effective velocity / viscous flux
fields.

Diagnostics are pure read-only functions of a state snapshot and never feed
back into the dynamics.  All derivatives here are centered differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .core import (Grid, EquilibriumState, KineticState, ModelParams,
                   VACUUM_FLOOR, velocity_from_state, viscosity)
from .coupling import SimulationState, drag_moments

#: f log f is evaluated as zero below this default; runs rescale it to
#: 1e-30 times the initial maximum of f.
DEFAULT_F_FLOOR = 1e-300

#: Velocity-weight exponent used for the monitored weighted norms.
DEFAULT_WEIGHT_EXPONENT = 4.0

#: Default mixing weight of the cross term in the fluid relative entropy.
DEFAULT_ETA = 0.1


@dataclass
class DiagnosticsRecord:
    """One time-stamped row of every monitored functional."""

    t: float
    fluid_mass: float
    kinetic_mass: float
    mixture_momentum: float
    entropy_E: float
    dissipation_D: float
    rel_entropy_E_eta: float
    pi_gamma_total: float
    m1: float
    m2: float
    u_c_gap_m1: float
    u_c_gap_m2: float
    rho_Linf_gap: float
    u_L2_gap: float
    f_L1_gap_to_maxwellian: float
    n_L1_gap: float
    nw_L1_gap: float
    rho_min: float
    rho_max: float
    f_max: float
    weighted_f_norm_k0: float
    weighted_fv_norm: float
    eff_flux_Linf: float
    vacuum_cells: int


RECORD_FIELDS = tuple(f.name for f in fields(DiagnosticsRecord))


def _x_derivative(q: np.ndarray, dx: float) -> np.ndarray:
    """Periodic centered difference in x."""
    return (np.roll(q, -1, axis=0) - np.roll(q, 1, axis=0)) / (2.0 * dx)


def _flogf(f: np.ndarray, f_floor: float) -> np.ndarray:
    """f log f with the 0 log 0 = 0 convention below the floor."""
    out = np.zeros_like(f)
    mask = f > f_floor
    np.log(f, out=out, where=mask)
    return np.where(mask, f * out, 0.0)


def entropy(sim: SimulationState, params: ModelParams, grid: Grid,
            f_floor: float = DEFAULT_F_FLOOR):
    """Total entropy: fluid kinetic + internal energy plus particle kinetic
    energy and Boltzmann entropy.  Returns the total and its breakdown."""
    rho, m, f = sim.fluid.rho, sim.fluid.m, sim.kinetic.f
    kinetic_fluid = grid.dx * float(np.sum(0.5 * m**2 / np.maximum(rho, VACUUM_FLOOR)))
    internal = grid.dx * params.A / (params.gamma - 1.0) * float(np.sum(rho**params.gamma))
    v2 = grid.v_centers**2
    kinetic_particles = 0.5 * grid.dx * grid.dv * float((f @ v2).sum())
    boltzmann = grid.dx * grid.dv * float(_flogf(f, f_floor).sum())
    total = kinetic_fluid + internal + kinetic_particles + boltzmann
    return total, {"fluid_kinetic": kinetic_fluid, "fluid_internal": internal,
                   "particle_kinetic": kinetic_particles, "boltzmann": boltzmann}


def dissipation(sim: SimulationState, params: ModelParams, grid: Grid,
                f_floor: float = DEFAULT_F_FLOOR) -> float:
    """Viscous dissipation plus the Fisher-type kinetic dissipation

        sum mu(rho) |D_x u|^2 + sum rho |(u - v) sqrt(f) - 2 D_v sqrt(f)|^2,

    with centered differences and sqrt(f) floored inside the v-derivative.
    Vanishes on the global equilibrium up to O(dv^4)."""
    rho, f = sim.fluid.rho, sim.kinetic.f
    u = velocity_from_state(sim.fluid)
    ux = _x_derivative(u, grid.dx)
    fluid_part = grid.dx * float(np.sum(viscosity(rho, params) * ux**2))
    sqrt_f = np.sqrt(f)
    sqrt_f_floored = np.sqrt(np.maximum(f, f_floor))
    dsqrt = np.gradient(sqrt_f_floored, grid.dv, axis=1)
    rel = (u[:, None] - grid.v_centers[None, :]) * sqrt_f - 2.0 * dsqrt
    kinetic_part = grid.dx * grid.dv * float(np.sum(rho[:, None] * rel**2))
    return fluid_part + kinetic_part


def pressure_potential_gap(rho, rho_bar: float, params: ModelParams):
    """Bregman divergence of the pressure potential, pointwise:

        Pi(rho | rho_bar) = A/(gamma-1) * (rho^g - rho_bar^g
                                           - g rho_bar^{g-1} (rho - rho_bar))

    Quadratic near rho_bar, nonnegative for all rho >= 0."""
    g = params.gamma
    c = params.A / (g - 1.0)
    return c * (rho**g - rho_bar**g - g * rho_bar ** (g - 1.0) * (rho - rho_bar))


def interval_primitive(g: np.ndarray, grid: Grid) -> np.ndarray:
    """Discrete zero-mean primitive on the circle.

    Midpoint cumulative sum to the cell centers, then the discrete mean is
    subtracted so that dx * sum of the result is zero by construction."""
    G = grid.dx * (np.cumsum(g) - 0.5 * np.asarray(g, dtype=float))
    return G - G.mean()


def mean_velocities(sim: SimulationState, eq: EquilibriumState, grid: Grid):
    """Mass-weighted mean velocity of each phase.

    ``m1`` divides the current fluid momentum by the (conserved) initial
    fluid mass, ``m2`` the particle momentum by the initial particle mass.
    A zero-mass phase yields NaN as the missing-value marker."""
    m1 = math.nan
    m2 = math.nan
    if eq.rho_bar > 0:
        m1 = grid.dx * float(sim.fluid.m.sum()) / eq.rho_bar
    if eq.n_bar > 0:
        _, nw = drag_moments(sim.kinetic, grid)
        m2 = grid.dx * float(nw.sum()) / eq.n_bar
    return m1, m2


def relative_entropy_fluid(sim: SimulationState, eq: EquilibriumState,
                           eta: float, params: ModelParams, grid: Grid):
    """Fluid relative entropy with an eta-weighted cross term.

    Quadratic part sum(rho |u - m1|^2) / 2 plus the pressure-potential gap,
    minus eta times the coupling of the momentum fluctuation with the
    zero-mean primitive of the density fluctuation.  The ``coercive`` flag in
    the returned parts records whether the assembled form is nonnegative on
    this state (it is for small enough eta)."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    rho = sim.fluid.rho
    u = velocity_from_state(sim.fluid)
    m1, _ = mean_velocities(sim, eq, grid)
    quad = 0.5 * grid.dx * float(np.sum(rho * (u - m1) ** 2))
    pi_total = grid.dx * float(np.sum(pressure_potential_gap(rho, eq.rho_bar, params)))
    primitive = interval_primitive(rho - eq.rho_bar, grid)
    cross = grid.dx * float(np.sum(rho * (u - m1) * primitive))
    total = quad + pi_total - eta * cross
    parts = {"quadratic": quad, "pi_gamma_total": pi_total, "cross": cross,
             "coercive": bool(total >= 0.0)}
    return total, parts


def effective_velocity(sim: SimulationState, params: ModelParams, grid: Grid,
                       floor: float = VACUUM_FLOOR):
    """u + primitive(n) + mu(rho) rho_x / rho^2, or None near vacuum.

    The combination obeys a damped transport equation and is monitored only;
    it is undefined when the density reaches the floor anywhere."""
    rho = sim.fluid.rho
    if float(rho.min()) < floor:
        return None
    n, _ = drag_moments(sim.kinetic, grid)
    rho_x = _x_derivative(rho, grid.dx)
    u = velocity_from_state(sim.fluid, floor)
    return u + interval_primitive(n, grid) + viscosity(rho, params) * rho_x / rho**2


def effective_viscous_flux(sim: SimulationState, params: ModelParams,
                           grid: Grid) -> np.ndarray:
    """Pressure minus viscous stress, A rho^gamma - mu(rho) u_x (centered u_x)."""
    u = velocity_from_state(sim.fluid)
    return (params.A * sim.fluid.rho**params.gamma
            - viscosity(sim.fluid.rho, params) * _x_derivative(u, grid.dx))


def _weighted_norm_array(values: np.ndarray, l: float, p: float, grid: Grid) -> float:
    w = (1.0 + grid.v_centers**2) ** (0.5 * l)
    return float((grid.dx * grid.dv * np.sum(np.abs(w[None, :] * values) ** p)) ** (1.0 / p))


def weighted_norm(f: KineticState, l: float, p: float, grid: Grid) -> float:
    """Velocity-weighted Lebesgue norm (dx dv sum |<v>^l f|^p)^(1/p)."""
    if l < 0 or p < 1:
        raise ValueError("need l >= 0 and p >= 1")
    return _weighted_norm_array(f.f, l, p, grid)


def equilibrium_gaps(sim: SimulationState, eq: EquilibriumState, grid: Grid,
                     floor: float = VACUUM_FLOOR):
    """Distances to the asymptotic state.

    The velocity gap is computed only over cells with rho >= floor; the
    number of excluded cells is reported alongside."""
    rho = sim.fluid.rho
    u = velocity_from_state(sim.fluid, floor)
    occupied = rho >= floor
    vacuum_cells = int(np.count_nonzero(~occupied))
    u_gap = math.sqrt(grid.dx * float(np.sum((u[occupied] - eq.u_c) ** 2)))
    n, nw = drag_moments(sim.kinetic, grid)
    return {
        "rho_Linf_gap": float(np.max(np.abs(rho - eq.rho_bar))),
        "u_L2_gap": u_gap,
        "f_L1_gap_to_maxwellian": grid.dx * grid.dv * float(
            np.sum(np.abs(sim.kinetic.f - eq.maxwellian[None, :]))),
        "n_L1_gap": grid.dx * float(np.sum(np.abs(n - eq.n_bar))),
        "nw_L1_gap": grid.dx * float(np.sum(np.abs(nw - n * eq.u_c))),
        "vacuum_cells": vacuum_cells,
    }


def collect_record(sim: SimulationState, eq: EquilibriumState,
                   params: ModelParams, grid: Grid, *,
                   f_floor: float = DEFAULT_F_FLOOR,
                   eta: float = DEFAULT_ETA,
                   weight_exponent: float = DEFAULT_WEIGHT_EXPONENT) -> DiagnosticsRecord:
    """Assemble the full record for one state snapshot."""
    rho, m, f = sim.fluid.rho, sim.fluid.m, sim.kinetic.f
    _, nw = drag_moments(sim.kinetic, grid)
    ent, _ = entropy(sim, params, grid, f_floor)
    rel, rel_parts = relative_entropy_fluid(sim, eq, eta, params, grid)
    m1, m2 = mean_velocities(sim, eq, grid)
    gaps = equilibrium_gaps(sim, eq, grid)
    fv = np.gradient(f, grid.dv, axis=1)
    return DiagnosticsRecord(
        t=sim.t,
        fluid_mass=grid.dx * float(rho.sum()),
        kinetic_mass=grid.dx * grid.dv * float(f.sum()),
        mixture_momentum=grid.dx * float(m.sum()) + grid.dx * float(nw.sum()),
        entropy_E=ent,
        dissipation_D=dissipation(sim, params, grid, f_floor),
        rel_entropy_E_eta=rel,
        pi_gamma_total=rel_parts["pi_gamma_total"],
        m1=m1,
        m2=m2,
        u_c_gap_m1=abs(m1 - eq.u_c),
        u_c_gap_m2=abs(m2 - eq.u_c),
        rho_Linf_gap=gaps["rho_Linf_gap"],
        u_L2_gap=gaps["u_L2_gap"],
        f_L1_gap_to_maxwellian=gaps["f_L1_gap_to_maxwellian"],
        n_L1_gap=gaps["n_L1_gap"],
        nw_L1_gap=gaps["nw_L1_gap"],
        rho_min=float(rho.min()),
        rho_max=float(rho.max()),
        f_max=float(f.max()),
        weighted_f_norm_k0=_weighted_norm_array(f, weight_exponent, 2.0, grid),
        weighted_fv_norm=_weighted_norm_array(fv, weight_exponent - 2.0, 2.0, grid),
        eff_flux_Linf=float(np.max(np.abs(effective_viscous_flux(sim, params, grid)))),
        vacuum_cells=gaps["vacuum_cells"],
    )
