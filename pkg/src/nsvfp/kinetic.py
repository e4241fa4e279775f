"""One time substep of the kinetic phase with frozen fluid fields.

The transport part advances ``f_t + v f_x = 0`` by sign-of-v upwinding on the
periodic x-grid.  The collision part advances the velocity-space
drift-diffusion operator

    f_t = ( kappa(rho) * ( (v - u) f + f_v ) )_v

by backward Euler with Chang-Cooper exponential-fitting face weights and
zero-flux walls, one independent tridiagonal solve per x-column.  The face
weighting is the unique two-point formula whose discrete flux vanishes
identically on the cell-centered Maxwellian exp(-(v_j - u)^2 / 2), and it
keeps the implicit matrix an M-matrix with unit column sums, so the solve
preserves positivity for any dt > 0 and conserves each column's mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, FluidState, KineticState, ModelParams, VACUUM_FLOOR, \
    drag_coefficient, velocity_from_state
from .errors import NumericalBlowupError, StepRejectedError
from .kernels import minmod, solve_batched_tridiagonal


@dataclass(frozen=True)
class KineticSchemeConfig:
    transport: str = "upwind1"        # or "muscl_minmod" (Heun in time)
    fp_solver: str = "implicit_cc"
    positivity_clip: bool = False     # diagnostic-only escape hatch

    def __post_init__(self):
        if self.transport not in ("upwind1", "muscl_minmod"):
            raise ValueError(f"unknown transport scheme {self.transport!r}")
        if self.fp_solver != "implicit_cc":
            raise ValueError(f"unknown velocity-space solver {self.fp_solver!r}")


def transport_stable_dt(grid: Grid, cfg: KineticSchemeConfig) -> float:
    """Largest dt the x-transport accepts (dx / max|v|, halved for MUSCL)."""
    vmax = float(np.abs(grid.v_centers).max())
    if vmax == 0.0:
        return math.inf
    dt = grid.dx / vmax
    if cfg.transport == "muscl_minmod":
        dt *= 0.5
    return dt


def _upwind_donor(f: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.where(v > 0, np.roll(f, 1, axis=0), np.roll(f, -1, axis=0))


def _muscl_flux(f: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Limited face fluxes at x-faces i+1/2, per v-row."""
    slope = minmod(f - np.roll(f, 1, axis=0), np.roll(f, -1, axis=0) - f)
    left = f + 0.5 * slope
    right = np.roll(f, -1, axis=0) - 0.5 * np.roll(slope, -1, axis=0)
    return v * np.where(v > 0, left, right)


def transport_substep(f: KineticState, dt: float, grid: Grid,
                      cfg: KineticSchemeConfig) -> KineticState:
    """Free streaming over dt.  Periodic, conservative per v-row.

    First order uses the convex donor-cell form, which keeps the update
    nonnegative in floating point for any Courant number <= 1 and makes the
    unit-Courant case an exact one-cell shift.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    admissible = transport_stable_dt(grid, cfg)
    if dt > admissible * (1.0 + 1e-9):
        raise StepRejectedError(
            f"transport dt {dt:.3e} exceeds the Courant bound {admissible:.3e}",
            admissible_dt=admissible)
    v = grid.v_centers[None, :]
    nu = v * (dt / grid.dx)
    if cfg.transport == "upwind1":
        out = (1.0 - np.abs(nu)) * f.f + np.abs(nu) * _upwind_donor(f.f, v)
    else:
        lam = dt / grid.dx
        flux = _muscl_flux(f.f, v)
        stage = f.f - lam * (flux - np.roll(flux, 1, axis=0))
        flux2 = _muscl_flux(stage, v)
        out = 0.5 * (f.f + stage - lam * (flux2 - np.roll(flux2, 1, axis=0)))
    if cfg.positivity_clip:
        out = np.maximum(out, 0.0)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowupError("transport produced non-finite values")
    return KineticState(out)


def chang_cooper_delta(w):
    """Chang-Cooper face weight delta(w) = 1/w - 1/(e^w - 1), in (0, 1).

    ``w`` is the face Peclet number (drift / diffusion ratio times dv).  The
    limit w -> 0 gives 1/2; below |w| = 1e-4 a series evaluation avoids the
    cancellation in the direct formula.
    """
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-4
    ws = np.where(small, 1.0, w)  # keep the direct branch's divisions finite
    direct = 1.0 / ws - 1.0 / np.expm1(ws)
    series = 0.5 - w / 12.0 + w**3 / 720.0
    return np.where(small, series, direct)


def _exp_ratio(w):
    """g(w) = w / (e^w - 1) > 0, with g(0) = 1; series below |w| = 1e-4."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-4
    ws = np.where(small, 1.0, np.clip(w, -700.0, 700.0))
    direct = ws / np.expm1(ws)
    series = 1.0 - w / 2.0 + w**2 / 12.0
    return np.where(small, series, direct)


def fokker_planck_substep(f: KineticState, fluid: FluidState, dt: float,
                          params: ModelParams, grid: Grid,
                          cfg: KineticSchemeConfig) -> KineticState:
    """Backward-Euler drift-diffusion update in v, column by column.

    The flux at interior face j+1/2 of column i is

        kappa_i * [ (u_i - v_{j+1/2}) * f_{j+1/2} - (f_{j+1} - f_j) / dv ]

    with the Chang-Cooper face value; walls carry zero flux.  Columns with
    ``kappa = 0`` are exact identities and come out bitwise unchanged.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    u = velocity_from_state(fluid, VACUUM_FLOOR)
    kappa = np.asarray(drag_coefficient(fluid.rho, params), dtype=float)
    if not kappa.any():
        return KineticState(f.f.copy())
    dv = grid.dv
    # Face Peclet number; its sign convention pairs with g(w) below so that
    # the flux reads kappa * (g(w) f_j - g(-w) f_{j+1}) / dv and vanishes on
    # the sampled Maxwellian, where f_{j+1} = e^{-w} f_j.
    w = (grid.v_faces[None, 1:-1] - u[:, None]) * dv
    scale = (dt / dv**2) * kappa[:, None]
    g = _exp_ratio(w)
    a = scale * g            # couples f_j into face j+1/2
    b = scale * (g + w)      # g(-w) = g(w) + w, couples f_{j+1} into face j+1/2
    diag = np.ones_like(f.f)
    diag[:, :-1] += a
    diag[:, 1:] += b
    out = solve_batched_tridiagonal(-a, diag, -b, f.f)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowupError("velocity-space solve produced non-finite values")
    return KineticState(out)


def max_principle_bound(f0_sup: float, rho_plus: float, t: float) -> float:
    """Theoretical ceiling exp(rho_plus * t) * sup f0 used by the watchdog."""
    if f0_sup < 0 or rho_plus < 0 or t < 0:
        raise ValueError("max_principle_bound expects nonnegative inputs")
    return math.exp(rho_plus * t) * f0_sup
