"""Grids, state containers, model parameters, and constitutive laws.

Everything downstream (fluid solver, kinetic solver, coupling, diagnostics)
shares these types.  States are passive value holders: step functions never
mutate their inputs and return fresh arrays instead, so states are safe to
share read-only across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateInputError

#: Density floor used when reconstructing velocities near vacuum.
VACUUM_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid:
    """Tensor grid: ``nx`` cells on the unit circle, ``nv`` on a velocity window.

    The spatial domain is [0, 1) with periodic wrap-around, so ``dx * nx == 1``
    exactly.  The velocity window is ``[v_offset - v_max, v_offset + v_max]``
    with zero-flux walls; the default ``v_offset = 0`` keeps the window
    symmetric about the origin.  ``v_max`` should leave the equilibrium
    Gaussian tail outside the window negligible (the scenario builder uses
    ``8 + |bulk speed|``, tail mass below 1e-14).
    """

    nx: int
    nv: int
    v_max: float
    v_offset: float = 0.0

    def __post_init__(self):
        if self.nx < 4:
            raise ValueError(f"nx must be >= 4, got {self.nx}")
        if self.nv < 8:
            raise ValueError(f"nv must be >= 8, got {self.nv}")
        if not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")

    @property
    def dx(self) -> float:
        return 1.0 / self.nx

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.nv

    @cached_property
    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    @cached_property
    def v_centers(self) -> np.ndarray:
        return self.v_offset - self.v_max + (np.arange(self.nv) + 0.5) * self.dv

    @cached_property
    def v_faces(self) -> np.ndarray:
        return self.v_offset - self.v_max + np.arange(self.nv + 1) * self.dv


@dataclass(frozen=True)
class ModelParams:
    """Constitutive constants.

    Pressure ``A * rho**gamma``, viscosity ``mu0 + mu1 * rho**beta``, drag
    coefficient ``kappa0 * rho``.  The commonly studied normalization is
    ``A = mu0 = mu1 = kappa0 = 1``.
    """

    A: float = 1.0
    gamma: float = 1.4
    mu0: float = 1.0
    mu1: float = 1.0
    beta: float = 1.0
    kappa0: float = 1.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.mu0 > 0:
            raise ValueError(f"mu0 must be positive, got {self.mu0}")
        if self.mu1 < 0:
            raise ValueError(f"mu1 must be nonnegative, got {self.mu1}")
        if self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.kappa0 < 0:
            raise ValueError(f"kappa0 must be nonnegative, got {self.kappa0}")


@dataclass(eq=False)
class FluidState:
    """Cell-averaged density ``rho`` and momentum ``m`` on the periodic x-grid."""

    rho: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.m = np.asarray(self.m, dtype=float)

    def check(self):
        """Raise ValueError when an invariant is violated."""
        if self.rho.shape != self.m.shape or self.rho.ndim != 1:
            raise ValueError("rho and m must be 1-d arrays of equal length")
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.m)):
            raise ValueError("fluid state contains non-finite entries")
        if np.any(self.rho < 0):
            raise ValueError("density must be nonnegative")
        if np.any((self.rho == 0) & (self.m != 0)):
            raise ValueError("momentum must vanish on vacuum cells")

    def copy(self) -> "FluidState":
        return FluidState(self.rho.copy(), self.m.copy())


@dataclass(eq=False)
class KineticState:
    """Cell-averaged phase-space density ``f`` on the (x, v) tensor grid."""

    f: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)

    def check(self):
        if self.f.ndim != 2:
            raise ValueError("f must be a 2-d (nx, nv) array")
        if not np.all(np.isfinite(self.f)):
            raise ValueError("kinetic state contains non-finite entries")
        if np.any(self.f < 0):
            raise ValueError("phase-space density must be nonnegative")

    def copy(self) -> "KineticState":
        return KineticState(self.f.copy())


@dataclass(eq=False)
class EquilibriumState:
    """Long-time attractor determined by the initial data.

    ``rho_bar``: mean fluid density, ``n_bar``: total particle mass,
    ``u_c``: common asymptotic speed of both phases, ``maxwellian``: the
    unit-variance Gaussian with mass ``n_bar`` centered at ``u_c``, sampled
    at the grid's velocity centers.
    """

    rho_bar: float
    n_bar: float
    u_c: float
    maxwellian: np.ndarray


def sample_maxwellian(n_total: float, center: float, v_centers: np.ndarray) -> np.ndarray:
    """Unit-variance Gaussian with mass ``n_total`` and mean ``center`` at cell centers."""
    return (n_total / math.sqrt(2.0 * math.pi)) * np.exp(-0.5 * (v_centers - center) ** 2)


def pressure(rho, params: ModelParams):
    """Barotropic pressure ``A * rho**gamma``; rejects negative density."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("pressure: density must be nonnegative")
    return params.A * rho**params.gamma

def viscosity(rho, params: ModelParams):
    """Density-dependent viscosity ``mu0 + mu1 * rho**beta`` (0**0 == 1)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("viscosity: density must be nonnegative")
    return params.mu0 + params.mu1 * rho**params.beta

def drag_coefficient(rho, params: ModelParams):
    """Drag coefficient, linear in the fluid density: ``kappa0 * rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("drag_coefficient: density must be nonnegative")
    return params.kappa0 * rho


def velocity_from_state(state: FluidState, floor: float = VACUUM_FLOOR) -> np.ndarray:
    """Velocity ``m / max(rho, floor)``; the floor only matters on vacuum cells."""
    return state.m / np.maximum(state.rho, floor)


def equilibrium_from_initial(fluid0: FluidState, kinetic0: KineticState,
                             grid: Grid) -> EquilibriumState:
    """Asymptotic state from the conserved quantities of the initial data.

    Midpoint quadrature throughout, so the returned values are exactly the
    discretely conserved masses and momentum:

    * ``rho_bar = dx * sum(rho0)``
    * ``n_bar   = dx * dv * sum(f0)``
    * ``u_c     = (total momentum of both phases) / (rho_bar + n_bar)``
    """
    dx, dv = grid.dx, grid.dv
    rho_bar = dx * float(fluid0.rho.sum())
    n_bar = dx * dv * float(kinetic0.f.sum())
    total_mass = rho_bar + n_bar
    if total_mass <= 0:
        raise DegenerateInputError("total initial mass must be positive")
    momentum = dx * float(fluid0.m.sum()) + dx * dv * float((kinetic0.f * grid.v_centers).sum())
    u_c = momentum / total_mass
    return EquilibriumState(rho_bar, n_bar, u_c,
                            sample_maxwellian(n_bar, u_c, grid.v_centers))
