"""Independent closed-form references used by the acceptance suite.

These deliberately import no solver code, only the shared core types:
independence from the schemes they check is the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import Grid, KineticState


@dataclass(frozen=True)
class OUParams:
    """Spatially homogeneous relaxation with frozen fluid fields.

    ``u_star`` is the frozen fluid velocity, ``kappa_rho`` the frozen value
    of the drag coefficient times density.
    """

    mean0: float
    var0: float
    u_star: float
    kappa_rho: float

    def __post_init__(self):
        if not self.var0 > 0:
            raise ValueError("var0 must be positive")


def ou_moments(p: OUParams, t: float):
    """Exact first and second moments of the homogeneous relaxation.

    The mean obeys d<v>/dt = -kappa_rho (<v> - u_star) and the variance
    dVar/dt = -2 kappa_rho (Var - 1), so

        mean(t) = u_star + (mean0 - u_star) e^{-kappa_rho t}
        var(t)  = 1 + (var0 - 1) e^{-2 kappa_rho t}
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    decay = math.exp(-p.kappa_rho * t)
    mean = p.u_star + (p.mean0 - p.u_star) * decay
    var = 1.0 + (p.var0 - 1.0) * decay**2
    return mean, var


def free_transport_exact(f0: KineticState, t: float, grid: Grid) -> KineticState:
    """Exact solution of pure streaming: translate each v-row by v*t.

    The initial data is treated as its periodic piecewise-linear interpolant
    in x, so the result is exact whenever the shifted sample points land on
    grid points and an O(dx^2) resampling otherwise.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    # departure points in cell-index units, broadcast to (nx, nv)
    pos = (grid.x_centers[:, None] - grid.v_centers[None, :] * t) / grid.dx - 0.5
    k = np.floor(pos)
    theta = pos - k
    k = k.astype(np.int64)
    i0 = np.mod(k, grid.nx)
    i1 = np.mod(k + 1, grid.nx)
    cols = np.arange(grid.nv)[None, :]
    out = (1.0 - theta) * f0.f[i0, cols] + theta * f0.f[i1, cols]
    return KineticState(out)


def gaussian_l1_distance(n1: float, u1: float, n2: float, u2: float) -> float:
    """L1 distance between two unit-variance Gaussians with masses n1, n2.

    Brute force: adaptive quadrature of the absolute difference, with the
    analytic crossing point handed to the integrator.  Zero mass on one side
    degenerates to the other side's total mass.
    """
    if n1 < 0 or n2 < 0:
        raise ValueError("masses must be nonnegative")
    if n1 == 0 and n2 == 0:
        return 0.0
    if n1 == 0:
        return n2
    if n2 == 0:
        return n1

    inv = 1.0 / math.sqrt(2.0 * math.pi)

    def diff(v):
        return abs(n1 * inv * math.exp(-0.5 * (v - u1) ** 2)
                   - n2 * inv * math.exp(-0.5 * (v - u2) ** 2))

    lo = min(u1, u2) - 14.0
    hi = max(u1, u2) + 14.0
    points = []
    if u1 != u2:
        crossing = 0.5 * (u1 + u2) + math.log(n2 / n1) / (u1 - u2)
        if lo < crossing < hi:
            points.append(crossing)
    val, _ = quad(diff, lo, hi, points=points or None, limit=200)
    return val
