"""Low-level numerical kernels.

* a batched Thomas solve for many independent tridiagonal systems (the
  per-column implicit velocity-space solves),
* a periodic (cyclic) tridiagonal solve for the implicit viscous update,
* minmod slope limiting for MUSCL reconstructions.

The batched solve deliberately avoids pivoting: it is meant for systems whose
off-diagonals are nonpositive and whose column sums equal the diagonal margin
(M-matrices).  For those, every elimination pivot stays positive and the
computed solution of a nonnegative right-hand side is nonnegative even in
floating point, because the sweeps only add products of nonnegative numbers.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .errors import NumericalBlowupError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _thomas_batched_numpy(lower, diag, upper, rhs):
    n_sys, n = diag.shape
    cp = np.empty((n_sys, max(n - 1, 0)))
    x = np.empty_like(rhs)
    piv = diag[:, 0].copy()
    min_piv = float(piv.min())
    if n > 1:
        cp[:, 0] = upper[:, 0] / piv
    x[:, 0] = rhs[:, 0] / piv
    for k in range(1, n):
        piv = diag[:, k] - lower[:, k - 1] * cp[:, k - 1]
        min_piv = min(min_piv, float(piv.min()))
        if k < n - 1:
            cp[:, k] = upper[:, k] / piv
        x[:, k] = (rhs[:, k] - lower[:, k - 1] * x[:, k - 1]) / piv
    for k in range(n - 2, -1, -1):
        x[:, k] -= cp[:, k] * x[:, k + 1]
    return x, min_piv


if HAVE_NUMBA:

    @njit(cache=True)
    def _thomas_batched_jit(lower, diag, upper, rhs):  # pragma: no cover - compiled
        n_sys, n = diag.shape
        x = np.empty_like(rhs)
        cp = np.empty(n - 1)
        min_piv = np.inf
        for s in range(n_sys):
            piv = diag[s, 0]
            if piv < min_piv:
                min_piv = piv
            cp[0] = upper[s, 0] / piv
            x[s, 0] = rhs[s, 0] / piv
            for k in range(1, n):
                piv = diag[s, k] - lower[s, k - 1] * cp[k - 1]
                if piv < min_piv:
                    min_piv = piv
                if k < n - 1:
                    cp[k] = upper[s, k] / piv
                x[s, k] = (rhs[s, k] - lower[s, k - 1] * x[s, k - 1]) / piv
            for k in range(n - 2, -1, -1):
                x[s, k] -= cp[k] * x[s, k + 1]
        return x, min_piv


def solve_batched_tridiagonal(lower, diag, upper, rhs, use_numba=HAVE_NUMBA):
    """Solve ``n_sys`` independent tridiagonal systems at once.

    Shapes: ``diag``/``rhs`` are ``(n_sys, n)``, ``lower``/``upper`` are
    ``(n_sys, n-1)``; ``lower[s, k]`` couples row ``k+1`` to column ``k`` and
    ``upper[s, k]`` couples row ``k`` to column ``k+1``.

    No pivoting is performed; a non-positive pivot raises
    :class:`NumericalBlowupError` (unreachable for the M-matrix systems this
    package assembles — every pivot is bounded below by the unit column-sum
    margin).
    """
    lower = np.ascontiguousarray(lower, dtype=float)
    diag = np.ascontiguousarray(diag, dtype=float)
    upper = np.ascontiguousarray(upper, dtype=float)
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if diag.shape[1] < 2:
        raise ValueError("systems must have at least 2 unknowns")
    if use_numba and HAVE_NUMBA:
        x, min_piv = _thomas_batched_jit(lower, diag, upper, rhs)
    else:
        x, min_piv = _thomas_batched_numpy(lower, diag, upper, rhs)
    if not min_piv > 0.0:
        raise NumericalBlowupError(
            f"tridiagonal elimination hit a non-positive pivot ({min_piv})")
    return x


def solve_periodic_tridiagonal(lower, diag, upper, corner_top, corner_bottom, rhs):
    """Solve one cyclic tridiagonal system.

    ``corner_top`` is the matrix entry ``A[0, n-1]``, ``corner_bottom`` is
    ``A[n-1, 0]``.  Uses the Sherman-Morrison rank-one correction on top of a
    single banded LAPACK solve with two right-hand sides.
    """
    diag = np.asarray(diag, dtype=float)
    n = diag.size
    if n < 3:
        raise ValueError("cyclic solve needs at least 3 unknowns")
    gamma = -diag[0]
    d = diag.copy()
    d[0] -= gamma
    d[-1] -= corner_top * corner_bottom / gamma
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1] = d
    ab[2, :-1] = lower
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = corner_bottom
    sol = solve_banded((1, 1), ab, np.column_stack([rhs, u]))
    y, z = sol[:, 0], sol[:, 1]
    vy = y[0] + (corner_top / gamma) * y[-1]
    vz = z[0] + (corner_top / gamma) * z[-1]
    denom = 1.0 + vz
    if denom == 0.0:
        raise NumericalBlowupError("cyclic tridiagonal correction is singular")
    return y - z * (vy / denom)


def minmod(a, b):
    """Minmod limiter: the smaller-magnitude argument when signs agree, else 0."""
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))
