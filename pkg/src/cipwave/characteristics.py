"""Backward characteristic tracing and foot-point location.

The foot ``y_k`` of node ``x_k`` is ``x(0)`` for ``dx/dt = c(x)``,
``x(dt) = x_k``.  It is found by integrating ``dx/ds = -c(x)`` from
``s = 0`` to ``s = dt`` with the Bogacki-Shampine 2(3) pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputError, NumericalError
from .grid import Grid, SmoothCoefficient

__all__ = ["FootPoint", "backtrack_foot", "forward_trace", "locate_cell"]

RTOL = 1e-10
ATOL = 1e-10
NODE_TOL = 1e-12


@dataclass(frozen=True)
class FootPoint:
    """Foot location wrapped into the domain.

    ``cell_index`` is ``j`` in ``1..N`` for the cell ``[x_{j-1}, x_j]``
    (node ``N`` is node ``0``); ``lam = (x_j - y) / dx``.
    """

    y: np.ndarray
    cell_index: np.ndarray
    lam: np.ndarray

    @property
    def xi(self):
        """Local coordinate of ``y`` inside its cell."""
        return 1.0 - self.lam


def _integrate(c, x0, span, rtol, atol, sign):
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    sol = solve_ivp(
        lambda s, x: sign * np.asarray(c(x), dtype=float),
        (0.0, span),
        x0,
        method="RK23",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NumericalError(f"characteristic integration failed: {sol.message}")
    return sol.y[:, -1]


def backtrack_foot(model: SmoothCoefficient, x_end, dt: float, rtol: float = RTOL, atol: float = ATOL):
    """Foot point(s) of the characteristic(s) ending at ``x_end`` after ``dt``.

    ``x_end`` may be an array; all nodes are integrated together.  The foot
    is returned unwrapped and may lie several cells (or periods) upwind.
    """
    if not dt > 0:
        raise InputError(f"dt must be positive, got {dt}")
    scalar = np.ndim(x_end) == 0
    y = _integrate(model.c, x_end, dt, rtol, atol, -1.0)
    return float(y[0]) if scalar else y


def forward_trace(model: SmoothCoefficient, x_start, dt: float, rtol: float = RTOL, atol: float = ATOL):
    """Position after ``dt`` along ``dx/dt = c(x)`` from ``x_start``."""
    scalar = np.ndim(x_start) == 0
    x = _integrate(model.c, x_start, dt, rtol, atol, 1.0)
    return float(x[0]) if scalar else x


def locate_cell(grid: Grid, y) -> FootPoint:
    """Find the periodic cell containing ``y``.

    A foot within ``1e-12 * dx`` of a node is assigned to the cell on the
    node's right with ``lam = 1``.  Both neighbouring profiles interpolate the
    same nodal data there, so the choice does not affect any update.
    """
    n = grid.n_cells
    yw = grid.wrap_coordinate(y)
    s = (yw - grid.a) / grid.dx
    m = np.rint(s)
    on_node = np.abs(s - m) <= NODE_TOL
    j = np.where(on_node, m + 1, np.ceil(s)).astype(int)
    lam = np.where(on_node, 1.0, j - s)
    j = np.mod(j - 1, n) + 1
    yw = np.where(on_node, grid.a + np.mod(m, n) * grid.dx, yw)
    if np.ndim(y) == 0:
        return FootPoint(float(yw), int(j), float(lam))
    return FootPoint(yw, j, lam)
