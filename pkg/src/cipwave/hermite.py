"""Cubic Hermite profile on one cell, built from endpoint values and slopes.

All evaluation happens in the local coordinate ``xi = (x - x_left) / dx``;
the cubic is never re-expanded in monomials of ``x``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError, OutOfCellError

__all__ = [
    "HermiteCell",
    "hermite_basis",
    "hermite_basis_derivative",
    "hermite_eval",
    "eval_profile",
]

CELL_TOL = 1e-12


def hermite_basis(xi):
    """Return ``(p1, p2, q1, q2)`` at ``xi``.

    ``p1, p2`` carry the left/right values and ``q1, q2`` the left/right
    slopes (scaled by the cell width).
    """
    xi = np.asarray(xi, dtype=float)
    if np.any((xi < 0.0) | (xi > 1.0)):
        warnings.warn("hermite_basis evaluated outside [0, 1]", stacklevel=2)
    xm = xi - 1.0
    p1 = xm * xm * (2.0 * xi + 1.0)
    p2 = xi * xi * (3.0 - 2.0 * xi)
    q1 = xm * xm * xi
    q2 = xi * xi * xm
    return p1, p2, q1, q2


def hermite_basis_derivative(xi):
    """d/dxi of the four basis polynomials."""
    xi = np.asarray(xi, dtype=float)
    dp1 = 6.0 * xi * (xi - 1.0)
    dp2 = -dp1
    dq1 = (xi - 1.0) * (3.0 * xi - 1.0)
    dq2 = xi * (3.0 * xi - 2.0)
    return dp1, dp2, dq1, dq2


def hermite_eval(u_left, u_right, v_left, v_right, dx, xi):
    """Vectorised value and x-derivative of the Hermite cubic at ``xi``.

    No range check; callers that can extrapolate must validate ``xi``.
    """
    xi = np.asarray(xi, dtype=float)
    xm = xi - 1.0
    p1 = xm * xm * (2.0 * xi + 1.0)
    p2 = xi * xi * (3.0 - 2.0 * xi)
    q1 = xm * xm * xi
    q2 = xi * xi * xm
    value = u_left * p1 + u_right * p2 + dx * (v_left * q1 + v_right * q2)
    dp = 6.0 * xi * xm
    dq1 = xm * (3.0 * xi - 1.0)
    dq2 = xi * (3.0 * xi - 2.0)
    deriv = (u_right - u_left) * (-dp) / dx + v_left * dq1 + v_right * dq2
    return value, deriv


@dataclass(frozen=True)
class HermiteCell:
    x_left: float
    x_right: float
    u_left: float
    u_right: float
    v_left: float
    v_right: float

    def __post_init__(self):
        if not self.x_right > self.x_left:
            raise InputError("HermiteCell requires x_left < x_right")

    @property
    def dx(self) -> float:
        return self.x_right - self.x_left


def eval_profile(cell: HermiteCell, x):
    """Value and derivative of the cell's cubic at ``x``.

    Points within ``1e-12 * dx`` of the cell are accepted; anything further
    raises :class:`OutOfCellError`.
    """
    x = np.asarray(x, dtype=float)
    slack = CELL_TOL * cell.dx
    if np.any((x < cell.x_left - slack) | (x > cell.x_right + slack)):
        raise OutOfCellError(f"x outside cell [{cell.x_left}, {cell.x_right}]")
    xi = np.clip((x - cell.x_left) / cell.dx, 0.0, 1.0)
    return hermite_eval(cell.u_left, cell.u_right, cell.v_left, cell.v_right, cell.dx, xi)
