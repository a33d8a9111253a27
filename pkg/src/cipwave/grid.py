"""Uniform periodic grids, two-moment field state and coefficient models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError

__all__ = [
    "Grid",
    "FieldState",
    "SmoothCoefficient",
    "PiecewiseConstantCoefficient",
    "build_grid",
    "init_state",
    "central_difference",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic mesh on ``[a, b]`` with nodes ``x_k = a + k*dx``.

    Node ``N`` is identified with node ``0``.
    """

    n_cells: int
    a: float = 0.0
    b: float = 1.0

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.dx * np.arange(self.n_cells)

    def wrap(self, k):
        return np.mod(k, self.n_cells)

    def wrap_coordinate(self, x):
        """Map coordinates into ``[a, b)``."""
        return self.a + np.mod(np.asarray(x, dtype=float) - self.a, self.length)


def build_grid(n_cells: int, domain: tuple[float, float] = (0.0, 1.0)) -> Grid:
    if int(n_cells) != n_cells or n_cells < 4:
        raise InputError(f"n_cells must be an integer >= 4, got {n_cells!r}")
    a, b = float(domain[0]), float(domain[1])
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise InputError(f"empty or invalid domain [{a}, {b}]")
    return Grid(int(n_cells), a, b)


@dataclass
class FieldState:
    """Nodal values ``u`` and derivative moments ``v`` at time ``time``."""

    time: float
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise InputError("u and v must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise InputError("field state contains non-finite entries")

    def copy(self) -> "FieldState":
        return FieldState(self.time, self.u.copy(), self.v.copy())


@dataclass(frozen=True)
class SmoothCoefficient:
    """Smooth wave speed ``c(x) > 0`` with its analytic derivative.

    ``c_second`` is only needed by the ``Sol2`` legacy variant.
    """

    c: Callable[[np.ndarray], np.ndarray]
    c_prime: Callable[[np.ndarray], np.ndarray]
    c_second: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None)

    @classmethod
    def constant(cls, speed: float) -> "SmoothCoefficient":
        speed = float(speed)
        return cls(
            c=lambda x: np.full_like(np.asarray(x, dtype=float), speed),
            c_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            c_second=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        )


@dataclass(frozen=True)
class PiecewiseConstantCoefficient:
    """Speed ``c_minus`` for ``x < alpha`` and ``c_plus`` for ``x > alpha``.

    On a periodic domain the speed also jumps from ``c_plus`` back to
    ``c_minus`` at the wrap point ``b == a``.
    """

    alpha: float
    c_minus: float
    c_plus: float

    def __post_init__(self):
        if not (self.c_minus > 0 and self.c_plus > 0):
            raise InputError("piecewise speeds must be positive")

    def speed(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.alpha, self.c_minus, self.c_plus)


def central_difference(u: np.ndarray, dx: float) -> np.ndarray:
    """Second-order periodic central difference ``(u[k+1] - u[k-1]) / (2 dx)``."""
    return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * dx)


def init_state(grid: Grid, u0: Callable, derivative: Optional[Callable] = None) -> FieldState:
    """Sample ``u0`` at the nodes.

    With ``derivative`` given the moments are ``derivative(x_k)``; otherwise
    they come from the periodic central difference of the sampled values.
    """
    x = grid.nodes
    u = np.asarray(u0(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(u)):
        raise InputError("initial condition is not finite on the grid")
    if derivative is None:
        v = central_difference(u, grid.dx)
    else:
        v = np.asarray(derivative(x), dtype=float) * np.ones_like(x)
        if not np.all(np.isfinite(v)):
            raise InputError("initial derivative is not finite on the grid")
    return FieldState(0.0, u, v)
