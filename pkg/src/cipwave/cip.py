"""CIP time steps for smooth wave speed.

``step_advection`` solves ``u_t + (c u)_x = 0`` and ``step_transport``
solves ``u_t + c u_x = 0``; both evaluate the exact characteristic update
with the upwind Hermite profile and accept any time step.  ``step_constant``
is the closed-form stencil for constant speed and ``step_legacy`` the two
older split-phase schemes kept for comparison.
"""

from __future__ import annotations

import math

import numpy as np

from .characteristics import backtrack_foot, locate_cell
from .errors import CFLError, CoefficientError, InputError
from .grid import FieldState, Grid, SmoothCoefficient
from .hermite import hermite_eval

__all__ = [
    "foot_points",
    "step_advection",
    "step_transport",
    "step_constant",
    "step_legacy",
    "constant_stencil",
    "advance",
    "march",
    "step_count",
]

LEGACY_VARIANTS = ("sol1", "sol2")


def foot_points(grid: Grid, model: SmoothCoefficient, dt: float) -> np.ndarray:
    """Unwrapped feet of all nodes for one step of length ``dt``."""
    return backtrack_foot(model, grid.nodes, dt)


def _upwind_profile(state, grid, feet):
    fp = locate_cell(grid, feet)
    right = np.mod(fp.cell_index, grid.n_cells)
    left = fp.cell_index - 1
    return hermite_eval(state.u[left], state.u[right], state.v[left], state.v[right], grid.dx, fp.xi)


def _speeds(model, grid, feet):
    cx = np.asarray(model.c(grid.nodes), dtype=float)
    cy = np.asarray(model.c(feet), dtype=float)
    if np.any(cx <= 0) or np.any(cy <= 0):
        raise CoefficientError("wave speed must be positive at nodes and feet")
    return cx, cy


def step_advection(state: FieldState, grid: Grid, model: SmoothCoefficient, dt: float, feet=None) -> FieldState:
    """One step of the conservative scheme for ``u_t + (c u)_x = 0``."""
    if feet is None:
        feet = foot_points(grid, model, dt)
    H, Hx = _upwind_profile(state, grid, feet)
    cx, cy = _speeds(model, grid, feet)
    ratio = cy / cx
    dcx = np.asarray(model.c_prime(grid.nodes), dtype=float)
    dcy = np.asarray(model.c_prime(feet), dtype=float)
    u = ratio * H
    v = ratio * (dcy - dcx) / cx * H + ratio**2 * Hx
    return FieldState(state.time + dt, u, v)


def step_transport(state: FieldState, grid: Grid, model: SmoothCoefficient, dt: float, feet=None) -> FieldState:
    """One step for the non-conservative equation ``u_t + c u_x = 0``."""
    if feet is None:
        feet = foot_points(grid, model, dt)
    H, Hx = _upwind_profile(state, grid, feet)
    cx, cy = _speeds(model, grid, feet)
    return FieldState(state.time + dt, H, cy / cx * Hx)


def constant_stencil(lam: float):
    """Coefficient matrices ``A(lam)``, ``B(lam)`` of the constant-speed map.

    ``(u_k, dx v_k)^T = A (u_j, dx v_j)^T + B (u_{j-1}, dx v_{j-1})^T``.
    """
    lm = 1.0 - lam
    A = np.array([[lm * lm * (1.0 + 2.0 * lam), -lm * lm * lam], [6.0 * lam * lm, lm * (1.0 - 3.0 * lam)]])
    B = np.array([[lam * lam * (3.0 - 2.0 * lam), lam * lam * lm], [-6.0 * lam * lm, (3.0 * lam - 2.0) * lam]])
    return A, B


def step_constant(state: FieldState, grid: Grid, c: float, dt: float) -> FieldState:
    """Constant-speed step: shift by ``ell`` whole cells plus a fractional ``lam``."""
    if not c > 0:
        raise CoefficientError(f"constant speed must be positive, got {c}")
    s = c * dt / grid.dx
    ell = math.floor(s)
    lam = s - ell
    A, B = constant_stencil(lam)
    dx = grid.dx
    uj, vj = np.roll(state.u, ell), np.roll(state.v, ell)
    ujm, vjm = np.roll(state.u, ell + 1), np.roll(state.v, ell + 1)
    u = A[0, 0] * uj + A[0, 1] * dx * vj + B[0, 0] * ujm + B[0, 1] * dx * vjm
    v = (A[1, 0] * uj + B[1, 0] * ujm) / dx + A[1, 1] * vj + B[1, 1] * vjm
    return FieldState(state.time + dt, u, v)


def step_legacy(state: FieldState, grid: Grid, model: SmoothCoefficient, dt: float, variant: str = "sol1") -> FieldState:
    """Advection phase on the upwind cell followed by a non-advection correction.

    ``sol1`` corrects with centred differences of the phase increment,
    ``sol2`` with exponential decay and a ``c''`` source term.  Both require
    the foot to stay in the adjacent cell (CFL <= 1).
    """
    variant = variant.lower()
    if variant not in LEGACY_VARIANTS:
        raise InputError(f"unknown legacy variant {variant!r}")
    x = grid.nodes
    dx = grid.dx
    cx = np.asarray(model.c(x), dtype=float) * np.ones_like(x)
    if np.any(cx <= 0):
        raise CoefficientError("wave speed must be positive")
    cfl = cx * dt / dx
    if cfl.max() > 1.0 + 1e-12:
        raise CFLError(f"{variant}: CFL number {cfl.max():.6g} exceeds 1")
    u, v = state.u, state.v
    us, vs = hermite_eval(np.roll(u, 1), u, np.roll(v, 1), v, dx, 1.0 - cfl)
    dcx = np.asarray(model.c_prime(x), dtype=float)
    if variant == "sol1":
        u_new = (1.0 - dcx * dt) * us
        dc = (np.roll(cx, -1) - np.roll(cx, 1)) / (2.0 * dx)
        inc = u_new - us
        v_new = (1.0 - dt * dc) * vs + (np.roll(inc, -1) - np.roll(inc, 1)) / (2.0 * dx)
    else:
        if model.c_second is None:
            raise InputError("sol2 needs the second derivative c_second")
        decay = np.exp(-dcx * dt)
        u_new = decay * us
        v_new = -us * np.asarray(model.c_second(x), dtype=float) * dt + decay * vs
    return FieldState(state.time + dt, u_new, v_new)


def step_count(t_span: float, dt: float) -> tuple[int, float]:
    """Number of steps covering ``t_span`` and the length of the last one.

    Spans that are a whole number of steps (to 1e-9 relative) are not given
    a sliver of a final step.
    """
    ratio = t_span / dt
    n = round(ratio)
    if n > 0 and abs(ratio - n) <= 1e-9 * max(1.0, ratio):
        return n, dt
    n = math.ceil(ratio)
    return n, t_span - (n - 1) * dt


def march(state, step, dt: float, t_final: float):
    """Apply ``step(state, h)`` until ``state.time`` reaches ``t_final``."""
    span = t_final - state.time
    if span <= 0:
        return state
    n, last = step_count(span, dt)
    for i in range(n):
        state = step(state, dt if i < n - 1 else last)
    state.time = t_final
    return state


def advance(state: FieldState, grid: Grid, model: SmoothCoefficient, dt: float, t_final: float,
            scheme: str = "advection", precompute: bool = True) -> FieldState:
    """March ``state`` to ``t_final`` with a fixed step ``dt``.

    ``scheme`` is ``advection``, ``transport``, ``sol1`` or ``sol2``.  With
    ``precompute`` the feet are traced once (the speed is autonomous).
    """
    if scheme in LEGACY_VARIANTS:
        return march(state, lambda s, h: step_legacy(s, grid, model, h, scheme), dt, t_final)
    if scheme == "advection":
        stepper = step_advection
    elif scheme == "transport":
        stepper = step_transport
    else:
        raise InputError(f"unknown scheme {scheme!r}")
    feet = foot_points(grid, model, dt) if precompute else None

    def step(s, h):
        return stepper(s, grid, model, h, feet=feet if h == dt else None)

    return march(state, step, dt, t_final)
