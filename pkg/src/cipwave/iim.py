"""Immersed-interface CIP for a piecewise constant speed.

On the cell containing the jump ``alpha`` the profile is a pair of cubics

    H+-(x) = (1/w+-) * sum_l a_l / l! * ((x - alpha) / (c+- dx))**l

sharing the coefficients ``a``.  The weight ``w`` is 1 for continuity of
``u`` and ``c`` for continuity of the flux ``c u``; in both cases the
interface relations follow from the shared coefficients and the four
endpoint conditions give a 4x4 system.  Derivative rows are scaled by
``c+- dx`` so the matrix entries stay O(1).

On a periodic domain the speed also jumps back from ``c_plus`` to
``c_minus`` at ``b == a``; that point is handled as a second interface
with ``theta = 0`` in the last cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cip import march
from .errors import AmbiguousSideError, CFLError, CoefficientError, InputError, OutOfCellError
from .grid import FieldState, Grid, PiecewiseConstantCoefficient
from .hermite import CELL_TOL, HermiteCell, hermite_eval

__all__ = [
    "JumpCondition",
    "Side",
    "IIMProfile",
    "interface_matrix",
    "interface_determinant",
    "build_interface_polynomial",
    "eval_interface_polynomial",
    "interface_cells",
    "step_discontinuous",
    "advance_discontinuous",
    "exact_discontinuous_solution",
]

COND_LIMIT = 1e12


class JumpCondition(str, Enum):
    JUMP_U = "u"
    JUMP_CU = "cu"

    @classmethod
    def parse(cls, value) -> "JumpCondition":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("[", "").replace("]", "").replace("=0", "")
        key = {"jumpu": "u", "jumpcu": "cu"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown jump condition {value!r}") from None


class Side(str, Enum):
    MINUS = "minus"
    PLUS = "plus"
    AUTO = "auto"


def interface_matrix(theta: float, c_minus: float, c_plus: float) -> np.ndarray:
    """Rows: value and scaled slope at ``x_right`` (plus side), then at ``x_left``."""
    p = theta / c_plus
    m = (theta - 1.0) / c_minus
    return np.array(
        [
            [1.0, p, p * p / 2.0, p**3 / 6.0],
            [0.0, 1.0, p, p * p / 2.0],
            [1.0, m, m * m / 2.0, m**3 / 6.0],
            [0.0, 1.0, m, m * m / 2.0],
        ]
    )


def interface_determinant(theta: float, c_minus: float, c_plus: float) -> float:
    """Closed form of ``det interface_matrix``; positive for all ``theta``."""
    return (c_minus * theta + c_plus * (1.0 - theta)) ** 4 / (12.0 * (c_plus * c_minus) ** 4)


@dataclass(frozen=True)
class IIMProfile:
    x_left: float
    x_right: float
    alpha: float
    theta: float
    c_minus: float
    c_plus: float
    condition: JumpCondition
    a: np.ndarray
    A: np.ndarray
    f: np.ndarray

    @property
    def dx(self) -> float:
        return self.x_right - self.x_left

    def weight(self, side: Side) -> float:
        c = self.c_minus if side == Side.MINUS else self.c_plus
        return c if self.condition == JumpCondition.JUMP_CU else 1.0

    def speed(self, side: Side) -> float:
        return self.c_minus if side == Side.MINUS else self.c_plus


def build_interface_polynomial(cell: HermiteCell, alpha: float, c_minus: float, c_plus: float,
                               condition="u") -> IIMProfile:
    """Solve for the shared coefficients of the interface cubic on ``cell``."""
    condition = JumpCondition.parse(condition)
    if not (c_minus > 0 and c_plus > 0):
        raise CoefficientError("interface speeds must be positive")
    dx = cell.dx
    slack = CELL_TOL * dx
    if not (cell.x_left - slack <= alpha <= cell.x_right + slack):
        raise OutOfCellError(f"alpha={alpha} outside cell [{cell.x_left}, {cell.x_right}]")
    theta = min(max((cell.x_right - alpha) / dx, 0.0), 1.0)
    A = interface_matrix(theta, c_minus, c_plus)
    if np.linalg.cond(A) > COND_LIMIT:
        raise CoefficientError(f"interface system ill-conditioned (theta={theta})")
    wp = c_plus if condition == JumpCondition.JUMP_CU else 1.0
    wm = c_minus if condition == JumpCondition.JUMP_CU else 1.0
    f = np.array(
        [
            wp * cell.u_right,
            wp * c_plus * dx * cell.v_right,
            wm * cell.u_left,
            wm * c_minus * dx * cell.v_left,
        ]
    )
    a = np.linalg.solve(A, f)
    return IIMProfile(cell.x_left, cell.x_right, float(alpha), theta, float(c_minus), float(c_plus),
                      condition, a, A, f)


def _eval_side(profile: IIMProfile, x, side: Side):
    a = profile.a
    c = profile.speed(side)
    w = profile.weight(side)
    h = c * profile.dx
    z = (np.asarray(x, dtype=float) - profile.alpha) / h
    value = a[0] + z * (a[1] + z * (a[2] / 2.0 + z * a[3] / 6.0))
    deriv = (a[1] + z * (a[2] + z * a[3] / 2.0)) / h
    return value / w, deriv / w


def eval_interface_polynomial(profile: IIMProfile, x, side="auto"):
    """Value and one-sided derivative of ``H-`` or ``H+`` at ``x``.

    An explicit side may be evaluated anywhere in the cell (the update at
    the irregular node extends ``H+`` past ``alpha``).  ``auto`` picks the
    side from the position and refuses ``x == alpha``.
    """
    try:
        side = Side(side)
    except ValueError:
        raise InputError(f"side must be 'minus', 'plus' or 'auto', got {side!r}") from None
    x = np.asarray(x, dtype=float)
    slack = CELL_TOL * profile.dx
    if np.any((x < profile.x_left - slack) | (x > profile.x_right + slack)):
        raise OutOfCellError(f"x outside cell [{profile.x_left}, {profile.x_right}]")
    if side != Side.AUTO:
        return _eval_side(profile, x, side)
    if np.any(x == profile.alpha):
        raise AmbiguousSideError("x equals alpha; pass side='minus' or side='plus'")
    vm, dm = _eval_side(profile, x, Side.MINUS)
    vp, dp = _eval_side(profile, x, Side.PLUS)
    left = x < profile.alpha
    return np.where(left, vm, vp), np.where(left, dm, dp)


def interface_cells(grid: Grid, model: PiecewiseConstantCoefficient):
    """``(j, alpha, c_left, c_right)`` for every jump on the periodic grid.

    ``j`` is the cell ``[x_{j-1}, x_j]`` holding the jump; an interface on a
    node ``x_m`` belongs to cell ``m`` with ``theta = 0``.
    """
    alpha = model.alpha
    n = grid.n_cells
    dx = grid.dx
    s = (alpha - grid.a) / dx
    m = round(s)
    j = m if abs(s - m) <= 1e-12 else int(np.ceil(s))
    if j < 1 or j > n - 1 or alpha - grid.a < dx * (1 - 1e-12) or grid.b - alpha < dx * (1 - 1e-12):
        raise InputError(f"interface alpha={alpha} must lie at least one cell inside ({grid.a}, {grid.b})")
    return [(j, alpha, model.c_minus, model.c_plus), (n, grid.b, model.c_plus, model.c_minus)]


def _node_speeds(grid, model):
    return np.asarray(model.speed(grid.nodes), dtype=float)


def step_discontinuous(state: FieldState, grid: Grid, model: PiecewiseConstantCoefficient, dt: float,
                       condition="u", direction: int = 1, check_identity: bool = False) -> FieldState:
    """One IIM-CIP step of ``u_t + c u_x = 0`` (``direction=-1``: ``u_t - c u_x = 0``).

    Regular nodes use the plain Hermite cubic of the upwind cell with their
    own speed.  The downwind node of each interface cell is taken from the
    interface cubic: ``H+`` at ``x_j - c+ dt`` moving right, ``H-`` at
    ``x_{j-1} + c- dt`` moving left.
    """
    condition = JumpCondition.parse(condition)
    if direction not in (1, -1):
        raise InputError("direction must be +1 or -1")
    dx = grid.dx
    cmax = max(model.c_minus, model.c_plus)
    if cmax * dt > dx * (1.0 + 1e-12):
        which = "c_minus" if model.c_minus >= model.c_plus else "c_plus"
        raise CFLError(f"CFL {cmax * dt / dx:.6g} > 1 (limited by {which}={cmax})")
    n = grid.n_cells
    u, v = state.u, state.v
    c = _node_speeds(grid, model)
    lam = c * dt / dx
    if direction == 1:
        un, vn = hermite_eval(np.roll(u, 1), u, np.roll(v, 1), v, dx, 1.0 - lam)
    else:
        un, vn = hermite_eval(u, np.roll(u, -1), v, np.roll(v, -1), dx, lam)
    x = grid.nodes
    for j, alpha, c_left, c_right in interface_cells(grid, model):
        jl, jr = j - 1, j % n
        xl = x[jl]
        cell = HermiteCell(xl, xl + dx, u[jl], u[jr], v[jl], v[jr])
        prof = build_interface_polynomial(cell, alpha, c_left, c_right, condition)
        if direction == 1:
            val, der = _eval_side(prof, cell.x_right - c_right * dt, Side.PLUS)
            if check_identity:
                _check_crossing(prof, dt)
            un[jr], vn[jr] = val, der
        else:
            val, der = _eval_side(prof, cell.x_left + c_left * dt, Side.MINUS)
            un[jl], vn[jl] = val, der
    return FieldState(state.time + dt, un, vn)


def _check_crossing(prof: IIMProfile, dt: float, rtol: float = 1e-10):
    """Assert that tracing through ``alpha`` gives the same update as extending ``H+``."""
    foot = prof.x_right - prof.c_plus * dt
    if foot >= prof.alpha:
        return
    y = prof.alpha + prof.c_minus / prof.c_plus * (prof.x_right - prof.alpha) - prof.c_minus * dt
    vm, dm = _eval_side(prof, y, Side.MINUS)
    vp, dp = _eval_side(prof, foot, Side.PLUS)
    ratio = prof.c_minus / prof.c_plus
    if prof.condition == JumpCondition.JUMP_CU:
        vm, dm = vm * ratio, dm * ratio
    scale = max(1.0, abs(vp), abs(dp))
    if abs(vm - vp) > rtol * scale or abs(ratio * dm - dp) > rtol * scale:
        raise CoefficientError("crossing-foot identity violated")


def advance_discontinuous(state: FieldState, grid: Grid, model: PiecewiseConstantCoefficient, dt: float,
                          t_final: float, condition="u", direction: int = 1) -> FieldState:
    return march(state, lambda s, h: step_discontinuous(s, grid, model, h, condition, direction), dt, t_final)


def _trace_line(model, t, x):
    c1, c2, alpha = model.c_minus, model.c_plus, model.alpha
    y = np.where(
        (x >= alpha) & (t <= (x - alpha) / c2),
        x - c2 * t,
        np.where(x <= alpha, x - c1 * t, (c1 / c2) * (x - c2 * t) + (1.0 - c1 / c2) * alpha),
    )
    return y


def _trace_periodic(model, t, x, domain):
    """Backward trace through both jumps of the periodic speed; returns ``y`` in ``[a, b)``."""
    a, b = domain
    alpha = model.alpha
    p = a + np.mod(x - a, b - a)
    tau = np.full_like(p, float(t))
    plus = p >= alpha
    y = p.copy()
    active = tau > 0
    for _ in range(100000):
        if not np.any(active):
            break
        lo = np.where(plus, alpha, a)
        c = np.where(plus, model.c_plus, model.c_minus)
        dist = y - lo
        reach = tau * c
        stop = active & (reach <= dist)
        y = np.where(stop, y - reach, y)
        tau = np.where(stop, 0.0, tau)
        cross = active & ~stop
        tau = np.where(cross, tau - dist / c, tau)
        y = np.where(cross, np.where(plus, alpha, b), y)
        plus = np.where(cross, ~plus, plus)
        active = cross & (tau > 0)
    # a trace that stops exactly on b sits at a
    y = np.where(y >= b, y - (b - a), y)
    return y, plus


def exact_discontinuous_solution(u0, model: PiecewiseConstantCoefficient, t: float, x, condition="u",
                                 domain=None, du0=None):
    """Exact solution of ``u_t + c u_x = 0`` for a Gaussian-like ``u0``.

    With ``domain=None`` the speed is ``c_minus`` left of ``alpha`` and
    ``c_plus`` right of it on the whole line (three-case mapping).  With a
    periodic ``domain=(a, b)`` the trace also crosses the jump at ``b``.
    If ``du0`` is given, ``(value, derivative)`` is returned.
    """
    condition = JumpCondition.parse(condition)
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise InputError("t must be non-negative")
    if domain is None:
        y = _trace_line(model, t, x)
        cy = np.asarray(model.speed(y), dtype=float)
        # a foot on alpha came from the left (case 3 with equality)
        cy = np.where((y == model.alpha) & (x > model.alpha) & (t > 0), model.c_minus, cy)
        cx = np.asarray(model.speed(x), dtype=float)
    else:
        y, plus = _trace_periodic(model, t, x, domain)
        cy = np.where(plus, model.c_plus, model.c_minus)
        a, b = domain
        cx = np.asarray(model.speed(a + np.mod(x - a, b - a)), dtype=float)
    ratio = cy / cx
    value = np.asarray(u0(y), dtype=float)
    if condition == JumpCondition.JUMP_CU:
        value = ratio * value
    if du0 is None:
        return value
    d = np.asarray(du0(y), dtype=float) * ratio
    if condition == JumpCondition.JUMP_CU:
        d = ratio * d
    return value, d
