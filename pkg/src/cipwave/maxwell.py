"""One-dimensional Maxwell equations ``eps E_t = H_x``, ``mu H_t = E_x``.

Every node is updated with the d'Alembert formula from a left foot
``x_k - c dt`` and a right foot ``x_k + c dt``:

    H = (hL + hR)/2 - (eL - eR)/(2 c mu)
    E = (eL + eR)/2 - (hL - hR)/(2 c eps)

and the moments by the same formula applied to the profile derivatives.
In uniform media the feet are read from plain Hermite cubics.  A cell that
contains a media jump uses interface cubics instead,

    h+-(x) = a0 + eps a1 s + (mu eps) a2 s^2/2 + (mu eps^2) a3 s^3/6
    e+-(x) = b0 + mu  b1 s + (mu eps) b2 s^2/2 + (mu^2 eps) b3 s^3/6

with ``s = (x - alpha)/dx`` and the media of the side.  Variable media are
replaced by cell averages, so every cell has a jump at its midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cip import march
from .errors import CFLError, CoefficientError, InputError, OutOfCellError
from .grid import Grid
from .hermite import CELL_TOL, hermite_eval

__all__ = [
    "EMState",
    "ConstantMedia",
    "PiecewiseMedia",
    "CellAveragedMedia",
    "EMInterfaceProfile",
    "em_interface_matrix",
    "build_em_interface_polynomials",
    "cell_average_media",
    "step_maxwell_constant",
    "step_maxwell_interface",
    "step_maxwell_variable",
    "step_maxwell",
    "advance_maxwell",
    "characteristic_variables",
    "fields_from_characteristics",
    "energy",
]

COND_LIMIT = 1e12


@dataclass
class EMState:
    time: float
    H: np.ndarray
    DH: np.ndarray
    E: np.ndarray
    DE: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(getattr(self, k), dtype=float) for k in ("H", "DH", "E", "DE")]
        n = arrs[0].shape
        if arrs[0].ndim != 1 or any(a.shape != n for a in arrs):
            raise InputError("H, DH, E, DE must be 1-D arrays of equal length")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise InputError("EM state contains non-finite entries")
        self.H, self.DH, self.E, self.DE = arrs

    def copy(self) -> "EMState":
        return EMState(self.time, self.H.copy(), self.DH.copy(), self.E.copy(), self.DE.copy())


def _positive(*vals):
    for v in vals:
        if not np.all(np.asarray(v) > 0):
            raise InputError("permittivity and permeability must be positive")


@dataclass(frozen=True)
class ConstantMedia:
    eps: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        _positive(self.eps, self.mu)

    @property
    def c(self) -> float:
        return 1.0 / np.sqrt(self.mu * self.eps)


@dataclass(frozen=True)
class PiecewiseMedia:
    """``(eps_minus, mu_minus)`` left of ``alpha``, ``(eps_plus, mu_plus)`` right of it."""

    alpha: float
    eps_minus: float
    mu_minus: float
    eps_plus: float
    mu_plus: float

    def __post_init__(self):
        _positive(self.eps_minus, self.mu_minus, self.eps_plus, self.mu_plus)

    @property
    def c_minus(self) -> float:
        return 1.0 / np.sqrt(self.mu_minus * self.eps_minus)

    @property
    def c_plus(self) -> float:
        return 1.0 / np.sqrt(self.mu_plus * self.eps_plus)

    def at(self, x):
        """``(eps, mu)`` at ``x``; a point on ``alpha`` belongs to the right side."""
        left = np.asarray(x, dtype=float) < self.alpha
        return np.where(left, self.eps_minus, self.eps_plus), np.where(left, self.mu_minus, self.mu_plus)


@dataclass(frozen=True)
class CellAveragedMedia:
    """Media constant on ``(x_{j-1/2}, x_{j+1/2})`` with values ``eps[j]``, ``mu[j]``."""

    eps: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        if np.shape(self.eps) != np.shape(self.mu) or np.ndim(self.eps) != 1:
            raise InputError("eps and mu must be 1-D arrays of equal length")
        if not (np.all(self.eps > 0) and np.all(self.mu > 0)):
            raise InputError("cell-averaged media must be positive")

    @property
    def c(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.mu * self.eps)


def _weights(eps, mu):
    """Derivative weights ``(1, k1, k2, k3)`` of the H and E interface cubics."""
    eps = np.asarray(eps, dtype=float)
    mu = np.asarray(mu, dtype=float)
    one = np.ones_like(eps)
    kh = np.stack([one, eps, mu * eps, mu * eps * eps], axis=-1)
    ke = np.stack([one, mu, mu * eps, mu * mu * eps], axis=-1)
    return kh, ke


def _rows(k, s):
    """Value row and dx-scaled slope row of ``sum a_l k_l s^l / l!`` (scalar ``s``)."""
    s = float(s)
    return k * np.array([1.0, s, s * s / 2.0, s**3 / 6.0]), k * np.array([0.0, 1.0, s, s * s / 2.0])


def em_interface_matrix(theta, k_left, k_right):
    """4x4 interpolation matrix for weights ``k`` on each side (stacks allowed)."""
    vr, dr = _rows(k_right, theta)
    vl, dl = _rows(k_left, theta - 1.0)
    return np.stack([vr, dr, vl, dl], axis=-2)


@dataclass(frozen=True)
class EMInterfaceProfile:
    x_left: float
    x_right: float
    alpha: float
    theta: float
    eps_left: float
    mu_left: float
    eps_right: float
    mu_right: float
    a: np.ndarray
    b: np.ndarray
    A_h: np.ndarray
    A_e: np.ndarray

    @property
    def dx(self) -> float:
        return self.x_right - self.x_left

    def _media(self, side):
        if side == "minus":
            return self.eps_left, self.mu_left
        if side == "plus":
            return self.eps_right, self.mu_right
        raise InputError(f"side must be 'minus' or 'plus', got {side!r}")

    def _eval(self, coef, k, x):
        x = np.asarray(x, dtype=float)
        slack = CELL_TOL * self.dx
        if np.any((x < self.x_left - slack) | (x > self.x_right + slack)):
            raise OutOfCellError(f"x outside cell [{self.x_left}, {self.x_right}]")
        s = (x - self.alpha) / self.dx
        value = coef[0] + s * (k[1] * coef[1] + s * (k[2] * coef[2] / 2.0 + s * k[3] * coef[3] / 6.0))
        deriv = (k[1] * coef[1] + s * (k[2] * coef[2] + s * k[3] * coef[3] / 2.0)) / self.dx
        return value, deriv

    def h(self, x, side):
        kh, _ = _weights(*self._media(side))
        return self._eval(self.a, kh, x)

    def e(self, x, side):
        _, ke = _weights(*self._media(side))
        return self._eval(self.b, ke, x)


def build_em_interface_polynomials(x_left, x_right, H, DH, E, DE, alpha,
                                   eps_left, mu_left, eps_right, mu_right) -> EMInterfaceProfile:
    """Interface cubics for ``H`` and ``E`` on ``[x_left, x_right]``.

    ``H, DH, E, DE`` are ``(left, right)`` pairs of nodal data.
    """
    _positive(eps_left, mu_left, eps_right, mu_right)
    dx = x_right - x_left
    if not dx > 0:
        raise InputError("empty cell")
    slack = CELL_TOL * dx
    if not (x_left - slack <= alpha <= x_right + slack):
        raise OutOfCellError(f"alpha={alpha} outside cell [{x_left}, {x_right}]")
    theta = min(max((x_right - alpha) / dx, 0.0), 1.0)
    kh_l, ke_l = _weights(eps_left, mu_left)
    kh_r, ke_r = _weights(eps_right, mu_right)
    A_h = em_interface_matrix(theta, kh_l, kh_r)
    A_e = em_interface_matrix(theta, ke_l, ke_r)
    if np.linalg.cond(A_h) > COND_LIMIT or np.linalg.cond(A_e) > COND_LIMIT:
        raise CoefficientError("EM interface system ill-conditioned")
    a = np.linalg.solve(A_h, [H[1], dx * DH[1], H[0], dx * DH[0]])
    b = np.linalg.solve(A_e, [E[1], dx * DE[1], E[0], dx * DE[0]])
    return EMInterfaceProfile(float(x_left), float(x_right), float(alpha), theta, float(eps_left),
                              float(mu_left), float(eps_right), float(mu_right), a, b, A_h, A_e)


def cell_average_media(eps_fn, mu_fn, grid: Grid, order: int = 5) -> CellAveragedMedia:
    """Gauss-Legendre averages of ``eps`` and ``mu`` over ``(x_k - dx/2, x_k + dx/2)``."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    x = grid.nodes[:, None] + 0.5 * grid.dx * nodes[None, :]
    eps = 0.5 * (np.asarray(eps_fn(x), dtype=float) * np.ones_like(x)) @ weights
    mu = 0.5 * (np.asarray(mu_fn(x), dtype=float) * np.ones_like(x)) @ weights
    if not (np.all(eps > 0) and np.all(mu > 0)):
        raise InputError("cell averages of eps and mu must be positive")
    return CellAveragedMedia(eps, mu)


def _combine(state, dt, c, eps, mu, left, right):
    """d'Alembert update from foot samples ``(h, dh, e, de)`` on each side."""
    hL, dhL, eL, deL = left
    hR, dhR, eR, deR = right
    zm = 2.0 * c * mu
    ze = 2.0 * c * eps
    H = 0.5 * (hL + hR) - (eL - eR) / zm
    DH = 0.5 * (dhL + dhR) - (deL - deR) / zm
    E = 0.5 * (eL + eR) - (hL - hR) / ze
    DE = 0.5 * (deL + deR) - (dhL - dhR) / ze
    return EMState(state.time + dt, H, DH, E, DE)


def _regular_feet(state, dx, lam):
    H, DH, E, DE = state.H, state.DH, state.E, state.DE
    hL, dhL = hermite_eval(np.roll(H, 1), H, np.roll(DH, 1), DH, dx, 1.0 - lam)
    eL, deL = hermite_eval(np.roll(E, 1), E, np.roll(DE, 1), DE, dx, 1.0 - lam)
    hR, dhR = hermite_eval(H, np.roll(H, -1), DH, np.roll(DH, -1), dx, lam)
    eR, deR = hermite_eval(E, np.roll(E, -1), DE, np.roll(DE, -1), dx, lam)
    return [hL, dhL, eL, deL], [hR, dhR, eR, deR]


def _check_cfl(c, dt, dx, where=""):
    cmax = float(np.max(c))
    if cmax * dt > dx * (1.0 + 1e-12):
        raise CFLError(f"CFL {cmax * dt / dx:.6g} > 1 (speed {cmax:.6g}{where})")


def step_maxwell_constant(state: EMState, grid: Grid, media: ConstantMedia, dt: float) -> EMState:
    c = media.c
    _check_cfl(c, dt, grid.dx)
    left, right = _regular_feet(state, grid.dx, c * dt / grid.dx)
    return _combine(state, dt, c, media.eps, media.mu, left, right)


def _interfaces(grid, media):
    """Cells ``j`` holding a jump, with the media on each side; includes the wrap at ``b``."""
    n, dx = grid.n_cells, grid.dx
    s = (media.alpha - grid.a) / dx
    m = round(s)
    j = m if abs(s - m) <= 1e-12 else int(np.ceil(s))
    if j < 1 or j > n - 1 or media.alpha - grid.a < dx * (1 - 1e-12):
        raise InputError(f"interface alpha={media.alpha} must lie at least one cell inside the domain")
    minus = (media.eps_minus, media.mu_minus)
    plus = (media.eps_plus, media.mu_plus)
    return [(j, media.alpha, minus, plus), (n, grid.b, plus, minus)]


def step_maxwell_interface(state: EMState, grid: Grid, media: PiecewiseMedia, dt: float) -> EMState:
    """Piecewise constant media: interface cubics on the jump cells, Hermite cubics elsewhere."""
    dx, n = grid.dx, grid.n_cells
    x = grid.nodes
    eps, mu = media.at(x)
    c = 1.0 / np.sqrt(eps * mu)
    _check_cfl(c, dt, dx, " on the faster side")
    left, right = _regular_feet(state, dx, c * dt / dx)
    for j, alpha, (el, ml), (er, mr) in _interfaces(grid, media):
        jl, jr = j - 1, j % n
        xl = x[jl]
        prof = build_em_interface_polynomials(
            xl, xl + dx,
            (state.H[jl], state.H[jr]), (state.DH[jl], state.DH[jr]),
            (state.E[jl], state.E[jr]), (state.DE[jl], state.DE[jr]),
            alpha, el, ml, er, mr,
        )
        # downwind end of the cell reads its left foot from the + side
        foot = xl + dx - c[jr] * dt
        left[0][jr], left[1][jr] = prof.h(foot, "plus")
        left[2][jr], left[3][jr] = prof.e(foot, "plus")
        # upwind end reads its right foot from the - side
        foot = xl + c[jl] * dt
        right[0][jl], right[1][jl] = prof.h(foot, "minus")
        right[2][jl], right[3][jl] = prof.e(foot, "minus")
    return _combine(state, dt, c, eps, mu, left, right)


class _MidpointSystem:
    """Inverse interface matrices for every cell ``[x_{k-1}, x_k]`` with the jump at its midpoint."""

    def __init__(self, media: CellAveragedMedia):
        self.media = media
        kh, ke = _weights(media.eps, media.mu)
        self.kh_l, self.kh_r = np.roll(kh, 1, axis=0), kh
        self.ke_l, self.ke_r = np.roll(ke, 1, axis=0), ke
        A_h = em_interface_matrix(0.5, self.kh_l, self.kh_r)
        A_e = em_interface_matrix(0.5, self.ke_l, self.ke_r)
        self.inv_h = np.linalg.inv(A_h)
        self.inv_e = np.linalg.inv(A_e)

    @staticmethod
    def _eval(coef, k, s, dx):
        value = coef[:, 0] + s * (k[:, 1] * coef[:, 1] + s * (k[:, 2] * coef[:, 2] / 2.0 + s * k[:, 3] * coef[:, 3] / 6.0))
        deriv = (k[:, 1] * coef[:, 1] + s * (k[:, 2] * coef[:, 2] + s * k[:, 3] * coef[:, 3] / 2.0)) / dx
        return value, deriv

    def feet(self, state, dx, lam):
        """Left feet from the + side of cell ``k`` and right feet from the - side of cell ``k+1``."""
        H, DH, E, DE = state.H, state.DH, state.E, state.DE
        fh = np.stack([H, dx * DH, np.roll(H, 1), dx * np.roll(DH, 1)], axis=-1)
        fe = np.stack([E, dx * DE, np.roll(E, 1), dx * np.roll(DE, 1)], axis=-1)
        a = np.einsum("kij,kj->ki", self.inv_h, fh)
        b = np.einsum("kij,kj->ki", self.inv_e, fe)
        # cell k spans [x_{k-1}, x_k], midpoint alpha = x_k - dx/2
        s_left = 0.5 - lam
        hL = self._eval(a, self.kh_r, s_left, dx)
        eL = self._eval(b, self.ke_r, s_left, dx)
        # cell k+1: its - side carries the media of node k
        a1, b1 = np.roll(a, -1, axis=0), np.roll(b, -1, axis=0)
        s_right = lam - 0.5
        hR = self._eval(a1, self.kh_r, s_right, dx)
        eR = self._eval(b1, self.ke_r, s_right, dx)
        return [hL[0], hL[1], eL[0], eL[1]], [hR[0], hR[1], eR[0], eR[1]]


def step_maxwell_variable(state: EMState, grid: Grid, media: CellAveragedMedia, dt: float,
                          system: _MidpointSystem | None = None) -> EMState:
    """Cell-averaged media: an interface cubic on every cell, jump at the midpoint."""
    if len(media.eps) != grid.n_cells:
        raise InputError("media length does not match the grid")
    c = media.c
    _check_cfl(c, dt, grid.dx, f" in cell {int(np.argmax(c))}")
    system = system or _MidpointSystem(media)
    left, right = system.feet(state, grid.dx, c * dt / grid.dx)
    return _combine(state, dt, c, media.eps, media.mu, left, right)


def step_maxwell(state, grid, media, dt):
    if isinstance(media, ConstantMedia):
        return step_maxwell_constant(state, grid, media, dt)
    if isinstance(media, PiecewiseMedia):
        return step_maxwell_interface(state, grid, media, dt)
    if isinstance(media, CellAveragedMedia):
        return step_maxwell_variable(state, grid, media, dt)
    raise InputError(f"unsupported media {type(media).__name__}")


def advance_maxwell(state: EMState, grid: Grid, media, dt: float, t_final: float) -> EMState:
    if isinstance(media, CellAveragedMedia):
        system = _MidpointSystem(media)
        return march(state, lambda s, h: step_maxwell_variable(s, grid, media, h, system), dt, t_final)
    return march(state, lambda s, h: step_maxwell(s, grid, media, h), dt, t_final)


def characteristic_variables(H, E, eps, mu):
    """``u1 = sqrt(mu) H - sqrt(eps) E`` moves right, ``u2 = sqrt(mu) H + sqrt(eps) E`` moves left."""
    sm, se = np.sqrt(mu), np.sqrt(eps)
    return sm * H - se * E, sm * H + se * E


def fields_from_characteristics(u1, u2, eps, mu):
    return (u1 + u2) / (2.0 * np.sqrt(mu)), (u2 - u1) / (2.0 * np.sqrt(eps))


def energy(state: EMState, grid: Grid, eps, mu) -> float:
    """``0.5 * sum(eps E^2 + mu H^2) dx``."""
    return float(0.5 * np.sum(eps * state.E**2 + mu * state.H**2) * grid.dx)
