"""Reference problems, error norms and grid-refinement studies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .characteristics import backtrack_foot
from .cip import advance
from .errors import InputError, NumericalError
from .grid import FieldState, Grid, PiecewiseConstantCoefficient, SmoothCoefficient, build_grid, init_state
from .iim import advance_discontinuous, exact_discontinuous_solution
from .maxwell import (
    ConstantMedia,
    EMState,
    PiecewiseMedia,
    advance_maxwell,
    cell_average_media,
)

__all__ = [
    "ErrorReport",
    "ConvergenceTable",
    "RelativeNormError",
    "ReferenceProblem",
    "error_norms",
    "reference_problems",
    "get_problem",
    "run_problem",
    "convergence_study",
    "gaussian",
    "smooth_speed",
    "smooth_exact",
    "impedance_coefficients",
    "maxwell_interface_exact",
    "interface_overshoot",
    "REFINEMENT_N",
    "smooth_problem",
    "iim_problem",
    "maxwell_constant_problem",
    "maxwell_interface_problem",
    "maxwell_variable_problem",
    "periodic",
    "example_interface_media",
    "example_variable_media_fn",
]

REFINEMENT_N = (50, 100, 200, 400, 800, 1600)


class RelativeNormError(NumericalError, ZeroDivisionError):
    """The exact solution has zero norm; ``eps_inf`` is still available."""

    def __init__(self, eps_inf: float):
        super().__init__(f"exact solution has zero norm (eps_inf={eps_inf!r})")
        self.eps_inf = eps_inf


@dataclass(frozen=True)
class ErrorReport:
    eps1: float
    eps2: float
    eps_inf: float
    n_cells: int = 0
    dt: float = float("nan")
    final_time: float = float("nan")


def _values(numeric):
    if isinstance(numeric, FieldState):
        return numeric.u
    if isinstance(numeric, EMState):
        return numeric.H
    return np.asarray(numeric, dtype=float)


def error_norms(numeric, exact, dt: float = float("nan"), final_time: float = float("nan")) -> ErrorReport:
    """Relative l1 and l2 errors and the absolute max error at the nodes.

    ``numeric`` is an array, a :class:`FieldState` (``u``) or an
    :class:`EMState` (``H``).
    """
    u = _values(numeric)
    U = np.asarray(exact, dtype=float)
    if u.shape != U.shape:
        raise InputError(f"shape mismatch {u.shape} vs {U.shape}")
    d = u - U
    eps_inf = float(np.max(np.abs(d)))
    n1 = np.sum(np.abs(U))
    n2 = np.sqrt(np.sum(U * U))
    if n1 == 0 or n2 == 0:
        raise RelativeNormError(eps_inf)
    return ErrorReport(float(np.sum(np.abs(d)) / n1), float(np.sqrt(np.sum(d * d)) / n2), eps_inf,
                       int(u.size), dt, final_time)


@dataclass
class ConvergenceTable:
    problem: str
    rows: list = field(default_factory=list)

    def add(self, n: int, report: ErrorReport):
        self.rows.append((int(n), report))
        self.rows.sort(key=lambda r: r[0])

    @property
    def n_values(self):
        return [n for n, _ in self.rows]

    def errors(self, norm: str = "eps2"):
        return [getattr(r, norm) for _, r in self.rows]

    def orders(self, norm: str = "eps2"):
        """``log2(e_N / e_2N)`` between consecutive doublings (``None`` otherwise)."""
        out = []
        for (n0, r0), (n1, r1) in zip(self.rows, self.rows[1:]):
            e0, e1 = getattr(r0, norm), getattr(r1, norm)
            if n1 != 2 * n0 or e0 <= 0 or e1 <= 0:
                out.append(None)
            else:
                out.append(float(np.log2(e0 / e1)))
        return out

    def csv_rows(self):
        orders = [None] + self.orders("eps2")
        for (n, r), p in zip(self.rows, orders):
            yield n, r.eps1, r.eps2, r.eps_inf, p


def gaussian(center: float, width: float = 0.05):
    def g(x):
        return np.exp(-((np.asarray(x, dtype=float) - center) ** 2) / width**2)

    def dg(x):
        x = np.asarray(x, dtype=float)
        return -2.0 * (x - center) / width**2 * g(x)

    return g, dg


def periodic(fn, a: float = 0.0, b: float = 1.0):
    """Sum of ``fn`` over the two neighbouring periodic images, so a pulse wraps smoothly."""
    L = b - a

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        return fn(x) + fn(x - L) + fn(x + L)

    return wrapped


def smooth_speed() -> SmoothCoefficient:
    """``c(x) = 1 / (cos(4 pi x) + 2)`` with its first two derivatives."""
    k = 4.0 * np.pi

    def c(x):
        return 1.0 / (np.cos(k * np.asarray(x, dtype=float)) + 2.0)

    def dc(x):
        x = np.asarray(x, dtype=float)
        return k * np.sin(k * x) / (np.cos(k * x) + 2.0) ** 2

    def d2c(x):
        x = np.asarray(x, dtype=float)
        s, co = np.sin(k * x), np.cos(k * x)
        d = co + 2.0
        return k * k * (co / d**2 + 2.0 * s * s / d**3)

    return SmoothCoefficient(c, dc, d2c)


def smooth_exact(model: SmoothCoefficient, u0, t: float, x, conservative: bool = True, a=0.0, b=1.0):
    """Exact periodic solution by backward tracing: ``u0(y)`` times ``c(y)/c(x)`` if conservative."""
    x = np.asarray(x, dtype=float)
    if t == 0:
        return np.asarray(u0(x), dtype=float)
    y = backtrack_foot(model, x, t)
    yw = a + np.mod(y - a, b - a)
    val = np.asarray(u0(yw), dtype=float)
    if conservative:
        val = val * model.c(y) / model.c(x)
    return val


def impedance_coefficients(media: PiecewiseMedia) -> dict:
    """Amplitude ratios for a pulse moving right from the ``-`` medium.

    With ``Z = sqrt(mu/eps)`` and ``[H] = [E] = 0``:
    ``H`` reflects with ``(Z- - Z+)/(Z- + Z+)`` and transmits with
    ``2 Z- / (Z- + Z+)``; ``E`` ratios follow from ``E = -Z H`` for right
    movers and ``E = Z H`` for left movers.
    """
    zm = np.sqrt(media.mu_minus / media.eps_minus)
    zp = np.sqrt(media.mu_plus / media.eps_plus)
    r_h = (zm - zp) / (zm + zp)
    t_h = 2.0 * zm / (zm + zp)
    return {
        "Z_minus": zm,
        "Z_plus": zp,
        "R_H": r_h,
        "T_H": t_h,
        "R_E": -r_h,
        "T_E": t_h * zp / zm,
    }


def maxwell_interface_exact(media: PiecewiseMedia, g, t: float, x, dg=None):
    """``(H, E)`` (and derivatives if ``dg``) of a right-moving pulse ``g`` starting in the ``-`` medium.

    Valid until reflected or transmitted parts reach the domain ends.
    """
    x = np.asarray(x, dtype=float)
    co = impedance_coefficients(media)
    cm, cp, alpha = media.c_minus, media.c_plus, media.alpha
    zm, zp = co["Z_minus"], co["Z_plus"]
    left = x < alpha
    inc = x - cm * t
    ref = 2.0 * alpha - x - cm * t
    tra = alpha + cm / cp * (x - alpha) - cm * t
    H = np.where(left, g(inc) + co["R_H"] * g(ref), co["T_H"] * g(tra))
    E = np.where(left, -zm * g(inc) + zm * co["R_H"] * g(ref), -zp * co["T_H"] * g(tra))
    if dg is None:
        return H, E
    DH = np.where(left, dg(inc) - co["R_H"] * dg(ref), co["T_H"] * cm / cp * dg(tra))
    DE = np.where(left, -zm * dg(inc) - zm * co["R_H"] * dg(ref), -zp * co["T_H"] * cm / cp * dg(tra))
    return H, E, DH, DE


def interface_overshoot(state: EMState, grid: Grid, media: PiecewiseMedia) -> dict:
    """Peak amplitudes on each side of the interface relative to the impedance prediction.

    Meant for times after the incident pulse has fully crossed ``alpha``.
    """
    co = impedance_coefficients(media)
    x = grid.nodes
    left = x < media.alpha
    out = {}
    # signed peaks for a unit incident H pulse (incident E = -Z- H)
    expect = {
        "H": (co["R_H"], co["T_H"]),
        "E": (co["Z_minus"] * co["R_H"], -co["Z_plus"] * co["T_H"]),
    }
    for name, arr in (("H", state.H), ("E", state.E)):
        r, t = expect[name]
        refl = arr[left][np.argmax(np.abs(arr[left]))]
        tran = arr[~left][np.argmax(np.abs(arr[~left]))]
        out[f"{name}_reflected_peak"] = float(refl)
        out[f"{name}_transmitted_peak"] = float(tran)
        out[f"{name}_reflected_overshoot"] = float(max(0.0, abs(refl) - abs(r)) / abs(r))
        out[f"{name}_transmitted_overshoot"] = float(max(0.0, abs(tran) - abs(t)) / abs(t))
        out[f"{name}_reflected_rel_error"] = float(abs(refl - r) / abs(r))
        out[f"{name}_transmitted_rel_error"] = float(abs(tran - t) / abs(t))
    out["max_overshoot"] = max(v for k, v in out.items() if k.endswith("overshoot"))
    return out


@dataclass(frozen=True)
class ReferenceProblem:
    """A named test case.

    ``setup(grid)`` returns ``(state, model)``; ``advance(state, grid, model,
    dt, t_final)`` marches; ``exact(grid, model, t)`` gives nodal values of
    the tracked field (``u`` or ``H``).
    """

    name: str
    description: str
    t_final: float
    dt_rule: Callable[[int], float]
    setup: Callable
    advance: Callable
    exact: Callable
    kind: str
    default_n: int = 200
    options: dict = field(default_factory=dict)


def smooth_problem(scheme: str = "advection", model: Optional[SmoothCoefficient] = None, u0=None,
                   name: Optional[str] = None, period: Optional[float] = None) -> ReferenceProblem:
    """Smooth-speed problem; defaults to ``c = 1/(cos 4 pi x + 2)`` and a Gaussian at 0.2.

    ``period`` is a travel time after which the data return exactly (2 for
    the default speed); other times use a traced exact solution.
    """
    default = model is None and u0 is None
    u0 = u0 or periodic(gaussian(0.2)[0])
    model = model or smooth_speed()
    if default:
        period = 2.0
    conservative = scheme != "transport"

    def setup(grid):
        return init_state(grid, u0), model

    def run(state, grid, mdl, dt, t_final, scheme=scheme):
        return advance(state, grid, mdl, dt, t_final, scheme)

    def exact(grid, mdl, t):
        if period and abs(t / period - round(t / period)) < 1e-12:
            return np.asarray(u0(grid.nodes), dtype=float)
        return smooth_exact(mdl, u0, t, grid.nodes, conservative, grid.a, grid.b)

    eq = "u_t + (c u)_x = 0" if conservative else "u_t + c u_x = 0"
    name = name or ("advection-smooth" if conservative else "transport-smooth")
    return ReferenceProblem(name, f"{eq}, Gaussian at 0.2, dt = 0.1, scheme {scheme}",
                            2.0, lambda n: 0.1, setup, run, exact, "smooth", 200, {"scheme": scheme})


def iim_problem(condition: str = "u", model: Optional[PiecewiseConstantCoefficient] = None, u0=None,
                name: Optional[str] = None) -> ReferenceProblem:
    """Piecewise constant speed; defaults to ``c = 1 | 2`` at ``alpha = 0.5`` and a Gaussian at 0.2."""
    u0 = u0 or gaussian(0.2)[0]
    model = model or PiecewiseConstantCoefficient(0.5, 1.0, 2.0)

    def setup(grid):
        return init_state(grid, u0), model

    def run(state, grid, mdl, dt, t_final, condition=condition):
        return advance_discontinuous(state, grid, mdl, dt, t_final, condition)

    def exact(grid, mdl, t):
        return exact_discontinuous_solution(u0, mdl, t, grid.nodes, condition, domain=(grid.a, grid.b))

    name = name or f"transport-jump-{condition}"
    return ReferenceProblem(name, f"u_t + c u_x = 0, c = {model.c_minus} | {model.c_plus} at alpha = "
                            f"{model.alpha}, [{condition}] = 0, dt = 0.5 dx",
                            0.4, lambda n: 0.5 / n, setup, run, exact, "iim", 200, {"condition": condition})


def _em_state(grid, H, DH, E, DE):
    x = grid.nodes
    return EMState(0.0, H(x), DH(x), E(x), DE(x))


def maxwell_constant_problem(media: Optional[ConstantMedia] = None) -> ReferenceProblem:
    """Right-moving Gaussian at 0.5 (``E = -Z H``), CFL 0.5, one period."""
    media = media or ConstantMedia(1.0, 1.0)
    g, dg = gaussian(0.5)
    z = np.sqrt(media.mu / media.eps)
    c = media.c

    def setup(grid):
        return _em_state(grid, g, dg, lambda x: -z * g(x), lambda x: -z * dg(x)), media

    def exact(grid, mdl, t):
        return periodic(g)(grid.a + np.mod(grid.nodes - c * t - grid.a, grid.length))

    return ReferenceProblem("maxwell-constant", f"eps = {media.eps}, mu = {media.mu}, right-moving Gaussian, "
                            "CFL 0.5, one period", 1.0 / c, lambda n: 0.5 / (n * c), setup, advance_maxwell,
                            exact, "maxwell", 200)


def example_interface_media() -> PiecewiseMedia:
    return PiecewiseMedia(0.5, 1.0, 1.0, 4.0 / 3.0, 3.0)


def maxwell_interface_problem(media: Optional[PiecewiseMedia] = None) -> ReferenceProblem:
    """Gaussian ``H`` at 0.2 moving right (``E = -Z H``) into a media jump."""
    media = media or example_interface_media()
    g, dg = gaussian(0.2)
    cmax = max(media.c_minus, media.c_plus)

    def setup(grid):
        x = grid.nodes
        eps, mu = media.at(x)
        z = np.sqrt(mu / eps)
        return EMState(0.0, g(x), dg(x), -z * g(x), -z * dg(x)), media

    def exact(grid, mdl, t):
        return maxwell_interface_exact(mdl, g, t, grid.nodes)[0]

    return ReferenceProblem("maxwell-interface",
                            f"media ({media.eps_minus}, {media.mu_minus}) | ({media.eps_plus}, {media.mu_plus}) "
                            f"at alpha = {media.alpha}, Gaussian H at 0.2, E = -Z H, dt = 0.5 dx",
                            0.5, lambda n: 0.5 / (n * cmax), setup, advance_maxwell, exact, "maxwell", 200)


def example_variable_media_fn(x):
    return 0.5 * np.cos(4.0 * np.pi * np.asarray(x, dtype=float)) + 1.0


def maxwell_variable_problem(eps_fn=None, mu_fn=None) -> ReferenceProblem:
    """Cell-averaged media, Gaussian ``H`` at 0.5, ``E = 0``, ``dt = 0.25/N``.

    The default ``eps = mu`` has uniform impedance and unit travel time per
    period, so ``H(1) = H(0)``.
    """
    default = eps_fn is None and mu_fn is None
    eps_fn = eps_fn or example_variable_media_fn
    mu_fn = mu_fn or example_variable_media_fn
    g, dg = gaussian(0.5)

    def setup(grid):
        media = cell_average_media(eps_fn, mu_fn, grid)
        zero = lambda x: np.zeros_like(x)  # noqa: E731
        return _em_state(grid, g, dg, zero, zero), media

    def exact(grid, mdl, t):
        if not default or abs(t - round(t)) > 1e-12:
            raise InputError("maxwell-variable has a closed-form solution only for the default media at integer times")
        return g(grid.nodes)

    return ReferenceProblem("maxwell-variable", "cell-averaged eps(x), mu(x), Gaussian H at 0.5, E = 0, dt = 0.25/N",
                            1.0, lambda n: 0.25 / n, setup, advance_maxwell, exact, "maxwell", 200)


def reference_problems() -> dict:
    probs = [
        smooth_problem("advection"),
        smooth_problem("transport"),
        iim_problem("u"),
        iim_problem("cu"),
        maxwell_constant_problem(),
        maxwell_interface_problem(),
        maxwell_variable_problem(),
    ]
    return {p.name: p for p in probs}


def get_problem(name: str) -> ReferenceProblem:
    probs = reference_problems()
    if name not in probs:
        raise InputError(f"unknown problem {name!r}; choose from {sorted(probs)}")
    return probs[name]


def run_problem(problem, n_cells: int, dt: Optional[float] = None, t_final: Optional[float] = None,
                snapshots=(), **options):
    """Run a reference problem; returns ``(state, grid, model, {t: state})``.

    ``options`` are forwarded to the problem's advance (``scheme`` for the
    smooth problems, ``condition`` for the jump problems).
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    grid = build_grid(n_cells)
    dt = problem.dt_rule(n_cells) if dt is None else float(dt)
    t_final = problem.t_final if t_final is None else float(t_final)
    if not dt > 0:
        raise InputError("dt must be positive")
    if t_final < 0:
        raise InputError("t_final must be non-negative")
    state, model = problem.setup(grid)
    state = state.copy()
    snaps = {}
    times = sorted(float(t) for t in snapshots)
    if any(t < 0 or t > t_final + 1e-12 for t in times):
        raise InputError("snapshot times must lie in [0, t_final]")
    for t in times:
        state = problem.advance(state, grid, model, dt, t, **options) if t > state.time else state
        snaps[t] = state.copy()
    if t_final > state.time:
        state = problem.advance(state, grid, model, dt, t_final, **options)
    return state, grid, model, snaps


def convergence_study(problem, n_list=REFINEMENT_N, t_final: Optional[float] = None, **options) -> ConvergenceTable:
    """Run ``problem`` on every ``N`` in ``n_list`` with its time-step rule."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    n_list = sorted(int(n) for n in n_list)
    table = ConvergenceTable(problem.name)
    for n in n_list:
        dt = problem.dt_rule(n)
        try:
            state, grid, model, _ = run_problem(problem, n, dt, t_final, **options)
            t = problem.t_final if t_final is None else t_final
            rep = error_norms(state, problem.exact(grid, model, t), dt, t)
        except NumericalError as exc:
            exc.args = (f"N={n}: {exc}",)
            raise
        table.add(n, rep)
    return table
