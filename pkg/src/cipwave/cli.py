"""Command-line driver: INI-style config, runs, CSV output.

Usage::

    cipwave --command converge --problem advection-smooth --out results/
    cipwave --config run.ini --command run-maxwell --snapshots 0,0.3,0.35,0.5

A config file holds one section per command with flat ``key = value``
entries; command-line flags override file values.  Exit status is 0 on
success, 2 for configuration errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import configparser
import io
import os
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .errors import CIPError, InputError, NumericalError
from .grid import PiecewiseConstantCoefficient, SmoothCoefficient
from .harness import (
    REFINEMENT_N,
    ReferenceProblem,
    convergence_study,
    error_norms,
    example_interface_media,
    get_problem,
    iim_problem,
    interface_overshoot,
    maxwell_constant_problem,
    maxwell_interface_problem,
    maxwell_variable_problem,
    run_problem,
    smooth_problem,
)
from .maxwell import ConstantMedia, EMState, PiecewiseMedia
from .stability import condition_scan

__all__ = ["ConfigError", "RunConfig", "parse_config", "serialize_config", "execute", "main", "COMMANDS"]

COMMANDS = ("run-advection", "run-transport", "run-iim", "run-maxwell", "converge", "stability-scan")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(InputError):
    """Bad or missing configuration value; the message names the key."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    problem: Optional[str] = None
    n: Optional[int] = None
    dt: Optional[float] = None
    t_final: Optional[float] = None
    out: str = "."
    snapshots: tuple = ()
    n_list: tuple = ()
    scheme: Optional[str] = None
    condition: Optional[str] = None
    media: Optional[str] = None
    c: Optional[str] = None
    u0: Optional[str] = None
    alpha: Optional[float] = None
    c_minus: Optional[float] = None
    c_plus: Optional[float] = None
    eps: Optional[str] = None
    mu: Optional[str] = None
    eps_minus: Optional[float] = None
    mu_minus: Optional[float] = None
    eps_plus: Optional[float] = None
    mu_plus: Optional[float] = None
    theta_samples: Optional[int] = None
    lam_samples: Optional[int] = None


_KIND = {
    "problem": str, "n": int, "dt": float, "t_final": float, "out": str, "snapshots": "floats",
    "n_list": "ints", "scheme": str, "condition": str, "media": str, "c": str, "u0": str,
    "alpha": float, "c_minus": float, "c_plus": float, "eps": str, "mu": str,
    "eps_minus": float, "mu_minus": float, "eps_plus": float, "mu_plus": float,
    "theta_samples": int, "lam_samples": int,
}

_COMMON = {"problem", "n", "dt", "t_final", "out", "snapshots"}
_ALLOWED = {
    "run-advection": _COMMON | {"scheme", "c", "u0"},
    "run-transport": _COMMON | {"c", "u0"},
    "run-iim": _COMMON | {"condition", "alpha", "c_minus", "c_plus", "u0"},
    "run-maxwell": _COMMON | {"media", "alpha", "eps", "mu", "eps_minus", "mu_minus", "eps_plus", "mu_plus"},
    "converge": {"problem", "n_list", "t_final", "out", "scheme", "condition"},
    "stability-scan": {"theta_samples", "lam_samples", "out"},
}

_PROBLEM_KIND = {
    "run-advection": ("smooth",),
    "run-transport": ("smooth",),
    "run-iim": ("iim",),
    "run-maxwell": ("maxwell",),
}


def _convert(key, raw):
    kind = _KIND[key]
    text = str(raw).strip()
    try:
        if kind == "floats":
            return tuple(float(t) for t in text.split(",") if t.strip())
        if kind == "ints":
            return tuple(int(t) for t in text.split(",") if t.strip())
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {getattr(kind, '__name__', kind)}") from None


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command: unknown command {cfg.command!r}; choose from {', '.join(COMMANDS)}")
    allowed = _ALLOWED[cfg.command]
    for f in fields(cfg):
        if f.name in ("command", "out"):
            continue
        val = getattr(cfg, f.name)
        if val not in (None, ()) and f.name not in allowed:
            raise ConfigError(f"{f.name}: not a valid key for {cfg.command}")
    for key in ("dt", "t_final", "alpha", "c_minus", "c_plus", "eps_minus", "mu_minus", "eps_plus", "mu_plus"):
        val = getattr(cfg, key)
        if val is not None and not (np.isfinite(val) and val > 0):
            raise ConfigError(f"{key}: must be positive, got {val!r}")
    if cfg.n is not None and cfg.n < 4:
        raise ConfigError(f"n: must be at least 4, got {cfg.n}")
    for key in ("theta_samples", "lam_samples"):
        val = getattr(cfg, key)
        if val is not None and val < 8:
            raise ConfigError(f"{key}: must be at least 8, got {val}")
    if any(n < 4 for n in cfg.n_list):
        raise ConfigError("n_list: every N must be at least 4")
    if any(not (np.isfinite(t) and t >= 0) for t in cfg.snapshots):
        raise ConfigError("snapshots: times must be non-negative")
    if cfg.command == "converge" and cfg.problem is None:
        raise ConfigError("problem: required for converge")
    if cfg.problem is not None and cfg.command in _PROBLEM_KIND:
        try:
            kind = get_problem(cfg.problem).kind
        except InputError as exc:
            raise ConfigError(f"problem: {exc}") from None
        if kind not in _PROBLEM_KIND[cfg.command]:
            raise ConfigError(f"problem: {cfg.problem!r} cannot be run by {cfg.command}")
    if cfg.command == "converge":
        try:
            get_problem(cfg.problem)
        except InputError as exc:
            raise ConfigError(f"problem: {exc}") from None
    if cfg.scheme is not None and cfg.scheme not in ("advection", "transport", "sol1", "sol2"):
        raise ConfigError(f"scheme: unknown scheme {cfg.scheme!r}")
    if cfg.condition is not None and cfg.condition not in ("u", "cu"):
        raise ConfigError(f"condition: must be 'u' or 'cu', got {cfg.condition!r}")
    if cfg.media is not None and cfg.media not in ("constant", "piecewise", "variable"):
        raise ConfigError(f"media: must be constant, piecewise or variable, got {cfg.media!r}")
    return cfg


def parse_config(path: Optional[str] = None, overrides: Optional[dict] = None, text: Optional[str] = None) -> RunConfig:
    """Build a validated :class:`RunConfig` from a file (or text) and flag overrides."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    values = {}
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from None
    elif text is not None:
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from None
    command = overrides.pop("command", None)
    sections = parser.sections()
    if command is None:
        if len(sections) != 1:
            raise ConfigError("command: give --command or a config with exactly one section")
        command = sections[0]
    if command not in COMMANDS:
        raise ConfigError(f"command: unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    if parser.has_section(command):
        for key, raw in parser.items(command):
            norm = key.strip().replace("-", "_")
            if norm not in _KIND:
                raise ConfigError(f"{key}: unknown key in [{command}]")
            values[norm] = _convert(norm, raw)
    for key, raw in overrides.items():
        norm = key.replace("-", "_")
        if norm not in _KIND:
            raise ConfigError(f"{key}: unknown key")
        values[norm] = raw if isinstance(raw, (tuple, list)) and not isinstance(raw, str) else _convert(norm, raw)
        if isinstance(values[norm], list):
            values[norm] = tuple(values[norm])
    return _validate(RunConfig(command=command, **values))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    """Config text that :func:`parse_config` reads back to an equal object."""
    lines = [f"[{cfg.command}]"]
    for f in fields(cfg):
        if f.name == "command":
            continue
        val = getattr(cfg, f.name)
        if val is None or val == () or (f.name == "out" and val == "."):
            continue
        lines.append(f"{f.name} = {_fmt(val)}")
    return "\n".join(lines) + "\n"


def _expr(text: str, key: str):
    """Compile an expression in ``x`` with its first two derivatives."""
    import sympy

    x = sympy.Symbol("x", real=True)
    try:
        e = sympy.sympify(text, locals={"x": x})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"{key}: cannot parse expression {text!r}") from exc
    extra = e.free_symbols - {x}
    if extra:
        raise ConfigError(f"{key}: unknown symbols {sorted(map(str, extra))}")

    def compile_(ex):
        f = sympy.lambdify(x, ex, "numpy")
        return lambda xs: np.asarray(f(np.asarray(xs, dtype=float)), dtype=float) * np.ones_like(np.asarray(xs, dtype=float))

    return compile_(e), compile_(sympy.diff(e, x)), compile_(sympy.diff(e, x, 2))


def _float_expr(text: str, key: str) -> float:
    f, _, _ = _expr(text, key)
    val = float(f(np.array([0.0]))[0])
    return val


def _resolve_problem(cfg: RunConfig) -> ReferenceProblem:
    cmd = cfg.command
    if cmd in ("run-advection", "run-transport"):
        scheme = "transport" if cmd == "run-transport" else (cfg.scheme or "advection")
        model = u0 = None
        if cfg.c is not None:
            c, dc, d2c = _expr(cfg.c, "c")
            model = SmoothCoefficient(c, dc, d2c)
        if cfg.u0 is not None:
            u0 = _expr(cfg.u0, "u0")[0]
        if cfg.problem is not None and model is None and u0 is None:
            base = get_problem(cfg.problem)
            if base.options.get("scheme") == scheme:
                return base
        custom = model is not None or u0 is not None
        return smooth_problem(scheme, model, u0, name="custom-smooth" if custom else None)
    if cmd == "run-iim":
        base = get_problem(cfg.problem or "transport-jump-u")
        condition = cfg.condition or base.options["condition"]
        model = None
        if any(v is not None for v in (cfg.alpha, cfg.c_minus, cfg.c_plus)):
            model = PiecewiseConstantCoefficient(cfg.alpha if cfg.alpha is not None else 0.5,
                                                 cfg.c_minus or 1.0, cfg.c_plus or 2.0)
        u0 = _expr(cfg.u0, "u0")[0] if cfg.u0 is not None else None
        custom = model is not None or u0 is not None
        return iim_problem(condition, model, u0, name="custom-jump-" + condition if custom else None)
    if cmd == "run-maxwell":
        media = cfg.media or {"maxwell-constant": "constant", "maxwell-variable": "variable"}.get(cfg.problem, "piecewise")
        if media == "constant":
            eps = _float_expr(cfg.eps, "eps") if cfg.eps else 1.0
            mu = _float_expr(cfg.mu, "mu") if cfg.mu else 1.0
            return maxwell_constant_problem(ConstantMedia(eps, mu))
        if media == "variable":
            eps_fn = _expr(cfg.eps, "eps")[0] if cfg.eps else None
            mu_fn = _expr(cfg.mu, "mu")[0] if cfg.mu else None
            return maxwell_variable_problem(eps_fn, mu_fn)
        ex = example_interface_media()
        pm = PiecewiseMedia(
            cfg.alpha if cfg.alpha is not None else ex.alpha,
            cfg.eps_minus or ex.eps_minus, cfg.mu_minus or ex.mu_minus,
            cfg.eps_plus or ex.eps_plus, cfg.mu_plus or ex.mu_plus,
        )
        return maxwell_interface_problem(pm)
    raise ConfigError(f"command: {cmd} does not run a single problem")


class _Outputs:
    """Tracks written files so a failed run can remove them."""

    def __init__(self, root: str):
        self.root = root
        self.paths = []

    def write(self, name: str, text: str) -> str:
        os.makedirs(self.root, exist_ok=True)
        path = os.path.join(self.root, name)
        self.paths.append(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path

    def discard(self):
        for p in self.paths:
            try:
                os.remove(p)
            except OSError:
                pass
        self.paths = []


def _csv(header, rows, footer=()) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join("" if v is None else _fmt(float(v)) if not isinstance(v, int) else str(v) for v in row) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _snapshot_csv(state, x) -> str:
    if isinstance(state, EMState):
        return _csv("x,H,DH,E,DE", zip(x, state.H, state.DH, state.E, state.DE))
    return _csv("x,u,v", zip(x, state.u, state.v))


def _run_single(cfg: RunConfig, out: _Outputs) -> str:
    problem = _resolve_problem(cfg)
    n = cfg.n or problem.default_n
    t_final = cfg.t_final if cfg.t_final is not None else problem.t_final
    snaps = tuple(cfg.snapshots)
    if any(t > t_final + 1e-12 for t in snaps):
        raise ConfigError("snapshots: times must not exceed t_final")
    state, grid, model, shots = run_problem(problem, n, cfg.dt, t_final, snaps)
    dt = float(cfg.dt if cfg.dt is not None else problem.dt_rule(n))
    prefix = cfg.command.replace("run-", "")
    for t in sorted(shots):
        out.write(f"{prefix}_t{t!r}.csv", _snapshot_csv(shots[t], grid.nodes))
    field = state.H if isinstance(state, EMState) else state.u
    if not np.all(np.isfinite(field)):
        raise NumericalError("non-finite values in the solution")
    parts = [f"{cfg.command}", f"problem={problem.name}", f"N={n}", f"dt={dt!r}", f"t={t_final!r}",
             f"max_abs={float(np.max(np.abs(field)))!r}"]
    try:
        rep = error_norms(state, problem.exact(grid, model, t_final))
        parts += [f"eps1={rep.eps1:.6e}", f"eps2={rep.eps2:.6e}", f"eps_inf={rep.eps_inf:.6e}"]
    except (CIPError, ZeroDivisionError):
        pass
    if problem.name == "maxwell-interface" and isinstance(model, PiecewiseMedia):
        parts.append(f"max_overshoot={interface_overshoot(state, grid, model)['max_overshoot']:.3e}")
    parts.append(f"files={len(shots)}")
    return " ".join(parts)


def _run_converge(cfg: RunConfig, out: _Outputs) -> str:
    problem = get_problem(cfg.problem)
    opts = {}
    if cfg.scheme is not None:
        if problem.kind != "smooth":
            raise ConfigError("scheme: only valid for smooth problems")
        opts["scheme"] = cfg.scheme
    if cfg.condition is not None:
        if problem.kind != "iim":
            raise ConfigError("condition: only valid for jump problems")
        opts["condition"] = cfg.condition
    n_list = cfg.n_list or REFINEMENT_N
    table = convergence_study(problem, n_list, cfg.t_final, **opts)
    orders = [o for o in table.orders() if o is not None]
    footer = [f"problem={problem.name}", f"t_final={(cfg.t_final or problem.t_final)!r}",
              f"last_order2={orders[-1]!r}" if orders else "last_order2="]
    out.write(f"converge_{problem.name}.csv", _csv("N,eps1,eps2,eps_inf,order2", table.csv_rows(), footer))
    last = f"{orders[-1]:.3f}" if orders else "n/a"
    return f"converge problem={problem.name} N={','.join(map(str, table.n_values))} last_order2={last}"


def _run_scan(cfg: RunConfig, out: _Outputs) -> str:
    res = condition_scan(cfg.theta_samples or 256, cfg.lam_samples or 256)
    th, la = res.argmax_M
    footer = [f"max_rho2_abs={res.max_rho2_abs!r}", f"max_M={res.max_M!r}", f"argmax_theta={th!r}",
              f"argmax_lambda={la!r}"]
    out.write("stability_scan.csv", _csv("theta,lambda,rho2_abs,M", res.rows(), footer))
    return f"stability-scan samples={res.M.size} max_rho2_abs={res.max_rho2_abs!r} max_M={res.max_M:.6f}"


def execute(cfg: RunConfig, stream=None) -> int:
    """Run ``cfg``; print one summary line; return the exit status."""
    stream = stream or sys.stdout
    out = _Outputs(cfg.out)
    try:
        if cfg.command == "converge":
            line = _run_converge(cfg, out)
        elif cfg.command == "stability-scan":
            line = _run_scan(cfg, out)
        else:
            line = _run_single(cfg, out)
    except InputError as exc:
        out.discard()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        out.discard()
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BaseException:
        out.discard()
        raise
    print(line, file=stream)
    return EXIT_OK


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cipwave", description=__doc__.split("\n\n")[0])
    p.add_argument("--config", help="INI-style file with one section per command")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--problem", help="reference problem id")
    p.add_argument("--n", type=int, help="number of cells")
    p.add_argument("--dt", type=float, help="time step (default: the problem's rule)")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--snapshots", help="comma-separated output times")
    p.add_argument("--n-list", dest="n_list", help="comma-separated grid sizes for converge")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="any other config key, e.g. --set condition=cu")
    return p


def main(argv=None) -> int:
    args = _build_arg_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in ("command", "out", "problem", "n", "dt", "t_final", "snapshots", "n_list")}
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    try:
        cfg = parse_config(args.config, overrides)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
