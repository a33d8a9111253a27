import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cipwave.cip import step_constant
from cipwave.errors import CFLError, InputError, OutOfCellError
from cipwave.grid import FieldState, build_grid
from cipwave.harness import (
    example_interface_media,
    example_variable_media_fn,
    gaussian,
    impedance_coefficients,
    interface_overshoot,
    maxwell_interface_exact,
    periodic,
    run_problem,
)
from cipwave.maxwell import (
    CellAveragedMedia,
    ConstantMedia,
    EMState,
    PiecewiseMedia,
    advance_maxwell,
    build_em_interface_polynomials,
    cell_average_media,
    characteristic_variables,
    energy,
    fields_from_characteristics,
    step_maxwell,
    step_maxwell_constant,
    step_maxwell_interface,
    step_maxwell_variable,
)
from cipwave.hermite import HermiteCell, eval_profile

import oracles


def random_em(n, seed=0):
    rng = np.random.default_rng(seed)
    return EMState(0.0, *rng.normal(size=(4, n)))


def assert_em_close(a, b, atol=1e-12):
    for name in ("H", "DH", "E", "DE"):
        x, y = getattr(a, name), b[name] if isinstance(b, dict) else getattr(b, name)
        np.testing.assert_allclose(x, y, atol=atol * max(1.0, np.max(np.abs(y))), err_msg=name)


def as_dict(arrs):
    return dict(zip(("H", "DH", "E", "DE"), arrs))


def test_state_validation():
    with pytest.raises(InputError):
        EMState(0.0, np.zeros(4), np.zeros(4), np.zeros(3), np.zeros(4))
    with pytest.raises(InputError):
        EMState(0.0, np.zeros(4), np.zeros(4), np.full(4, np.inf), np.zeros(4))
    with pytest.raises(InputError):
        ConstantMedia(0.0, 1.0)
    with pytest.raises(InputError):
        PiecewiseMedia(0.5, 1.0, -1.0, 1.0, 1.0)


def test_right_mover_is_transported():
    g = build_grid(32)
    f, df = gaussian(0.5, 0.1)
    x = g.nodes
    s = EMState(0.0, f(x), df(x), -f(x), -df(x))
    dt = 0.4 * g.dx
    out = step_maxwell_constant(s, g, ConstantMedia(), dt)
    ref = step_constant(FieldState(0.0, f(x), df(x)), g, 1.0, dt)
    np.testing.assert_allclose(out.H, ref.u, atol=1e-14)
    np.testing.assert_allclose(out.DH, ref.v, atol=1e-12)
    np.testing.assert_allclose(out.E, -ref.u, atol=1e-14)


def test_constants_unchanged():
    g = build_grid(10)
    s = EMState(0.0, np.full(10, 0.7), np.zeros(10), np.full(10, -0.2), np.zeros(10))
    for media, step in ((ConstantMedia(2.0, 0.5), step_maxwell_constant),):
        out = step(s, g, media, 0.5 * g.dx / media.c)
        np.testing.assert_allclose(out.H, 0.7, atol=1e-15)
        np.testing.assert_allclose(out.E, -0.2, atol=1e-15)


@pytest.mark.parametrize("eps, mu", [(1.0, 1.0), (2.0, 0.5), (1.7, 3.1)])
def test_characteristic_decoupling(eps, mu):
    g = build_grid(24)
    s = random_em(24, 1)
    media = ConstantMedia(eps, mu)
    dt = 0.7 * g.dx / media.c
    out = step_maxwell_constant(s, g, media, dt)
    u1, u2 = characteristic_variables(s.H, s.E, eps, mu)
    d1, d2 = characteristic_variables(s.DH, s.DE, eps, mu)
    r1 = step_constant(FieldState(0.0, u1, d1), g, media.c, dt)
    # u2 moves left: step the mirrored data
    m2 = step_constant(FieldState(0.0, np.roll(u2[::-1], 1), -np.roll(d2[::-1], 1)), g, media.c, dt)
    r2u, r2v = np.roll(m2.u[::-1], 1), -np.roll(m2.v[::-1], 1)
    o1, o2 = characteristic_variables(out.H, out.E, eps, mu)
    np.testing.assert_allclose(o1, r1.u, atol=1e-12)
    np.testing.assert_allclose(o2, r2u, atol=1e-12)
    H, E = fields_from_characteristics(o1, o2, eps, mu)
    np.testing.assert_allclose(H, out.H, atol=1e-14)
    np.testing.assert_allclose(E, out.E, atol=1e-14)
    oh1, _ = characteristic_variables(out.DH, out.DE, eps, mu)
    np.testing.assert_allclose(oh1, r1.v, atol=1e-11)


def test_constant_step_matches_oracle():
    g = build_grid(8)
    s = random_em(8, 2)
    media = ConstantMedia(1.7, 0.8)
    dt = 0.5 * g.dx / media.c
    out = step_maxwell_constant(s, g, media, dt)
    ref = oracles.maxwell_step(s.H, s.DH, s.E, s.DE, g.dx, dt, lambda k: (1.7, 0.8), {})
    assert_em_close(out, as_dict(ref))


def test_interface_polynomials_collapse_without_jump():
    rng = np.random.default_rng(3)
    H, DH, E, DE = rng.normal(size=(4, 2))
    prof = build_em_interface_polynomials(0.2, 0.3, H, DH, E, DE, 0.26, 1.5, 2.0, 1.5, 2.0)
    x = np.linspace(0.2, 0.3, 11)
    for side in ("minus", "plus"):
        np.testing.assert_allclose(prof.h(x, side), eval_profile(HermiteCell(0.2, 0.3, *H, *DH), x), atol=1e-12)
        np.testing.assert_allclose(prof.e(x, side), eval_profile(HermiteCell(0.2, 0.3, *E, *DE), x), atol=1e-12)


def _cubic_derivs(fn, side, alpha, h):
    s = np.linspace(-1, 1, 5) * h
    vals = fn(alpha + s, side)[0]
    p = np.polynomial.Polynomial.fit(s, vals, 3, domain=[-1, 1], window=[-1, 1])
    return [p(0.0)] + [p.deriv(k)(0.0) for k in (1, 2, 3)]


def test_interface_relations_residuals():
    rng = np.random.default_rng(4)
    em, mm, ep, mp = 1.0, 1.0, 4.0 / 3.0, 3.0
    for _ in range(20):
        H, DH, E, DE = rng.normal(size=(4, 2)) * [[1], [10], [1], [10]]
        prof = build_em_interface_polynomials(0.45, 0.55, H, DH, E, DE, 0.5, em, mm, ep, mp)
        kh_m, ke_m = oracles._em_weights(em, mm)
        kh_p, ke_p = oracles._em_weights(ep, mp)
        hm = _cubic_derivs(prof.h, "minus", 0.5, 0.02)
        hp = _cubic_derivs(prof.h, "plus", 0.5, 0.02)
        e_m = _cubic_derivs(prof.e, "minus", 0.5, 0.02)
        e_p = _cubic_derivs(prof.e, "plus", 0.5, 0.02)
        for k in range(4):
            for a, b in ((kh_m[k] * hm[k], kh_p[k] * hp[k]), (ke_m[k] * e_m[k], ke_p[k] * e_p[k])):
                assert a == pytest.approx(b, rel=1e-8, abs=1e-8 * max(1.0, abs(a)))
        # end data are reproduced
        assert prof.h(0.45, "minus") == pytest.approx((H[0], DH[0]), abs=1e-10)
        assert prof.e(0.55, "plus") == pytest.approx((E[1], DE[1]), abs=1e-10)


def test_interface_profile_checks():
    prof = build_em_interface_polynomials(0.0, 1.0, (0, 1), (0, 0), (0, 1), (0, 0), 0.5, 1, 1, 2, 2)
    with pytest.raises(InputError):
        prof.h(0.3, "auto")
    with pytest.raises(OutOfCellError):
        prof.e(1.5, "plus")
    with pytest.raises(OutOfCellError):
        build_em_interface_polynomials(0.0, 1.0, (0, 1), (0, 0), (0, 1), (0, 0), 1.5, 1, 1, 2, 2)


def test_interface_reconstruction_orders():
    media = example_interface_media()
    g0, dg0 = gaussian(0.2, 0.1)
    t = 0.3
    errs = {"H": [], "DH": []}
    for k in range(5):
        dx = 0.04 / 2**k
        x0 = 0.5 - 0.4 * dx
        ends = np.array([x0, x0 + dx])
        H, E, DH, DE = maxwell_interface_exact(media, g0, t, ends, dg0)
        prof = build_em_interface_polynomials(x0, x0 + dx, H, DH, E, DE, 0.5, 1.0, 1.0, 4 / 3, 3.0)
        xs = np.linspace(x0, x0 + dx, 41)
        xs = xs[xs != 0.5]
        He, _, DHe, _ = maxwell_interface_exact(media, g0, t, xs, dg0)
        hm, dm = prof.h(xs, "minus")
        hp, dp = prof.h(xs, "plus")
        left = xs < 0.5
        errs["H"].append(np.max(np.abs(np.where(left, hm, hp) - He)))
        errs["DH"].append(np.max(np.abs(np.where(left, dm, dp) - DHe)))
    assert math.log2(errs["H"][-2] / errs["H"][-1]) == pytest.approx(4.0, abs=0.35)
    assert math.log2(errs["DH"][-2] / errs["DH"][-1]) == pytest.approx(3.0, abs=0.35)


def test_degenerate_interface_equals_constant():
    g = build_grid(20)
    s = random_em(20, 5)
    dt = 0.6 * g.dx / math.sqrt(1 / 6)
    a = step_maxwell_interface(s, g, PiecewiseMedia(0.43, 2.0, 3.0, 2.0, 3.0), dt)
    b = step_maxwell_constant(s, g, ConstantMedia(2.0, 3.0), dt)
    assert_em_close(a, b, atol=1e-13)


def test_interface_step_matches_oracle():
    g = build_grid(8)
    s = random_em(8, 6)
    media = PiecewiseMedia(0.45, 1.0, 1.0, 4 / 3, 3.0)
    dt = 0.5 * g.dx / max(media.c_minus, media.c_plus)
    out = step_maxwell_interface(s, g, media, dt)
    cells = {4: (0.45, (1.0, 1.0), (4 / 3, 3.0)), 8: (1.0, (4 / 3, 3.0), (1.0, 1.0))}
    ref = oracles.maxwell_step(s.H, s.DH, s.E, s.DE, g.dx, dt,
                               lambda k: (1.0, 1.0) if k * g.dx < 0.45 else (4 / 3, 3.0), cells)
    assert_em_close(out, as_dict(ref))


def test_interface_example_amplitudes():
    state, grid, media, _ = run_problem("maxwell-interface", 200)
    assert np.all(np.isfinite(state.H)) and np.all(np.isfinite(state.E))
    rep = interface_overshoot(state, grid, media)
    assert rep["max_overshoot"] < 0.02
    co = impedance_coefficients(media)
    assert co["R_H"] == pytest.approx(-0.2) and co["T_H"] == pytest.approx(0.8)
    for key in ("H_reflected_rel_error", "H_transmitted_rel_error", "E_reflected_rel_error", "E_transmitted_rel_error"):
        assert rep[key] < 0.01, key


def test_interface_cfl():
    g = build_grid(20)
    with pytest.raises(CFLError):
        step_maxwell_interface(random_em(20), g, PiecewiseMedia(0.5, 1.0, 1.0, 0.25, 0.25), g.dx)


def test_cell_average_constants():
    g = build_grid(16)
    m = cell_average_media(lambda x: np.full_like(x, 2.5), lambda x: np.full_like(x, 0.4), g)
    np.testing.assert_allclose(m.eps, 2.5, rtol=1e-15)
    np.testing.assert_allclose(m.mu, 0.4, rtol=1e-15)


def test_cell_average_closed_form():
    g = build_grid(50)
    m = cell_average_media(example_variable_media_fn, example_variable_media_fn, g)
    lo, hi = g.nodes - g.dx / 2, g.nodes + g.dx / 2
    anti = lambda x: np.sin(4 * np.pi * x) / (8 * np.pi) + x
    np.testing.assert_allclose(m.eps, (anti(hi) - anti(lo)) / g.dx, atol=1e-12)


def test_cell_average_second_order():
    errs = []
    for n in (50, 100, 200):
        g = build_grid(n)
        m = cell_average_media(example_variable_media_fn, example_variable_media_fn, g)
        errs.append(np.max(np.abs(m.eps - example_variable_media_fn(g.nodes))))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.05)
    assert np.log2(errs[1] / errs[2]) == pytest.approx(2.0, abs=0.05)


def test_cell_average_rejects_nonpositive():
    with pytest.raises(InputError):
        cell_average_media(lambda x: np.cos(2 * np.pi * x), lambda x: np.ones_like(x), build_grid(16))


def test_variable_with_constant_media():
    g = build_grid(20)
    s = random_em(20, 7)
    m = cell_average_media(lambda x: np.full_like(x, 1.5), lambda x: np.full_like(x, 0.6), g)
    dt = 0.8 * g.dx / m.c.max()
    assert_em_close(step_maxwell_variable(s, g, m, dt), step_maxwell_constant(s, g, ConstantMedia(1.5, 0.6), dt),
                    atol=1e-13)


def test_variable_step_matches_oracle():
    g = build_grid(8)
    s = random_em(8, 8)
    m = cell_average_media(example_variable_media_fn, lambda x: 0.3 * np.sin(2 * np.pi * x) + 1.2, g)
    dt = 0.9 * g.dx / m.c.max()
    out = step_maxwell_variable(s, g, m, dt)
    cells = {k: ((k - 0.5) * g.dx, (m.eps[k - 1], m.mu[k - 1]), (m.eps[k % 8], m.mu[k % 8])) for k in range(1, 9)}
    ref = oracles.maxwell_step(s.H, s.DH, s.E, s.DE, g.dx, dt, lambda k: (m.eps[k], m.mu[k]), cells)
    assert_em_close(out, as_dict(ref))


def test_variable_media_length_check():
    with pytest.raises(InputError):
        step_maxwell_variable(random_em(8), build_grid(8), CellAveragedMedia(np.ones(7), np.ones(7)), 0.01)


def test_interface_relations_hold_after_steps():
    state, grid, media, _ = run_problem("maxwell-interface", 100, t_final=0.3)
    j = 50
    for _ in range(5):
        state = step_maxwell(state, grid, media, 0.25 * grid.dx)
        sl = slice(j - 1, j + 1)
        prof = build_em_interface_polynomials(grid.nodes[j - 1], grid.nodes[j - 1] + grid.dx, state.H[sl], state.DH[sl],
                                              state.E[sl], state.DE[sl], 0.5, 1.0, 1.0, 4 / 3, 3.0)
        hm, _ = prof.h(0.5, "minus")
        hp, _ = prof.h(0.5, "plus")
        em, _ = prof.e(0.5, "minus")
        ep, _ = prof.e(0.5, "plus")
        assert abs(hm - hp) < 1e-9 and abs(em - ep) < 1e-9


def test_energy_over_a_period():
    g = build_grid(200)
    f, df = gaussian(0.5)
    x = g.nodes
    s = EMState(0.0, f(x), df(x), 0.3 * f(x), 0.3 * df(x))
    e0 = energy(s, g, 1.0, 1.0)
    out = advance_maxwell(s, g, ConstantMedia(), 0.5 * g.dx, 1.0)
    assert energy(out, g, 1.0, 1.0) <= e0 * 1.001
    assert energy(out, g, 1.0, 1.0) >= e0 * 0.99


def test_shift_invariance():
    g = build_grid(40)
    s = random_em(40, 9)
    m = 7
    shifted = EMState(0.0, *(np.roll(getattr(s, k), m) for k in ("H", "DH", "E", "DE")))
    media = ConstantMedia(1.2, 0.9)
    dt = 0.55 * g.dx / media.c
    a = advance_maxwell(s, g, media, dt, 10 * dt)
    b = advance_maxwell(shifted, g, media, dt, 10 * dt)
    for k in ("H", "DH", "E", "DE"):
        np.testing.assert_array_equal(np.roll(getattr(a, k), m), getattr(b, k))


def test_step_dispatch_rejects_unknown_media():
    with pytest.raises(InputError):
        step_maxwell(random_em(8), build_grid(8), object(), 0.01)


def _travel(x):
    return x + np.sin(4 * np.pi * x) / (8 * np.pi)


def _variable_exact(x, t):
    """``eps = mu`` has unit impedance, so ``H - E`` and ``H + E`` ride the travel-time coordinate."""
    g = periodic(gaussian(0.5)[0])
    out = []
    for xi in x:
        tau = _travel(xi)
        yr = brentq(lambda y: _travel(y) - (tau - t), xi - 2.0, xi + 1e-12, xtol=1e-15)
        yl = brentq(lambda y: _travel(y) - (tau + t), xi - 1e-12, xi + 2.0, xtol=1e-15)
        out.append(0.5 * (g(yr) + g(yl)))
    return np.array(out)


def test_variable_media_second_order_at_generic_time():
    # N = 100 is still pre-asymptotic, so start at 200
    errs = []
    for n in (200, 400, 800):
        state, grid, _, _ = run_problem("maxwell-variable", n, t_final=0.3)
        ex = _variable_exact(grid.nodes, 0.3)
        errs.append(np.sqrt(np.sum((state.H - ex) ** 2) / np.sum(ex**2)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(orders - 2.0) < 0.3), orders
