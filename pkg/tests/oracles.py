"""Brute-force reference evaluations, written without the package internals.

Every profile is rebuilt by solving for monomial coefficients in
``s = (x - x0) / dx`` and every update is evaluated node by node in plain
Python from the governing relations (characteristic transport, d'Alembert
splitting, jump relations derived from the PDE).
"""

import math

import numpy as np
from scipy.optimize import brentq


# -- cubic profiles --------------------------------------------------------

def _poly(coef, s):
    return sum(c * s**i for i, c in enumerate(coef))


def _dpoly(coef, s):
    return sum(i * c * s ** (i - 1) for i, c in enumerate(coef) if i)


def cubic_through(x0, x1, u0, u1, v0, v1):
    """Monomial coefficients (in ``s = (x - x0)/dx``) of the cubic with given end data."""
    dx = x1 - x0
    M = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 1, 1], [0, 1, 2, 3]], dtype=float)
    rhs = np.array([u0, v0 * dx, u1, v1 * dx])
    coef = np.linalg.solve(M, rhs)

    def f(x):
        s = (x - x0) / dx
        return _poly(coef, s), _dpoly(coef, s) / dx

    return f


def periodic_cell(n, dx, y):
    """Index ``j`` of the cell ``[x_{j-1}, x_j]`` holding ``y`` on ``[0, n dx)`` and the wrapped ``y``."""
    y = y % (n * dx)
    return math.floor(y / dx) + 1, y


def hermite_at(u, v, dx, y):
    n = len(u)
    j, yw = periodic_cell(n, dx, y)
    x0 = (j - 1) * dx
    f = cubic_through(x0, x0 + dx, u[(j - 1) % n], u[j % n], v[(j - 1) % n], v[j % n])
    return f(yw)


# -- smooth speed ----------------------------------------------------------

def smooth_c(x):
    return 1.0 / (math.cos(4 * math.pi * x) + 2.0)


def smooth_dc(x):
    return 4 * math.pi * math.sin(4 * math.pi * x) / (math.cos(4 * math.pi * x) + 2.0) ** 2


def smooth_travel(y, x):
    """Travel time from ``y`` to ``x`` for ``dx/dt = 1/(cos 4 pi x + 2)``."""
    return 2.0 * (x - y) + (math.sin(4 * math.pi * x) - math.sin(4 * math.pi * y)) / (4 * math.pi)


def smooth_foot(x, dt):
    """Exact foot by root finding on the closed-form travel time."""
    return brentq(lambda y: smooth_travel(y, x) - dt, x - 3 * dt - 1.0, x, xtol=1e-15, rtol=1e-15)


def advection_step(u, v, dx, feet, c, dc):
    """``u_t + (c u)_x = 0``: ``c u`` is constant along characteristics, ``dy/dx = c(y)/c(x)``."""
    out_u, out_v = [], []
    for k, y in enumerate(feet):
        x = k * dx
        H, Hx = hermite_at(u, v, dx, y)
        r = c(y) / c(x)
        out_u.append(r * H)
        # d/dx [c(y) H(y) / c(x)] with dy/dx = r
        out_v.append((dc(y) * r * H + c(y) * Hx * r) / c(x) - c(y) * H * dc(x) / c(x) ** 2)
    return np.array(out_u), np.array(out_v)


def transport_step(u, v, dx, feet, c):
    out_u, out_v = [], []
    for k, y in enumerate(feet):
        H, Hx = hermite_at(u, v, dx, y)
        out_u.append(H)
        out_v.append(Hx * c(y) / c(k * dx))
    return np.array(out_u), np.array(out_v)


def constant_step(u, v, dx, c, dt):
    return transport_step(u, v, dx, [k * dx - c * dt for k in range(len(u))], lambda x: c)


def legacy_step(u, v, dx, dt, c, dc, d2c, variant):
    """Advection phase from the upwind cubic, then the source-term correction."""
    n = len(u)
    us, vs = [], []
    for k in range(n):
        H, Hx = hermite_at(u, v, dx, k * dx - c(k * dx) * dt)
        us.append(H)
        vs.append(Hx)
    un, vn = [0.0] * n, [0.0] * n
    for k in range(n):
        x = k * dx
        if variant == "sol1":
            un[k] = (1 - dc(x) * dt) * us[k]
    for k in range(n):
        x = k * dx
        if variant == "sol1":
            kp, km = (k + 1) % n, (k - 1) % n
            grad_c = (c(kp * dx) - c(km * dx)) / (2 * dx)
            inc = (un[kp] - us[kp]) - (un[km] - us[km])
            vn[k] = (1 - grad_c * dt) * vs[k] + inc / (2 * dx)
        else:
            decay = math.exp(-dc(x) * dt)
            un[k] = decay * us[k]
            vn[k] = -us[k] * d2c(x) * dt + decay * vs[k]
    return np.array(un), np.array(vn)


# -- jump in a constant speed ----------------------------------------------

def jump_cubics(x0, x1, alpha, data, k_minus, k_plus):
    """Two cubics on ``[x0, x1]`` split at ``alpha``.

    ``data = (u0, u1, v0, v1)``.  ``k_minus[m] * d^m H-/dx^m`` equals
    ``k_plus[m] * d^m H+/dx^m`` at ``alpha`` for ``m = 0..3``.  The left
    end is interpolated by ``H-`` and the right end by ``H+``.
    Unknowns are monomial coefficients in ``s = (x - alpha)/dx``.
    """
    dx = x1 - x0
    u0, u1, v0, v1 = data
    rows, rhs = [], []

    def val_row(s, off):
        r = [0.0] * 8
        for i in range(4):
            r[off + i] = s**i
        return r

    def der_row(s, off):
        r = [0.0] * 8
        for i in range(1, 4):
            r[off + i] = i * s ** (i - 1)
        return r

    s0, s1 = (x0 - alpha) / dx, (x1 - alpha) / dx
    rows += [val_row(s0, 0), der_row(s0, 0), val_row(s1, 4), der_row(s1, 4)]
    rhs += [u0, v0 * dx, u1, v1 * dx]
    for m in range(4):
        r = [0.0] * 8
        r[m] = k_minus[m] * math.factorial(m)
        r[4 + m] = -k_plus[m] * math.factorial(m)
        rows.append(r)
        rhs.append(0.0)
    coef = np.linalg.solve(np.array(rows), np.array(rhs))

    def side(cf):
        def f(x):
            s = (x - alpha) / dx
            return _poly(cf, s), _dpoly(cf, s) / dx
        return f

    return side(coef[:4]), side(coef[4:])


def _jump_weights(c, condition):
    p = 1 if condition == "cu" else 0
    return [c ** (m + p) for m in range(4)]


def iim_step(u, v, dx, alpha, cm, cp, dt, condition):
    """Trace every node back through the periodic piecewise speed and sample the cell profile.

    The speed is ``cm`` on ``[0, alpha)`` and ``cp`` on ``[alpha, 1)``, so it
    jumps at ``alpha`` and again at the wrap point.
    """
    n = len(u)
    L = n * dx
    ja = math.ceil(alpha / dx)
    out_u, out_v = [], []
    for k in range(n):
        x = k * dx
        cx = cm if x < alpha else cp
        y, cy = x - cx * dt, cx
        if y < alpha <= x:
            cy = cm
            y = alpha - cm * (dt - (x - alpha) / cx)
        elif y < 0.0 <= x:
            cy = cp
            y = -cp * (dt - x / cx)
        j, yw = periodic_cell(n, dx, y)
        x0 = (j - 1) * dx
        data = (u[j - 1], u[j % n], v[j - 1], v[j % n])
        if j == ja:
            hm, hp = jump_cubics(x0, x0 + dx, alpha, data, _jump_weights(cm, condition), _jump_weights(cp, condition))
            H, Hx = (hm if yw < alpha else hp)(yw)
        elif j == n:
            hm, _ = jump_cubics(x0, L, L, data, _jump_weights(cp, condition), _jump_weights(cm, condition))
            H, Hx = hm(yw)
        else:
            H, Hx = cubic_through(x0, x0 + dx, *data)(yw)
        r = cy / cx
        if condition == "cu":
            out_u.append(r * H)
            out_v.append(r * r * Hx)
        else:
            out_u.append(H)
            out_v.append(r * Hx)
    return np.array(out_u), np.array(out_v)


# -- Maxwell ---------------------------------------------------------------

def _em_weights(eps, mu):
    """From ``eps E_t = H_x``, ``mu H_t = E_x``: continuous are ``H, H_x/eps,
    H_xx/(eps mu), H_xxx/(eps^2 mu)`` and ``E, E_x/mu, E_xx/(eps mu), E_xxx/(mu^2 eps)``."""
    kh = [1.0, 1.0 / eps, 1.0 / (eps * mu), 1.0 / (eps * eps * mu)]
    ke = [1.0, 1.0 / mu, 1.0 / (eps * mu), 1.0 / (mu * mu * eps)]
    return kh, ke


def _dalembert(h_left, e_left, h_right, e_right, eps, mu):
    """Right movers ``R = sqrt(mu) H - sqrt(eps) E`` come from the left foot, left movers from the right."""
    sm, se = math.sqrt(mu), math.sqrt(eps)
    R = sm * h_left - se * e_left
    Lv = sm * h_right + se * e_right
    return (R + Lv) / (2 * sm), (Lv - R) / (2 * se)


def maxwell_step(H, DH, E, DE, dx, dt, media_at, interface_cells):
    """``media_at(k) -> (eps, mu)`` of node ``k``.

    ``interface_cells`` maps a cell index ``j`` (cell ``[x_{j-1}, x_j]``)
    to ``(alpha, (eps, mu) left, (eps, mu) right)``.
    """
    n = len(H)
    out = [[], [], [], []]
    for k in range(n):
        eps, mu = media_at(k)
        c = 1.0 / math.sqrt(eps * mu)
        x = k * dx
        samples = []
        for foot in (x - c * dt, x + c * dt):
            j, yw = periodic_cell(n, dx, foot)
            x0 = (j - 1) * dx
            hd = (H[j - 1], H[j % n], DH[j - 1], DH[j % n])
            ed = (E[j - 1], E[j % n], DE[j - 1], DE[j % n])
            if j in interface_cells:
                alpha, ml, mr = interface_cells[j]
                khl, kel = _em_weights(*ml)
                khr, ker = _em_weights(*mr)
                hm, hp = jump_cubics(x0, x0 + dx, alpha, hd, khl, khr)
                em, ep = jump_cubics(x0, x0 + dx, alpha, ed, kel, ker)
                # the foot reads the polynomial of the node's own medium
                own_right = foot < x
                fh, fe = (hp, ep) if own_right else (hm, em)
            else:
                fh = cubic_through(x0, x0 + dx, hd[0], hd[1], hd[2], hd[3])
                fe = cubic_through(x0, x0 + dx, ed[0], ed[1], ed[2], ed[3])
            samples.append((fh(yw), fe(yw)))
        (hl, el), (hr, er) = samples
        h, e = _dalembert(hl[0], el[0], hr[0], er[0], eps, mu)
        dh, de = _dalembert(hl[1], el[1], hr[1], er[1], eps, mu)
        for lst, val in zip(out, (h, dh, e, de)):
            lst.append(val)
    return [np.array(a) for a in out]
