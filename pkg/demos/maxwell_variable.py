"""
Maxwell equations in smoothly varying media
===========================================

eps(x) = mu(x) = cos(4 pi x)/2 + 1 is replaced by its cell averages, which
puts a small interface at every cell midpoint.  With eps = mu the impedance
is 1 everywhere, so H - E and H + E ride the travel-time coordinate
tau(x) = x + sin(4 pi x)/(8 pi) without reflection.  After unit time both
halves of the pulse are back where they started.
"""

import numpy as np
from scipy.optimize import brentq

from cipwave.harness import REFINEMENT_N, convergence_study, gaussian, periodic, run_problem

table = convergence_study("maxwell-variable", REFINEMENT_N)
print("t = 1   orders:", ", ".join(f"{p:.3f}" for p in table.orders()))


def tau(x):
    return x + np.sin(4 * np.pi * x) / (8 * np.pi)


def exact_h(x, t, g=periodic(gaussian(0.5)[0])):
    out = []
    for xi in x:
        yr = brentq(lambda y: tau(y) - (tau(xi) - t), xi - 2.0, xi + 1e-12, xtol=1e-15)
        yl = brentq(lambda y: tau(y) - (tau(xi) + t), xi - 1e-12, xi + 2.0, xtol=1e-15)
        out.append(0.5 * (g(yr) + g(yl)))
    return np.array(out)


# At a generic time the cell averaging shows up as a second-order error.
errs = []
for n in (100, 200, 400, 800):
    state, grid, _, _ = run_problem("maxwell-variable", n, t_final=0.3)
    ex = exact_h(grid.nodes, 0.3)
    errs.append(np.linalg.norm(state.H - ex) / np.linalg.norm(ex))
print("t = 0.3 orders:", ", ".join(f"{p:.3f}" for p in np.log2(np.array(errs[:-1]) / errs[1:])))
