"""
Time steps beyond the CFL limit
===============================

The smooth CIP update samples the upwind cubic at a traced foot point, so the
foot may sit several cells away.  Here dt = 3.7 dx / max c.
"""

import numpy as np

from cipwave.cip import advance
from cipwave.grid import build_grid, init_state
from cipwave.harness import error_norms, gaussian, periodic, smooth_speed

model = smooth_speed()
u0 = periodic(gaussian(0.2)[0])

for n in (100, 200, 400):
    grid = build_grid(n)
    dt = 3.7 * grid.dx
    state = advance(init_state(grid, u0), grid, model, dt, 2.0, "advection")
    rep = error_norms(state, u0(grid.nodes))
    print(f"N={n:4d} dt={dt:.4f} steps={int(np.ceil(2.0 / dt)):4d} max|u|={np.abs(state.u).max():.4f} "
          f"eps2={rep.eps2:.3e}")
