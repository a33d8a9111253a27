"""
Transport across a jump in speed
================================

The speed jumps from 1 to 2 at x = 0.5.  Two interface conditions are
supported: continuity of u, or continuity of the flux c u.  The cell that
holds the jump uses a pair of cubics tied together at the jump.
"""

import numpy as np

from cipwave.harness import REFINEMENT_N, convergence_study, run_problem

for name in ("transport-jump-u", "transport-jump-cu"):
    table = convergence_study(name, REFINEMENT_N)
    orders = ", ".join(f"{p:.3f}" for p in table.orders())
    print(f"{name:18s} eps2(1600) = {table.errors()[-1]:.3e}  orders: {orders}")

# Under [cu] = 0 the pulse halves in height as it speeds up.
state, grid, _, _ = run_problem("transport-jump-cu", 400)
right = grid.nodes > 0.5
print(f"\npeak right of the jump at t = 0.4: u = {state.u[right].max():.4f} (exact 0.5)")
