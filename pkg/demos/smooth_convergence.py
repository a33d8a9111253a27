"""
Smooth variable speed: grid refinement
======================================

Both smooth-speed equations are run to t = 2 with a fixed dt = 0.1, so only
the grid changes.  The speed c(x) = 1/(cos 4 pi x + 2) returns every
characteristic to its start after a travel time of 2, which makes the initial
data the exact answer.
"""

import numpy as np

from cipwave.harness import REFINEMENT_N, convergence_study

for name in ("advection-smooth", "transport-smooth"):
    table = convergence_study(name, REFINEMENT_N)
    print(f"\n{name}")
    print(f"{'N':>6} {'eps1':>11} {'eps2':>11} {'eps_inf':>11} {'order2':>7}")
    for n, e1, e2, einf, p in table.csv_rows():
        print(f"{n:>6} {e1:11.3e} {e2:11.3e} {einf:11.3e} {'' if p is None else f'{p:7.3f}'}")

# The orders swing between about 3.5 and 4.4 from one doubling to the next.
# Their mean over the last four doublings sits close to 4.
orders = np.array(convergence_study("advection-smooth", REFINEMENT_N).orders()[1:])
print(f"\nmean advection order over the last four doublings: {orders.mean():.3f}")
