"""
Maxwell pulse hitting a material interface
==========================================

A right-moving pulse starts at x = 0.2 in vacuum (eps = mu = 1).  At x = 0.5
the medium changes to eps = 4/3, mu = 3, so the impedance doubles.  The
reflected and transmitted amplitudes are compared with the impedance
formulas, and profiles are written as CSV.
"""

import os
import sys

from cipwave.cli import execute, parse_config
from cipwave.harness import impedance_coefficients, interface_overshoot, run_problem

out = sys.argv[1] if len(sys.argv) > 1 else "maxwell_interface_out"
cfg = parse_config(overrides={"command": "run-maxwell", "problem": "maxwell-interface", "n": 200,
                              "snapshots": "0,0.3,0.35,0.5", "out": out})
execute(cfg)
print("profiles:", ", ".join(sorted(os.listdir(out))))

state, grid, media, _ = run_problem("maxwell-interface", 200)
co = impedance_coefficients(media)
rep = interface_overshoot(state, grid, media)
print(f"R_H = {co['R_H']:+.3f}  T_H = {co['T_H']:+.3f}  R_E = {co['R_E']:+.3f}  T_E = {co['T_E']:+.3f}")
for key, value in sorted(rep.items()):
    print(f"{key:28s} {value:.3e}")
