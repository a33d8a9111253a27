"""
Amplification matrix of the constant-speed scheme
=================================================

For c constant the two-moment update is a 2x2 matrix per Fourier mode.
The scan covers theta in [0, 2 pi] and the fractional foot offset lambda in
[0, 1].
"""

import numpy as np

from cipwave.stability import amplification, condition_scan, schur_margin

scan = condition_scan(256, 256)
theta, lam = scan.argmax_M
print(f"max |rho2| = {scan.max_rho2_abs:.17g}")
print(f"max M      = {scan.max_M:.4f} at theta = {theta:.4f}, lambda = {lam:.4f}")

for th, la in ((np.pi / 2, 0.5), (np.pi, 0.25), (0.3, 0.9)):
    rep = amplification(th, la)
    m = schur_margin(th, la)
    print(f"theta={th:.3f} lambda={la:.2f}  |rho1|={abs(rep.rho1):.6f} |rho2|={abs(rep.rho2):.6f} "
          f"M={rep.M:.4f} schur stable={m.stable}")
