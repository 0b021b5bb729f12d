"""
Zeta on the critical line
=========================

Riemann-Siegel against Euler-Maclaurin, and the zeros of Z up to 100.
"""

# %%
import numpy as np

from zml import zeta

ts = np.linspace(30, 200, 1000)
gap = max(abs(zeta.zeta_half_rs(t) - zeta.zeta_half_em(t)) for t in ts)
print(f"largest RS/EM gap on [30, 200]: {gap:.2e}")

# %%
# Sign changes of Z count the zeros; 29 of them lie below height 100.
print("sign changes in (1, 100]:", zeta.count_sign_changes(1.0, 100.0, 10_000))

# %%
# First few zeros, located by bracketing on a fine grid.
from scipy.optimize import brentq

grid = np.linspace(10, 50, 4001)
z = zeta.hardy_z_array(grid)
idx = np.flatnonzero(np.sign(z[1:]) != np.sign(z[:-1]))
zeros = [brentq(zeta.hardy_z, grid[i], grid[i + 1], xtol=1e-12) for i in idx]
print(np.round(zeros, 6))
