"""
The prime-sum majorant for log |zeta|
=====================================
"""

# %%
import numpy as np

from zml import primes, surrogate as S, zeta

T = 1e5
table = primes.sieve(int(T))
ts = np.random.default_rng(9).uniform(T, 2 * T, 1000)
logz = np.log(zeta.abs_zeta_half_array(ts))

# %%
print("lambda0 =", S.LAMBDA0)
for lam in (S.LAMBDA0, 1.0, 2.0):
    for x in (1e3, 1e4, T):
        margin = S.sound_rhs(ts, lam, x, T, 0.0, table) - logz
        print(f"lam={lam:.4f} x={x:g}  min margin {margin.min():+.3f}  negative {np.mean(margin < 0):.3f}")
