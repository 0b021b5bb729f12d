"""
Shifted moments across regimes
==============================

Shift alpha2 from 0 to 1 at T = 1e5 and compare the moment with its
predicted size. Slow: a couple of minutes for k = 1.
"""

# %%
import math

from zml import moments
from zml.moments import MomentSpec

T = 1e5
shifts = [0.0, 0.001, 0.01, 0.02, 0.1, 1.0]
specs = [MomentSpec(T, 1, 0.0, a2) for a2 in shifts]
ests = moments.shifted_moment_multi(specs)

# %%
print(f"{'alpha2':>7} {'delta log T':>11} {'regime':>9} {'F':>8} {'moment':>12} {'ratio':>7}")
for s, e in zip(specs, ests):
    g = moments.shift_geometry(s)
    print(f"{s.alpha2:7g} {g.delta * math.log(T):11.3f} {moments.regime_classify(s):>9} "
          f"{g.f_value:8.4f} {e.value:12.2f} {moments.conjecture_ratio(s, estimate=e):7.4f}")

# %%
# The scaling F jumps at delta = 1/100: just below, min(1/delta, log T) is
# log T; just above it is log(2 + delta). At this height the moment itself
# does not jump, so the ratio moves by about the size of that jump.
for d in (0.0099, 0.0101):
    print(d, moments.f_scaling(T, d))
