"""
Second moment at T = 1e5
========================

The mean square of |zeta| against the classical main terms.
"""

# %%
import math

from zml import moments
from zml.moments import MomentSpec

T = 1e5
spec = MomentSpec(T, 1)
est = moments.shifted_moment(spec)
ref = moments.second_moment_reference(T)
print(f"integral   {est.value:.6f}")
print(f"main terms {ref:.6f}  (rel {est.value / ref - 1:+.2e})")
print(f"panels {est.panels}, level {est.refinement_level}, {est.runtime_seconds:.1f} s")

# %%
# The refinement history: each level halves the panels.
for level, value in enumerate(est.history):
    print(level, f"{value:.10f}")

# %%
# Smaller heights approach the main terms in the same way.
for T in (1e3, 1e4):
    e = moments.shifted_moment(MomentSpec(T, 1))
    print(T, e.value / moments.second_moment_reference(T) - 1)
