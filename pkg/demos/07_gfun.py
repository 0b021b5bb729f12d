"""
Mean values of cosine products
==============================
"""

# %%
import numpy as np

from zml import gfun
from zml.gfun import Factorization

for n in (4, 16, 36, 900, 2**10 * 3**4):
    f = Factorization.from_int(n)
    print(n, gfun.describe(f), gfun.g_of_n(f))

# %%
# Closed-form integral over [T, 2T] against T g(n).
rng = np.random.default_rng(0)
T = 1e6
for _ in range(8):
    f = gfun.random_square_factorization(rng)
    r = gfun.cosine_product_integral_numeric(T, f)
    main, bound = gfun.cosine_product_integral_formula(T, f)
    print(f"{gfun.describe(f):>20}  deviation {r.value - main:+10.4f}  n={bound:g}  terms {r.terms}")

# %%
# Ordered factorisations of squares against the originals.
for alphas in ([1], [1, 1], [2, 1], [1, 1, 1], [3, 2, 1]):
    print(alphas, gfun.factorization_count_ratio(alphas), gfun.g_square_product(alphas))
