"""
Cosine prime sums
=================

sum_{p <= z} cos(a log p) / p for a range of frequencies.
"""

# %%
import math

from zml import primes

z = 10**6
table = primes.sieve(z)
for a in (0, 0.001, 0.005, 0.01, 0.1, 1, 10):
    c = primes.mertens_cos_sum(table, a, z)
    print(f"a={a:<6g} sum={c.sum_value:8.4f} shape={c.reference_value:8.4f} diff={c.discrepancy:+.4f}")

# %%
# For a between 1/100 and 1 the sum still looks like log(min(1/a, log z)):
# the primes below e^(1/a) all have cos(a log p) close to 1.
for a in (0.02, 0.05, 0.1, 0.2, 0.5):
    s = primes.mertens_cos_sum(table, a, z).sum_value
    print(f"a={a:<5g} sum={s:.4f} log(1/a)={math.log(1 / a):.4f} loglog(2+a)={math.log(math.log(2 + a)):.4f}")

# %%
# Plain Mertens: sum 1/p - log log z tends to 0.2614972...
for z in (10**4, 10**5, 10**6):
    print(z, primes.mertens_cos_sum(table, 0.0, z).sum_value - math.log(math.log(z)))
