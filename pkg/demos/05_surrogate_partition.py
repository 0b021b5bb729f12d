"""
Prime-block surrogates
======================

Build the beta-ladder at T = 1e6, evaluate the block polynomials and sort
ordinates in [T, 2T] into the sets S(j) and T.
"""

# %%
import numpy as np

from zml import surrogate as S

T = 1e6
cfg = S.build_config(T, 1, threshold=0.2)
print("betas", cfg.ladder.betas, "cal_I", cfg.cal_I, "truncated", cfg.truncated)
for i in range(1, cfg.cal_I + 1):
    print(i, [round(x) for x in cfg.ladder.block_bounds(i)], cfg.block(i, cfg.cal_I)[0].size, "primes")

# %%
ts = np.random.default_rng(1).uniform(T, 2 * T, 2000)
labels = [str(x) for x in S.classify_many(cfg, ts)]
print({name: labels.count(name) for name in sorted(set(labels))})

# %%
# The dyadic sums P_m stay far inside 2^(-m/10): |P_m| <= sum 1/(2p) over the block.
for m in range(S.p_block_count(T) + 1):
    vals = S.p_poly(cfg, m, ts).real
    print(m, f"max |Re P_m| {np.abs(vals).max():.4f}  bound {2 ** (-m / 10):.4f}")

# %%
# With the literal threshold the ladder has a single block.
print(S.build_ladder(T, 1, log_threshold=-1000.0).cal_I)
