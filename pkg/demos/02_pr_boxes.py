"""
Noisy PR-boxes: CHSH, local models and the shared-bit twirl
============================================================
"""

# %%
from fractions import Fraction

import numpy as np

from nopurify import boxworld as bw

print("CHSH of the PR box:", bw.chsh_value(bw.pr_box()))
print("CHSH of the anti-PR box:", bw.chsh_value(bw.anti_pr_box()))
print("even mixture is uniform:", np.allclose(bw.noisy_pr(0.5), 0.25))

# %%
# Exact local-model test across the threshold. The family has CHSH 8p - 4,
# so it is local up to p = 3/4 and not beyond.
for p in (Fraction(7, 10), Fraction(3, 4), Fraction(3, 4) + Fraction(1, 10**9), Fraction(4, 5)):
    r = bw.lhv_membership(bw.noisy_pr(p))
    print(f"p = {p}: CHSH {bw.chsh_value(bw.noisy_pr(p))}, local model: {r.feasible}")

# %%
# The twirl maps any table, signalling or not, onto the family and keeps
# the PR weight.
rng = np.random.default_rng(0)
d = bw.random_box(rng)
print("signalling?", not bw.is_nonsignalling(d))
t = bw.box_twirl(d)
print("PR weight before/after:", bw.pr_weight(d), bw.pr_weight(t))
print("distance to family:", bw.max_abs_diff(t, bw.noisy_pr(bw.pr_weight(d))))
