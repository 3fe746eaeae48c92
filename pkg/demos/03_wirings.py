"""
Wiring two noisy PR-boxes together
==================================

Every deterministic local wiring turns two copies of ``noisy_pr(p)`` into a
box whose twirled purity is a quadratic Q(p). None of them beat Q(p) = p
above the local threshold 3/4.
"""

# %%
import numpy as np

from nopurify import boxworld as bw
from nopurify import wirings as wr
from nopurify.nogo import QFunction, check_conditions

alice, bob = wr.figure2_wiring()
print(f"Alice 0x{alice.encode():04x}, Bob 0x{bob.encode():04x}")
c = wr.extract_quad_coeffs(alice, bob)
print("q00, q01, q10, q11 =", c.as_tuple())

# %%
f = QFunction(c, 0.75)
for p in np.linspace(0.75, 1, 6):
    out = bw.pr_weight(bw.box_twirl(wr.effective_box(alice, bob, bw.noisy_pr(p), bw.noisy_pr(p))))
    print(f"p = {p:.2f}: simulated {out:.4f}, quadratic {f(p):.4f}")
print(check_conditions(f))

# %%
# A restricted exhaustive search; drop ``limit`` for the full run (a few
# minutes on one core, or use the ``nopurify wiring-search`` command).
rep = wr.search_all_wirings(limit=500)
print(f"searched {rep.searched_pairs} pairs, max gap {rep.max_gap}, witness {rep.witness_hex}")
