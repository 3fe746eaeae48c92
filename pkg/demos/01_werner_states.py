"""
Werner states: where entanglement starts, and what three copies buy
===================================================================

Run with ``python demos/01_werner_states.py``.
"""

# %%
import numpy as np

from nopurify import werner as qw

# The family interpolates between the singlet (p = 1) and its complement.
# The partial transpose goes negative exactly when the state is entangled.
for p in (0.25, 0.5, 0.75, 1.0):
    print(f"p = {p:4}: smallest PT eigenvalue {qw.ppt_min_eigenvalue(qw.werner_state(p)):+.4f}")

print("bisected threshold:", qw.werner_threshold_bisect())

# %%
# Twirling with the 24 single-qubit Cliffords gives the same answer as
# the closed-form projection onto the family.
rng = np.random.default_rng(1)
rho = qw.random_state(rng)
diff = np.abs(qw.twirl_quantum(rho, "two_design") - qw.twirl_quantum(rho)).max()
print("Clifford twirl vs closed form:", diff)

# %%
# One round of the bilateral-CNOT protocol purifies, but only when it succeeds.
for p in (0.6, 0.7, 0.9):
    o = qw.bbpssw_step(p)
    print(f"p = {p}: success {o.success_prob:.4f}, purity on success {o.out_purity_success:.4f}")

# %%
# Falling back on a third copy when the round fails makes it deterministic,
# and the output purity is a cubic in p.
grid = np.linspace(0, 1, 11)
for p in grid:
    print(f"{p:.1f}  simulated {qw.three_copy_protocol(p):.6f}  cubic {qw.three_copy_formula(p):.6f}")
