"""
Why no quadratic purifies
=========================
"""

# %%
from fractions import Fraction

from nopurify import nogo

# Pinning Q(p_s) <= p_s while staying in [0, 1] at both ends leaves no room
# for Q(p) > p above p_s: a quadratic crossing the diagonal three times is
# the diagonal itself.
identity = nogo.QFunction(nogo.QuadCoeffs(1, Fraction(1, 2), Fraction(1, 2), 0), Fraction(3, 4))
print(nogo.check_conditions(identity))

# %%
for p_s in (0.5, 0.75):
    kept, bad = nogo.scan_kept(p_s, 1_000_000, seed=0)
    print(f"p_s = {p_s}: {kept} admissible random curves, {bad} useful ones")
print("corner sweep:", nogo.corner_sweep(Fraction(3, 4)))

# %%
# Plot data: the four windows a purifying curve would need to pass through.
data = nogo.figure1_regions(0.75, 0.875)
print(data.regions_csv())
