# %% [markdown]
# # Mixtures on the Boolean cube
#
# The positive and negative parts of a polynomial with a triple root at 1
# become mixture weights. The two mixtures have nearly the same Walsh
# coefficients at small levels but differ in the mass they put on the
# all-ones string. Mapping the cube onto ``{0, 1/2}^d`` turns this into a
# pair of distributions on the torus.

# %%
import numpy as np

from torus_superres import ball_mass, hh_violation
from torus_superres.cube import (
    bek_supnorm_check,
    cube_mixture_pair,
    default_s_max,
    embed_cube_pair,
)

# %%
pair = cube_mixture_pair(30, 0.005)
print("k =", pair.poly.k, " a_0 =", round(pair.poly.a0, 6))
print("sup near 1:", bek_supnorm_check(pair.poly))
print("mass gap on 1^d:", round(pair.mass_gap, 6))
print("scaled level gaps:", np.round(pair.level_gaps(default_s_max(30, 0.005)), 4))

# %% [markdown]
# At ``d = 12`` the whole cube can be tabulated and embedded.

# %%
small = cube_mixture_pair(12, 0.005, enforce_range=False)
D1, D2 = embed_cube_pair(12, small)
zero = np.zeros(12)
print("ball mass gap at 0:", ball_mass(D1, zero, 0.0) - ball_mass(D2, zero, 0.49))
print("heavy-hitter violation:", hh_violation(D1, D2, 0.49, 0.005, zero, 0.0))
