# %% [markdown]
# # A polynomial bump on the torus
#
# ``p(x) = q(mean_i sin^2(pi x_i))`` is close to 1 near the origin and below
# ``eps/8`` far from it. ``q`` composes a binomial amplifier with a minimax
# fit of a ramp.

# %%
import numpy as np

from torus_superres import build_q, eval_bump, verify_bump
from torus_superres.bump import degree_trend

# %%
B = build_q(0.25, 0.49, 16, "far")
print(B.summary())
print("p(0) =", eval_bump(B, np.zeros(16)), "  p(1/2, ..., 1/2) =", eval_bump(B, np.full(16, 0.5)))

# %%
v = verify_bump(B, n_points=10_000)
for name, check in v.items():
    print(name, check)

# %% [markdown]
# The degree grows roughly like ``sqrt(d)``: quadrupling ``d`` should at most
# double it.

# %%
print(degree_trend(0.25, 0.49, (4, 16, 64)))
