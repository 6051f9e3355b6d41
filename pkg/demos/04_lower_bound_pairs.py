# %% [markdown]
# # Pairs that low frequencies cannot tell apart
#
# Two interleaved grids share every coefficient below their side length,
# yet every point of one is at least ``eps`` from every point of the other.

# %%
from torus_superres import LinfBall, max_coeff_diff, table_of, wasserstein
from torus_superres.adversarial import (
    RetriesExhausted,
    grid_pair,
    max_infinite_fourier_diff,
    random_separated_pair,
)

# %%
D1, D2, side = grid_pair(2, 0.1)
_, gap = max_coeff_diff(table_of(D1, LinfBall(side - 1)), table_of(D2, LinfBall(side - 1)))
print(f"side {side}: largest coefficient gap {gap:.1e}, transport distance {wasserstein(D1, D2):.5f}")

# %% [markdown]
# Random point clouds smoothed by Jackson's kernel give a pair that agrees
# (within ``kappa``) on *every* frequency. At desk scale the point count and
# ``kappa`` are overrides.

# %%
pair = random_separated_pair(2, 0.01, seed=0, M=16, n=3, kappa=1.5)
ell, gap = max_infinite_fourier_diff(pair)
print(f"found after {pair.attempts} draws; closest cross pair {pair.min_cross_distance:.4f}; "
      f"largest gap {gap:.3f} at {ell.tolist()} (kappa {pair.kappa})")

# %% [markdown]
# With 64 points per cloud on the circle and a separation of ``4 eps = 0.2``
# the two clouds essentially never avoid each other.

# %%
try:
    random_separated_pair(1, 0.05, seed=0, max_retries=200, M=64, n=80)
except RetriesExhausted as exc:
    print(exc)
