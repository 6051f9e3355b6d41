# %% [markdown]
# # Jackson's kernel
#
# A nonnegative trigonometric polynomial that integrates to one, has no
# frequencies at or beyond ``2n - 1`` and puts most of its mass within about
# ``sqrt(d)/n`` of the origin. These are the three properties the
# reconstruction relies on.

# %%
import numpy as np

from torus_superres import JacksonKernel
from torus_superres.torus import coordinate_distances

# %%
k = JacksonKernel(4)
x = np.linspace(0, 1, 9)
print("J_4 on a coarse grid:", np.round(k.eval_1d(x), 4))
print("Fourier coefficients l = 0..8:", [round(k.fourier_1d(l), 5) for l in range(9)])

# %% [markdown]
# Sampling goes through a tabulated inverse CDF, one coordinate at a time.

# %%
for d, n in [(1, 4), (2, 4), (3, 8), (3, 32)]:
    s = JacksonKernel(n, d).sample(50_000, seed=1)
    c = coordinate_distances(s, np.zeros(d))
    dist = np.sqrt((c * c).sum(axis=1))
    print(f"d={d} n={n:2d}  mean distance to 0 = {dist.mean():.4f}   sqrt(d)/n = {np.sqrt(d) / n:.4f}")
