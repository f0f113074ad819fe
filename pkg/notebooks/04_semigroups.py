# %% [markdown]
# # Multiparameter semigroups and one-parameter recovery

# %%
import math

import numpy as np

from octospec.spectral import random_projections
from octospec.stone import (BranchError, continuity_and_convexity_probe, random_semigroup_spec,
                            random_unit_imaginary, sample_times, sample_unitary_group, stone_recover,
                            unitary_group_spec, verify_semigroup)

spec = random_semigroup_spec(3, 4, 3, m=1, n=2, seed=0)
rep = verify_semigroup(spec, n_pairs=50)
print({k: f"{r:.1e}" for k, r in rep.residuals.items()})

# %% [markdown]
# Sample `t -> U_t` at off-lattice times and recover the generator. The
# first sample fits; the rest are held out.

# %%
rng = np.random.default_rng(3)
P = random_projections(4, 2, rng)
group = unitary_group_spec(3, P, [0.7, 2.1], [random_unit_imaginary(3, rng) for _ in P])
rec = stone_recover(sample_unitary_group(group, sample_times(0.5, 8)), 3)
print("frequencies", sorted(b for _, b, _ in rec.atoms), " held-out", rec.residuals["held_out"])

# %%
h = 1.2 * math.pi / 2.1
try:
    stone_recover(sample_unitary_group(group, sample_times(h, 8)), 3)
except BranchError as err:
    print("aliasing:", err)

# %%
f, g = rng.standard_normal(32), rng.standard_normal(32)
probe = continuity_and_convexity_probe(spec, f, g, [0.0, 1.0])
print(probe.residuals, probe.findings)
