# %% [markdown]
# # Graded spectral measures
#
# A finite PVM with Cayley-Dickson values is synthesized into a real-picture
# operator and recovered again.

# %%
import numpy as np

from octospec.linear import op_norm
from octospec.spectral import (IntervalBox, functional_calculus, interval_projection, modulus, phase,
                               random_pvm, spectral_recover, synth_normal)

rng = np.random.default_rng(0)
pvm = random_pvm(3, 4, 3, rng)
A = synth_normal(pvm)
print("operator shape", A.shape, " normal residual", op_norm(A @ A.T - A.T @ A))

# %%
back = spectral_recover(A, 3)
for (z, P), (w, Q) in zip(pvm.atoms, back.atoms):
    print(f"value error {(z - w).norm():.1e}   projection error {op_norm(P - Q):.1e}")

# %% [markdown]
# Polar factors come from the functional calculus.

# %%
T, U = functional_calculus(pvm, modulus), functional_calculus(pvm, phase)
print("T U - A:", op_norm(T @ U - A))
print("U orthogonal:", op_norm(U.T @ U - np.eye(U.shape[0])))

# %%
F = interval_projection(pvm, IntervalBox.symmetric(3, 0.8))
print("rank of the box projection:", round(np.trace(F)) // 8)
