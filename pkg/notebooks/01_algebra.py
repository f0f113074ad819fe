# %% [markdown]
# # Cayley-Dickson levels and the sign calculus
#
# Doubling goes from the reals up to the sedenions. The basis product
# `i_j i_k = ±i_{j^k}` is tabulated once per level.

# %%
import numpy as np

from octospec import identities
from octospec.algebra import CDNumber, basis_table, cd_mul

# %%
t = basis_table(3)
print("octonion sign table (row j, column k):")
print(t.sign * (t.index + 1))

# %% [markdown]
# Octonions are alternative but not associative.

# %%
i1, i2, i4 = (CDNumber.basis(3, k) for k in (1, 2, 4))
print("(i1 i2) i4 =", cd_mul(cd_mul(i1, i2), i4))
print("i1 (i2 i4) =", cd_mul(i1, cd_mul(i2, i4)))

# %% [markdown]
# The trace identity holds when `j` and `k` are both imaginary or equal.
# When exactly one of them is the real unit it fails, which is the
# `2(n-1)n` count below.

# %%
for v in range(4):
    r = identities.sign_sweep(v)
    print(v, r["trace_failures"], r["trace_literal_failures"], 2 * ((1 << v) - 1) << v)

# %% [markdown]
# At level 4, two basis units still generate an associative subalgebra, so
# the counterexamples need two-term elements.

# %%
alt = identities.alternativity_counterexample(4)
zd = identities.zero_divisor(4)
print("alternativity fails at x =", identities.describe(alt["x"]), " y =", identities.describe(alt["y"]))
print("zero divisor:", identities.describe(zd["x"]), "times", identities.describe(zd["y"]))
print("random norm error, v=3 vs v=4:",
      identities.norm_multiplicativity(3, 2000), identities.norm_multiplicativity(4, 2000))
