# %% [markdown]
# # Factorized triples A = BD
#
# `B` and `D` share a resolution; `A` carries the atomwise products.

# %%
import numpy as np

from octospec.factorization import (all_conventions, calibrate_theorem5, check_property_p, perturb_triple,
                                    synth_triple, verify_corollary6, verify_lemma7, verify_theorem5_eq1,
                                    verify_theorem5_eq2)

t = synth_triple(3, 4, 3, seed=1)
print("property P:", check_property_p(t).passed)
print("graded sign relation:", verify_theorem5_eq1(t).residuals)
print("octonion composition defect:", t.composition_defect)

# %% [markdown]
# A small rotation of D's eigenbasis breaks the relation, which shows the
# checker actually looks at the hypothesis.

# %%
print(verify_theorem5_eq1(perturb_triple(t, 1e-3, seed=1)).residuals)

# %% [markdown]
# The component relation admits several readings. Calibration ranks them on
# quaternion triples, where composition is associative.

# %%
cal = calibrate_theorem5(range(1, 31))
print(len(all_conventions()), "conventions")
for conv, r in cal.ranking[:5]:
    print(f"{conv.id:32s} {r:.2e}")

# %%
rep = verify_theorem5_eq2(t, cal.winner)
print("octonion residuals under the winner:", np.round(list(rep.residuals.values()), 3))

# %%
print(verify_corollary6(synth_triple(3, 4, 3, seed=2, real=True)).residuals)
rep = verify_lemma7(t)
print({k: f"{r:.1e}" for k, r in rep.residuals.items()})
print(rep.findings)
