"""Spectral calculus and operator factorization over Cayley-Dickson algebras.

Levels 0..3 are the reals, complex numbers, quaternions and octonions; level 4
(sedenions) is available for the algebra controls only.
"""
__version__ = "0.1.0"

from .algebra import (CDNumber, LevelError, basis_table, cd_conj, cd_inv, cd_mul, cd_norm, exp_pure,
                      polar_scalar, sign_eta, sign_kappa, sign_psi, sign_xi)
from .linear import (AVMatrix, AVVector, adjoint, apply, compose, graded_component, graded_decompose, inner,
                     is_normal, is_projection, is_unitary, op_norm, real_picture)
from .spectral import (CheckReport, GradedPVM, IntervalBox, functional_calculus, interval_projection,
                       quasi_permute_check, random_pvm, reduce_check, spectral_recover, synth_normal)
from .factorization import (PropertyPTriple, calibrate_theorem5, check_property_p, polar_decompose,
                            synth_triple, verify_corollary6, verify_lemma2, verify_lemma7,
                            verify_theorem5_eq1, verify_theorem5_eq2)
from .stone import (OmegaPoint, SemigroupSpec, continuity_and_convexity_probe, eval_semigroup,
                    kernel_split, polar_semigroup, power_operator, stone_recover, verify_semigroup_law)
