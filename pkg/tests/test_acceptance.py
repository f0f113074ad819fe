"""Acceptance criteria, one pass/fail line each.

Lines are printed as the tests run (visible with ``-s``) and repeated in the
terminal summary. Two sub-claims cannot hold as literally worded; they run as
strict xfails and print FAIL together with the reason.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from octospec import identities
from octospec.algebra import CDNumber
from octospec.factorization import (calibrate_theorem5, check_property_p, perturb_triple, synth_triple,
                                    verify_corollary6, verify_lemma7, verify_theorem5_eq1, verify_theorem5_eq2)
from octospec.linear import op_norm
from octospec.spectral import random_projections, random_pvm, spectral_recover, synth_normal
from octospec.stone import (BranchError, continuity_and_convexity_probe, kernel_split_check,
                            random_semigroup_spec, random_unit_imaginary, sample_times, sample_unitary_group,
                            stone_recover, unitary_group_spec, verify_semigroup)

SUITE_START = time.perf_counter()


def report(tag, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


# 1. sign calculus ---------------------------------------------------------------
def test_c1_sign_calculus():
    start = time.perf_counter()
    r = identities.sign_sweep(3)
    elapsed = time.perf_counter() - start
    ok = (r["coherence_failures"] == 0 and r["trace_failures"] == 0
          and r["symmetrized_failures"] == 0 and elapsed < 1.0)
    report("C1 sign calculus v=3", ok,
           f"{r['triples']} triples, xi/kappa mismatches {r['coherence_failures']}, trace identity failures "
           f"{r['trace_failures']} (j,k both imaginary or equal), symmetrized failures "
           f"{r['symmetrized_failures']}, {elapsed:.3f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="literal trace identity is false when exactly one of j, k is 0")
def test_c1_literal_trace_identity_all_indices():
    r = identities.sign_sweep(3)
    n = r["trace_literal_failures"]
    # j = 0, k != 0 gives LHS 2 i_k i_s and RHS 0
    report("C1 literal trace identity, all j,k,s", n == 0,
           f"{n} of {r['triples']} triples fail (expected 2(n-1)n = 112)")
    assert n == 0


# 2. algebra controls ------------------------------------------------------------
def test_c2_algebra_controls():
    start = time.perf_counter()
    worst_norm = max(identities.norm_multiplicativity(v, 10_000, seed=0) for v in range(4))
    worst_alt = max(identities.alternativity_random(v, 10_000, seed=0) for v in range(4))
    sed_norm = identities.norm_multiplicativity(4, 10_000, seed=0)
    sed_alt = identities.alternativity_random(4, 10_000, seed=0)
    alt = identities.alternativity_counterexample(4)
    zd = identities.zero_divisor(4)
    elapsed = time.perf_counter() - start
    ok = (worst_norm <= 1e-12 and worst_alt <= 1e-12 and alt is not None and zd is not None
          and sed_norm > 1e-2 and sed_alt > 1e-2 and elapsed < 5.0)
    report("C2 algebra controls", ok,
           f"v<=3 norm {worst_norm:.1e}, alternativity {worst_alt:.1e}; v=4 norm {sed_norm:.2f}, "
           f"alternativity {sed_alt:.2f}; x(xy)!=(xx)y at x={identities.describe(alt['x'])}, "
           f"y={identities.describe(alt['y'])}; zero divisor ({identities.describe(zd['x'])})"
           f"({identities.describe(zd['y'])}) = 0; {elapsed:.2f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="two basis units always generate an associative subalgebra")
def test_c2_sedenion_basis_pair_counterexample():
    alt_pairs = identities.alternativity_failures(4)
    # |i_j i_k| = |i_j| |i_k| = 1 for every basis pair
    norm_pairs = [(j, k) for j in range(16) for k in range(16)
                  if np.abs(identities._basis_product(4, j, k)).sum() != 1]
    ok = bool(alt_pairs) and bool(norm_pairs)
    report("C2 sedenion basis-pair counterexample", ok,
           f"alternativity basis failures {len(alt_pairs)}, norm basis failures {len(norm_pairs)}")
    assert ok


# 3. spectral round trip ---------------------------------------------------------
def test_c3_spectral_round_trip():
    start = time.perf_counter()
    worst_z = worst_p = 0.0
    atoms_ok = True
    for v in (2, 3):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            d = int(rng.integers(1, 9))
            pvm = random_pvm(v, d, int(rng.integers(1, d + 1)), rng)
            back = spectral_recover(synth_normal(pvm), v)
            atoms_ok &= len(back) == len(pvm)
            for (za, Pa), (zb, Pb) in zip(pvm.atoms, back.atoms):
                worst_z = max(worst_z, (za - zb).norm())
                worst_p = max(worst_p, op_norm(Pa - Pb))
    elapsed = time.perf_counter() - start
    ok = atoms_ok and worst_z <= 1e-10 and worst_p <= 1e-10 and elapsed < 30
    report("C3 spectral round trip", ok,
           f"200 PVMs, value error {worst_z:.1e}, projection error {worst_p:.1e}, {elapsed:.2f}s")
    assert ok


# 4. factorization relation --------------------------------------------------------
def test_c4_eq1_and_sensitivity():
    worst = 0.0
    weakest = math.inf
    for v in (2, 3):
        for seed in range(100):
            d = 2 + seed % 5
            t = synth_triple(v, d, 1 + seed % d, seed)
            worst = max(worst, verify_theorem5_eq1(t).residuals["eq1"])
            p = perturb_triple(synth_triple(v, d, d, seed), eps=1e-3, seed=seed)
            weakest = min(weakest, verify_theorem5_eq1(p).residuals["eq1"])
    ok = worst <= 1e-10 and weakest >= 1e-4
    report("C4 graded sign relation", ok,
           f"200 triples worst {worst:.1e}; perturbed eps=1e-3 smallest {weakest:.1e}")
    assert ok


# 5. calibration of the graded-component relation ---------------------------------
def test_c5_calibration():
    cal = calibrate_theorem5(range(1, 101), level=2)
    best = cal.ranking[0][1]
    oct_worst = max(max(verify_theorem5_eq2(synth_triple(3, 4, 3, s), cal.winner).residuals.values())
                    for s in range(1, 21))
    ok = best <= 1e-11 and len(cal.ranking) == 24
    runner_up = cal.ranking[1]
    report("C5 calibration", ok,
           f"winner {cal.winner.id} residual {best:.1e}, runner-up {runner_up[0].id} {runner_up[1]:.1e}, "
           f"24 conventions ranked; octonion finding under winner {oct_worst:.2e}")
    assert ok


# 6. real spectra commute ----------------------------------------------------------
def test_c6_real_spectrum_commutation():
    worst = max(verify_corollary6(synth_triple(v, 4, 3, seed, real=True)).residuals["BD_commute"]
                for v in (2, 3) for seed in range(100))
    ok = worst <= 1e-11
    report("C6 real spectra", ok, f"BD - DB worst {worst:.1e} over 200 triples")
    assert ok


# 7. polar factors -------------------------------------------------------------------
POLAR_KEYS = ["TB_TD=T", "TD_TB=T", "UB_UD=U", "TB_UD=UD_TB", "TD_UB=UB_TD", "UD_T_UD*=TB_TD"]


def test_c7_polar_identities():
    worst = dict.fromkeys(POLAR_KEYS, 0.0)
    for v in (2, 3):
        for seed in range(100):
            rep = verify_lemma7(synth_triple(v, 4, 3, seed))
            for key in POLAR_KEYS:
                worst[key] = max(worst[key], rep.residuals[key])
    ok = max(worst.values()) <= 1e-10
    report("C7 polar identities", ok, ", ".join(f"{k} {r:.1e}" for k, r in worst.items()))
    assert ok


# 8. multiparameter semigroups ------------------------------------------------------
def test_c8_semigroups():
    law = comm = power = split = neg = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        m = int(rng.integers(0, n + 1))
        spec = random_semigroup_spec(2 + seed % 2, 4, 3, m, n, seed, zero_scale=seed % 3 == 0)
        r = verify_semigroup(spec, n_pairs=50, seed=seed).residuals
        law = max(law, r["semigroup_law"])
        comm = max(comm, r["factor_commutation"])
        power = max(power, r["power_equals_T"])
        neg = max(neg, r["negative_coordinate"])
        for s in range(n):
            split = max(split, kernel_split_check(spec, s).residuals["reassembly"])
    ok = law <= 1e-9 and comm <= 1e-11 and power <= 1e-12 and split <= 1e-12 and neg == 0.0
    report("C8 semigroups", ok,
           f"50 specs: law {law:.1e}, T/U commutation {comm:.1e}, A^p=T^p {power:.1e}, "
           f"kernel split {split:.1e}, negative-coordinate projector {neg}")
    assert ok


# 9. one-parameter recovery ---------------------------------------------------------
def one_parameter(seed):
    rng = np.random.default_rng(seed)
    level = 2 + seed % 2
    P = random_projections(4, int(rng.integers(1, 4)), rng)
    b = rng.uniform(0.2, 3.0, len(P)) * rng.choice([-1.0, 1.0], len(P))
    return unitary_group_spec(level, P, b, [random_unit_imaginary(level, rng) for _ in P]), np.abs(b).max()


def test_c9_stone_recovery():
    held = 0.0
    fired = 0
    for seed in range(50):
        spec, bmax = one_parameter(seed)
        h = 0.8 * math.pi / bmax
        rec = stone_recover(sample_unitary_group(spec, sample_times(h, 8)), spec.level)
        held = max(held, rec.residuals["held_out"])
        h_bad = 1.3 * math.pi / bmax
        try:
            stone_recover(sample_unitary_group(spec, sample_times(h_bad, 8)), spec.level)
        except BranchError:
            fired += 1
    ok = held <= 1e-8 and fired == 50
    report("C9 stone recovery", ok, f"50 seeds held-out {held:.1e}; aliasing detected {fired}/50")
    assert ok


# 10. probes ------------------------------------------------------------------------
def test_c10_probes_and_runtime():
    gram = convex = 0.0
    refined = 0
    total = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 3))
        m = int(rng.integers(0, n))
        spec = random_semigroup_spec(2 + seed % 2, 4, 3, m, n, seed)
        direction = np.r_[np.zeros(m), rng.uniform(0.2, 1.0, n - m)]
        size = spec.dim << spec.level
        for _ in range(3):
            rep = continuity_and_convexity_probe(spec, rng.standard_normal(size), rng.standard_normal(size),
                                                 direction)
            gram = max(gram, rep.residuals["gram_psd"])
            convex = max(convex, rep.residuals["log_convexity"])
            refined += rep.findings["jump_fine"] < rep.findings["jump_coarse"]
            total += 1
    elapsed = time.perf_counter() - SUITE_START
    ok = gram <= 1e-10 and convex == 0.0 and refined == total and elapsed < 300
    report("C10 probes", ok,
           f"{total} probes: Gram deficit {gram:.1e}, squared log-convexity excess {convex:.1e}, "
           f"contrast decreased {refined}/{total}; acceptance runtime {elapsed:.1f}s")
    assert ok
