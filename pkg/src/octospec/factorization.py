"""Property-P triples, their sign relations, factor reconstruction and polar form.

A triple shares one family of real projections ``P_k`` between ``B``, ``D`` and
``A``; ``A`` carries the atomwise products ``a_k = b_k d_k``. In associative
levels this makes ``A`` the composition ``B D``. For octonions the two differ,
and the gap is reported as ``composition_defect`` rather than hidden.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm

from . import algebra
from .algebra import CDNumber, sign_eta, sign_kappa
from .linear import graded_decompose, normal_residual, op_norm
from .spectral import (CheckReport, GradedPVM, IntervalBox, functional_calculus, interval_projection_real,
                       modulus, phase, quasi_permute_check, random_projections, range_basis,
                       synth_operator)

MAX_DIM = 16


@dataclass(eq=False)
class PropertyPTriple:
    level: int
    projections: list[np.ndarray]
    b_values: list[CDNumber]
    d_values: list[CDNumber]
    # D's own projections when they differ from the shared ones (perturbed triples)
    d_projections: list[np.ndarray] | None = None

    def __post_init__(self):
        k = len(self.projections)
        if not (len(self.b_values) == len(self.d_values) == k):
            raise ValueError("one b and one d value per projection is required")
        if self.d_projections is not None and len(self.d_projections) != k:
            raise ValueError("d_projections must match projections")

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    @cached_property
    def a_values(self) -> list[CDNumber]:
        return [b * d for b, d in zip(self.b_values, self.d_values)]

    @property
    def shared(self) -> bool:
        return self.d_projections is None

    @cached_property
    def B(self) -> np.ndarray:
        return synth_operator(self.level, list(zip(self.b_values, self.projections)))

    @cached_property
    def D(self) -> np.ndarray:
        Ps = self.projections if self.shared else self.d_projections
        return synth_operator(self.level, list(zip(self.d_values, Ps)))

    @cached_property
    def A(self) -> np.ndarray:
        return synth_operator(self.level, list(zip(self.a_values, self.projections)))

    def pvm_B(self) -> GradedPVM:
        return GradedPVM(self.level, list(zip(self.b_values, self.projections)))

    def pvm_D(self) -> GradedPVM:
        Ps = self.projections if self.shared else self.d_projections
        return GradedPVM(self.level, list(zip(self.d_values, Ps)))

    def pvm_A(self) -> GradedPVM:
        return GradedPVM(self.level, list(zip(self.a_values, self.projections)))

    @property
    def composition_defect(self) -> float:
        return op_norm(self.A - self.B @ self.D)

    def to_json(self) -> dict:
        out = {"v": self.level, "d": self.dim,
               "P": [P.tolist() for P in self.projections],
               "b": [z.to_json() for z in self.b_values],
               "dvals": [z.to_json() for z in self.d_values]}
        if not self.shared:
            out["PD"] = [P.tolist() for P in self.d_projections]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> PropertyPTriple:
        level = int(obj["v"])
        t = cls(level,
                [np.array(P, dtype=float) for P in obj["P"]],
                [CDNumber.from_json(z) for z in obj["b"]],
                [CDNumber.from_json(z) for z in obj["dvals"]],
                [np.array(P, dtype=float) for P in obj["PD"]] if "PD" in obj else None)
        if any(z.level != level for z in t.b_values + t.d_values):
            raise ValueError("spectral values must be at the triple's level")
        t.pvm_B(), t.pvm_D()  # validates the projections
        return t


def synth_triple(v: int, d: int, n_atoms: int, seed: int, real: bool = False) -> PropertyPTriple:
    """Seeded triple: orthonormalized random basis, standard normal spectral values.

    Levels 0..3 are accepted; levels below 2 serve as associative oracles.
    """
    if not 0 <= v <= 3:
        raise ValueError(f"triples are built for levels 0..3, got {v}")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds cap {MAX_DIM}")
    if n_atoms > d:
        raise ValueError(f"n_atoms={n_atoms} exceeds dimension d={d}")
    rng = np.random.default_rng(seed)
    Ps = random_projections(d, n_atoms, rng)

    def value():
        z = CDNumber.random(v, rng)
        return CDNumber.real(v, z.re) if real else z

    bs = [value() for _ in Ps]
    ds = [value() for _ in Ps]
    return PropertyPTriple(v, Ps, bs, ds)


def perturb_triple(t: PropertyPTriple, eps: float = 1e-3, seed: int = 0) -> PropertyPTriple:
    """Rotate D's eigenbasis by ``expm(eps * K)`` with a seeded antisymmetric ``K``.

    ``K`` is scaled to unit operator norm so the largest rotation angle is
    exactly ``eps``.
    """
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((t.dim, t.dim))
    K = G - G.T
    if t.dim == 1:
        return t
    R = expm(eps * K / op_norm(K))
    return PropertyPTriple(t.level, t.projections, t.b_values, t.d_values,
                           [R @ P @ R.T for P in t.projections])


# -- graded sign relations ------------------------------------------------------

def _basis_L(level: int) -> list[np.ndarray]:
    return [algebra.left_matrix(CDNumber.basis(level, j)) for j in range(1 << level)]


def eq1_residual(X: np.ndarray, Y: np.ndarray, level: int) -> float:
    """``max_{j,k} || ^jX ^kY - (-1)^kappa(j,k) ^kY ^jX ||`` over graded components."""
    gx = graded_decompose(X, level).components()
    gy = graded_decompose(Y, level).components()
    n = 1 << level
    r = 0.0
    for j in range(n):
        for k in range(n):
            sgn = -1.0 if sign_kappa(j, k, level) else 1.0
            r = max(r, op_norm(gx[j] @ gy[k] - sgn * (gy[k] @ gx[j])))
    return r


def verify_theorem5_eq1(t: PropertyPTriple, tol: float = 1e-10) -> CheckReport:
    return CheckReport("theorem5_eq1", tol, {"eq1": eq1_residual(t.B, t.D, t.level)})


def check_property_p(t: PropertyPTriple, tol: float = 1e-10) -> CheckReport:
    pa, pb, pd = t.pvm_A(), t.pvm_B(), t.pvm_D()
    rep = CheckReport("property_p", tol, {
        "normal_A": normal_residual(t.A),
        "normal_B": normal_residual(t.B),
        "normal_D": normal_residual(t.D),
        "quasi_permute_AB": quasi_permute_check(pa, pb).max_residual,
        "quasi_permute_AD": quasi_permute_check(pa, pd).max_residual,
        "quasi_permute_BD": quasi_permute_check(pb, pd).max_residual,
        "graded_sign_BD": eq1_residual(t.B, t.D, t.level),
    })
    rep.findings["composition_defect"] = t.composition_defect
    return rep


def verify_lemma2(t: PropertyPTriple, box: IntervalBox, tol: float = 1e-10) -> CheckReport:
    """Restrictions of ``A`` and ``FB`` to ``range(F)`` and their adjoints.

    ``F`` is an interval projection of A's measure. Its graded components above
    the real one vanish (projections are real), so the signed relation between
    the components of ``B*`` and ``F`` is checked but only its ``k = 0`` rows
    carry content.
    """
    level = t.level
    pa = t.pvm_A()
    Fr = interval_projection_real(pa, box)
    F = pa.lift(Fr)
    # lifting a real basis of range(F) keeps restrictions in graded form
    Q = np.kron(range_basis(Fr), np.eye(1 << level))
    G = Q.T @ t.A @ Q
    H = Q.T @ (F @ t.B) @ Q
    H_star_expected = Q.T @ (t.B.T @ F.T) @ Q
    gb = graded_decompose(t.B.T, level).components()
    gf = graded_decompose(F, level).components()
    gfs = graded_decompose(F.T, level).components()
    n = 1 << level
    sign_rel = 0.0
    for j in range(n):
        for k in range(n):
            sgn = (-1.0) ** (sign_kappa(j, k, level) + sign_eta(k, level))
            sign_rel = max(sign_rel, op_norm(gb[j] @ gfs[k] - sgn * (gf[k] @ gb[j])))
    return CheckReport("lemma2", tol, {
        "GH_quasi_permute": eq1_residual(G, H, level) if Q.shape[1] else 0.0,
        "H_adjoint": op_norm(H.T - H_star_expected),
        "graded_sign": sign_rel,
    }, findings={"range_rank": int(Q.shape[1]) >> level,
                 "GH_plain_commutator": op_norm(G @ H - H @ G)})


def verify_corollary6(t: PropertyPTriple, tol: float = 1e-11) -> CheckReport:
    real = all(np.all(z.coeffs[1:] == 0) for z in t.b_values + t.d_values)
    if not real:
        return CheckReport("corollary6", tol, applicable=False,
                           findings={"status": "not applicable: non-real spectral values"})
    return CheckReport("corollary6", tol, {"BD_commute": op_norm(t.B @ t.D - t.D @ t.B)})


# -- graded component conventions ------------------------------------------------

PAIR_RULES = ("equal", "span")
SECOND_TERMS = ("+kappa", "-kappa", "omit")
PREFACTORS = (1.0, 0.5)
SEMANTICS = ("composition", "table-lookup")


@dataclass(frozen=True)
class ConventionSpec:
    """One reading of the signed-sum reconstruction of ``^lA``.

    ``pair_rule`` picks which ordered pairs ``(j, k)`` contribute to ``l``:
    ``equal`` needs ``i_j i_k = +i_l``, ``span`` accepts ``+/- i_l``.
    ``second_term`` adds ``+/-(-1)^kappa ^kB ^jD`` or drops it. ``semantics``
    says how ``^jB ^kD`` is formed: operator composition, or the coefficient
    product placed on component ``l`` with the table sign dropped.
    """

    pair_rule: str = "span"
    second_term: str = "omit"
    prefactor: float = 1.0
    semantics: str = "composition"

    def __post_init__(self):
        if (self.pair_rule not in PAIR_RULES or self.second_term not in SECOND_TERMS
                or self.prefactor not in PREFACTORS or self.semantics not in SEMANTICS):
            raise ValueError(f"invalid convention {self!r}")

    @property
    def id(self) -> str:
        pf = "1" if self.prefactor == 1.0 else "1/2"
        return f"{self.pair_rule}|{self.second_term}|{pf}|{self.semantics}"

    @classmethod
    def from_id(cls, text: str) -> ConventionSpec:
        try:
            rule, second, pf, sem = text.split("|")
        except ValueError as exc:
            raise ValueError(f"convention id must have four '|'-separated fields: {text!r}") from exc
        return cls(rule, second, {"1": 1.0, "1/2": 0.5}[pf], sem)


def all_conventions() -> list[ConventionSpec]:
    return [ConventionSpec(*c) for c in itertools.product(PAIR_RULES, SECOND_TERMS, PREFACTORS, SEMANTICS)]


def eq2_rhs(B: np.ndarray, D: np.ndarray, level: int, conv: ConventionSpec) -> list[np.ndarray]:
    gb = graded_decompose(B, level)
    gd = graded_decompose(D, level)
    table = algebra.basis_table(level)
    Ls = _basis_L(level)
    n = 1 << level
    cb, cd = gb.components(), gd.components()

    def product(j, k):
        if conv.semantics == "composition":
            return cb[j] @ cd[k]
        return np.kron(gb.coeffs[j] @ gd.coeffs[k], Ls[table.index[j, k]])

    size = B.shape[0]
    out = [np.zeros((size, size)) for _ in range(n)]
    for j in range(n):
        for k in range(n):
            sign, l = table.entry(j, k)
            if conv.pair_rule == "equal" and sign != 1:
                continue
            term = product(j, k)
            if conv.second_term != "omit":
                s = (-1.0) ** sign_kappa(j, k, level)
                if conv.second_term == "-kappa":
                    s = -s
                term = term + s * product(k, j)
            out[l] += conv.prefactor * term
    return out


def eq2_residuals(t: PropertyPTriple, conv: ConventionSpec) -> list[float]:
    ga = graded_decompose(t.A, t.level).components()
    rhs = eq2_rhs(t.B, t.D, t.level, conv)
    return [op_norm(a - r) for a, r in zip(ga, rhs)]


@dataclass
class CalibrationReport:
    ranking: list[tuple[ConventionSpec, float]]
    level: int
    seeds: list[int]
    note: str = ("span rule, second term omitted, prefactor 1 and composition semantics sum every "
                 "graded product into the component its basis product lands on, which is B D "
                 "exactly in associative levels")

    @property
    def winner(self) -> ConventionSpec:
        return self.ranking[0][0]

    def to_json(self) -> dict:
        return {"level": self.level, "seeds": self.seeds, "winner": self.winner.id,
                "ranking": [{"convention": c.id, "residual": r} for c, r in self.ranking],
                "note": self.note}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")


def calibrate_theorem5(oracle_seeds: Iterable[int], conventions: Sequence[ConventionSpec] | None = None,
                       level: int = 2, dim: int = 3, n_atoms: int = 2) -> CalibrationReport:
    """Rank conventions by their worst residual against associative ground truth."""
    if conventions is None:
        conventions = all_conventions()
    if not conventions:
        raise ValueError("empty convention list")
    if level > 2:
        raise ValueError("calibration oracles must be associative (level <= 2)")
    seeds = list(oracle_seeds)
    triples = [synth_triple(level, dim, n_atoms, s) for s in seeds]
    scored = []
    for i, conv in enumerate(conventions):
        worst = max((max(eq2_residuals(t, conv)) for t in triples), default=0.0)
        scored.append((worst, i, conv))
    scored.sort(key=lambda item: (item[0], item[1]))
    return CalibrationReport([(c, r) for r, _, c in scored], level, seeds)


@lru_cache(maxsize=None)
def default_convention() -> ConventionSpec:
    return calibrate_theorem5(range(1, 101)).winner


def load_convention(spec: str | None) -> ConventionSpec:
    """Resolve ``calibrated``/None, a convention id, or a calibration file path."""
    if spec is None or spec == "calibrated":
        return default_convention()
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        return ConventionSpec.from_id(json.loads(path.read_text())["winner"])
    return ConventionSpec.from_id(spec)


def verify_theorem5_eq2(t: PropertyPTriple, convention: ConventionSpec | None = None,
                        tol: float = 1e-10) -> CheckReport:
    conv = convention or default_convention()
    per_l = eq2_residuals(t, conv)
    rep = CheckReport("theorem5_eq2", tol, {f"eq2_l{l}": r for l, r in enumerate(per_l)})
    rep.findings["convention"] = conv.id
    if t.level >= 3:
        rep.findings["composition_defect"] = t.composition_defect
    return rep


# -- polar factorization ------------------------------------------------------------

@dataclass(eq=False)
class PolarPair:
    T: np.ndarray
    U: np.ndarray
    pvm: GradedPVM


def polar_decompose(pvm: GradedPVM) -> PolarPair:
    return PolarPair(functional_calculus(pvm, modulus), functional_calculus(pvm, phase), pvm)


def verify_lemma7(t: PropertyPTriple, tol: float = 1e-10) -> CheckReport:
    """Polar factors of ``B``, ``D`` and ``A`` and their product relations.

    In octonion levels the product of the phase operators of ``B`` and ``D`` is
    taken atomwise on the shared projections, matching how ``A`` itself is
    built; the plain composition defect is reported as a finding.
    """
    level = t.level
    pb, pd, pa = polar_decompose(t.pvm_B()), polar_decompose(t.pvm_D()), polar_decompose(t.pvm_A())
    TB, UB, TD, UD, T, U = pb.T, pb.U, pd.T, pd.U, pa.T, pa.U
    composed_U = UB @ UD
    if level <= 2 or not t.shared:
        product_U = composed_U
    else:
        product_U = synth_operator(level, [(phase(b) * phase(d), P) for b, d, P in
                                           zip(t.b_values, t.d_values, t.projections)])
    rep = CheckReport("lemma7", tol, {
        "TB_TD=T": op_norm(TB @ TD - T),
        "TD_TB=T": op_norm(TD @ TB - T),
        "UB_UD=U": op_norm(product_U - U),
        "TB_UD=UD_TB": op_norm(TB @ UD - UD @ TB),
        "TD_UB=UB_TD": op_norm(TD @ UB - UB @ TD),
        "UD_T_UD*=TB_TD": op_norm(UD @ T @ UD.T - TB @ TD),
        "graded_sign_UB_UD": eq1_residual(UB, UD, level),
        "T_positive": max(0.0, -float(np.linalg.eigvalsh((T + T.T) / 2).min())),
        "U_unitary": op_norm(U.T @ U - np.eye(U.shape[0])),
        "polar_A": op_norm(T @ U - t.A),
    })
    rep.findings["UB_UD_composition_defect"] = op_norm(composed_U - U)
    # literal index placement ^jU_B ^kU_D = (-1)^kappa ^kU_B ^jU_D
    gb = graded_decompose(UB, level).components()
    gd = graded_decompose(UD, level).components()
    n = 1 << level
    rep.findings["graded_sign_literal"] = max(
        op_norm(gb[j] @ gd[k] - (-1.0) ** sign_kappa(j, k, level) * (gb[k] @ gd[j]))
        for j in range(n) for k in range(n))
    return rep
