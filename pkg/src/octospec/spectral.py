"""Finitely supported graded projection-valued measures.

A measure is a list of atoms ``(z_k, P_k)``: distinct spectral values in the
Cayley-Dickson algebra paired with mutually orthogonal real projections that
sum to the identity. Because real projections commute with every left
multiplication, ``sum_k kron(P_k, L_{z_k})`` is always normal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import algebra
from .algebra import CDNumber, LevelError
from .linear import graded_decompose, op_norm

PVM_TOL = 1e-10


class InvalidPVMError(ValueError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotRepresentableError(ValueError):
    """Operator is not of the form ``sum_k L_{z_k} P_k`` with real projections."""

    def __init__(self, residual: float, tol: float):
        super().__init__(f"operator not in representable class: residual {residual:.3e} > tol {tol:.1e}")
        self.residual = residual
        self.tol = tol


@dataclass
class CheckReport:
    """Residuals of one verification run.

    ``residuals`` are asserted against ``tol``; ``findings`` are reported
    quantities with no pass threshold.
    """

    name: str
    tol: float
    residuals: dict[str, float] = field(default_factory=dict)
    findings: dict = field(default_factory=dict)
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        return {"name": self.name, "tol": self.tol, "applicable": self.applicable,
                "residuals": {k: float(v) for k, v in self.residuals.items()},
                "findings": self.findings, "pass": self.passed}


def _lex_key(z: CDNumber) -> tuple:
    return tuple(float(c) for c in z.coeffs)


class GradedPVM:
    """Atoms ``(z_k, P_k)`` with ``P_k`` real ``dim x dim`` projections.

    Atoms sharing a spectral value are merged and the list is kept in
    lexicographic order of the coefficients of ``z``.
    """

    def __init__(self, level: int, atoms: Sequence[tuple[CDNumber, np.ndarray]],
                 tol: float = PVM_TOL, validate: bool = True):
        if not atoms:
            raise InvalidPVMError("a measure needs at least one atom", float("inf"))
        merged: dict[tuple, list] = {}
        dim = None
        for z, P in atoms:
            if z.level != level:
                raise LevelError(f"atom value at level {z.level}, measure at level {level}")
            P = np.array(P, dtype=float)
            if P.ndim != 2 or P.shape[0] != P.shape[1]:
                raise InvalidPVMError(f"projection must be square, got {P.shape}", float("inf"))
            if dim is None:
                dim = P.shape[0]
            elif P.shape[0] != dim:
                raise InvalidPVMError("projections of different sizes", float("inf"))
            key = _lex_key(z)
            if key in merged:
                merged[key][1] = merged[key][1] + P
            else:
                merged[key] = [z, P]
        self.level = level
        self.dim = dim
        self.atoms: list[tuple[CDNumber, np.ndarray]] = [
            (z, P) for _, (z, P) in sorted(merged.items())]
        for _, P in self.atoms:
            P.setflags(write=False)
        if validate:
            r = self.invariant_residual()
            if r > tol:
                raise InvalidPVMError("atoms do not form a resolution of the identity", r)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def values(self) -> list[CDNumber]:
        return [z for z, _ in self.atoms]

    @property
    def projections(self) -> list[np.ndarray]:
        return [P for _, P in self.atoms]

    def invariant_residual(self) -> float:
        Ps = self.projections
        r = op_norm(sum(Ps) - np.eye(self.dim))
        for i, P in enumerate(Ps):
            r = max(r, op_norm(P - P.T), op_norm(P @ P - P))
            for Q in Ps[i + 1:]:
                r = max(r, op_norm(P @ Q))
        return r

    def lift(self, P: np.ndarray) -> np.ndarray:
        """Real picture of a real ``dim x dim`` matrix acting componentwise."""
        return np.kron(P, np.eye(1 << self.level))

    def map_values(self, f: Callable[[CDNumber], CDNumber]) -> list[tuple[CDNumber, np.ndarray]]:
        return [(f(z), P) for z, P in self.atoms]

    def to_json(self) -> dict:
        return {"v": self.level, "d": self.dim,
                "atoms": [{"z": z.to_json(), "P": P.tolist()} for z, P in self.atoms]}

    @classmethod
    def from_json(cls, obj: dict, tol: float = PVM_TOL) -> GradedPVM:
        level = int(obj["v"])
        atoms = [(CDNumber.from_json(a["z"]), np.array(a["P"], dtype=float)) for a in obj["atoms"]]
        pvm = cls(level, atoms, tol=tol)
        if "d" in obj and pvm.dim != int(obj["d"]):
            raise InvalidPVMError(f"declared d={obj['d']} but projections are {pvm.dim}x{pvm.dim}",
                                  float("inf"))
        return pvm

    def __repr__(self):
        return f"GradedPVM(v={self.level}, d={self.dim}, atoms={len(self.atoms)})"


def random_projections(dim: int, n_atoms: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Split a seeded orthonormal basis into ``n_atoms`` nonempty groups."""
    if not 1 <= n_atoms <= dim:
        raise ValueError(f"need 1 <= n_atoms <= dim, got n_atoms={n_atoms}, dim={dim}")
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    Q = Q * np.sign(np.diag(R))
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_atoms - 1, replace=False)) if n_atoms > 1 else []
    groups = np.split(np.arange(dim), cuts)
    return [Q[:, g] @ Q[:, g].T for g in groups]


def random_pvm(level: int, dim: int, n_atoms: int, rng: np.random.Generator) -> GradedPVM:
    Ps = random_projections(dim, n_atoms, rng)
    return GradedPVM(level, [(CDNumber.random(level, rng), P) for P in Ps])


def synth_operator(level: int, atoms: Sequence[tuple[CDNumber, np.ndarray]]) -> np.ndarray:
    """``sum_k kron(P_k, L_{z_k})`` without any validation of the atoms."""
    dim = atoms[0][1].shape[0]
    out = np.zeros((dim << level, dim << level))
    for z, P in atoms:
        out += np.kron(P, algebra.left_matrix(z))
    return out


def synth_normal(pvm: GradedPVM) -> np.ndarray:
    return synth_operator(pvm.level, pvm.atoms)


def functional_calculus(pvm: GradedPVM, f: Callable[[CDNumber], CDNumber]) -> np.ndarray:
    return synth_operator(pvm.level, pvm.map_values(f))


def modulus(z: CDNumber) -> CDNumber:
    return CDNumber.real(z.level, z.norm())


def phase(z: CDNumber) -> CDNumber:
    return algebra.polar_scalar(z)[1]


# -- recovery -----------------------------------------------------------------

def _split_by_eigenvalues(M: np.ndarray, basis: np.ndarray, gap: float) -> list[np.ndarray]:
    """Refine ``basis`` into eigenspaces of ``M`` restricted to it."""
    if basis.shape[1] <= 1:
        return [basis]
    small = basis.T @ M @ basis
    w, V = np.linalg.eigh((small + small.T) / 2)
    vecs = basis @ V
    blocks, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            blocks.append(vecs[:, start:i])
            start = i
    return blocks


def joint_eigenspaces(mats: Sequence[np.ndarray], rng: np.random.Generator | None = None,
                      gap: float = 1e-8) -> list[np.ndarray]:
    """Common eigenspaces of commuting real symmetric matrices.

    A random combination separates almost every joint eigenspace in one
    eigendecomposition; each block is then re-diagonalized against every
    member of the family so coincident combination eigenvalues still split.
    """
    rng = rng or np.random.default_rng(0)
    dim = mats[0].shape[0]
    scale = max(1.0, max(op_norm(M) for M in mats))
    tol = gap * scale
    combo = sum(rng.standard_normal() * M for M in mats)
    blocks = _split_by_eigenvalues(combo, np.eye(dim), tol)
    for M in mats:
        blocks = [b for blk in blocks for b in _split_by_eigenvalues(M, blk, tol)]
    return blocks


def spectral_recover(A: np.ndarray, level: int, tol: float = 1e-10) -> GradedPVM:
    """Recover the graded measure of an operator in the synthesized class.

    The operator is decomposed into coefficient matrices ``C_j`` along the basis
    units; in the synthesized class these are commuting real symmetric
    matrices ``C_j = sum_k z_{k,j} P_k``. Their joint eigenspaces give the
    projections and the Rayleigh quotients give the spectral values.

    Raises:
        NotRepresentableError: if re-synthesis misses ``A`` by more than ``tol``.
    """
    g = graded_decompose(A, level)
    sym = [(C + C.T) / 2 for C in g.coeffs]
    blocks = joint_eigenspaces(sym)
    raw = []
    for V in blocks:
        m = V.shape[1]
        z = np.array([np.trace(V.T @ C @ V) / m for C in sym])
        raw.append((z, V))
    # merge blocks whose values agree to tol
    groups: list[list] = []
    for z, V in raw:
        for grp in groups:
            if np.max(np.abs(grp[0] - z)) <= tol:
                grp[1].append(V)
                break
        else:
            groups.append([z, [V]])
    atoms = []
    for z, Vs in groups:
        V = np.hstack(Vs)
        atoms.append((CDNumber(level, z), V @ V.T))
    pvm = GradedPVM(level, atoms, validate=False)
    residual = op_norm(synth_normal(pvm) - A)
    if residual > tol:
        raise NotRepresentableError(residual, tol)
    return pvm


# -- interval boxes -------------------------------------------------------------

@dataclass(frozen=True)
class IntervalBox:
    """Componentwise box ``{z : a <= z <= b}``."""

    a: CDNumber
    b: CDNumber

    def __post_init__(self):
        if self.a.level != self.b.level:
            raise LevelError("box corners at different levels")

    @classmethod
    def symmetric(cls, level: int, n: float) -> IntervalBox:
        """The box ``[-b(n), b(n)]`` with ``b(n)_j = n`` for every component."""
        size = 1 << level
        return cls(CDNumber(level, -n * np.ones(size)), CDNumber(level, n * np.ones(size)))

    @classmethod
    def empty(cls, level: int) -> IntervalBox:
        size = 1 << level
        return cls(CDNumber(level, np.ones(size)), CDNumber(level, -np.ones(size)))

    def contains(self, z: CDNumber) -> bool:
        return bool(np.all(self.a.coeffs <= z.coeffs) and np.all(z.coeffs <= self.b.coeffs))

    def within(self, other: IntervalBox) -> bool:
        return bool(np.all(other.a.coeffs <= self.a.coeffs) and np.all(self.b.coeffs <= other.b.coeffs))


def interval_projection_real(pvm: GradedPVM, box: IntervalBox) -> np.ndarray:
    """``F(box)`` as a real ``dim x dim`` projection."""
    F = np.zeros((pvm.dim, pvm.dim))
    for z, P in pvm.atoms:
        if box.contains(z):
            F += P
    return F


def interval_projection(pvm: GradedPVM, box: IntervalBox) -> np.ndarray:
    return pvm.lift(interval_projection_real(pvm, box))


def quasi_permute_check(pvm1: GradedPVM, pvm2: GradedPVM, tol: float = 1e-10) -> CheckReport:
    if pvm1.level != pvm2.level or pvm1.dim != pvm2.dim:
        raise ValueError("measures must share level and dimension")
    r = 0.0
    for P in pvm1.projections:
        for Q in pvm2.projections:
            r = max(r, op_norm(P @ Q - Q @ P))
    return CheckReport("quasi_permute", tol, {"commutator": r})


def range_basis(F: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a projection."""
    w, V = np.linalg.eigh((F + F.T) / 2)
    return V[:, w > 0.5] if w.size else V[:, :0]


def reduce_check(pvm_A: GradedPVM, B: np.ndarray, box: IntervalBox, tol: float = 1e-10) -> CheckReport:
    """Does ``range(F(box))`` reduce ``B``, with a normal restriction?"""
    F = interval_projection(pvm_A, box)
    Q = range_basis(F)
    restricted = Q.T @ B @ Q
    return CheckReport("reduce", tol, {
        "commutator": op_norm(F @ B - B @ F),
        "restriction_normal": op_norm(restricted @ restricted.T - restricted.T @ restricted),
    })
