"""Vectors and matrices over a Cayley-Dickson algebra and their real picture.

An ``AVVector`` of dimension ``d`` at level ``v`` is stored as a ``(d, 2**v)``
array of coefficients; an ``AVMatrix`` as ``(d, d, 2**v)``. Matrices act by
left multiplication of entries on components, ``(Mx)_p = sum_q M_pq x_q``.

The real picture flattens a vector to ``x[p, j] -> flat[p * 2**v + j]``; an
operator becomes a ``(d * 2**v)``-square real matrix whose ``(p, q)`` block is
the left-multiplication matrix of ``M_pq``. Real pictures are plain ndarrays and
their matrix product is the operator product used everywhere in this package.
Octonion entries do not associate, so the entrywise matrix product of two
``AVMatrix`` objects is *not* their composition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .algebra import CDNumber, LevelError


def op_norm(m: np.ndarray) -> float:
    """Operator (spectral) norm used for every residual in the package."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class AVVector:
    level: int
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        n = 1 << self.level
        if data.ndim != 2 or data.shape[1] != n:
            raise LevelError(f"vector data must have shape (d, {n}), got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_entries(cls, entries: list[CDNumber]) -> AVVector:
        levels = {e.level for e in entries}
        if len(levels) != 1:
            raise LevelError("vector entries must share one level")
        return cls(levels.pop(), np.stack([e.coeffs for e in entries]))

    @classmethod
    def random(cls, level: int, dim: int, rng: np.random.Generator) -> AVVector:
        return cls(level, rng.standard_normal((dim, 1 << level)))

    def entry(self, p: int) -> CDNumber:
        return CDNumber(self.level, self.data[p])

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1).copy()

    @classmethod
    def from_flat(cls, level: int, flat: np.ndarray) -> AVVector:
        return cls(level, np.asarray(flat, dtype=float).reshape(-1, 1 << level))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def to_json(self) -> dict:
        return {"v": self.level, "d": self.dim,
                "entries": [self.entry(p).to_json() for p in range(self.dim)]}

    @classmethod
    def from_json(cls, obj: dict) -> AVVector:
        return cls.from_entries([CDNumber.from_json(e) for e in obj["entries"]])


@dataclass(frozen=True, eq=False)
class AVMatrix:
    level: int
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        n = 1 << self.level
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != n:
            raise LevelError(f"matrix data must have shape (d, d, {n}), got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def identity(cls, level: int, dim: int) -> AVMatrix:
        data = np.zeros((dim, dim, 1 << level))
        data[np.arange(dim), np.arange(dim), 0] = 1.0
        return cls(level, data)

    @classmethod
    def zeros(cls, level: int, dim: int) -> AVMatrix:
        return cls(level, np.zeros((dim, dim, 1 << level)))

    @classmethod
    def diag(cls, entries: list[CDNumber]) -> AVMatrix:
        level = entries[0].level
        d = len(entries)
        data = np.zeros((d, d, 1 << level))
        for p, e in enumerate(entries):
            if e.level != level:
                raise LevelError("diagonal entries must share one level")
            data[p, p] = e.coeffs
        return cls(level, data)

    @classmethod
    def from_real(cls, level: int, real: np.ndarray) -> AVMatrix:
        real = np.asarray(real, dtype=float)
        data = np.zeros(real.shape + (1 << level,))
        data[..., 0] = real
        return cls(level, data)

    @classmethod
    def random(cls, level: int, dim: int, rng: np.random.Generator) -> AVMatrix:
        return cls(level, rng.standard_normal((dim, dim, 1 << level)))

    def entry(self, p: int, q: int) -> CDNumber:
        return CDNumber(self.level, self.data[p, q])

    def to_json(self) -> dict:
        d = self.dim
        return {"v": self.level, "d": d,
                "entries": [[self.entry(p, q).to_json() for q in range(d)] for p in range(d)]}

    @classmethod
    def from_json(cls, obj: dict) -> AVMatrix:
        rows = [[CDNumber.from_json(e) for e in row] for row in obj["entries"]]
        level = int(obj["v"])
        if any(e.level != level for row in rows for e in row):
            raise LevelError("matrix entries must share the declared level")
        return cls(level, np.array([[e.coeffs for e in row] for row in rows]))


def _match(M: AVMatrix, x: AVVector) -> None:
    if M.level != x.level:
        raise LevelError(f"level mismatch: {M.level} vs {x.level}")
    if M.dim != x.dim:
        raise ValueError(f"dimension mismatch: {M.dim} vs {x.dim}")


def apply(M: AVMatrix, x: AVVector) -> AVVector:
    _match(M, x)
    prods = algebra.mul_arrays(M.data, x.data[None, :, :], M.level)
    return AVVector(M.level, prods.sum(axis=1))


def inner(x: AVVector, y: AVVector) -> CDNumber:
    """Scalar product ``sum_k conj(x_k) y_k``, conjugate-linear in ``x``."""
    if x.level != y.level or x.dim != y.dim:
        raise ValueError("inner product needs vectors of equal level and dimension")
    xc = -x.data
    xc[:, 0] = x.data[:, 0]
    return CDNumber(x.level, algebra.mul_arrays(xc, y.data, x.level).sum(axis=0))


def adjoint(M: AVMatrix) -> AVMatrix:
    data = -np.transpose(M.data, (1, 0, 2))
    data[..., 0] *= -1
    return AVMatrix(M.level, data)


def real_picture(M: AVMatrix) -> np.ndarray:
    d, n = M.dim, 1 << M.level
    struct = algebra.structure_constants(M.level)
    # block (p, q)[l, k] = sum_j M[p, q, j] S[j, k, l]
    blocks = np.einsum("pqj,jkl->plqk", M.data, struct)
    return blocks.reshape(d * n, d * n)


def left_mult_operator(z: CDNumber, dim: int) -> np.ndarray:
    """Real picture of ``x -> z x`` on a ``dim``-dimensional module."""
    return np.kron(np.eye(dim), algebra.left_matrix(z))


def compose(S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Operator product ``S T`` (apply ``T`` first)."""
    if S.shape[1] != T.shape[0]:
        raise ValueError(f"cannot compose shapes {S.shape} and {T.shape}")
    return S @ T


def picture_adjoint(T: np.ndarray) -> np.ndarray:
    """Adjoint in the real picture; left multiplication by ``conj(z)`` is the transpose of ``L_z``."""
    return T.T


def _basis_left_matrices(level: int) -> np.ndarray:
    n = 1 << level
    return np.stack([algebra.left_matrix(CDNumber.basis(level, j)) for j in range(n)])


@dataclass(frozen=True)
class GradedComponents:
    """Coefficient decomposition ``T = sum_j kron(coeff[j], L_{i_j}) + remainder``."""

    level: int
    coeffs: np.ndarray
    remainder: np.ndarray

    @property
    def residual(self) -> float:
        return op_norm(self.remainder)

    def component(self, j: int) -> np.ndarray:
        return np.kron(self.coeffs[j], algebra.left_matrix(CDNumber.basis(self.level, j)))

    def components(self) -> list[np.ndarray]:
        return [self.component(j) for j in range(1 << self.level)]


def graded_decompose(T: np.ndarray | AVMatrix, level: int | None = None) -> GradedComponents:
    """Split an operator into graded parts along the basis units.

    The left-multiplication matrices of distinct basis units are signed
    permutations with disjoint supports, so each coefficient block is a
    Frobenius projection. Anything outside their span is kept as ``remainder``.
    """
    if isinstance(T, AVMatrix):
        level = T.level
        T = real_picture(T)
    if level is None:
        raise ValueError("level is required for a real-picture operator")
    n = 1 << level
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] % n:
        raise ValueError(f"operator shape {T.shape} incompatible with level {level}")
    d = T.shape[0] // n
    blocks = T.reshape(d, n, d, n).transpose(0, 2, 1, 3)
    basis = _basis_left_matrices(level)
    coeffs = np.einsum("pqlk,jlk->jpq", blocks, basis) / n
    recon = np.einsum("jpq,jlk->plqk", coeffs, basis).reshape(T.shape)
    return GradedComponents(level, coeffs, T - recon)


def graded_component(T: np.ndarray | AVMatrix, j: int, level: int | None = None) -> np.ndarray:
    g = graded_decompose(T, level)
    if not 0 <= j < (1 << g.level):
        raise IndexError(f"component index {j} out of range for level {g.level}")
    return g.component(j)


def normal_residual(M: np.ndarray | AVMatrix) -> float:
    if isinstance(M, AVMatrix):
        M = real_picture(M)
    return op_norm(M @ M.T - M.T @ M)


def is_normal(M: np.ndarray | AVMatrix, tol: float = 1e-10) -> tuple[bool, float]:
    r = normal_residual(M)
    return r <= tol, r


def is_projection(P: np.ndarray | AVMatrix, tol: float = 1e-10) -> tuple[bool, float]:
    if isinstance(P, AVMatrix):
        P = real_picture(P)
    r = max(op_norm(P - P.T), op_norm(P @ P - P))
    return r <= tol, r


def is_unitary(U: np.ndarray | AVMatrix, tol: float = 1e-10) -> tuple[bool, float]:
    if isinstance(U, AVMatrix):
        U = real_picture(U)
    eye = np.eye(U.shape[0])
    r = max(op_norm(U.T @ U - eye), op_norm(U @ U.T - eye))
    return r <= tol, r


def picture_to_json(T: np.ndarray) -> dict:
    return {"n": int(T.shape[0]), "rows": [[float(v) for v in row] for row in T]}


def picture_from_json(obj: dict) -> np.ndarray:
    rows = np.array(obj["rows"], dtype=float)
    if rows.shape != (obj["n"], obj["n"]):
        raise ValueError(f"real picture rows do not form a {obj['n']}x{obj['n']} matrix")
    return rows
