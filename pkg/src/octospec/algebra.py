"""Cayley-Dickson arithmetic for levels 0..4 and the basis sign calculus.

Level ``v`` gives the real algebra of dimension ``2**v``: reals, complex
numbers, quaternions, octonions and (as a negative control only) sedenions.
Basis units ``i_0 .. i_{2^v - 1}`` multiply as ``i_j i_k = +/- i_{j ^ k}``;
the signs are generated once per level from the recursive doubling rule and
every sign function below is read off that table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_LEVEL = 4

# (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))
STANDARD = "standard"
# (a, b)(c, d) = (ac - d conj(b), conj(a) d + c b)
BAEZ = "baez"
DOUBLINGS = (STANDARD, BAEZ)

_doubling = STANDARD


class LevelError(ValueError):
    """Raised for unsupported levels or operands living at different levels."""


def set_doubling(name: str) -> None:
    """Select the doubling convention used to generate basis tables."""
    global _doubling
    if name not in DOUBLINGS:
        raise ValueError(f"unknown doubling convention {name!r}; expected one of {DOUBLINGS}")
    _doubling = name


def get_doubling() -> str:
    return _doubling


def _check_level(level: int) -> int:
    if not isinstance(level, (int, np.integer)) or not 0 <= level <= MAX_LEVEL:
        raise LevelError(f"level must be an integer in 0..{MAX_LEVEL}, got {level!r}")
    return int(level)


# -- recursive doubling on raw coefficient arrays ----------------------------

def _conj_arr(a: np.ndarray) -> np.ndarray:
    out = -a
    out[0] = a[0]
    return out


def doubling_mul(x: np.ndarray, y: np.ndarray, convention: str | None = None) -> np.ndarray:
    """Multiply two coefficient arrays of equal power-of-two length by recursion.

    This is the slow reference path; the basis tables are generated from it.
    """
    convention = convention or _doubling
    n = len(x)
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[:h], x[h:]
    c, d = y[:h], y[h:]
    if convention == STANDARD:
        first = doubling_mul(a, c, convention) - doubling_mul(_conj_arr(d), b, convention)
        second = doubling_mul(d, a, convention) + doubling_mul(b, _conj_arr(c), convention)
    elif convention == BAEZ:
        first = doubling_mul(a, c, convention) - doubling_mul(d, _conj_arr(b), convention)
        second = doubling_mul(_conj_arr(a), d, convention) + doubling_mul(c, b, convention)
    else:
        raise ValueError(f"unknown doubling convention {convention!r}")
    return np.concatenate([first, second])


@dataclass(frozen=True)
class BasisTable:
    """Signed multiplication table: ``i_j i_k = sign[j, k] * i_{index[j, k]}``."""

    level: int
    sign: np.ndarray
    index: np.ndarray

    @property
    def size(self) -> int:
        return 1 << self.level

    def entry(self, j: int, k: int) -> tuple[int, int]:
        return int(self.sign[j, k]), int(self.index[j, k])

    def to_json(self) -> dict:
        n = self.size
        return {
            "v": self.level,
            "table": [[{"s": int(self.sign[j, k]), "l": int(self.index[j, k])} for k in range(n)]
                      for j in range(n)],
        }


@lru_cache(maxsize=None)
def _table(level: int, convention: str) -> tuple[BasisTable, np.ndarray]:
    n = 1 << level
    eye = np.eye(n)
    sign = np.zeros((n, n), dtype=np.int8)
    index = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        for k in range(n):
            prod = doubling_mul(eye[j], eye[k], convention)
            nz = np.flatnonzero(prod)
            if len(nz) != 1 or abs(prod[nz[0]]) != 1.0:
                raise AssertionError(f"basis product i_{j} i_{k} is not a signed unit")
            index[j, k] = nz[0]
            sign[j, k] = int(prod[nz[0]])
    sign.setflags(write=False)
    index.setflags(write=False)
    struct = np.zeros((n, n, n))
    jj, kk = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    struct[jj, kk, index] = sign
    struct.setflags(write=False)
    return BasisTable(level, sign, index), struct


def basis_table(level: int) -> BasisTable:
    return _table(_check_level(level), _doubling)[0]


def structure_constants(level: int) -> np.ndarray:
    """Tensor ``S[j, k, l]`` with ``i_j i_k = sum_l S[j, k, l] i_l``."""
    return _table(_check_level(level), _doubling)[1]


# -- CDNumber ----------------------------------------------------------------

class CDNumber:
    """An element of the level-``v`` Cayley-Dickson algebra.

    Stored as ``2**v`` real coefficients on the basis units. Instances are
    immutable; arithmetic returns new numbers.
    """

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs=None):
        level = _check_level(level)
        n = 1 << level
        if coeffs is None:
            arr = np.zeros(n)
        else:
            arr = np.array(coeffs, dtype=float).reshape(-1)
            if arr.shape != (n,):
                raise LevelError(f"level {level} needs {n} coefficients, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("CDNumber is immutable")

    @classmethod
    def basis(cls, level: int, j: int) -> CDNumber:
        n = 1 << _check_level(level)
        if not 0 <= j < n:
            raise IndexError(f"basis index {j} out of range for level {level}")
        c = np.zeros(n)
        c[j] = 1.0
        return cls(level, c)

    @classmethod
    def real(cls, level: int, value: float = 1.0) -> CDNumber:
        c = np.zeros(1 << _check_level(level))
        c[0] = value
        return cls(level, c)

    @classmethod
    def random(cls, level: int, rng: np.random.Generator) -> CDNumber:
        return cls(level, rng.standard_normal(1 << _check_level(level)))

    @property
    def size(self) -> int:
        return 1 << self.level

    @property
    def re(self) -> float:
        return float(self.coeffs[0])

    def imag(self) -> CDNumber:
        c = self.coeffs.copy()
        c[0] = 0.0
        return CDNumber(self.level, c)

    def conj(self) -> CDNumber:
        return cd_conj(self)

    def norm(self) -> float:
        return cd_norm(self)

    def inv(self) -> CDNumber:
        return cd_inv(self)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def _same_level(self, other: CDNumber) -> None:
        if other.level != self.level:
            raise LevelError(f"level mismatch: {self.level} vs {other.level}")

    def __add__(self, other):
        if isinstance(other, CDNumber):
            self._same_level(other)
            return CDNumber(self.level, self.coeffs + other.coeffs)
        if isinstance(other, (int, float)):
            return self + CDNumber.real(self.level, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return CDNumber(self.level, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (CDNumber, int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CDNumber):
            return cd_mul(self, other)
        if isinstance(other, (int, float, np.floating)):
            return CDNumber(self.level, self.coeffs * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return CDNumber(self.level, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return CDNumber(self.level, self.coeffs / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, CDNumber):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.level, self.coeffs.tobytes()))

    def allclose(self, other: CDNumber, atol: float = 1e-12) -> bool:
        return self.level == other.level and np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol)

    def __repr__(self):
        terms = [f"{c:+.6g}*i{j}" for j, c in enumerate(self.coeffs) if c != 0]
        return f"CDNumber(v={self.level}: {' '.join(terms) or '0'})"

    def to_json(self) -> dict:
        return {"v": self.level, "c": [float(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> CDNumber:
        try:
            return cls(int(obj["v"]), obj["c"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed CDNumber JSON: {obj!r}") from exc


def cd_mul(x: CDNumber, y: CDNumber) -> CDNumber:
    if x.level != y.level:
        raise LevelError(f"level mismatch: {x.level} vs {y.level}")
    return CDNumber(x.level, mul_arrays(x.coeffs, y.coeffs, x.level))


def mul_arrays(x: np.ndarray, y: np.ndarray, level: int) -> np.ndarray:
    """Table-driven product on raw coefficients; broadcasts over leading axes."""
    return np.einsum("...j,...k,jkl->...l", x, y, structure_constants(level))


def cd_conj(x: CDNumber) -> CDNumber:
    return CDNumber(x.level, _conj_arr(np.array(x.coeffs)))


def cd_norm(x: CDNumber) -> float:
    return float(np.linalg.norm(x.coeffs))


def cd_inv(x: CDNumber) -> CDNumber:
    n2 = float(np.dot(x.coeffs, x.coeffs))
    if n2 == 0.0:
        raise ZeroDivisionError("inverse of zero Cayley-Dickson number")
    return CDNumber(x.level, _conj_arr(np.array(x.coeffs)) / n2)


def left_matrix(x: CDNumber | np.ndarray, level: int | None = None) -> np.ndarray:
    """Real matrix of ``y -> x y`` acting on coefficient vectors."""
    if isinstance(x, CDNumber):
        level, coeffs = x.level, x.coeffs
    else:
        coeffs = np.asarray(x, dtype=float)
    return np.einsum("j,jkl->lk", coeffs, structure_constants(level))


# -- sign calculus -------------------------------------------------------------

def _check_index(level: int, *idx: int) -> None:
    n = 1 << _check_level(level)
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"basis index {i} out of range for level {level}")


def sign_kappa(j: int, k: int, level: int = 3) -> int:
    """0 when ``j == k`` or either index is 0, else 1."""
    _check_index(level, j, k)
    return 0 if (j == k or j == 0 or k == 0) else 1


def sign_eta(k: int, level: int = 3) -> int:
    _check_index(level, k)
    return 0 if k == 0 else 1


def _basis_triple(level: int, a: int, b: int, c: int, left_nested: bool) -> tuple[int, int]:
    t = basis_table(level)
    if left_nested:
        s1, l1 = t.entry(a, b)
        s2, l2 = t.entry(l1, c)
    else:
        s1, l1 = t.entry(b, c)
        s2, l2 = t.entry(a, l1)
    return s1 * s2, l2


def _sign_relation(lhs: tuple[int, int], rhs: tuple[int, int], what: str) -> int:
    if lhs[1] != rhs[1]:
        raise AssertionError(f"{what}: sides differ by more than a sign")
    return 0 if lhs[0] == rhs[0] else 1


def _reject_high_level(level: int) -> None:
    if _check_level(level) > 3:
        raise LevelError("sign functions xi/psi are only defined for levels <= 3")


def sign_xi(j: int, k: int, s: int, level: int = 3) -> int:
    """Exponent in ``i_j (i_k i_s) = (-1)**xi * i_k (i_j i_s)``."""
    _reject_high_level(level)
    _check_index(level, j, k, s)
    return _sign_relation(_basis_triple(level, j, k, s, False),
                          _basis_triple(level, k, j, s, False), "xi")


def sign_psi(s: int, j: int, k: int, level: int = 3) -> int:
    """Exponent in ``i_s (i_j i_k) = (-1)**psi * (i_s i_j) i_k``."""
    _reject_high_level(level)
    _check_index(level, s, j, k)
    return _sign_relation(_basis_triple(level, s, j, k, False),
                          _basis_triple(level, s, j, k, True), "psi")


# -- exponentials and polar form ----------------------------------------------

def is_pure_unit(mu: CDNumber, tol: float = 1e-12) -> bool:
    return abs(mu.re) <= tol and abs(mu.norm() - 1.0) <= tol


def exp_pure(mu: CDNumber, theta: float) -> CDNumber:
    """``cos(theta) + sin(theta) mu`` for a unit imaginary direction ``mu``."""
    if not is_pure_unit(mu):
        raise ValueError("exp_pure needs a purely imaginary unit direction")
    c = np.array(mu.coeffs) * math.sin(theta)
    c[0] = math.cos(theta)
    return CDNumber(mu.level, c)


def polar_scalar(z: CDNumber) -> tuple[float, CDNumber]:
    """Return ``(|z|, z/|z|)``, with phase 1 for the zero number."""
    r = z.norm()
    if r == 0.0:
        return 0.0, CDNumber.real(z.level)
    return r, z / r
