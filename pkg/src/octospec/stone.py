"""Multi-parameter semigroups of normal operators and their Stone-type form.

A semigroup is described by atoms ``(P_k, a_k, b_k, mu_k, s_k)``. Its value at
a parameter tuple ``x`` is

    B^x = sum_k prod_s a_{k,s}^{x_s} * kron(P_k, L_{exp(mu_k * sum_s s_{k,s} x_s b_{k,s})})

with ``0**0 == 1``. Parameters live in the additive semigroup of tuples whose
first ``m`` coordinates are non-negative integers and whose remaining
coordinates are non-negative reals, not all zero.

The module also goes the other way: from samples of a one-parameter unitary
group it recovers the projections, frequencies and imaginary directions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import CDNumber, exp_pure, is_pure_unit
from .factorization import PolarPair
from .linear import is_unitary, op_norm
from .spectral import CheckReport, GradedPVM, NotRepresentableError, random_projections, spectral_recover

MAX_PARAMS = 3
PROJ_TOL = 1e-10
ZERO_EIG = 1e-12


class OmegaError(ValueError):
    pass


@dataclass(frozen=True)
class OmegaPoint:
    x: tuple[float, ...]
    m: int = 0

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        object.__setattr__(self, "x", x)
        if not 0 <= self.m <= len(x):
            raise OmegaError(f"discrete count m={self.m} outside 0..{len(x)}")
        if any(v < 0 for v in x):
            raise OmegaError(f"negative coordinate in {x}")
        if any(v != int(v) for v in x[: self.m]):
            raise OmegaError(f"first {self.m} coordinates must be integers: {x}")
        if sum(x) <= 0:
            raise OmegaError("at least one coordinate must be positive")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.x)

    def __add__(self, other: OmegaPoint) -> OmegaPoint:
        if other.n != self.n or other.m != self.m:
            raise OmegaError("points from different semigroups")
        return OmegaPoint(tuple(a + b for a, b in zip(self.x, other.x)), self.m)

    @classmethod
    def unit(cls, n: int, m: int, s: int) -> OmegaPoint:
        x = [0.0] * n
        x[s] = 1.0
        return cls(tuple(x), m)

    @classmethod
    def random(cls, n: int, m: int, rng: np.random.Generator, high: float = 2.0) -> OmegaPoint:
        while True:
            x = np.concatenate([rng.integers(0, 3, m).astype(float), rng.uniform(0, high, n - m)])
            if x.sum() > 0:
                return cls(tuple(x), m)


@dataclass(frozen=True, eq=False)
class SemigroupAtom:
    P: np.ndarray
    a: np.ndarray
    b: np.ndarray
    mu: CDNumber
    s: np.ndarray

    def __post_init__(self):
        for name in ("P", "a", "b", "s"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        if np.any(self.a < 0):
            raise ValueError("scale vector must be non-negative")
        if not np.all(np.isin(self.s, (-1.0, 1.0))):
            raise ValueError("direction signs must be +1 or -1")
        if not is_pure_unit(self.mu):
            raise ValueError("direction mu must be a purely imaginary unit")

    def scale(self, x: np.ndarray) -> float:
        return float(np.prod(self.a ** x))

    def angle(self, x: np.ndarray) -> float:
        return float(np.sum(self.s * x * self.b))

    def to_json(self) -> dict:
        return {"P": self.P.tolist(), "a": self.a.tolist(), "b": self.b.tolist(),
                "mu": self.mu.to_json(), "s": [int(v) for v in self.s]}

    @classmethod
    def from_json(cls, obj: dict) -> SemigroupAtom:
        return cls(obj["P"], obj["a"], obj["b"], CDNumber.from_json(obj["mu"]),
                   obj.get("s", [1] * len(obj["a"])))


class SemigroupSpec:
    def __init__(self, level: int, m: int, n: int, atoms: Sequence[SemigroupAtom]):
        if not 1 <= n <= MAX_PARAMS or not 0 <= m <= n:
            raise ValueError(f"need 1 <= n <= {MAX_PARAMS} and 0 <= m <= n, got m={m}, n={n}")
        if not atoms:
            raise ValueError("a semigroup spec needs atoms")
        self.level, self.m, self.n = level, m, n
        self.atoms = list(atoms)
        self.dim = self.atoms[0].P.shape[0]
        for at in self.atoms:
            if at.a.shape != (n,) or at.b.shape != (n,) or at.s.shape != (n,):
                raise ValueError(f"atom vectors must have length n={n}")
            if at.mu.level != level:
                raise ValueError("atom direction at wrong level")
            if at.P.shape != (self.dim, self.dim):
                raise ValueError("projections of different sizes")
        r = self.resolution_residual()
        if r > PROJ_TOL:
            raise ValueError(f"atom projections are not a resolution of the identity (residual {r:.3e})")

    def resolution_residual(self) -> float:
        Ps = [at.P for at in self.atoms]
        r = op_norm(sum(Ps) - np.eye(self.dim))
        for i, P in enumerate(Ps):
            r = max(r, op_norm(P - P.T), op_norm(P @ P - P))
            for Q in Ps[i + 1:]:
                r = max(r, op_norm(P @ Q))
        return r

    def point(self, x: Sequence[float]) -> OmegaPoint:
        p = OmegaPoint(tuple(x), self.m)
        if p.n != self.n:
            raise OmegaError(f"expected {self.n} coordinates, got {p.n}")
        return p

    def to_json(self) -> dict:
        return {"v": self.level, "d": self.dim, "m": self.m, "n": self.n,
                "atoms": [at.to_json() for at in self.atoms]}

    @classmethod
    def from_json(cls, obj: dict) -> SemigroupSpec:
        spec = cls(int(obj["v"]), int(obj["m"]), int(obj["n"]),
                   [SemigroupAtom.from_json(a) for a in obj["atoms"]])
        if "d" in obj and int(obj["d"]) != spec.dim:
            raise ValueError(f"declared d={obj['d']} does not match projections")
        return spec


def random_unit_imaginary(level: int, rng: np.random.Generator) -> CDNumber:
    c = rng.standard_normal(1 << level)
    c[0] = 0.0
    return CDNumber(level, c / np.linalg.norm(c))


def random_semigroup_spec(level: int, dim: int, n_atoms: int, m: int, n: int, seed: int,
                          zero_scale: bool = False) -> SemigroupSpec:
    """Seeded spec; with ``zero_scale`` the first atom gets ``a = 0`` in coordinate ``n - 1``.

    Scales in each coordinate are drawn from jittered strata of ``[0.3, 1.6]``
    so distinct atoms stay well separated and recovered resolutions are
    well conditioned.
    """
    rng = np.random.default_rng(seed)
    Ps = random_projections(dim, n_atoms, rng)
    k = len(Ps)
    strata = np.stack([rng.permutation(k) for _ in range(n)], axis=1)
    scales = 0.3 + 1.3 * (strata + rng.uniform(0.2, 0.8, (k, n))) / k
    atoms = []
    for i, P in enumerate(Ps):
        a = scales[i]
        if zero_scale and i == 0:
            a[n - 1] = 0.0
        atoms.append(SemigroupAtom(P, a, rng.uniform(0.0, 2.0, n), random_unit_imaginary(level, rng),
                                   rng.choice([-1.0, 1.0], n)))
    return SemigroupSpec(level, m, n, atoms)


def _as_array(spec: SemigroupSpec, x) -> np.ndarray:
    if not isinstance(x, OmegaPoint):
        x = spec.point(x)
    elif x.n != spec.n or x.m != spec.m:
        raise OmegaError("point does not belong to this spec's semigroup")
    return x.array


def _atom_terms(spec, atoms, x, part):
    out = np.zeros((spec.dim << spec.level, spec.dim << spec.level))
    for at in atoms:
        scale = at.scale(x) if part in ("full", "T") else 1.0
        if part == "T":
            L = np.eye(1 << spec.level)
        else:
            L = algebra.left_matrix(exp_pure(at.mu, at.angle(x)))
        out += np.kron(at.P, scale * L)
    return out


def eval_semigroup(spec: SemigroupSpec, x) -> np.ndarray:
    return _atom_terms(spec, spec.atoms, _as_array(spec, x), "full")


def polar_semigroup(spec: SemigroupSpec, x) -> PolarPair:
    xa = _as_array(spec, x)
    return PolarPair(_atom_terms(spec, spec.atoms, xa, "T"), _atom_terms(spec, spec.atoms, xa, "U"), None)


def coordinate_resolutions(spec: SemigroupSpec) -> list[GradedPVM]:
    """Spectral measures of the positive factors ``T^{e_s}``, recovered from the operators."""
    out = []
    for s in range(spec.n):
        T = polar_semigroup(spec, OmegaPoint.unit(spec.n, spec.m, s)).T
        out.append(spectral_recover(T, spec.level, tol=1e-9))
    return out


def power_operator(spec: SemigroupSpec, p) -> np.ndarray:
    """``A^p``: integrate ``t_1^{p_1}...t_n^{p_n}`` against the product resolution."""
    pa = _as_array(spec, p)
    res = coordinate_resolutions(spec)
    out = np.zeros((spec.dim, spec.dim))
    for combo in itertools.product(*(r.atoms for r in res)):
        Q = np.eye(spec.dim)
        for _, P in combo:
            Q = Q @ P
        if op_norm(Q) < 1e-12:
            continue
        # T^{e_s} is positive; roundoff-sized eigenvalues are the kernel
        t = np.array([z.re for z, _ in combo])
        t[t < ZERO_EIG] = 0.0
        out += float(np.prod(t ** pa)) * Q
    return np.kron(out, np.eye(1 << spec.level))


def _coordinate_label(at: SemigroupAtom, s: int) -> tuple:
    w = at.s[s] * at.b[s] * at.mu.coeffs
    return (float(at.a[s]),) + tuple(float(c) for c in w)


def resolution_product_eval(spec: SemigroupSpec, x) -> np.ndarray:
    """Evaluate ``B^x`` through the product of per-coordinate resolutions.

    Coordinate ``s`` has its own measure labelled by ``(a_s, w_s)`` with
    ``w_s = s b_s mu`` the signed frequency direction. Joint cells are products
    of one projection per coordinate, and the exponential factors are composed
    as operators in coordinate order.
    """
    xa = _as_array(spec, x)
    level = spec.level
    per_coord = []
    for s in range(spec.n):
        groups: dict[tuple, np.ndarray] = {}
        for at in spec.atoms:
            key = _coordinate_label(at, s)
            groups[key] = groups.get(key, 0) + at.P
        per_coord.append(list(groups.items()))
    out = np.zeros((spec.dim << level, spec.dim << level))
    for cell in itertools.product(*per_coord):
        Q = np.eye(spec.dim)
        for _, P in cell:
            Q = Q @ P
        if op_norm(Q) < 1e-12:
            continue
        scale = 1.0
        L = np.eye(1 << level)
        for s, (label, _) in enumerate(cell):
            scale *= label[0] ** xa[s]
            w = CDNumber(level, label[1:])
            r = w.norm()
            if r > 0:
                L = L @ algebra.left_matrix(exp_pure(w / r, xa[s] * r))
        out += np.kron(Q, scale * L)
    return out


def resolution_projector(spec: SemigroupSpec, a, b) -> np.ndarray:
    """Cumulative projector onto atoms with ``a_k <= a`` and ``s_k b_k <= b`` in every coordinate."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    F = np.zeros((spec.dim, spec.dim))
    for at in spec.atoms:
        if np.all(at.a <= a) and np.all(at.s * at.b <= b):
            F = F + at.P
    return np.kron(F, np.eye(1 << spec.level))


def kernel_split(spec: SemigroupSpec, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto ``ker B^{e_s}`` (zero-scale atoms) and its complement."""
    if not 0 <= s < spec.n:
        raise IndexError(f"coordinate {s} out of range 0..{spec.n - 1}")
    N = np.zeros((spec.dim, spec.dim))
    for at in spec.atoms:
        if at.a[s] == 0:
            N = N + at.P
    eye = np.eye(1 << spec.level)
    return np.kron(N, eye), np.kron(np.eye(spec.dim) - N, eye)


def kernel_split_check(spec: SemigroupSpec, s: int, x=None, tol: float = 1e-12) -> CheckReport:
    N, K = kernel_split(spec, s)
    es = OmegaPoint.unit(spec.n, spec.m, s)
    xa = _as_array(spec, x if x is not None else es)
    kernel_atoms = [at for at in spec.atoms if at.a[s] == 0]
    rest_atoms = [at for at in spec.atoms if at.a[s] != 0]
    B = eval_semigroup(spec, xa)
    reassembled = (_atom_terms(spec, kernel_atoms, xa, "full")
                   + _atom_terms(spec, rest_atoms, xa, "full"))
    Bes = eval_semigroup(spec, es)
    return CheckReport("kernel_split", tol, {
        "B_es_on_kernel": op_norm(Bes @ N),
        "reassembly": op_norm(reassembled - B),
        "N_plus_K": op_norm(N + K - np.eye(N.shape[0])),
    }, findings={"kernel_rank": int(round(np.trace(N))) >> spec.level})


def verify_semigroup_law(spec: SemigroupSpec, pairs, tol: float = 1e-9) -> CheckReport:
    r = 0.0
    for x, y in pairs:
        xa, ya = _as_array(spec, x), _as_array(spec, y)
        r = max(r, op_norm(eval_semigroup(spec, xa) @ eval_semigroup(spec, ya)
                           - eval_semigroup(spec, xa + ya)))
    return CheckReport("semigroup_law", tol, {"semigroup_law": r})


def verify_semigroup(spec: SemigroupSpec, n_pairs: int = 50, seed: int = 0, tol: float = 1e-9) -> CheckReport:
    """Semigroup law, polar factor relations, powers and resolutions on sampled points."""
    rng = np.random.default_rng(seed)
    pairs = [(OmegaPoint.random(spec.n, spec.m, rng), OmegaPoint.random(spec.n, spec.m, rng))
             for _ in range(n_pairs)]
    rep = verify_semigroup_law(spec, pairs, tol)
    factor_comm = t_law = u_law = polar = normal = 0.0
    for x, y in pairs[: max(1, n_pairs // 5)]:
        px, py, pxy = polar_semigroup(spec, x), polar_semigroup(spec, y), polar_semigroup(spec, x + y)
        factor_comm = max(factor_comm, op_norm(px.T @ py.U - py.U @ px.T))
        t_law = max(t_law, op_norm(px.T @ py.T - pxy.T))
        u_law = max(u_law, op_norm(px.U @ py.U - pxy.U))
        B = eval_semigroup(spec, x)
        polar = max(polar, op_norm(px.T @ px.U - B), op_norm(px.U @ px.T - B))
        normal = max(normal, op_norm(B @ B.T - B.T @ B))
    power = resolution = 0.0
    for x, _ in pairs[:5]:
        power = max(power, op_norm(power_operator(spec, x) - polar_semigroup(spec, x).T))
        resolution = max(resolution, op_norm(resolution_product_eval(spec, x) - eval_semigroup(spec, x)))
    neg = np.full(spec.n, 10.0)
    neg[0] = -1e-3
    rep.name = "semigroup"
    rep.residuals.update({
        "factor_commutation": factor_comm, "T_law": t_law, "U_law": u_law,
        "polar": polar, "normal": normal, "power_equals_T": power,
        "resolution_product": resolution,
        "negative_coordinate": op_norm(resolution_projector(spec, neg, np.full(spec.n, 1e9))),
    })
    return rep


# -- one-parameter unitary groups ------------------------------------------------

class BranchError(ValueError):
    """Sampling step too coarse: the principal logarithm picked the wrong branch."""

    def __init__(self, message: str, residual: float, suggested_h: float):
        super().__init__(f"{message}; try a sampling step <= {suggested_h:.4g}")
        self.residual = residual
        self.suggested_h = suggested_h


# irrational stride keeps held-out times off the lattice generated by h
SAMPLE_STRIDE = math.sqrt(2.0) - 1.0


def sample_times(h: float, count: int) -> np.ndarray:
    return h * (1.0 + SAMPLE_STRIDE * np.arange(count))


def unitary_group_spec(level: int, projections: Sequence[np.ndarray], b: Sequence[float],
                       mu: Sequence[CDNumber]) -> SemigroupSpec:
    atoms = [SemigroupAtom(P, [1.0], [bk], m, [1.0]) for P, bk, m in zip(projections, b, mu)]
    return SemigroupSpec(level, 0, 1, atoms)


def sample_unitary_group(spec: SemigroupSpec, times: Sequence[float]) -> list[tuple[float, np.ndarray]]:
    if spec.n != 1:
        raise ValueError("sampling needs a one-parameter spec")
    return [(float(t), polar_semigroup(spec, (t,)).U) for t in times]


@dataclass
class StoneRecovery:
    level: int
    atoms: list[tuple[np.ndarray, float, CDNumber]]
    residuals: dict[str, float] = field(default_factory=dict)
    h: float = 0.0
    max_bh: float = 0.0

    def operator(self, t: float) -> np.ndarray:
        out = None
        for P, b, mu in self.atoms:
            term = np.kron(P, algebra.left_matrix(exp_pure(mu, t * b)))
            out = term if out is None else out + term
        return out

    def to_json(self) -> dict:
        return {"v": self.level, "h": self.h, "max_bh": self.max_bh, "residuals": self.residuals,
                "atoms": [{"P": P.tolist(), "b": b, "mu": mu.to_json()} for P, b, mu in self.atoms]}


def _principal_log(U: np.ndarray, gap: float = 1e-9, branch_margin: float = 1e-7) -> np.ndarray:
    """Real logarithm of an orthogonal matrix on its invariant 2-planes.

    The symmetric part ``C`` holds ``cos(theta)`` and the skew part ``K`` holds
    ``sin(theta) J``; on each eigenspace of ``C`` the logarithm is
    ``theta / sin(theta) * K``.
    """
    C = (U + U.T) / 2
    K = (U - U.T) / 2
    w, V = np.linalg.eigh(C)
    out = np.zeros_like(U)
    start = 0
    for i in range(1, len(w) + 1):
        if i < len(w) and w[i] - w[i - 1] <= gap:
            continue
        Vb = V[:, start:i]
        c = float(np.mean(w[start:i]))
        start = i
        Kb = Vb.T @ K @ Vb
        s = math.sqrt(max(0.0, np.trace(Kb.T @ Kb) / Vb.shape[1]))
        theta = math.atan2(s, c)
        if math.pi - theta < branch_margin:
            raise BranchError("rotation angle at pi has no principal logarithm", float("inf"), 0.0)
        if s > 0:
            out += Vb @ ((theta / s) * Kb) @ Vb.T
    return out


def _componentwise_value(S: np.ndarray, P: np.ndarray, level: int) -> CDNumber:
    """Read the spectral value off ``(S x)_p x_p^{-1}`` for a vector ``x`` in ``range(P)``."""
    n = 1 << level
    col = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
    r = col / np.linalg.norm(col)
    q = np.ones(n) / math.sqrt(n)  # generic unit multiplier exercises alternativity
    x = np.outer(r, q)
    Sx = (S @ x.reshape(-1)).reshape(-1, n)
    p = int(np.argmax(np.abs(r)))
    return CDNumber(level, Sx[p]) * CDNumber(level, x[p]).inv()


def stone_recover(samples: Sequence[tuple[float, np.ndarray]], level: int, tol: float = 1e-8) -> StoneRecovery:
    """Recover ``(P_k, b_k, mu_k)`` from samples of ``t -> U_t``.

    The smallest sampled time ``h`` is used for fitting; every other sample is
    held out and must be reproduced to ``tol``. Frequencies come back
    non-negative, and a zero frequency gets direction ``i_1``.

    Raises:
        ValueError: non-unitary samples or fewer than two samples.
        BranchError: held-out reconstruction fails, typically because
            ``max |b| h >= pi``.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples (one to fit, one held out)")
    samples = sorted(samples, key=lambda s: s[0])
    for t, U in samples:
        ok, r = is_unitary(U, 1e-9)
        if not ok:
            raise ValueError(f"sample at t={t} is not unitary (residual {r:.3e})")
    h, Uh = samples[0]
    if h <= 0:
        raise ValueError("sample times must be positive")
    try:
        S = _principal_log(Uh) / h
        pvm = spectral_recover(S, level, tol=1e-8)
    except BranchError as exc:
        raise BranchError("no principal logarithm at the fitting step", exc.residual, h / 2) from exc
    except NotRepresentableError as exc:
        raise BranchError("generator is not in the synthesized class", exc.residual, h / 2) from exc
    atoms = []
    cw = 0.0
    for z, P in pvm.atoms:
        zc = _componentwise_value(S, P, level)
        cw = max(cw, (zc - z).norm())
        b = zc.norm()
        if b <= 1e-12:
            atoms.append((P, 0.0, CDNumber.basis(level, 1)))
        else:
            atoms.append((P, b, zc / b))
    rec = StoneRecovery(level, atoms, h=h, max_bh=max(b for _, b, _ in atoms) * h)
    rec.residuals["componentwise"] = cw
    rec.residuals["fit"] = op_norm(rec.operator(h) - Uh)
    held = max(op_norm(rec.operator(t) - U) for t, U in samples[1:])
    rec.residuals["held_out"] = held
    if held > tol:
        raise BranchError(f"held-out reconstruction residual {held:.3e} exceeds {tol:.1e}", held, h / 2)
    return rec


# -- continuity and convexity probes ------------------------------------------------

def _grid_points(spec: SemigroupSpec, direction: np.ndarray, ts: np.ndarray) -> list[OmegaPoint]:
    return [spec.point(t * direction) for t in ts]


def continuity_and_convexity_probe(spec: SemigroupSpec, f: np.ndarray, g: np.ndarray,
                                   direction: Sequence[float], t_range: tuple[float, float] = (0.1, 2.0),
                                   n_points: int = 5, tol: float = 1e-10) -> CheckReport:
    """Finite-grid probes of weak continuity, log-convexity and Gram positivity.

    ``f`` and ``g`` are flattened real-picture vectors. The grid runs along
    ``direction`` (continuous coordinates only) and is refined once by
    inserting midpoints. Log-convexity is tested in the squared form
    ``q(mid)**2 <= q(left) q(right)``; the unsquared form is only counted.
    """
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (spec.n,) or np.any(direction < 0) or np.any(direction[: spec.m] != 0):
        raise ValueError("direction must be non-negative and zero on discrete coordinates")
    coarse = np.linspace(*t_range, n_points)
    fine = np.linspace(*t_range, 2 * n_points - 1)
    level = spec.level
    n = 1 << level

    def scalar(B):
        # <B f; g> = sum_p conj((Bf)_p) g_p
        bf = (B @ f).reshape(-1, n)
        bf[:, 1:] *= -1
        return algebra.mul_arrays(bf, g.reshape(-1, n), level).sum(axis=0)

    def max_jump(ts):
        vals = [scalar(eval_semigroup(spec, x)) for x in _grid_points(spec, direction, ts)]
        return max(float(np.linalg.norm(u - v)) for u, v in zip(vals, vals[1:]))

    jump_coarse, jump_fine = max_jump(coarse), max_jump(fine)
    vecs = [eval_semigroup(spec, x) @ f for x in _grid_points(spec, direction, fine)]
    q = np.array([np.linalg.norm(v) for v in vecs])
    convex = 0.0
    literal_violations = 0
    for i in range(len(fine)):
        for k in range(i + 2, len(fine), 2):
            mid = (i + k) // 2
            convex = max(convex, q[mid] ** 2 - q[i] * q[k] * (1 + 1e-10))
            literal_violations += int(q[mid] > q[i] * q[k])
    gram = np.array([[float(np.dot(u, v)) for v in vecs] for u in vecs])
    min_eig = float(np.linalg.eigvalsh(gram).min())
    return CheckReport("probe", tol, {
        "continuity_contrast": max(0.0, jump_fine - jump_coarse),
        "log_convexity": max(0.0, convex),
        "gram_psd": max(0.0, -min_eig),
    }, findings={"jump_coarse": jump_coarse, "jump_fine": jump_fine, "gram_min_eig": min_eig,
                 "unsquared_convexity_violations": literal_violations})
