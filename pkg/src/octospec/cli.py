"""Command-line front end: seeded generation, verification suites and JSON reports.

Exit codes: 0 when every residual is within tolerance, 1 on a residual
failure, 2 on invalid input. Nothing is written to ``--out`` on exit 2.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, algebra, factorization, identities, spectral, stone
from .algebra import LevelError
from .linear import picture_from_json, picture_to_json

DEFAULT_TOL = 1e-10
TOL_ENV = "OCTOSPEC_DEFAULT_TOL"

# suite defaults when neither --tol nor the environment variable is given
SUITE_TOL = {
    "algebra": 1e-12,
    "corollary6": 1e-11,
    "semigroup": 1e-9,
    "stone-recover": 1e-8,
}

MAX_DIM = factorization.MAX_DIM


class InputError(Exception):
    """Invalid input; maps to exit code 2."""


@dataclass
class SuiteConfig:
    suite: str
    level: int = 3
    dim: int = 4
    seeds: list[int] = field(default_factory=lambda: [0])
    tol: float = DEFAULT_TOL
    convention: str | None = None
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"tolerance must be positive, got {self.tol}")


def parse_seeds(text: str) -> list[int]:
    """``"7"``, ``"1..100"`` (inclusive) or a comma list of either."""
    seeds: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                seeds.extend(range(int(lo), int(hi) + 1))
            elif part:
                seeds.append(int(part))
    except ValueError:
        raise InputError(f"cannot parse seeds {text!r}") from None
    if not seeds:
        raise InputError("empty seed list")
    return seeds


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse numbers {text!r}") from None


def resolve_tol(explicit: float | None, suite: str) -> float:
    if explicit is not None:
        return explicit
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"{TOL_ENV}={env!r} is not a number") from None
    return SUITE_TOL.get(suite, DEFAULT_TOL)


def read_json(path: str | None) -> dict:
    if path is None:
        raise InputError("--in is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _clean(v):
    """JSON-friendly copy of findings (tuples, numpy scalars)."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def _values(res) -> list[float]:
    if isinstance(res, dict):
        return [x for v in res.values() for x in _values(v)]
    if isinstance(res, (list, tuple)):
        return [x for v in res for x in _values(v)]
    return [float(res)]


def seed_entry(seed, residuals: dict, findings: dict, tol: float) -> dict:
    vals = _values(residuals)
    return {"seed": seed, "residuals": _clean(residuals), "findings": _clean(findings),
            "pass": all(v <= tol for v in vals)}


def build_report(suite: str, entries: list[dict], tol: float, convention: str | None,
                 wall: float | None) -> dict:
    """Merge per-seed entries (already in seed order) into one report."""
    if len(entries) == 1:
        rep = dict(entries[0])
    else:
        rep = {"seeds": [e["seed"] for e in entries], "runs": entries,
               "pass": all(e["pass"] for e in entries)}
    rep.update({"suite": suite, "tol": tol, "convention": convention, "version": __version__})
    if wall is not None:
        rep["wall_time"] = round(wall, 6)
    return rep


def render_text(rep: dict) -> str:
    runs = rep.get("runs", [rep])
    lines = [f"suite {rep['suite']}  tol {rep['tol']:.1e}  convention {rep.get('convention')}  "
             f"{'PASS' if rep['pass'] else 'FAIL'}"]
    for e in runs:
        worst = max(_values(e["residuals"]), default=0.0)
        lines.append(f"  seed {e['seed']}: {'pass' if e['pass'] else 'FAIL'}  max residual {worst:.3e}")
        for k in sorted(e["residuals"]):
            lines.append(f"    {k}: {e['residuals'][k]}")
    return "\n".join(lines) + "\n"


def run_seeds(fn: Callable[[int], dict], seeds: list[int], jobs: int) -> list[dict]:
    """Evaluate ``fn`` per seed; ``map`` keeps the seed order whatever the scheduling."""
    if jobs <= 1 or len(seeds) == 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, seeds))


# -- suites ------------------------------------------------------------------------

def _triple_for(args, seed: int, real: bool = False) -> factorization.PropertyPTriple:
    if args.input:
        return factorization.PropertyPTriple.from_json(read_json(args.input))
    _check_caps(args)
    t = factorization.synth_triple(args.level, args.dim, args.atoms or args.dim, seed, real=real)
    if args.perturb:
        t = factorization.perturb_triple(t, args.perturb, seed)
    return t


def _check_caps(args) -> None:
    if not 0 <= args.level <= algebra.MAX_LEVEL:
        raise InputError(f"level must be in 0..{algebra.MAX_LEVEL}")
    if not 1 <= args.dim <= MAX_DIM:
        raise InputError(f"dim must be in 1..{MAX_DIM}")
    if args.atoms is not None and not 1 <= args.atoms <= args.dim:
        raise InputError("atoms must be in 1..dim")
    if getattr(args, "n", None) is not None and not 1 <= args.n <= stone.MAX_PARAMS:
        raise InputError(f"n must be in 1..{stone.MAX_PARAMS}")


def suite_algebra(args, tol):
    def one(seed):
        rep = identities.verify_algebra(args.level, seed=seed, tol=tol)
        return seed_entry(seed, rep.residuals, rep.findings, tol)
    return "algebra", one, None


def suite_check(args, tol):
    name = args.which
    conv = None
    if name == "theorem5":
        conv = factorization.load_convention(args.convention)

    def one(seed):
        t = _triple_for(args, seed, real=(name == "corollary6"))
        if name == "theorem5":
            r1 = factorization.verify_theorem5_eq1(t, tol)
            r2 = factorization.verify_theorem5_eq2(t, conv, tol)
            eq2 = [r2.residuals[f"eq2_l{l}"] for l in range(1 << t.level)]
            residuals = {"eq1": r1.residuals["eq1"]}
            findings = dict(r2.findings)
            if t.level <= 2:
                residuals["eq2_per_l"] = eq2
            else:
                # octonion component residuals carry no pass threshold
                findings["eq2_per_l"] = eq2
            return seed_entry(seed, residuals, findings, tol)
        if name == "lemma2":
            rep = factorization.verify_lemma2(t, spectral.IntervalBox.symmetric(t.level, args.box), tol)
        elif name == "lemma7":
            rep = factorization.verify_lemma7(t, tol)
        elif name == "corollary6":
            rep = factorization.verify_corollary6(t, tol)
            if not rep.applicable:
                raise InputError("corollary6 needs a triple with real spectral values")
        else:
            rep = factorization.check_property_p(t, tol)
        return seed_entry(seed, rep.residuals, rep.findings, tol)
    return name, one, conv.id if conv else None


def suite_stone_verify(args, tol):
    def one(seed):
        spec = _semigroup_for(args, seed)
        rep = stone.verify_semigroup(spec, n_pairs=args.pairs, seed=seed, tol=tol)
        res = dict(rep.residuals)
        for s in range(spec.n):
            ks = stone.kernel_split_check(spec, s)
            res.update({f"kernel_{k}_{s}": v for k, v in ks.residuals.items()})
        return seed_entry(seed, res, rep.findings, tol)
    return "semigroup", one, None


def _semigroup_for(args, seed: int) -> stone.SemigroupSpec:
    if args.input:
        return stone.SemigroupSpec.from_json(read_json(args.input))
    _check_caps(args)
    return stone.random_semigroup_spec(args.level, args.dim, args.atoms or args.dim, args.m, args.n, seed)


# -- command handlers ----------------------------------------------------------------

SUITE_OF_COMMAND = {"verify": "algebra", "stone": "semigroup"}


def run_suite(args, make) -> int:
    """Run a registered suite over the configured seeds and write the report."""
    key = SUITE_OF_COMMAND.get(args.command, getattr(args, "which", args.command))
    config = SuiteConfig(key, args.level, args.dim, parse_seeds(args.seeds), resolve_tol(args.tol, key),
                         args.convention, args.out, args.format)
    start = time.perf_counter()
    suite, one, conv = make(args, config.tol)
    entries = run_seeds(one, config.seeds, args.jobs)
    wall = None if args.no_timestamp else time.perf_counter() - start
    rep = build_report(suite, entries, config.tol, conv, wall)
    _emit(dump(rep) if config.fmt == "json" else render_text(rep), config.out)
    return 0 if rep["pass"] else 1


def cmd_signs(args) -> int:
    if not 0 <= args.level <= algebra.MAX_LEVEL:
        raise InputError(f"level must be in 0..{algebra.MAX_LEVEL}")
    table = algebra.basis_table(args.level)
    if args.format == "json":
        _emit(dump(table.to_json()), args.out)
    else:
        n = table.size
        rows = [" ".join(f"{'+' if table.sign[j, k] > 0 else '-'}{table.index[j, k]:<2d}" for k in range(n)).rstrip()
                for j in range(n)]
        _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_spectral(args) -> int:
    tol = resolve_tol(args.tol, "spectral")
    obj = read_json(args.input)
    if args.action == "synth":
        pvm = spectral.GradedPVM.from_json(obj)
        _emit(dump(picture_to_json(spectral.synth_normal(pvm))), args.out)
        return 0
    A = picture_from_json(obj)
    try:
        pvm = spectral.spectral_recover(A, args.level, tol)
    except spectral.NotRepresentableError as exc:
        rep = build_report("spectral-recover", [seed_entry(None, {"representation": exc.residual}, {}, tol)],
                           tol, None, None)
        _emit(dump(rep), args.out)
        print(f"octospec: {exc}", file=sys.stderr)
        return 1
    _emit(dump(pvm.to_json()), args.out)
    return 0


def cmd_generate(args) -> int:
    _check_caps(args)
    seeds = parse_seeds(args.seeds)
    if len(seeds) != 1:
        raise InputError("generate takes a single seed")
    seed = seeds[0]
    atoms = args.atoms or args.dim
    if args.kind == "pvm":
        obj = spectral.random_pvm(args.level, args.dim, atoms, np.random.default_rng(seed)).to_json()
    elif args.kind == "triple":
        if args.level > 3:
            raise InputError("triples are generated for levels 0..3")
        obj = factorization.synth_triple(args.level, args.dim, atoms, seed, real=args.real).to_json()
    else:
        if args.m > args.n:
            raise InputError("m must not exceed n")
        obj = stone.random_semigroup_spec(args.level, args.dim, atoms, args.m, args.n, seed).to_json()
    _emit(dump(obj), args.out)
    return 0


def cmd_stone(args) -> int:
    if args.action == "verify":
        return run_suite(args, suite_stone_verify)
    if args.action == "recover":
        return _stone_recover(args)
    seeds = parse_seeds(args.seeds)
    spec = _semigroup_for(args, seeds[0])
    if args.action == "build":
        _emit(dump(spec.to_json()), args.out)
        return 0
    if args.action == "sample":
        return _stone_sample(args, spec)
    if args.x is None:
        raise InputError("stone eval needs --x")
    try:
        x = spec.point(parse_floats(args.x))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(dump(picture_to_json(stone.eval_semigroup(spec, x))), args.out)
    return 0


def _stone_sample(args, spec: stone.SemigroupSpec) -> int:
    if spec.n != 1:
        raise InputError("sampling needs a one-parameter spec (n = 1)")
    if args.h is None or not args.h > 0:
        raise InputError("stone sample needs a positive --h")
    times = stone.sample_times(args.h, args.count)
    samples = stone.sample_unitary_group(spec, times)
    obj = {"v": spec.level, "h": args.h, "count": args.count, "t": [float(t) for t in times],
           "U": [picture_to_json(U) for _, U in samples]}
    _emit(dump(obj), args.out)
    return 0


def _stone_recover(args) -> int:
    tol = resolve_tol(args.tol, "stone-recover")
    obj = read_json(args.input)
    try:
        Us = [picture_from_json(u) for u in obj["U"]]
        h = float(obj["h"])
        ts = obj.get("t") or [h * (k + 1) for k in range(len(Us))]
        level = int(obj.get("v", args.level))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed samples file: {exc}") from None
    try:
        rec = stone.stone_recover(list(zip(ts, Us)), level, tol)
    except stone.BranchError as exc:
        rep = build_report("stone-recover", [seed_entry(None, {"held_out": exc.residual},
                                                        {"suggested_h": exc.suggested_h}, tol)],
                           tol, None, None)
        _emit(dump(rep), args.out)
        print(f"octospec: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = rec.to_json()
    out["pass"] = all(v <= tol for v in rec.residuals.values())
    _emit(dump(out), args.out)
    return 0 if out["pass"] else 1


def cmd_calibrate(args) -> int:
    if args.level > 2:
        raise InputError("calibration oracles need level <= 2")
    if args.conventions is not None:
        ids = [c for c in args.conventions.split(",") if c.strip()]
        if not ids:
            raise InputError("empty convention list")
        try:
            convs = [factorization.ConventionSpec.from_id(c.strip()) for c in ids]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        convs = None
    seeds = parse_seeds(args.seeds)
    report = factorization.calibrate_theorem5(seeds, convs, level=args.level)
    obj = report.to_json()
    if args.format == "json":
        _emit(dump(obj), args.out)
    else:
        lines = [f"{i + 1:2d}. {r['convention']:<36s} {r['residual']:.3e}" for i, r in enumerate(obj["ranking"])]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_report(args) -> int:
    paths = list(args.paths) + ([args.input] if args.input else [])
    if not paths:
        raise InputError("report needs at least one report file")
    reps = [read_json(p) for p in paths]
    try:
        text = "".join(render_text(r) for r in reps)
        ok = all(r["pass"] for r in reps)
    except (KeyError, TypeError) as exc:
        raise InputError(f"not a report file: {exc}") from None
    _emit(text, args.out)
    return 0 if ok else 1


def _common(p: argparse.ArgumentParser, level: int = 3) -> None:
    p.add_argument("--level", type=int, default=level, help="algebra level v (dimension 2**v)")
    p.add_argument("--dim", type=int, default=4, help="module dimension d")
    p.add_argument("--atoms", type=int, default=None, help="number of spectral atoms (default d)")
    p.add_argument("--seeds", default="0", help='seed, "a..b" range or comma list')
    p.add_argument("--tol", type=float, default=None,
                   help=f"residual tolerance (default ${TOL_ENV} or the suite default)")
    p.add_argument("--convention", default=None, help='component-relation convention id, file, or "calibrated"')
    p.add_argument("--in", dest="input", default=None, help="input JSON file")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--no-timestamp", action="store_true", help="omit wall time for byte-stable reports")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="seed-level worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="octospec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"octospec {__version__}")
    parser.add_argument("--doubling", choices=algebra.DOUBLINGS, default=algebra.STANDARD,
                        help="Cayley-Dickson doubling convention")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signs", help="dump the basis multiplication table")
    _common(p)
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("verify", help="algebra identity sweeps")
    p.add_argument("which", choices=("algebra",))
    _common(p)
    p.set_defaults(func=lambda a: run_suite(a, suite_algebra))

    p = sub.add_parser("spectral", help="synthesize or recover a graded normal operator")
    p.add_argument("action", choices=("synth", "recover"))
    _common(p)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("generate", help="seeded instance generation")
    p.add_argument("kind", choices=("pvm", "triple", "semigroup"))
    _common(p)
    p.add_argument("--n", type=int, default=1, help="semigroup parameters")
    p.add_argument("--m", type=int, default=0, help="discrete semigroup parameters")
    p.add_argument("--real", action="store_true", help="triple with real spectral values")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="factorization suites")
    p.add_argument("which", choices=("theorem5", "lemma2", "lemma7", "corollary6", "property-p"))
    _common(p)
    p.add_argument("--box", type=float, default=1.0, help="half-width of the lemma2 interval box")
    p.add_argument("--perturb", type=float, default=0.0, help="perturb generated triples by this epsilon")
    p.set_defaults(func=lambda a: run_suite(a, suite_check))

    p = sub.add_parser("stone", help="semigroups and unitary-group recovery")
    p.add_argument("action", choices=("build", "eval", "verify", "sample", "recover"))
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--x", default=None, help="evaluation point, comma separated")
    p.add_argument("--pairs", type=int, default=50, help="sampled (x, y) pairs for the semigroup law")
    p.add_argument("--h", type=float, default=None, help="sampling step")
    p.add_argument("--count", type=int, default=32, help="number of samples")
    p.set_defaults(func=cmd_stone)

    p = sub.add_parser("calibrate", help="rank component-relation conventions on associative oracles")
    _common(p, level=2)
    p.add_argument("--conventions", default=None, help="comma list of convention ids (default all)")
    p.set_defaults(func=cmd_calibrate, seeds="1..100")

    p = sub.add_parser("report", help="summarize report files")
    p.add_argument("paths", nargs="*")
    _common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    previous = algebra.get_doubling()
    try:
        algebra.set_doubling(args.doubling)
        return args.func(args)
    except (InputError, LevelError, spectral.InvalidPVMError, stone.OmegaError) as exc:
        print(f"octospec: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"octospec: invalid input: {exc}", file=sys.stderr)
        return 2
    finally:
        algebra.set_doubling(previous)


__all__ = ["InputError", "SuiteConfig", "build_parser", "build_report", "main", "parse_seeds",
           "resolve_tol", "run_suite"]
