"""Command-line front end.

    mubw build     --d 7 --out s7.json
    mubw verify    --d 11
    mubw histogram --d 22307 --bins 100 --out hist.csv
    mubw mubs      --d 7 --out mubs.json
    mubw bench     --d 4099

Exit codes: 0 success, 1 verification failure, 2 usage or scope error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import balanced_state as bs
from .finite_field import FieldError, FieldSpec, NotPrimePowerError, factor_prime_power, field_build
from .mub import build_mubs
from .report import Check, VerificationReport
from .wigner import MOYAL_FULL_MAX_D

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MAX_HISTOGRAM_D = 100_000
MAX_MUB_D = 64
MAX_ORBIT_D = 27


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    d: int
    r: int
    n: int
    modulus: tuple[int, ...] | None
    out: Path | None
    format: str
    bins: int
    tol: float | None
    threads: int | None
    max_moyal_d: int


def _resolve_dimension(args) -> tuple[int, int, int]:
    if args.d is None and args.r is None:
        raise UsageError("one of --d or --r/--n is required")
    if args.r is not None:
        r, n = args.r, args.n if args.n is not None else 1
        if args.d is not None and args.d != r**n:
            raise UsageError(f"--d {args.d} conflicts with --r {r} --n {n}")
        if not (r > 1 and all(r % f for f in range(2, math.isqrt(r) + 1))):
            raise UsageError(f"r = {r} is not prime")
        d = r**n
    else:
        if args.n is not None:
            raise UsageError("--n requires --r")
        d = args.d
        try:
            r, n = factor_prime_power(d)
        except NotPrimePowerError as exc:
            raise UsageError(str(exc)) from None
    if r == 2:
        raise UsageError(f"d = {d} is a power of 2; characteristic 2 is not supported")
    return d, r, n


def parse_config(args) -> RunConfig:
    d, r, n = _resolve_dimension(args)
    modulus = None
    if args.modulus:
        try:
            modulus = tuple(int(c) for c in args.modulus.split(","))
        except ValueError:
            raise UsageError(f"--modulus must be comma-separated integers, got {args.modulus!r}") from None
    threads = args.threads
    if threads is None and os.environ.get("MUBW_THREADS"):
        threads = int(os.environ["MUBW_THREADS"])
    if args.bins is not None and args.bins < 1:
        raise UsageError("--bins must be positive")
    return RunConfig(
        command=args.command,
        d=d,
        r=r,
        n=n,
        modulus=modulus,
        out=Path(args.out) if args.out else None,
        format=args.format,
        bins=args.bins or 100,
        tol=args.tol,
        threads=threads,
        max_moyal_d=args.max_moyal_d,
    )


def _field(cfg: RunConfig, needs_scope: bool = True) -> FieldSpec:
    try:
        spec = field_build(cfg.r, cfg.n, cfg.modulus)
        if needs_scope:
            bs.check_scope(spec)
    except FieldError as exc:
        raise UsageError(str(exc)) from None
    return spec


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


# --- commands --------------------------------------------------------------


def cmd_build(cfg: RunConfig) -> int:
    spec = _field(cfg)
    state = bs.build_state(spec, cfg.threads)
    out = cfg.out or Path(f"state_d{spec.d}.json")
    _write(out, _dumps(state.to_json()))
    print(f"GF({spec.d}) = GF({spec.r}^{spec.n}), modulus {list(spec.modulus)}")
    print(f"wrote {out}")
    if state.wigner is not None:
        if cfg.format == "json":
            wpath = _sibling(out, "_wigner.json")
            _write(wpath, _dumps(state.wigner.to_json()))
        else:
            wpath = _sibling(out, "_wigner.csv")
            _write(wpath, state.wigner.to_csv())
        print(f"wrote {wpath}")
    else:
        print(f"Wigner grid skipped (d > {bs.GRID_LIMIT})")
    return EXIT_OK


def run_verification(spec: FieldSpec, tol: float | None = None, threads=None, max_moyal_d: int = MOYAL_FULL_MAX_D) -> VerificationReport:
    d = spec.d
    rep = VerificationReport(d)
    rep.info["modulus"] = list(spec.modulus)
    rep.extend(bs.field_checks(spec))
    state = bs.build_state(spec, threads)
    mubs = None
    if d <= MAX_MUB_D:
        mubs = build_mubs(spec)
        O = mubs.overlaps()
        mask = np.ones((d + 1, d + 1), bool)
        np.fill_diagonal(mask, False)
        O = O.transpose(0, 2, 1, 3)
        rep.add("MUB overlaps 1/d", float(np.abs(O[mask] - 1 / d).max()), 1e-10)
        rep.add("MUB orthonormality", float(np.abs(O[~mask] - np.eye(d)).max()), 1e-10)
    if state.wigner is None:
        rep.info["note"] = f"full-matrix checks skipped for d > {bs.GRID_LIMIT}"
        return rep
    tol = bs.default_tolerance(d) if tol is None else tol
    core = bs.verify_state(state, mubs, tol, moyal_max_d=max_moyal_d)
    rep.extend(core.checks)
    rep.info.update(core.info)
    if d <= MAX_ORBIT_D:
        rep.extend(_orbit_checks(state, np.array(core.info["sorted_probabilities"]), tol))
    return rep


def _orbit_checks(state, ref_probs, tol) -> list[Check]:
    spec = state.field
    L = ((1, 1), (0, 1))
    shear = bs.symplectic_image(state, L)
    shifted = bs.translated_image(state, 1, 0)
    out = []
    for name, img in (("shear", shear), ("translation", shifted)):
        rho = img.density_matrix()
        lists, _ = bs.verify_balanced(img)
        out.append(Check(f"{name} image purity", float(np.abs(rho @ rho - rho).max()), tol))
        out.append(Check(f"{name} image multiset", float(np.abs(lists - ref_probs).max()), 1e-10))
    if spec.d <= 11:
        E = bs.povm_from_orbit(state)
        out.append(Check("POVM completeness", float(np.abs(E.sum(axis=(0, 1)) - np.eye(spec.d)).max()), 1e-10))
    return out


def cmd_verify(cfg: RunConfig) -> int:
    spec = _field(cfg)
    rep = run_verification(spec, cfg.tol, cfg.threads, cfg.max_moyal_d)
    print(f"d = {spec.d}  GF({spec.r}^{spec.n})  modulus {list(spec.modulus)}")
    print(rep.table())
    if "sorted_probabilities" in rep.info:
        probs = ", ".join(f"{0.0 if abs(p) < 1e-12 else p:.6g}" for p in rep.info["sorted_probabilities"][:12])
        more = " ..." if spec.d > 12 else ""
        print(f"sorted probabilities: ({probs}{more}); {rep.info['zero_probabilities']} zero")
    if cfg.out:
        _write(cfg.out, rep.dumps())
    if not rep.passed:
        print("FAILED: " + "; ".join(c.name for c in rep.failures), file=sys.stderr)
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def cmd_histogram(cfg: RunConfig) -> int:
    if cfg.d > MAX_HISTOGRAM_D:
        raise UsageError(f"d = {cfg.d} out of range for histogram (max {MAX_HISTOGRAM_D})")
    spec = _field(cfg)
    t0 = time.perf_counter()
    psi = bs.state_vector(spec, cfg.threads)
    hist = bs.component_histogram(psi, cfg.bins)
    elapsed = time.perf_counter() - t0
    scaled = math.sqrt(spec.d) * psi
    outside = int(np.sum(np.abs(scaled) > 2.0))
    summary = {
        "d": spec.d,
        "bins": cfg.bins,
        "min": float(scaled.min()),
        "max": float(scaled.max()),
        "outside_[-2,2]": outside,
    }
    if spec.r == 3:
        summary["semicircle_fit"] = "power of 3: semicircle fit skipped"
        print("power of 3: semicircle fit skipped")
    else:
        fit = bs.semicircle_fit(hist, spec.d)
        summary["semicircle_fit"] = fit.to_json()
        print(f"semicircle fit: beta_hat = {fit.beta:.6g} (2/sqrt(d) = {fit.beta_expected:.6g}, rel err {abs(fit.beta / fit.beta_expected - 1):.2e})")
    out = cfg.out or Path(f"histogram_d{spec.d}.csv")
    if cfg.format == "json":
        _write(out, _dumps({"bin_center": hist.centers.tolist(), "count": hist.counts.tolist()}))
    else:
        _write(out, hist.to_csv())
    _write(_sibling(out, "_fit.json"), _dumps(summary))
    print(f"sqrt(d) psi in [{summary['min']:.6f}, {summary['max']:.6f}], {outside} outside [-2, 2]")
    print(f"wrote {out} and {_sibling(out, '_fit.json')}  ({elapsed:.2f} s)")
    return EXIT_FAIL if outside else EXIT_OK


def cmd_mubs(cfg: RunConfig) -> int:
    if cfg.d > MAX_MUB_D:
        raise UsageError(f"d = {cfg.d} out of range for MUB export (max {MAX_MUB_D})")
    spec = _field(cfg, needs_scope=False)
    mubs = build_mubs(spec)
    out = cfg.out or Path(f"mubs_d{spec.d}.json")
    _write(out, _dumps(mubs.to_json()))
    print(f"wrote {len(mubs)} bases to {out}")
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    spec = _field(cfg)
    t0 = time.perf_counter()
    bs.density_column(spec, 1, cfg.threads)
    t_col = time.perf_counter() - t0
    print(f"d = {spec.d}: one closed-form column in {t_col:.3f} s (threads={bs._threads(cfg.threads)})")
    if spec.d <= bs.GRID_LIMIT:
        t0 = time.perf_counter()
        state = bs.build_state(spec, cfg.threads)
        state.density_matrix()
        print(f"full-matrix route (grid + rho) in {time.perf_counter() - t0:.3f} s")
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "histogram": cmd_histogram,
    "mubs": cmd_mubs,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mubw", description="MUB-balanced states from discrete Wigner functions")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "build": "write the state (JSON) and its Wigner grid",
        "verify": "run all numerical checks and print residuals",
        "histogram": "histogram of sqrt(d) psi with a semicircle fit",
        "mubs": "export the complete MUB set as JSON",
        "bench": "time the closed-form column route",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--d", type=int, help="dimension (a prime power)")
        p.add_argument("--r", type=int, help="characteristic (bypasses factoring --d)")
        p.add_argument("--n", type=int, help="extension degree, used with --r")
        p.add_argument("--modulus", help="irreducible modulus, coefficients low-to-high, e.g. 1,0,2,1")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--bins", type=int, default=None)
        p.add_argument("--tol", type=float, default=None, help="purity tolerance override")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: MUBW_THREADS or all cores)")
        p.add_argument("--max-moyal-d", type=int, default=MOYAL_FULL_MAX_D, dest="max_moyal_d")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"mubw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
