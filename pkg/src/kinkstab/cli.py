"""Command-line interface: every computation as a subcommand with stable CSV output.

Numeric output uses 17 significant digits, dot decimals, Unix newlines;
identical configurations produce byte-identical files.  Each run writes a
JSON sidecar (<out>.meta.json) with the resolved configuration and package
version.  Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, evolution, linalg, spectra
from .discretize import GridSpec, assemble_LR_z
from .errors import NumericalError, ValidationError
from .profiles import (
    NonlinearityParams,
    build_general_profile,
    cubic_quintic_profile,
    x_of_z,
    z_of_x,
)

__all__ = ["main", "dispatch"]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_meta(path: str, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    with open(path + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _profile_for(p: float, q: float):
    params = NonlinearityParams(p, q)
    if params.is_cubic_quintic:
        return params, cubic_quintic_profile()
    return params, build_general_profile(params)


def _z_grid(args) -> GridSpec:
    return GridSpec(args.z_min, 0.0, args.n, var="z")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("KINKSTAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_profile(args) -> int:
    params, profile = _profile_for(args.p, args.q)
    grid = GridSpec(args.x_min, args.x_max, args.n, var="x")
    x = grid.nodes()
    rows = zip(x, profile.phi(x), profile.phi_prime(x), profile.one_minus_phi_sq(x))
    _write_csv(args.out, "x,phi,phi_prime,one_minus_phi_sq", rows)
    _write_meta(args.out, {"command": "profile", "p": args.p, "q": args.q,
                           "x_min": args.x_min, "x_max": args.x_max, "n": args.n})
    return 0


def _cmd_spectrum(args) -> int:
    grid = _z_grid(args)
    pairs = spectra.lr_eigenpairs(args.r, grid, k=args.k)
    z = grid.nodes()
    x_vals = np.empty_like(z)
    x_vals[:-1] = x_of_z(z[:-1])
    x_vals[-1] = np.inf  # z = 0 maps to x = +infinity
    cols = [z, x_vals] + [p.vector for p in pairs]
    header = "z,x," + ",".join(f"v{i + 1}" for i in range(args.k))
    _write_csv(args.out, header, zip(*cols))
    _write_meta(args.out, {
        "command": "spectrum", "R": args.r, "k": args.k, "z_min": args.z_min, "n": args.n,
        "eigenvalues": [p.value for p in pairs],
        "residuals": [p.residual for p in pairs],
        "sign_changes": [p.sign_changes for p in pairs],
    })
    for p in pairs:
        print(f"lambda_{p.sturm_index} = {_fmt(p.value)}")
    return 0


def _scan_r_values(args):
    if args.r is not None:
        return [args.r]
    n_steps = int(round((args.r_max - args.r_min) / args.r_step))
    return [args.r_min + k * args.r_step for k in range(n_steps + 1)]


def _scan_worker(payload):
    r, z_min, n = payload
    row = spectra.criterion_row(r, GridSpec(z_min, 0.0, n, var="z"))
    return row


def _cmd_criterion_scan(args) -> int:
    r_values = _scan_r_values(args)
    threads = _threads(args)
    payloads = [(r, args.z_min, args.n) for r in r_values]
    if threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_scan_worker, payloads))
    else:
        rows = [_scan_worker(p) for p in payloads]
    rows.sort(key=lambda row: row.R)
    failed = [row for row in rows if not row.ok]
    for row in failed:
        print(f"R={row.R}: {row.error}", file=sys.stderr)
    _write_csv(
        args.out,
        "R,z_R,lambda1,lambda2,lambda3,F0,product",
        ((r.R, r.z_R, r.lambda1, r.lambda2, r.lambda3, r.F0, r.product) for r in rows),
    )
    _write_meta(args.out, {"command": "criterion-scan", "z_min": args.z_min, "n": args.n,
                           "r_values": r_values, "failed_rows": [r.R for r in failed]})
    return 3 if failed else 0


def _cmd_constrained(args) -> int:
    grid = _z_grid(args)
    pairs = spectra.lr_eigenpairs(args.r, grid, k=2)
    lam0 = spectra.constrained_ground_eigenvalue(args.r, grid)
    _write_csv(
        args.out,
        "R,z_R,lambda1,lambda2,lambda0",
        [(args.r, float(z_of_x(args.r)), pairs[0].value, pairs[1].value, lam0)],
    )
    _write_meta(args.out, {"command": "constrained-eigenvalue", "R": args.r,
                           "z_min": args.z_min, "n": args.n})
    print(f"lambda_0 = {_fmt(lam0)}")
    return 0


def _cmd_block_spectrum(args) -> int:
    params, profile = _profile_for(args.p, args.q)
    grid = GridSpec(args.x_min, args.x_max, args.n, var="x")
    spec = spectra.block_spectrum(params, grid, profile)
    _write_csv(args.out, "re,im", spec.eigenvalues)
    _write_meta(args.out, {
        "command": "block-spectrum", "p": args.p, "q": args.q,
        "x_min": args.x_min, "x_max": args.x_max, "n": args.n,
        "mu_min_before_clip": spec.mu_min,
        "lplus_min_before_clip": spec.lplus_min,
        "kernel_mu_count": spec.kernel_mu_count,
        "phi_prime_rayleigh": spec.phi_prime_rayleigh,
        "max_abs_re": spec.max_abs_re,
    })
    return 0


def _cmd_evolve(args) -> int:
    grid = GridSpec(args.x_min, args.x_max, args.n, var="x")
    report = evolution.stability_experiment(
        delta=args.delta, shape=args.shape, T=args.t_final, dt=args.dt, R=args.r, grid=grid
    )
    _write_csv(args.out, "t,energy,rho_modulated,alpha,beta,eta_sup", report.rows())
    _write_meta(args.out, {
        "command": "evolve", "delta": args.delta, "shape": args.shape, "T": args.t_final,
        "dt": args.dt, "R": args.r, "x_min": args.x_min, "x_max": args.x_max, "n": args.n,
        "p": 2.0, "q": 4.0,
        "scale": report.scale,
        "verdict_max_ratio": report.verdict_max_ratio,
        "energy_drift": report.energy_drift,
        "fit_residual_max": report.fit_residual_max,
        "x1_bounded": report.x1_bounded,
        "eta_ratio_max": float(report.eta_ratio.max()),
    })
    print(f"max rho_modulated / delta^2 = {_fmt(report.verdict_max_ratio)}")
    return 0


def _cmd_decompose_check(args) -> int:
    grid = GridSpec(args.x_min, args.x_max, args.n, var="x")
    profile = cubic_quintic_profile()
    x = grid.nodes()
    rows = []
    worst = 0.0
    for seed in range(args.seeds):
        rng = np.random.default_rng(1000 + seed)
        u = _random_bump(rng, x, args.amplitude)
        v = _random_bump(rng, x, args.amplitude)
        rep = evolution.decomposition_check(u, v, args.r, grid, profile)
        worst = max(worst, rep.rel_mismatch_split, rep.rel_mismatch_global)
        rows.append((seed, rep.lhs, rep.abs_mismatch_split, rep.rel_mismatch_split,
                     rep.abs_mismatch_global, rep.rel_mismatch_global))
    _write_csv(
        args.out,
        "seed,lhs,abs_mismatch_split,rel_mismatch_split,abs_mismatch_global,rel_mismatch_global",
        rows,
    )
    _write_meta(args.out, {"command": "decompose-check", "R": args.r, "seeds": args.seeds,
                           "amplitude": args.amplitude, "x_min": args.x_min,
                           "x_max": args.x_max, "n": args.n, "worst_rel_mismatch": worst})
    print(f"worst relative mismatch = {_fmt(worst)}")
    return 0


def _random_bump(rng, x, amplitude):
    """Smooth compactly supported field: a few Gaussians inside |x| <= 10."""
    out = np.zeros_like(x)
    for _ in range(3):
        center = rng.uniform(-8.0, 8.0)
        width = rng.uniform(0.8, 2.0)
        out += rng.uniform(-1.0, 1.0) * np.exp(-0.5 * ((x - center) / width) ** 2)
    peak = np.abs(out).max()
    if peak > 0.0:
        out *= amplitude / peak
    return out


def _cmd_selftest(args) -> int:
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # report, keep going
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))

    prof = cubic_quintic_profile()

    def c_profile():
        assert abs(prof.phi(0.0) - 0.7071067811865476) < 1e-15
        x = np.linspace(-20.0, 20.0, 401)
        assert np.max(np.abs(np.exp(2.0 * z_of_x(x)) - prof.phi_sq(x))) < 1e-12
        assert abs(x_of_z(z_of_x(0.3)) - 0.3) < 1e-12

    def c_simpson():
        xs = np.linspace(0.0, 1.0, 101)
        assert abs(linalg.simpson(xs**3, 0.01) - 0.25) < 1e-12

    def c_operator():
        grid = GridSpec(-10.0, 0.0, 2000, var="z")
        op = assemble_LR_z(0.2, grid)
        assert linalg.sturm_count(op, 0.0) == 1
        pairs = linalg.lowest_eigenpairs(op, 2)
        assert pairs[0].value < 0.0 < pairs[1].value
        F0 = spectra.F_of_lambda(0.2, 0.0, grid, op=op, ground=pairs[0])
        assert F0 < 0.0

    def c_evolution():
        grid = GridSpec(-10.0, 10.0, 1024, var="x")
        st = evolution.kink_state(prof, grid, 0.01 * np.exp(-0.5 * grid.nodes() ** 2))
        fwd = evolution.step_cn(st, 0.01, n_steps=20)
        back = evolution.step_cn(fwd, -0.01, n_steps=20)
        assert np.abs(back.psi - st.psi).max() < 1e-9
        fit = evolution.modulation_fit(st, 1.0, profile=prof)
        assert fit.residual < 1e-9

    def c_decomposition():
        grid = GridSpec(-40.0, 40.0, 8192, var="x")
        x = grid.nodes()
        u = 0.05 * np.exp(-0.5 * x**2)
        v = 0.03 * np.exp(-0.5 * (x - 1.0) ** 2)
        rep = evolution.decomposition_check(u, v, 0.5, grid, prof)
        assert rep.rel_mismatch_split < 1e-10 and rep.rel_mismatch_global < 1e-10

    check("profile-identities", c_profile)
    check("simpson-cubic-exactness", c_simpson)
    check("transition-operator-signs", c_operator)
    check("evolution-reversibility-and-fit", c_evolution)
    check("energy-decomposition-identity", c_decomposition)

    ok = True
    for name, passed, msg in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}" + (f"  ({msg})" if msg else ""))
        ok = ok and passed
    return 0 if ok else 3


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_z_grid_args(sp):
    sp.add_argument("--z-min", type=float, default=-10.0)
    sp.add_argument("--n", type=int, default=20000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kinkstab", description=__doc__)
    ap.add_argument("--config", help="JSON file with flag defaults (flags override)")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker count for scans (env KINKSTAB_THREADS, default: CPU count)")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("profile", help="sample the kink profile to CSV")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=4.0)
    sp.add_argument("--x-min", type=float, default=-10.0)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_profile)

    sp = sub.add_parser("spectrum", help="lowest-k weighted eigenpairs for one R")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--k", type=int, default=3)
    _add_z_grid_args(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_spectrum)

    sp = sub.add_parser("criterion-scan", help="lowest eigenvalues and F_R(0) over a range of R")
    sp.add_argument("--r", type=float, default=None, help="single R instead of a range")
    sp.add_argument("--r-min", type=float, default=-6.0)
    sp.add_argument("--r-max", type=float, default=6.0)
    sp.add_argument("--r-step", type=float, default=0.25)
    _add_z_grid_args(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_criterion_scan)

    sp = sub.add_parser("constrained-eigenvalue", help="root of F on (0, min(lambda2, 1))")
    sp.add_argument("--r", type=float, required=True)
    _add_z_grid_args(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_constrained)

    sp = sub.add_parser("block-spectrum", help="spectrum of the linearized flow (purely imaginary)")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=4.0)
    sp.add_argument("--x-min", type=float, default=-20.0)
    sp.add_argument("--x-max", type=float, default=20.0)
    sp.add_argument("--n", type=int, default=2000)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_block_spectrum)

    sp = sub.add_parser("evolve", help="orbital-stability experiment time series")
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--shape", default="gaussian-re")
    sp.add_argument("--t-final", type=float, default=50.0)
    sp.add_argument("--dt", type=float, default=0.005)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--x-min", type=float, default=-40.0)
    sp.add_argument("--x-max", type=float, default=40.0)
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_evolve)

    sp = sub.add_parser("decompose-check", help="energy-decomposition identity over random bumps")
    sp.add_argument("--r", type=float, default=0.7)
    sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--amplitude", type=float, default=0.05)
    sp.add_argument("--x-min", type=float, default=-40.0)
    sp.add_argument("--x-max", type=float, default=40.0)
    sp.add_argument("--n", type=int, default=8192)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_decompose_check)

    sp = sub.add_parser("selftest", help="run the quick invariant suite")
    sp.set_defaults(func=_cmd_selftest)

    return ap


def _apply_config(ap: argparse.ArgumentParser, argv):
    """Load --config JSON as defaults; explicit flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    out = list(argv)
    for key, value in cfg.items():
        flag = "--" + key.replace("_", "-")
        if flag not in argv:
            out.extend([flag, str(value)])
    return out


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config(ap, argv)
        args = ap.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch())
