"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The full-resolution scan configuration (z in [-10, 0], 20000 intervals,
h = 5e-4) is computed once and shared; the evolution runs reuse one
delta = 0.01 trajectory for both the conservation and the orbital
criteria.
"""

import time

import numpy as np
import pytest

from conftest import record_criterion
from kinkstab import evolution as ev
from kinkstab import linalg
from kinkstab.discretize import GridSpec, PAPER_Z_GRID, assemble_LR_z
from kinkstab.errors import CriterionFailure
from kinkstab.profiles import (
    CUBIC_QUINTIC,
    NonlinearityParams,
    build_general_profile,
    cubic_quintic_profile,
    threshold_R0,
)
from kinkstab.spectra import (
    F_of_lambda,
    block_spectrum,
    constrained_ground_eigenvalue,
    criterion_row,
)

SCAN_R = [-6.0, -3.0, -1.0, 0.0, 0.2, 1.0, 3.0, 6.0]
PROF = cubic_quintic_profile()


@pytest.fixture(scope="module")
def paper_scan():
    criterion_row(0.0, GridSpec(-10.0, 0.0, 2000, var="z"))  # warm the compiled kernels
    rows, seconds = {}, {}
    for R in SCAN_R:
        t0 = time.perf_counter()
        rows[R] = criterion_row(R, PAPER_Z_GRID)
        seconds[R] = time.perf_counter() - t0
    return rows, seconds


@pytest.fixture(scope="module")
def orbital_runs():
    return {
        delta: ev.stability_experiment(delta, shape="gaussian-re", T=50.0, dt=0.005, R=1.0)
        for delta in (0.02, 0.01, 0.005)
    }


def test_criterion_signs(paper_scan):
    rows, seconds = paper_scan
    ok = all(rows[R].ok and rows[R].lambda1 < 0.0 and rows[R].F0 < 0.0 for R in SCAN_R)
    slowest = max(seconds.values())
    ok_time = slowest < 10.0
    detail = (
        f"lambda1 in [{min(r.lambda1 for r in rows.values()):.3e}, "
        f"{max(r.lambda1 for r in rows.values()):.3e}], all F0 < 0, "
        f"slowest row {slowest:.2f}s"
    )
    assert record_criterion("criterion signs at paper resolution (8 Rs, <10 s each)", ok and ok_time, detail)


def test_limit_values(paper_scan):
    rows, _ = paper_scan
    refined = {R: criterion_row(R, GridSpec(-10.0, 0.0, 40000, var="z")) for R in (-6.0, 6.0)}
    d_minus = abs(rows[-6.0].product - 0.5)
    d_plus = abs(rows[6.0].product - 0.25)
    d_minus_ref = abs(refined[-6.0].product - 0.5)
    d_plus_ref = abs(refined[6.0].product - 0.25)
    ok = (
        d_minus < 0.02
        and d_plus < 0.02
        and d_minus_ref < d_minus
        and d_plus_ref < d_plus
    )
    detail = (
        f"product(-6)={rows[-6.0].product:.8f} (refined dist {d_minus:.6e}->{d_minus_ref:.6e}), "
        f"product(+6)={rows[6.0].product:.8f} (dist {d_plus:.3e}->{d_plus_ref:.3e})"
    )
    assert record_criterion("limit values 1/2 and 1/4 with refinement moving closer", ok, detail)


def test_higher_eigenvalues(paper_scan):
    rows, _ = paper_scan
    floor = min(min(rows[R].lambda2, rows[R].lambda3) for R in SCAN_R)
    ok = floor >= 1.0 - 2e-3
    assert record_criterion(
        "second and third eigenvalues at or above the band", ok, f"min(lambda2, lambda3) = {floor:.6f}"
    )


def test_block_spectrum():
    spec = block_spectrum(grid=GridSpec(-20.0, 20.0, 2000, var="x"))
    mu = np.sort(spec.mu_values)
    m_scale = float(np.abs(mu).max())
    purely_imaginary = spec.max_abs_re == 0.0 and all(re == 0.0 for re, _ in spec.eigenvalues)
    honest_psd = spec.mu_min >= -1e-8 * m_scale
    # translation kernel: exactly one mu within 1e-6 of zero, realized by the
    # sampled phi' direction.  The phase kernel phi is not square-integrable
    # against the truncated Dirichlet box (the kink's non-decaying side), so
    # it cannot and does not contribute a second zero; no spurious mu appears
    # below the quantized band either.
    kernel_ok = (
        spec.kernel_mu_count == 1
        and abs(spec.phi_prime_rayleigh) < 1e-6
        and not ((mu > 1e-6) & (mu < 1e-3)).any()
    )
    ok = purely_imaginary and honest_psd and kernel_ok
    detail = (
        f"min mu = {spec.mu_min:.2e} (pre-clip), L+ min = {spec.lplus_min:.2e}, "
        f"kernel zeros = {spec.kernel_mu_count} (translation; phase mode not "
        f"L^2-representable on the truncated line), next mu = {mu[1]:.3e}"
    )
    assert record_criterion("block spectrum purely imaginary with kernel bookkeeping", ok, detail)


def test_kernel_residuals():
    sups = {"plus": [], "minus": []}
    for n in (1000, 2000, 4000):
        grid = GridSpec(-20.0, 20.0, n, var="x")
        x = grid.nodes()
        h = grid.h
        phi = PROF.phi(x)
        for which, f in (("plus", PROF.phi_prime(x)), ("minus", phi)):
            v = CUBIC_QUINTIC.v_plus(phi) if which == "plus" else CUBIC_QUINTIC.v_minus(phi)
            resid = -(f[2:] - 2 * f[1:-1] + f[:-2]) / h**2 + v[1:-1] * f[1:-1]
            sups[which].append(np.max(np.abs(resid)))
    ratios = [sups[w][i] / sups[w][i + 1] for w in ("plus", "minus") for i in range(2)]
    ok = all(r >= 3.4 for r in ratios)
    assert record_criterion(
        "kernel residuals shrink at second order", ok, f"halving ratios {[f'{r:.2f}' for r in ratios]}"
    )


def test_energy_decomposition_identity():
    grid = GridSpec(-40.0, 40.0, 8192, var="x")
    x = grid.nodes()
    worst_split = worst_global = 0.0
    t0 = time.perf_counter()
    for seed in range(20):
        rng = np.random.default_rng(seed)
        u = np.zeros_like(x)
        v = np.zeros_like(x)
        for arr in (u, v):
            for _ in range(3):
                arr += rng.uniform(-1, 1) * np.exp(-0.5 * ((x - rng.uniform(-8, 8)) / rng.uniform(0.8, 2.0)) ** 2)
        u *= 0.05 / max(1.0, np.abs(u).max())
        v *= 0.05 / max(1.0, np.abs(v).max())
        rep = ev.decomposition_check(u, v, rng.uniform(-1.0, 2.0), grid, PROF)
        worst_split = max(worst_split, rep.rel_mismatch_split)
        worst_global = max(worst_global, rep.rel_mismatch_global)
    elapsed = time.perf_counter() - t0
    ok = worst_split < 1e-10 and worst_global < 1e-10 and elapsed < 5.0
    detail = f"worst split {worst_split:.2e}, worst global {worst_global:.2e}, {elapsed:.2f}s for 20 seeds"
    assert record_criterion("energy-decomposition identity to 1e-10", ok, detail)


def test_stationarity_and_conservation(orbital_runs):
    grid = GridSpec(-10.0, 10.0, 8192, var="x")
    st = ev.kink_state(PROF, grid)
    out = ev.step_cn(st, 0.01, n_steps=1000)
    sup_dev = float(np.abs(out.psi - st.psi).max())

    drift = orbital_runs[0.01].energy_drift

    pert = ev.kink_state(PROF, grid, 0.01 * np.exp(-0.5 * grid.nodes() ** 2))
    fwd = ev.step_cn(pert, 0.005, n_steps=100)
    back = ev.step_cn(fwd, -0.005, n_steps=100)
    rev = float(np.abs(back.psi - pert.psi).max())

    ok = sup_dev < 1e-6 and drift < 1e-6 and rev < 1e-8
    detail = f"stationary sup {sup_dev:.2e}, relative drift {drift:.2e}, reversibility {rev:.2e}"
    assert record_criterion("stationarity, conservation, reversibility", ok, detail)


def test_orbital_stability(orbital_runs):
    verdicts = {d: r.verdict_max_ratio for d, r in orbital_runs.items()}
    c_fixed = max(verdicts.values())
    independence = c_fixed / min(verdicts.values())
    constraints = max(r.fit_residual_max for r in orbital_runs.values())
    x1_ok = all(r.x1_bounded for r in orbital_runs.values())
    ok = independence <= 2.0 and constraints < 1e-9 and x1_ok
    detail = (
        f"C = {c_fixed:.4f} (max rho_mod/delta^2 across deltas "
        f"{ {d: round(v, 4) for d, v in verdicts.items()} }), spread {independence:.3f}x, "
        f"max fit residual {constraints:.1e}"
    )
    assert record_criterion("orbital stability with one delta-independent constant", ok, detail)


def test_F_structure_ladder():
    op = assemble_LR_z(0.2, PAPER_Z_GRID)
    pairs = linalg.lowest_eigenpairs(op, 2)
    lam1 = pairs[0].value
    hi = min(pairs[1].value, 1.0)
    ladder = np.linspace(-0.95, hi - 1e-3, 20)
    vals = [F_of_lambda(0.2, lam, op=op, ground=pairs[0]) for lam in ladder]
    left = [v for lam, v in zip(ladder, vals) if lam < lam1 - 1e-3]
    right = [v for lam, v in zip(ladder, vals) if lam > lam1 + 1e-3]
    increasing = all(a < b for a, b in zip(left, left[1:])) and all(
        a < b for a, b in zip(right, right[1:])
    )
    f_minus50 = F_of_lambda(0.2, -50.0, op=op, ground=pairs[0])
    ok = increasing and 0.0 < f_minus50 < 0.05
    detail = f"monotone on both sides of the pole, F(-50) = {f_minus50:.4f}"
    assert record_criterion("resolvent scalar structure (ladder, F(-50))", ok, detail)


def test_F_constrained_roots():
    """Root of F in (0, min(lambda2, 1)) for R in {-1, 0.2, 1}.

    At R = -1 the resolvent stays negative all the way to the band edge
    (F(1-) ~ -0.42, truncation-converged), so no root below min(lambda2, 1)
    exists; the coercivity constant there is the band-edge value instead.
    The criterion is asserted as stated and this part fails honestly; see
    the decisions ledger.
    """
    grid = GridSpec(-20.0, 0.0, 40000, var="z")
    results = {}
    for R in (-1.0, 0.2, 1.0):
        try:
            lam0 = constrained_ground_eigenvalue(R, grid)
            pairs = linalg.lowest_eigenpairs(assemble_LR_z(R, grid), 2)
            results[R] = (0.0 < lam0 < min(pairs[1].value, 1.0), f"lambda0 = {lam0:.6f}")
        except CriterionFailure as exc:
            results[R] = (False, f"no root below the band edge ({exc})")
    ok = all(flag for flag, _ in results.values())
    detail = "; ".join(f"R={R}: {msg}" for R, (_, msg) in results.items())
    record_criterion("constrained ground eigenvalue in (0, min(lambda2, 1))", ok, detail)
    assert results[0.2][0] and results[1.0][0]
    assert ok, "R=-1 has no resolvent root below the band edge (documented spec defect)"


def test_general_power_reduction():
    built = build_general_profile(CUBIC_QUINTIC, x_span=(-25.0, 25.0), h=1e-3)
    x = np.linspace(-20.0, 20.0, 4001)
    sup = float(np.max(np.abs(built.phi(x) - PROF.phi(x))))

    details = [f"(2,4) sup dev {sup:.2e}"]
    ok = sup < 1e-8
    for p, q in ((2.0, 5.0), (3.0, 6.0)):
        params = NonlinearityParams(p, q)
        profile = build_general_profile(params)
        phi = profile.table_phi
        phip = profile.phi_prime(profile.table_x)
        invariant = float(np.max(np.abs(phip**2 - phi**2 * params.g(phi))))
        r0 = threshold_R0(params, profile)
        thresh = abs(profile.phi(r0) ** (q - p) - (p + 2.0) / (q + 2.0))
        ok = ok and invariant < 1e-10 and thresh < 1e-10
        details.append(f"({p:.0f},{q:.0f}) invariant {invariant:.1e}, threshold {thresh:.1e}")
    assert record_criterion("general-power profiles reduce and satisfy the invariants", ok, "; ".join(details))
