"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from hckernels import harish_chandra as hc
from hckernels import verify as vf
from hckernels.kernel_eval import MultiplierSpec, kernel_grid, oscillatory_kernel
from hckernels.root_system import a2, from_name, real_hyperbolic, sample_regular
from hckernels.special_functions import log_gamma

CATALOG = ["h2", "h3", "h5", "ch2", "ch3", "qh2", "a2", "a2:2", "b2", "bc2"]


def _wrap(d):
    """Reduce the imaginary part of a log difference modulo 2 pi."""
    return d.real + 1j * (np.mod(d.imag + np.pi, 2 * np.pi) - np.pi)


def test_criterion_1_log_gamma_identities(criteria):
    rng = np.random.default_rng(1)
    z = rng.uniform(-30, 30, 10_000) + 1j * rng.uniform(-30, 30, 10_000)
    t0 = time.perf_counter()
    lg = log_gamma(z)
    rec = np.abs(log_gamma(z + 1) - lg - np.log(z))
    refl = np.abs(_wrap(lg + log_gamma(1 - z) - (np.log(np.pi) - np.log(np.sin(np.pi * z)))))
    elapsed = time.perf_counter() - t0
    worst = max(rec.max(), refl.max())
    ok = worst < 1e-11 and elapsed < 5
    criteria.record(1, "log_gamma recurrence/reflection", ok,
                    f"max err {worst:.2e} (tol 1e-11), {elapsed:.2f}s (limit 5s)")
    assert ok


def test_criterion_2_c_function_contract(criteria):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst_norm = worst_conj = worst_weyl = 0.0
    for name in CATALOG:
        datum = from_name(name)
        worst_norm = max(worst_norm, abs(hc.c_function(datum, -1j * datum.rho).value - 1))
        lam = np.array(sample_regular(datum, rng, 1000))
        c = hc.c_values(datum, lam)
        # conjugation: c(-lambda) = conj c(lambda) for real lambda
        worst_conj = max(worst_conj, float(np.max(np.abs(hc.c_values(datum, -lam) - np.conj(c)) / np.abs(c))))
        dens = hc.plancherel_density(datum, lam)
        for s in datum.weyl_group:
            d_s = hc.plancherel_density(datum, lam @ s.T)
            worst_weyl = max(worst_weyl, float(np.max(np.abs(d_s - dens) / dens)))
    h2 = real_hyperbolic(2)
    x = np.linspace(0.5, 20, 400)
    shape = hc.plancherel_density(h2, x[:, None]) / (x * np.tanh(np.pi * x))
    shape_spread = float(shape.max() / shape.min() - 1)
    elapsed = time.perf_counter() - t0
    ok = worst_norm < 1e-12 and worst_conj < 1e-10 and worst_weyl < 1e-10 and shape_spread < 1e-6 and elapsed < 10
    criteria.record(2, "c-function contract", ok,
                    f"|c(-i rho)-1| {worst_norm:.1e}, conj {worst_conj:.1e}, Weyl {worst_weyl:.1e}, "
                    f"h2 shape spread {shape_spread:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_series_vs_oracle(criteria):
    t0 = time.perf_counter()
    lams = np.linspace(0.1, 20, 12)
    rs = np.linspace(0.5, 10, 8)
    worst_rel = 0.0
    for n in (2, 3):
        datum = real_hyperbolic(n)
        u = datum.simple_roots[0] / datum.norm(datum.simple_roots[0])
        for lam in lams:
            for r in rs:
                series = hc.spherical_function(datum, [lam], r * u)
                oracle = hc.spherical_oracle_rank1(datum, lam, r)
                worst_rel = max(worst_rel, abs(series - oracle) / abs(oracle))

    # eigen-equation residuals; central differences resolve 1e-5 only for
    # moderate eigenvalues, so the spectral range is lambda <= 2
    worst_res = 0.0
    for n in (2, 3):
        datum = real_hyperbolic(n)
        u = datum.simple_roots[0] / datum.norm(datum.simple_roots[0])
        for lam in (0.1, 0.7, 1.3, 2.0):
            f_series = lambda H, lam=lam, d=datum: hc.spherical_function(d, [lam], H)
            f_oracle = lambda H, lam=lam, d=datum, u=u: hc.spherical_oracle_rank1(d, lam, float(H @ u))
            for r in (0.5, 2.0, 5.0, 10.0):
                for f in (f_series, f_oracle):
                    worst_res = max(worst_res, hc.eigen_residual(datum, f, r * u, [lam]))
    datum = a2()
    for lam in ([0.4, 0.9], [1.1, -0.3], [0.2, 1.5]):
        f = lambda H, lam=lam: hc.spherical_function(datum, lam, H)
        for H in ([1.0, 1.5], [2.0, 2.0], [0.5, 2.0], [3.0, 3.0]):
            worst_res = max(worst_res, hc.eigen_residual(datum, f, np.array(H), lam))
    elapsed = time.perf_counter() - t0
    ok = worst_rel < 1e-6 and worst_res < 1e-5 and elapsed < 120
    criteria.record(3, "spherical series vs K-integral", ok,
                    f"max rel err {worst_rel:.1e} (tol 1e-6), max residual {worst_res:.1e} (tol 1e-5), {elapsed:.1f}s")
    assert ok


def _h3_heat(r, t):
    # heat kernel of the shifted Laplacian on H^3, up to a constant factor
    r = np.asarray(r, dtype=float)
    shape = np.where(r == 0, 1.0, r / np.sinh(np.where(r == 0, 1.0, r)))
    return t ** -1.5 * shape * np.exp(-r * r / (4 * t))


def test_criterion_4_h3_heat_ratios(criteria):
    t0 = time.perf_counter()
    datum = real_hyperbolic(3)
    u = datum.simple_roots[0] / datum.norm(datum.simple_roots[0])
    rs = np.array([1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0])
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        samples = kernel_grid(datum, MultiplierSpec.heat(t), [r * u for r in rs], tol=1e-30, rtol=1e-12)
        k = np.array([s.k_delta_rho for s in samples])
        exact = _h3_heat(rs, t)
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                ratio = (k[i] / k[j]) / (exact[i] / exact[j])
                worst = max(worst, abs(ratio - 1))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 60
    criteria.record(4, "H^3 heat kernel two-point ratios", ok,
                    f"max |ratio - 1| {worst:.1e} (tol 1e-4), {elapsed:.1f}s")
    assert ok


HEAT_TIMES = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0]
WAVE_TIMES = [1.0, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0]


@pytest.mark.parametrize("family", ["heat", "wave"])
def test_criterion_5_uniform_bound_families(criteria, family):
    t0 = time.perf_counter()
    spreads, finite = {}, True
    for name in ("h2", "h3"):
        datum = from_name(name)
        if family == "heat":
            members = [MultiplierSpec.heat(t) for t in HEAT_TIMES]
            grid = vf.default_grid(datum)
        else:
            members = [MultiplierSpec.wave(t, 8.0) for t in WAVE_TIMES]
            # the wavefront sits near |H| = t, so the grid must reach past the largest time
            grid = vf.default_grid(datum, r_max=55.0, step=0.1)
        rep = vf.verify_uniform(datum, members, vf.BoundConfig(H_grid=grid))
        finite &= all(math.isfinite(r.sup_ratio) and r.sup_ratio > 0 for r in rep.reports)
        spreads[name] = rep.spread
    elapsed = time.perf_counter() - t0
    ok = finite and all(s < 100 for s in spreads.values())
    criteria.record(5, f"uniform bound, {family} family", ok,
                    f"ratios finite: {finite}, spread h2 {spreads['h2']:.3g}, h3 {spreads['h3']:.3g} "
                    f"(limit 100), {elapsed:.1f}s")
    assert finite
    assert all(s < 100 for s in spreads.values())


def test_criterion_6_pointwise_bound(criteria):
    t0 = time.perf_counter()
    worst_ratio, worst_tail, tail_growth = 0.0, 0.0, 0.0
    for name in ("h2", "h3"):
        datum = from_name(name)
        grid = vf.default_grid(datum)
        norms = np.array([np.linalg.norm(H) for H in grid])
        near = norms <= vf.FAR_RANGE[0]
        far = vf.far_mask(grid)
        for F in (MultiplierSpec.heat(1.0), MultiplierSpec.resolvent(6.0, 1.0), MultiplierSpec.wave(5.0, 8.0)):
            rep = vf.verify_pointwise(datum, F, H_grid=grid)
            ratios = rep.abs_k_L() / rep.I_F
            C = vf.fit_constant(ratios[near])
            worst_ratio = max(worst_ratio, float(ratios.max() / C))
            worst_tail = max(worst_tail, rep.tail_ratio)
            # the far tail against the limsup integral must not grow with |H|
            tail = rep.abs_k_L()[far] / rep.I_F_limsup
            half = len(tail) // 2
            tail_growth = max(tail_growth, float(tail[half:].max() / tail[:half].max()))
    elapsed = time.perf_counter() - t0
    ok = worst_ratio <= 1.0 and math.isfinite(worst_tail) and tail_growth <= 1.0 and elapsed < 120
    criteria.record(6, "pointwise bound with fitted C", ok,
                    f"max ratio/C {worst_ratio:.3g} (<= 1), far ratio {worst_tail:.3g}, "
                    f"tail growth {tail_growth:.3g} (<= 1), {elapsed:.1f}s")
    assert ok


def test_criterion_7_lower_bound(criteria):
    t0 = time.perf_counter()
    datum = real_hyperbolic(2)
    t_list = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]
    rep = vf.verify_lower(datum, 6.0, t_list)
    elapsed = time.perf_counter() - t0
    fft_rel = abs(rep.nu_fft / rep.nu - 1)
    late = np.array([v for t, v in rep.trace if t >= 20])
    stab = float((late.max() - late.min()) / late.mean())
    nd = min(v for t, v in rep.grid_sup if t >= 10) / rep.nu
    i2 = max(b for t, b in rep.i2_bounds if t >= 20) / rep.nu
    ok = (rep.nu > 0 and fft_rel < 1e-4 and stab < 0.01 and rep.limit_estimate >= 0.95 * rep.nu
          and nd >= 0.5 and i2 < 1e-3 and elapsed < 300)
    criteria.record(7, "rank-one lower bound", ok,
                    f"nu {rep.nu:.6g}, FFT rel diff {fft_rel:.1e}, trace spread on [20,50] {stab:.1e}, "
                    f"limit/nu {rep.ratio:.4g}, non-decay {nd:.3g}, I2/nu {i2:.1e}, {elapsed:.1f}s")
    assert ok


MANIFESTS = [
    ["cfun", "--space", "h2", "--lmax", "10"],
    ["cfun", "--space", "a2", "--n", "50"],
    ["cfun", "--space", "h2", "--lambda=-i*rho"],
    ["sph", "--space", "h3", "--lambda", "1.5", "--grid", "0:5:11"],
    ["sph", "--space", "a2", "--lambda", "1,0.3", "--grid", "1,1.5;2,2"],
    ["kernel", "--space", "h3", "--multiplier", "heat:1", "--grid", "0:8:9"],
    ["kernel", "--space", "h2", "--multiplier", "wave:3,6", "--grid", "0.5:6:12", "--format", "json"],
    ["verify-uniform", "--space", "h2", "--family", "heat:0.5;heat:1", "--grid", "0:10:21"],
    ["verify-pointwise", "--space", "h3", "--multiplier", "resolvent:6,1", "--grid", "0.5:30:60"],
    ["verify-lower", "--space", "h2", "--kappa", "6", "--tmin", "10", "--tmax", "20", "--tstep", "10"],
]


def _run(argv, out):
    proc = subprocess.run([sys.executable, "-m", "hckernels", *argv, "--out", str(out)],
                          capture_output=True, check=False)
    files = {p.name: p.read_bytes() for p in sorted(out.iterdir())} if out.exists() else {}
    return proc.returncode, proc.stdout, files


def test_criterion_8_cli_determinism(criteria, tmp_path):
    mismatched = []
    for i, argv in enumerate(MANIFESTS):
        first = _run(argv, tmp_path / f"m{i}a")
        second = _run(argv, tmp_path / f"m{i}b")
        if first != second or first[0] == 2 or not first[2]:
            mismatched.append(" ".join(argv[:3]))
    ok = not mismatched
    criteria.record(8, "CLI determinism", ok,
                    f"{len(MANIFESTS) - len(mismatched)}/{len(MANIFESTS)} manifests byte-identical"
                    + (f"; differing: {mismatched}" if mismatched else ""))
    assert ok
