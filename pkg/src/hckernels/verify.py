"""Numerical checks of the uniform, pointwise and lower kernel bounds.

The uniform and pointwise checks compare |k_L(H)| = e^{rho(H)} |k_{F(Delta_rho)}(exp H)|
with the weighted norm

    I_F = int_{a*} |F(|lambda|^2)| (1 + |lambda|)^power dlambda

on grids of chamber points (by K-biinvariance the supremum over the group
reduces to the closed chamber).  The lower-bound check follows the wave
family e^{it sqrt(x)} psi(sqrt(x)) in rank one along H = t + a0, where the
kernel tends to a multiple of the Fourier transform of psi / c on [0, inf).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from . import harish_chandra as hc
from .kernel_eval import (
    MultiplierSpec,
    cutoff_radius,
    kernel_grid,
    oscillatory_kernel,
    radial_moment,
)
from .quadrature import filon
from .root_system import ChamberPoint, RootDatum

EXPONENT_MODES = ("sharp_6d", "coarse_7", "limsup")
FAR_RANGE = (10.0, 30.0)


def exponent_power(datum: RootDatum, mode: str) -> int:
    """sharp_6d: 6d + n - l + 1; coarse_7: 7(n - l) + 1; limsup: n - l."""
    nl = datum.n_minus_l
    if mode == "sharp_6d":
        return 6 * datum.d + nl + 1
    if mode == "coarse_7":
        return 7 * nl + 1
    if mode == "limsup":
        return nl
    raise ValueError(f"unknown exponent mode {mode!r}")


def compute_I_F(datum: RootDatum, F: MultiplierSpec, exponent_mode: str = "sharp_6d", tol: float = 1e-10) -> float:
    """vol(S^{l-1}) int_0^inf |F(r^2)| (1 + r)^power r^{l-1} dr; raises DivergenceError if infinite."""
    power = exponent_power(datum, exponent_mode)
    value, _ = radial_moment(F, power, datum.rank, tol=tol)
    return value


# -- grids --------------------------------------------------------------------

def default_grid(datum: RootDatum, r_max: float = 30.0, step: float = 0.05, n_angles: int = 5,
                 include_origin: bool = True, eta_min: float = hc.ETA_MIN) -> list:
    """Rank one: r in {step * j} up to r_max (plus the origin).  Rank two: rays
    through the chamber interior at ``n_angles`` angles, radii in steps of 1,
    keeping points at least ``eta_min`` from the walls."""
    pts = []
    if include_origin:
        pts.append(np.zeros(datum.rank))
    if datum.rank == 1:
        u = datum.simple_roots[0] / np.linalg.norm(datum.simple_roots[0])
        n = int(round(r_max / step))
        pts += [np.round(step * j, 12) * u for j in range(1, n + 1)]
    else:
        # chamber of a: directions dual to the simple roots
        w = np.linalg.inv(datum.simple_roots)  # columns w_i with alpha_j(w_i) = delta_ij
        w = w / np.linalg.norm(w, axis=0)
        for k in range(n_angles):
            s = (k + 1) / (n_angles + 1)
            d = (1 - s) * w[:, 0] + s * w[:, 1]
            d = d / np.linalg.norm(d)
            for r in np.arange(1.0, r_max + 0.5, 1.0):
                H = r * d
                if datum.wall_distance(H) >= eta_min:
                    pts.append(H)
    return pts


def far_mask(Hs, lo: float = FAR_RANGE[0], hi: float = FAR_RANGE[1]):
    norms = np.array([np.linalg.norm(H) for H in Hs])
    return (norms >= lo) & (norms <= hi)


# -- reports ------------------------------------------------------------------

@dataclass
class BoundConfig:
    exponent_mode: str = "sharp_6d"
    H_grid: list = field(default_factory=list)  # chamber points; empty -> default grid
    tol: float = 1e-10  # relative to I_F
    method: str = "chamber"

    def __post_init__(self):
        if self.exponent_mode not in EXPONENT_MODES:
            raise ValueError(f"exponent_mode must be one of {EXPONENT_MODES}")

    def grid(self, datum):
        if self.H_grid:
            return [H.array if isinstance(H, ChamberPoint) else np.atleast_1d(np.asarray(H, float)) for H in self.H_grid]
        return default_grid(datum)


@dataclass
class BoundReport:
    multiplier: str
    I_F: float
    I_F_limsup: float
    sup_ratio: float
    tail_ratio: float
    table: list  # rows: (H..., |k_L|, |k_delta_rho|, quad_error)

    def abs_k_L(self):
        return np.array([row[-3] for row in self.table])

    def to_dict(self):
        d = asdict(self)
        d["table"] = [list(row) for row in self.table]
        return d


@dataclass
class FamilyReport:
    reports: list
    spread: float  # max / min of sup_ratio across the family

    def to_dict(self):
        return {"spread": self.spread, "reports": [r.to_dict() for r in self.reports]}


def _safe_ratio(num, den):
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def _bound_report(datum, F, Hs, cfg: BoundConfig) -> BoundReport:
    I_F = compute_I_F(datum, F, cfg.exponent_mode) if F.kind != "zero" else 0.0
    I_lim = compute_I_F(datum, F, "limsup") if F.kind != "zero" else 0.0
    tol = cfg.tol * max(I_lim, 1e-300)
    samples = kernel_grid(datum, F, Hs, tol=tol, method=cfg.method)
    table = []
    for H, s in zip(Hs, samples):
        table.append(tuple(float(h) for h in H) + (float(abs(s.k_L)), float(abs(s.k_delta_rho)), float(s.quad_error)))
    kL = np.array([row[-3] for row in table])
    far = far_mask(Hs)
    sup_ratio = _safe_ratio(float(kL.max()), I_F)
    tail_ratio = _safe_ratio(float(kL[far].max()), I_lim) if np.any(far) else 0.0
    return BoundReport(str(F), I_F, I_lim, sup_ratio, tail_ratio, table)


def family_spread(ratios) -> float:
    ratios = np.asarray(ratios, dtype=float)
    if np.all(ratios == 0):
        return 1.0
    if np.any(ratios == 0):
        return math.inf
    return float(ratios.max() / ratios.min())


def verify_uniform(datum: RootDatum, family, cfg: BoundConfig | None = None) -> FamilyReport:
    """sup over the grid of |k_L| / I_F for each multiplier, and the spread across the family."""
    cfg = cfg or BoundConfig()
    Hs = cfg.grid(datum)
    reports = [_bound_report(datum, F, Hs, cfg) for F in family]
    return FamilyReport(reports, family_spread([r.sup_ratio for r in reports]))


def verify_pointwise(datum: RootDatum, F: MultiplierSpec, H_grid=None, cfg: BoundConfig | None = None) -> BoundReport:
    """Per-point e^{rho(H)} |k_{F(Delta_rho)}(exp H)| with the I_F ratios."""
    cfg = cfg or BoundConfig()
    if H_grid is not None:
        cfg = BoundConfig(cfg.exponent_mode, list(H_grid), cfg.tol, cfg.method)
    return _bound_report(datum, F, cfg.grid(datum), cfg)


def fit_constant(ratios, safety: float = 2.0) -> float:
    """Constant C covering a set of observed ratios with a safety factor."""
    return safety * float(np.max(ratios))


# -- lower bound --------------------------------------------------------------

@dataclass
class LowerBoundReport:
    kappa: float
    nu: float  # sup_a |F psi~(a)|
    a0: float
    nu_fft: float
    a0_fft: float
    trace: list  # (t, |k_t(exp(t + a0))|)
    limit_estimate: float
    ratio: float  # limit_estimate / nu
    i2_bounds: list  # (t, bound on the series remainder at H = t + a0)
    grid_sup: list  # (t, max over the grid of |k_t|)

    def to_dict(self):
        return asdict(self)


def _psi_tilde(datum, kappa, amplitude):
    u = datum.roots[0] / datum.norm(datum.roots[0])

    def g(x):
        x = np.asarray(x, dtype=float)
        return amplitude * (1 + x * x) ** (-kappa) * hc.inverse_c_function(datum, x[..., None] * u)

    return g


def fourier_psi_tilde(datum: RootDatum, kappa: float, a, amplitude: float = 1.0, tol: float = 1e-13):
    """F psi~(a) = int_0^inf psi(x) c(x)^{-1} e^{-iax} dx at the abscissae ``a`` (Filon rule)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    g = _psi_tilde(datum, kappa, amplitude)
    F = MultiplierSpec.wave(0.0, kappa)
    c_half = math.sqrt(hc.density_growth_constant(datum))
    q = datum.n_minus_l / 2
    R = cutoff_radius(lambda R: abs(amplitude) * c_half * F.tail_mass(q, 1, R), 0.1 * tol)
    edges = np.linspace(0, R, 1 + max(4, int(math.ceil(R))))
    out = np.empty(len(a), dtype=complex)
    for i in range(0, len(a), 64):
        block = a[i:i + 64]
        res = filon(lambda x: np.repeat(g(x)[:, None], len(block), axis=1), -block, edges, atol=tol)
        out[i:i + 64] = res.value
    return out


def _fft_peak(datum, kappa, amplitude, dx=0.005, x_max=60.0, da=1e-3):
    """|F psi~| peak from a zero-padded FFT of trapezoid samples (psi~(0) = 0)."""
    g = _psi_tilde(datum, kappa, amplitude)
    n = int(round(x_max / dx)) + 1
    x = dx * np.arange(n)
    f = g(x).astype(complex)
    f[0] = 0.0  # 1/c(0) = 0; trapezoid end weights vanish there
    f[-1] *= 0.5
    n_pad = 1 << int(math.ceil(math.log2(2 * math.pi / (da * dx))))
    spectrum = dx * np.fft.fft(f, n_pad)
    freqs = 2 * math.pi * np.fft.fftfreq(n_pad, d=dx)
    nyquist = math.pi / dx
    mag = np.abs(spectrum)
    k = int(np.argmax(mag))
    if abs(freqs[k]) > 0.5 * nyquist:
        raise RuntimeError("FFT peak too close to the Nyquist frequency; refine dx")
    # parabolic refinement in log-magnitude
    y0, y1, y2 = np.log(mag[(k - 1) % n_pad]), np.log(mag[k]), np.log(mag[(k + 1) % n_pad])
    denom = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    step = freqs[1] - freqs[0]
    a0 = freqs[k] + shift * step
    peak = math.exp(y1 - 0.25 * (y0 - y2) * shift)
    return peak, a0


def verify_lower(datum: RootDatum, kappa: float, t_list, amplitude: float = 1.0, a_range: float = 20.0,
                 grid_step: float = 0.25, tol: float = 1e-10) -> LowerBoundReport:
    """nu = sup |F psi~|, its abscissa a0 and the trace |k_t(exp(t + a0))| over t_list."""
    if datum.rank != 1:
        raise ValueError("the lower-bound check is rank one only")
    if amplitude == 0:
        raise ValueError("psi vanishes identically; nu would be 0")
    if not kappa > (datum.dim + 7) / 2:
        raise ValueError(f"kappa must exceed (n + 7)/2 = {(datum.dim + 7) / 2:g}")

    # coarse grid, widened if the maximum sits on its boundary
    while True:
        a = np.arange(-a_range, a_range + 1e-12, 0.05)
        mag = np.abs(fourier_psi_tilde(datum, kappa, a, amplitude))
        k = int(np.argmax(mag))
        if 0 < k < len(a) - 1:
            break
        a_range *= 2
    res = optimize.minimize_scalar(
        lambda s: -abs(fourier_psi_tilde(datum, kappa, [s], amplitude)[0]),
        bracket=(a[k - 1], a[k], a[k + 1]), tol=1e-10,
    )
    a0 = float(res.x)
    nu = float(-res.fun)
    nu_fft, a0_fft = _fft_peak(datum, kappa, amplitude)

    growth = hc.coefficient_growth(datum)
    u = datum.roots[0] / datum.norm(datum.roots[0])
    alpha_len = float(datum.norm(datum.simple_roots[0]))
    psi_c, _ = radial_moment(MultiplierSpec.wave(0.0, kappa), datum.n_minus_l / 2, 1, tol=1e-8)
    psi_c *= math.sqrt(hc.density_growth_constant(datum)) * abs(amplitude)

    trace, i2, grid_sup = [], [], []
    for t in t_list:
        F = MultiplierSpec.wave(float(t), kappa)
        H = (t + a0) * u
        s = oscillatory_kernel(datum, F, H, tol=tol)
        trace.append((float(t), float(abs(amplitude * s.k_L))))
        alpha_H = alpha_len * (t + a0)
        # |Phi - 1| <= sum_{m >= 1} C m^p e^{-m alpha(H)}; both Weyl terms, both signs of x
        i2.append((float(t), float(2 * psi_c * 2 * growth.tail(0, alpha_H, 1))))
        r_max = max(30.0, t + a0 + 5.0)
        grid = default_grid(datum, r_max=r_max, step=0.25, include_origin=True)
        samples = kernel_grid(datum, F, grid, tol=tol)
        grid_sup.append((float(t), float(abs(amplitude) * max(abs(x.k_L) for x in samples))))
    tail = [v for t, v in trace if t >= 20] or [v for _, v in trace]
    limit = float(np.mean(tail))
    return LowerBoundReport(float(kappa), nu, a0, float(nu_fft), float(a0_fft), trace, limit,
                            limit / nu, i2, grid_sup)


# -- serialisation ------------------------------------------------------------

def fmt(x) -> str:
    """17 significant digits, stable across runs."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def table_csv(report: BoundReport, rank: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"H{i + 1}" for i in range(rank)] + ["abs_k_L", "abs_k_delta_rho", "quad_error"])
    for row in report.table:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return str(v)
        return float(fmt(v))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(report) -> str:
    return json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=True) + "\n"
